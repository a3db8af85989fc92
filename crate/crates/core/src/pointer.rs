//! Quality-factor / precision trade-offs of weak-measurement pointers.
//!
//! A pointer family fixes the quality factor `F` (how little the measured
//! qudit is disturbed) as a function of the precision `G` (how much
//! information the reading gives). Precision is the independent variable
//! throughout the crate.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::mub::ProjectorSet;

/// Slack allowed on `F^2 + G^2 <= 1`.
pub const TRADE_OFF_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointerKind {
    /// Unsharp POVM `λ Π + (1 - λ) 1/d` read as a pointer with `G = λ`.
    Unsharp,
    /// Saturates `F^2 + G^2 = 1`.
    Optimal,
    /// `F + G = 1`.
    Square,
    /// User-supplied tabulated curve.
    Custom,
}

impl PointerKind {
    pub const BUILT_IN: [PointerKind; 3] =
        [PointerKind::Unsharp, PointerKind::Optimal, PointerKind::Square];

    pub fn as_str(self) -> &'static str {
        match self {
            PointerKind::Unsharp => "unsharp",
            PointerKind::Optimal => "optimal",
            PointerKind::Square => "square",
            PointerKind::Custom => "custom",
        }
    }
}

impl fmt::Display for PointerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PointerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unsharp" => Ok(PointerKind::Unsharp),
            "optimal" => Ok(PointerKind::Optimal),
            "square" => Ok(PointerKind::Square),
            "custom" => Ok(PointerKind::Custom),
            other => Err(format!(
                "unknown pointer '{other}' (expected unsharp, optimal, square, custom)"
            )),
        }
    }
}

/// Piecewise-linear `G -> F` table with strictly increasing `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityCurve {
    points: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct CurveRow {
    #[serde(rename = "G")]
    g: f64,
    #[serde(rename = "F")]
    f: f64,
}

impl QualityCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Curve("need at least two points".into()));
        }
        for (k, &(g, f)) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&g) || !(0.0..=1.0).contains(&f) {
                return Err(Error::Curve(format!("row {k}: ({g}, {f}) outside [0,1]^2")));
            }
            if f * f + g * g > 1.0 + TRADE_OFF_TOL {
                return Err(Error::Curve(format!("row {k}: F^2 + G^2 > 1")));
            }
        }
        for (k, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::Curve(format!("row {}: G not strictly increasing", k + 1)));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::Curve(format!("row {}: F increases with G", k + 1)));
            }
        }
        Ok(QualityCurve { points })
    }

    /// Reads a two-column `G,F` CSV with a header row.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "G" || &headers[1] != "F" {
            return Err(Error::Curve(format!(
                "expected header 'G,F', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for row in rdr.deserialize() {
            let row: CurveRow = row?;
            points.push((row.g, row.f));
        }
        Self::new(points)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Linear interpolation; no extrapolation.
    pub fn eval(&self, g: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&g) {
            return Err(Error::CurveDomain { g, lo, hi });
        }
        let k = self.points.partition_point(|&(x, _)| x <= g);
        if k == self.points.len() {
            return Ok(self.points[k - 1].1);
        }
        let (g0, f0) = self.points[k - 1];
        let (g1, f1) = self.points[k];
        Ok(f0 + (f1 - f0) * (g - g0) / (g1 - g0))
    }
}

/// A pointer family, optionally carrying its tabulated curve.
#[derive(Clone, Debug)]
pub struct PointerModel {
    kind: PointerKind,
    curve: Option<Arc<QualityCurve>>,
}

impl PointerModel {
    pub fn unsharp() -> Self {
        Self::built_in(PointerKind::Unsharp)
    }

    pub fn optimal() -> Self {
        Self::built_in(PointerKind::Optimal)
    }

    pub fn square() -> Self {
        Self::built_in(PointerKind::Square)
    }

    fn built_in(kind: PointerKind) -> Self {
        PointerModel { kind, curve: None }
    }

    pub fn custom(curve: QualityCurve) -> Self {
        PointerModel {
            kind: PointerKind::Custom,
            curve: Some(Arc::new(curve)),
        }
    }

    /// Model for `kind`; `curve` is required for (and only used by) custom.
    pub fn from_kind(kind: PointerKind, curve: Option<QualityCurve>) -> Result<Self> {
        match (kind, curve) {
            (PointerKind::Custom, Some(c)) => Ok(Self::custom(c)),
            (PointerKind::Custom, None) => Err(Error::MissingCurve),
            (k, _) => Ok(Self::built_in(k)),
        }
    }

    pub fn kind(&self) -> PointerKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.as_str()
    }

    pub fn curve(&self) -> Option<&QualityCurve> {
        self.curve.as_deref()
    }

    pub fn quality(&self, d: u64, g: f64) -> Result<f64> {
        quality(self.kind, d, g, self.curve())
    }
}

/// Quality factor `F` at precision `G`.
pub fn quality(kind: PointerKind, d: u64, g: f64, curve: Option<&QualityCurve>) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidPrecision(g));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    match kind {
        PointerKind::Unsharp => Ok(unsharp_quality(d, g)),
        PointerKind::Optimal => Ok((1.0 - g * g).max(0.0).sqrt()),
        PointerKind::Square => Ok(1.0 - g),
        PointerKind::Custom => curve.ok_or(Error::MissingCurve)?.eval(g),
    }
}

fn unsharp_quality(d: u64, g: f64) -> f64 {
    let df = d as f64;
    let d1 = df - 1.0;
    let d2 = df - 2.0;
    // 1 + d2 G - d1 G^2 = (1 + d1 G)(1 - G)
    let radicand = ((1.0 + d1 * g) * (1.0 - g)).max(0.0);
    (d2 * (1.0 - g) + 2.0 * radicand.sqrt()) / df
}

/// Moduli of the diagonal (`u`) and off-diagonal (`v`) pointer amplitudes
/// `|φ_i> = u|i> + v sum_{k≠i} |k>` read out in the computational basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointerAmplitudes {
    pub u: f64,
    pub v: f64,
}

impl PointerAmplitudes {
    pub fn precision(&self, d: u64) -> f64 {
        1.0 - d as f64 * self.v * self.v
    }

    /// Largest quality factor reachable with these moduli (phases aligned).
    pub fn quality(&self, d: u64) -> f64 {
        2.0 * self.u * self.v + (d as f64 - 2.0) * self.v * self.v
    }
}

/// Pointer amplitudes saturating `(2uv + d2 v^2)^2 + (1 - d v^2)^2 = 1` at
/// precision `G = 1 - d v^2`.
///
/// With equal-modulus amplitudes the precision fixes `v`, and the trade-off
/// is then saturated only for `d = 2` or at the endpoints `G ∈ {0, 1}`; any
/// other request is reported as [`Error::Infeasible`].
pub fn optimal_amplitudes(d: u64, g: f64) -> Result<PointerAmplitudes> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidPrecision(g));
    }
    let df = d as f64;
    let v = ((1.0 - g) / df).sqrt();
    let u = (1.0 - (df - 1.0) * v * v).max(0.0).sqrt();
    let amps = PointerAmplitudes { u, v };
    let residual = amps.quality(d).powi(2) + amps.precision(d).powi(2) - 1.0;
    if residual.abs() > 1e-10 {
        return Err(Error::Infeasible(format!(
            "no equal-modulus pointer with F^2 + G^2 = 1 at d = {d}, G = {g} (best F^2 + G^2 - 1 = {residual:e})"
        )));
    }
    if (amps.precision(d) - g).abs() > 1e-10 {
        return Err(Error::NumericFailure("precision round trip failed".into()));
    }
    Ok(amps)
}

/// Pointer states of the unsharp measurement: `|φ_i> = sqrt(1 - d1 u^2)|i>
/// + u sum_{j≠i} |j>` with `u = sqrt((1 - λ)/d)`.
pub fn unsharp_pointer_states(d: usize, lambda: f64) -> Result<Vec<DVector<f64>>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d as u64));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidSharpness(lambda));
    }
    let u = ((1.0 - lambda) / d as f64).sqrt();
    let diag = (1.0 - (d as f64 - 1.0) * u * u).max(0.0).sqrt();
    Ok((0..d)
        .map(|i| DVector::from_fn(d, |k, _| if k == i { diag } else { u }))
        .collect())
}

/// `(F, G)` of a pointer family read out in the computational basis:
/// `F = <φ_0|φ_1>`, `G = 1 - d |<0|φ_1>|^2`.
pub fn pointer_quality_and_precision(states: &[DVector<f64>]) -> (f64, f64) {
    let d = states.len();
    let f = states[0].dot(&states[1]);
    let g = 1.0 - d as f64 * states[1][0].powi(2);
    (f, g)
}

/// Unsharp POVM elements and their square-root measurement operators.
#[derive(Clone, Debug)]
pub struct UnsharpPovm {
    pub elements: Vec<CMatrix>,
    pub operators: Vec<CMatrix>,
}

/// `E_i = λ Π_i + (1 - λ) 1/d`, `M_i = (sqrt((1 + d1 λ)/d) - sqrt((1 - λ)/d)) Π_i
/// + sqrt((1 - λ)/d) 1`.
pub fn unsharp_povm(lambda: f64, projectors: &ProjectorSet) -> Result<UnsharpPovm> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidSharpness(lambda));
    }
    let d = projectors.dim();
    let df = d as f64;
    let id = linalg::identity(d);
    let noise = ((1.0 - lambda) / df).sqrt();
    let signal = ((1.0 + (df - 1.0) * lambda) / df).sqrt();
    let elements = projectors
        .projectors()
        .iter()
        .map(|p| p.scale(lambda) + id.scale((1.0 - lambda) / df))
        .collect();
    let operators = projectors
        .projectors()
        .iter()
        .map(|p| p.scale(signal - noise) + id.scale(noise))
        .collect();
    Ok(UnsharpPovm {
        elements,
        operators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::BasisLabel;

    #[test]
    fn unsharp_qubit_point() {
        let f = quality(PointerKind::Unsharp, 2, 0.6, None).unwrap();
        assert!((f - 0.8).abs() < 1e-15);
        // Same value from the pointer states themselves.
        let states = unsharp_pointer_states(2, 0.6).unwrap();
        let (f_states, g_states) = pointer_quality_and_precision(&states);
        assert!((f_states - 0.8).abs() < 1e-12);
        assert!((g_states - 0.6).abs() < 1e-12);
    }

    #[test]
    fn unsharp_states_reproduce_closed_form() {
        for d in [2usize, 3, 4, 7, 12] {
            for k in 0..=20 {
                let lambda = k as f64 / 20.0;
                let states = unsharp_pointer_states(d, lambda).unwrap();
                let (f, g) = pointer_quality_and_precision(&states);
                let want = quality(PointerKind::Unsharp, d as u64, lambda, None).unwrap();
                assert!((f - want).abs() < 1e-12, "d={d} λ={lambda}");
                assert!((g - lambda).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simple_curves() {
        assert_eq!(quality(PointerKind::Optimal, 9, 1.0, None).unwrap(), 0.0);
        assert!((quality(PointerKind::Square, 7, 0.25, None).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(
            quality(PointerKind::Square, 7, 1.5, None),
            Err(Error::InvalidPrecision(_))
        ));
        assert!(matches!(
            quality(PointerKind::Custom, 7, 0.5, None),
            Err(Error::MissingCurve)
        ));
    }

    #[test]
    fn unsharp_large_d_approaches_square() {
        let f = quality(PointerKind::Unsharp, 1_000_000, 0.5, None).unwrap();
        assert!((f - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn built_in_curves_are_monotone_and_valid() {
        for kind in PointerKind::BUILT_IN {
            for d in 2..=50u64 {
                let mut prev = f64::INFINITY;
                for k in 0..=100 {
                    let g = k as f64 / 100.0;
                    let f = quality(kind, d, g, None).unwrap();
                    assert!(f <= prev + 1e-15, "{kind} d={d} g={g}");
                    assert!((0.0..=1.0 + 1e-15).contains(&f));
                    assert!(f * f + g * g <= 1.0 + TRADE_OFF_TOL, "{kind} d={d} g={g}");
                    prev = f;
                }
                assert!((quality(kind, d, 0.0, None).unwrap() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unsharp_is_optimal_for_qubits() {
        for k in 0..=100 {
            let g = k as f64 / 100.0;
            let a = quality(PointerKind::Unsharp, 2, g, None).unwrap();
            let b = quality(PointerKind::Optimal, 2, g, None).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn qubit_optimal_amplitudes() {
        for g in [0.1, 0.37, 0.5, 0.9] {
            let a = optimal_amplitudes(2, g).unwrap();
            assert!((a.v - ((1.0 - g) / 2.0).sqrt()).abs() < 1e-15);
            assert!((a.u - ((1.0 + g) / 2.0).sqrt()).abs() < 1e-15);
            assert!((a.quality(2) - (1.0 - g * g).sqrt()).abs() < 1e-12);
            assert!((a.u * a.u + a.v * a.v - 1.0).abs() < 1e-12);
            assert!((a.precision(2) - g).abs() < 1e-9);
        }
    }

    #[test]
    fn optimal_amplitudes_at_small_precision() {
        let a = optimal_amplitudes(5, 0.0).unwrap();
        assert!((a.v - 1.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equal_modulus_pointer_cannot_be_optimal_for_qutrits() {
        // Best reachable F^2 + G^2 at d = 3, G = 0.5 is 17/18.
        let err = optimal_amplitudes(3, 0.5).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let v = (0.5f64 / 3.0).sqrt();
        let u = (1.0 - 2.0 * v * v).sqrt();
        let a = PointerAmplitudes { u, v };
        let s = a.quality(3).powi(2) + a.precision(3).powi(2);
        assert!((s - 17.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn unsharp_povm_limits() {
        let p = ProjectorSet::canonical(3, BasisLabel::Fourier).unwrap();
        let sharp = unsharp_povm(1.0, &p).unwrap();
        for (e, pi) in sharp.elements.iter().zip(p.projectors()) {
            assert!(linalg::max_abs(&(e - pi)) < 1e-15);
        }
        let blind = unsharp_povm(0.0, &p).unwrap();
        for e in &blind.elements {
            assert!(linalg::max_abs(&(e - linalg::identity(3).scale(1.0 / 3.0))) < 1e-15);
        }
        let half = unsharp_povm(0.5, &p).unwrap();
        for e in &half.elements {
            assert!((e.trace().re - 1.0).abs() < 1e-12);
        }
        assert!(matches!(unsharp_povm(1.2, &p), Err(Error::InvalidSharpness(_))));
    }

    #[test]
    fn unsharp_operators_are_square_roots() {
        for d in [2usize, 3, 5] {
            let p = ProjectorSet::canonical(d, BasisLabel::Fourier).unwrap();
            for lambda in [0.0, 0.3, 0.8, 1.0] {
                let povm = unsharp_povm(lambda, &p).unwrap();
                let mut sum = CMatrix::zeros(d, d);
                for (e, m) in povm.elements.iter().zip(&povm.operators) {
                    assert!(linalg::max_abs(&(m * m - e)) < 1e-12);
                    assert!(linalg::hermiticity_defect(m) < 1e-15);
                    // Zero eigenvalues make the numerical root only ~sqrt(eps) accurate.
                    let root = linalg::psd_sqrt(e).unwrap();
                    assert!(linalg::max_abs(&(m - root)) < 1e-7);
                    sum += m.adjoint() * m;
                }
                assert!(linalg::max_abs(&(sum - linalg::identity(d))) < 1e-10);
            }
        }
    }

    #[test]
    fn curve_parsing_and_interpolation() {
        let csv = "G,F\n0,1\n0.5,0.8\n1,0\n";
        let curve = QualityCurve::from_reader(csv.as_bytes()).unwrap();
        assert!((curve.eval(0.25).unwrap() - 0.9).abs() < 1e-15);
        assert!((curve.eval(0.75).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(curve.eval(1.0).unwrap(), 0.0);
        let model = PointerModel::custom(curve);
        assert!((model.quality(4, 0.5).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn curve_rejects_bad_tables() {
        let cases = [
            "F,G\n0,1\n1,0\n",
            "G,F\n0,1\n0,0.5\n",
            "G,F\n0,0.5\n0.5,0.7\n",
            "G,F\n0,1\n0.5,0.9\n",
            "G,F\n0,1\n",
        ];
        for c in cases {
            assert!(QualityCurve::from_reader(c.as_bytes()).is_err(), "{c}");
        }
    }

    #[test]
    fn curve_does_not_extrapolate() {
        let curve = QualityCurve::new(vec![(0.2, 0.9), (0.8, 0.5)]).unwrap();
        assert!(matches!(curve.eval(0.1), Err(Error::CurveDomain { .. })));
        assert!(matches!(curve.eval(0.9), Err(Error::CurveDomain { .. })));
    }
}
