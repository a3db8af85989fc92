//! Brute-force density-matrix simulation of the sequential measurement
//! chains.
//!
//! This is the ground truth the closed forms in [`crate::analytic`] are
//! checked against. States live on `C^d ⊗ C^d` with index `a * d + b`
//! (Alice first). Local measurement maps are applied in the frame of the
//! measured basis, where every projector sandwich `Π_k ρ Π_l` is a single
//! block of matrix elements.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, EIGEN_FLOOR};
use crate::mub::{BasisLabel, ProjectorSet};
use crate::scenario::{Observable, Scenario};

pub const MAX_DIM: usize = 11;
pub const MAX_OBSERVERS: usize = 4;
/// Tolerance on Hermiticity and trace of states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: CMatrix,
    normalized: bool,
}

impl DensityMatrix {
    /// Unit-trace, Hermitian, positive semidefinite state.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = DensityMatrix {
            matrix,
            normalized: true,
        };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitian PSD operator of arbitrary trace (a selective post-state).
    pub fn unnormalized(matrix: CMatrix) -> Result<Self> {
        let rho = DensityMatrix {
            matrix,
            normalized: false,
        };
        rho.validate()?;
        Ok(rho)
    }

    fn trusted(matrix: CMatrix, normalized: bool) -> Self {
        DensityMatrix { matrix, normalized }
    }

    /// Checks Hermiticity, trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!("{}x{} state", m.nrows(), m.ncols())));
        }
        let herm = linalg::hermiticity_defect(m);
        if herm > STATE_TOL {
            return Err(Error::NumericFailure(format!("state not Hermitian ({herm:e})")));
        }
        if self.normalized && (self.trace() - 1.0).abs() > STATE_TOL {
            return Err(Error::NumericFailure(format!("trace {} != 1", self.trace())));
        }
        let min = linalg::hermitian_eigenvalues(m)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::NumericFailure(format!("state eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Local dimension `d` of a two-qudit state.
    pub fn local_dim(&self) -> Result<usize> {
        let n = self.dim();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(Error::Shape(format!("{n} is not a square dimension")));
        }
        Ok(d)
    }

    /// `tr_A ρ`.
    pub fn reduced_b(&self) -> Result<CMatrix> {
        let d = self.local_dim()?;
        Ok(linalg::partial_trace_first(&self.matrix, d, d))
    }
}

fn check_oracle_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d as u64));
    }
    if d > MAX_DIM {
        return Err(Error::OracleLimit(format!("d = {d} > {MAX_DIM}")));
    }
    Ok(())
}

/// `|Ψ+><Ψ+|` with `|Ψ+> = sum_k |kk> / sqrt(d)`.
pub fn maximally_entangled(d: usize) -> Result<DensityMatrix> {
    check_oracle_dim(d)?;
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] = c(1.0 / d as f64);
        }
    }
    Ok(DensityMatrix::trusted(m, true))
}

/// `p |Ψ+><Ψ+| + (1 - p) 1/d^2`.
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidWeight(p));
    }
    let n = d * d;
    let psi = maximally_entangled(d)?.into_matrix();
    let m = psi.scale(p) + linalg::identity(n).scale((1.0 - p) / n as f64);
    Ok(DensityMatrix::trusted(m, true))
}

/// Isotropic states with `p <= 1/(d + 1)` are separable.
pub fn isotropic_is_separable(d: usize, p: f64) -> bool {
    p <= 1.0 / (d as f64 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Alice's qudit only.
    AOnly,
    /// The same instrument on both qudits.
    Both,
}

/// A weak measurement in the basis of `projectors` with quality factor
/// `F` and precision `G`.
#[derive(Clone, Debug)]
pub struct InstrumentSpec {
    pub projectors: ProjectorSet,
    pub quality: f64,
    pub precision: f64,
    pub side: Side,
}

impl InstrumentSpec {
    pub fn new(projectors: ProjectorSet, quality: f64, precision: f64, side: Side) -> Result<Self> {
        if !(0.0..=1.0).contains(&precision) {
            return Err(Error::InvalidPrecision(precision));
        }
        if !(0.0..=1.0).contains(&quality)
            || quality * quality + precision * precision > 1.0 + crate::pointer::TRADE_OFF_TOL
        {
            return Err(Error::InvalidQuality(quality));
        }
        Ok(InstrumentSpec {
            projectors,
            quality,
            precision,
            side,
        })
    }

    /// `𝓕 = sqrt((1 + d1 G)(1 - G))`.
    pub fn cross_amplitude(&self) -> f64 {
        cross_amplitude(self.projectors.dim(), self.precision)
    }
}

fn cross_amplitude(d: usize, g: f64) -> f64 {
    ((1.0 + (d as f64 - 1.0) * g) * (1.0 - g)).max(0.0).sqrt()
}

fn check_state_dim(rho: &DensityMatrix, d: usize) -> Result<()> {
    if rho.dim() != d * d {
        return Err(Error::Shape(format!(
            "state of dimension {} with {d}-dimensional instrument",
            rho.dim()
        )));
    }
    Ok(())
}

/// Unitary `V_A ⊗ V_B` taking the computational frame to the product of
/// the measured bases (identity on an unmeasured side).
fn frame(d: usize, alice: Option<&ProjectorSet>, bob: Option<&ProjectorSet>) -> CMatrix {
    let id = linalg::identity(d);
    let va = alice.map_or(&id, |p| p.basis().unitary());
    let vb = bob.map_or(&id, |p| p.basis().unitary());
    linalg::kron(va, vb)
}

/// Multiplies each matrix element of `ρ`, expressed in `w`'s frame, by
/// `coeff(a, b, a', b')` and rotates back.
fn reweight_in_frame<F>(rho: &CMatrix, w: &CMatrix, d: usize, coeff: F) -> CMatrix
where
    F: Fn(usize, usize, usize, usize) -> f64,
{
    let mut inner = w.adjoint() * rho * w;
    for r in 0..d * d {
        for s in 0..d * d {
            inner[(r, s)] *= coeff(r / d, r % d, s / d, s % d);
        }
    }
    w * inner * w.adjoint()
}

/// Nonselective post-measurement state. One-sided:
/// `F ρ + (1 - F) sum_i Π_i ρ Π_i`; two-sided:
/// `F ρ + (1 - F) sum_{ij} Π_ij ρ Π_ij + (F^2 - F) sum_{i≠k, j≠l} Π_ij ρ Π_kl`.
pub fn nonselective_map(rho: &DensityMatrix, spec: &InstrumentSpec) -> Result<DensityMatrix> {
    let d = spec.projectors.dim();
    check_state_dim(rho, d)?;
    let f = spec.quality;
    let out = match spec.side {
        Side::AOnly => {
            let w = frame(d, Some(&spec.projectors), None);
            reweight_in_frame(rho.matrix(), &w, d, |a, _, a2, _| if a == a2 { 1.0 } else { f })
        }
        Side::Both => {
            let w = frame(d, Some(&spec.projectors), Some(&spec.projectors));
            reweight_in_frame(rho.matrix(), &w, d, |a, b, a2, b2| {
                let mut k = f;
                if a == a2 && b == b2 {
                    k += 1.0 - f;
                }
                if a != a2 && b != b2 {
                    k += f * f - f;
                }
                k
            })
        }
    };
    Ok(DensityMatrix::trusted(out, rho.normalized))
}

/// Outcome probability and unnormalized post-state of an unbiased weak
/// measurement on Alice's qudit:
/// `p_i = G tr(Π_i ρ) + (1 - G)/d` and
/// `ρ_i = 𝓕/d ρ + (1 + d1 G - 𝓕)/d Π_i ρ Π_i
///       + (1 - G - 𝓕)/d (sum_{j≠i} Π_j ρ Π_j + sum_{k≠l; k,l≠i} Π_k ρ Π_l)`.
pub fn selective_post_state(
    rho: &DensityMatrix,
    spec: &InstrumentSpec,
    outcome: usize,
) -> Result<(f64, DensityMatrix)> {
    if spec.side != Side::AOnly {
        return Err(Error::Domain("selective post-states are one-sided".into()));
    }
    let d = spec.projectors.dim();
    check_state_dim(rho, d)?;
    if outcome >= d {
        return Err(Error::InvalidIndex {
            index: outcome as u64,
            max: d as u64 - 1,
        });
    }
    let w = frame(d, Some(&spec.projectors), None);
    let coeffs = selective_coefficients(d, spec.precision, outcome);
    let out = reweight_in_frame(rho.matrix(), &w, d, |a, _, a2, _| coeffs(a, a2));
    let p = spec.precision * (&spec.projectors.projectors()[outcome] * reduced_a(rho, d)).trace().re
        + (1.0 - spec.precision) / d as f64;
    Ok((p, DensityMatrix::trusted(out, false)))
}

fn reduced_a(rho: &DensityMatrix, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for a in 0..d {
        for a2 in 0..d {
            for b in 0..d {
                out[(a, a2)] += rho.matrix()[(a * d + b, a2 * d + b)];
            }
        }
    }
    out
}

fn selective_coefficients(d: usize, g: f64, i: usize) -> impl Fn(usize, usize) -> f64 {
    let df = d as f64;
    let cf = cross_amplitude(d, g);
    let base = cf / df;
    let hit = (1.0 + (df - 1.0) * g - cf) / df;
    let miss = (1.0 - g - cf) / df;
    move |k, l| {
        if k == i && l == i {
            base + hit
        } else if k == l || (k != i && l != i) {
            base + miss
        } else {
            base
        }
    }
}

/// `tr_A ρ_i` for every outcome `i`, computed from the selective post-states.
pub fn conditional_states_b(rho: &DensityMatrix, projectors: &ProjectorSet, g: f64) -> Result<Vec<CMatrix>> {
    let d = projectors.dim();
    check_state_dim(rho, d)?;
    // The partial trace over A is invariant under A-local unitaries, so it
    // can be taken directly in the measured frame.
    let w = frame(d, Some(projectors), None);
    let inner = w.adjoint() * rho.matrix() * w;
    Ok((0..d)
        .map(|i| {
            let coeffs = selective_coefficients(d, g, i);
            let mut out = CMatrix::zeros(d, d);
            for a in 0..d {
                let k = coeffs(a, a);
                for b in 0..d {
                    for b2 in 0..d {
                        out[(b, b2)] += inner[(a * d + b, a * d + b2)] * k;
                    }
                }
            }
            out
        })
        .collect())
}

/// `H(O|B) = sum_i S(tr_A ρ_i) - S(ρ_B)` in bits.
pub fn conditional_entropy_b(rho: &DensityMatrix, projectors: &ProjectorSet, g: f64) -> Result<f64> {
    let mut total = -linalg::entropy_bits(&rho.reduced_b()?)?;
    for state in conditional_states_b(rho, projectors, g)? {
        total += linalg::entropy_bits(&state)?;
    }
    Ok(total)
}

/// `H(X|B) + H(Z|B)` for weak measurements of precision `g` on Alice's qudit.
pub fn uncertainty_one_sided(
    rho: &DensityMatrix,
    proj_x: &ProjectorSet,
    proj_z: &ProjectorSet,
    g: f64,
) -> Result<f64> {
    check_precision(g)?;
    Ok(conditional_entropy_b(rho, proj_x, g)? + conditional_entropy_b(rho, proj_z, g)?)
}

fn check_precision(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidPrecision(g));
    }
    Ok(())
}

/// Joint outcome table `p[i][j]` of weak measurements on both qudits,
/// `p_ij = sum_{kl} w_A(i,k) w_B(j,l) tr[(Π_k ⊗ Π_l) ρ]` with
/// `w(i,i) = (1 + d1 G)/d`, `w(i,k≠i) = (1 - G)/d`.
pub fn two_sided_probs(
    rho: &DensityMatrix,
    spec_a: &InstrumentSpec,
    spec_b: &InstrumentSpec,
) -> Result<Vec<Vec<f64>>> {
    two_sided_table(
        rho,
        &spec_a.projectors,
        spec_a.precision,
        &spec_b.projectors,
        spec_b.precision,
    )
}

fn two_sided_table(
    rho: &DensityMatrix,
    proj_a: &ProjectorSet,
    g_a: f64,
    proj_b: &ProjectorSet,
    g_b: f64,
) -> Result<Vec<Vec<f64>>> {
    let d = proj_a.dim();
    if proj_b.dim() != d {
        return Err(Error::Shape("instruments of different dimension".into()));
    }
    check_state_dim(rho, d)?;
    let w = frame(d, Some(proj_a), Some(proj_b));
    let inner = w.adjoint() * rho.matrix() * &w;
    let df = d as f64;
    let weight = |g: f64, i: usize, k: usize| {
        if i == k {
            (1.0 + (df - 1.0) * g) / df
        } else {
            (1.0 - g) / df
        }
    };
    let mut table = vec![vec![0.0; d]; d];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..d {
                for l in 0..d {
                    s += weight(g_a, i, k) * weight(g_b, j, l) * inner[(k * d + l, k * d + l)].re;
                }
            }
            *cell = s;
        }
    }
    Ok(table)
}

/// `H(A-outcome | B-outcome)` of a joint table in bits.
pub fn conditional_shannon(table: &[Vec<f64>]) -> f64 {
    let joint = linalg::shannon_bits(table.iter().flatten().copied());
    let d = table.first().map_or(0, Vec::len);
    let marginal = (0..d).map(|j| table.iter().map(|row| row[j]).sum::<f64>());
    joint - linalg::shannon_bits(marginal)
}

/// `H(X|X) + H(Z|Z)` with matched bases on both qudits.
pub fn uncertainty_two_sided(
    rho: &DensityMatrix,
    proj_x: &ProjectorSet,
    proj_z: &ProjectorSet,
    g_a: f64,
    g_b: f64,
) -> Result<f64> {
    check_precision(g_a)?;
    check_precision(g_b)?;
    let px = two_sided_table(rho, proj_x, g_a, proj_x, g_b)?;
    let pz = two_sided_table(rho, proj_z, g_a, proj_z, g_b)?;
    Ok(conditional_shannon(&px) + conditional_shannon(&pz))
}

/// The two instruments an observer chooses between.
#[derive(Clone, Debug)]
pub struct ChainSlot {
    pub x: InstrumentSpec,
    pub z: InstrumentSpec,
}

impl ChainSlot {
    pub fn get(&self, o: Observable) -> &InstrumentSpec {
        match o {
            Observable::X => &self.x,
            Observable::Z => &self.z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceMode {
    /// Mixture over all predecessor settings.
    Averaged,
    /// One state per history of predecessor settings.
    PerHistory,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub history: Vec<Observable>,
    pub state: DensityMatrix,
}

#[derive(Clone, Debug)]
pub enum SequentialOutput {
    Averaged(DensityMatrix),
    PerHistory(Vec<Branch>),
}

/// State handed to the next observer after every slot of `chain` has
/// measured nonselectively, for each of the `2^len` setting histories.
pub fn sequential_branches(rho0: &DensityMatrix, chain: &[ChainSlot]) -> Result<Vec<Branch>> {
    let mut branches = vec![Branch {
        history: Vec::new(),
        state: rho0.clone(),
    }];
    for slot in chain {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for branch in &branches {
            for o in Observable::BOTH {
                let mut history = branch.history.clone();
                history.push(o);
                next.push(Branch {
                    history,
                    state: nonselective_map(&branch.state, slot.get(o))?,
                });
            }
        }
        branches = next;
    }
    Ok(branches)
}

pub fn sequential_average(rho0: &DensityMatrix, chain: &[ChainSlot]) -> Result<DensityMatrix> {
    let branches = sequential_branches(rho0, chain)?;
    let weight = 1.0 / branches.len() as f64;
    let n = rho0.dim();
    let sum = branches
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, b| acc + b.state.matrix());
    Ok(DensityMatrix::trusted(sum.scale(weight), rho0.normalized))
}

pub fn sequential_state(
    rho0: &DensityMatrix,
    chain: &[ChainSlot],
    mode: SequenceMode,
) -> Result<SequentialOutput> {
    match mode {
        SequenceMode::Averaged => Ok(SequentialOutput::Averaged(sequential_average(rho0, chain)?)),
        SequenceMode::PerHistory => Ok(SequentialOutput::PerHistory(sequential_branches(rho0, chain)?)),
    }
}

/// One observer in a sequence: the bases of its two measurements and the
/// weak-measurement parameters it uses for both.
#[derive(Clone, Debug)]
pub struct ObserverSetting {
    pub x: ProjectorSet,
    pub z: ProjectorSet,
    pub precision: f64,
    pub quality: f64,
}

impl ObserverSetting {
    pub fn canonical(d: usize, precision: f64, quality: f64) -> Result<Self> {
        Ok(ObserverSetting {
            x: ProjectorSet::canonical(d, BasisLabel::Fourier)?,
            z: ProjectorSet::canonical(d, BasisLabel::Computational)?,
            precision,
            quality,
        })
    }

    fn slot(&self, side: Side) -> Result<ChainSlot> {
        Ok(ChainSlot {
            x: InstrumentSpec::new(self.x.clone(), self.quality, self.precision, side)?,
            z: InstrumentSpec::new(self.z.clone(), self.quality, self.precision, side)?,
        })
    }
}

/// Uncertainty of the last observer in `observers`, all earlier ones having
/// measured nonselectively, in the given scenario.
pub fn observer_uncertainty(
    scenario: Scenario,
    rho0: &DensityMatrix,
    observers: &[ObserverSetting],
) -> Result<f64> {
    let (last, before) = observers
        .split_last()
        .ok_or_else(|| Error::Domain("no observers".into()))?;
    if observers.len() > MAX_OBSERVERS {
        return Err(Error::OracleLimit(format!(
            "{} observers > {MAX_OBSERVERS}",
            observers.len()
        )));
    }
    let d = rho0.local_dim()?;
    check_oracle_dim(d)?;
    let side = if scenario.is_two_sided() {
        Side::Both
    } else {
        Side::AOnly
    };
    let chain = before
        .iter()
        .map(|o| o.slot(side))
        .collect::<Result<Vec<_>>>()?;
    let g = last.precision;
    let measure = |state: &DensityMatrix| {
        if scenario.is_two_sided() {
            uncertainty_two_sided(state, &last.x, &last.z, g, g)
        } else {
            uncertainty_one_sided(state, &last.x, &last.z, g)
        }
    };
    if scenario.averages_uncertainty() {
        let branches = sequential_branches(rho0, &chain)?;
        let mut total = 0.0;
        for b in &branches {
            total += measure(&b.state)?;
        }
        Ok(total / branches.len() as f64)
    } else {
        measure(&sequential_average(rho0, &chain)?)
    }
}

/// `U < log2 d` for each prefix of `observers`.
pub fn witness_verdicts(
    scenario: Scenario,
    rho0: &DensityMatrix,
    observers: &[ObserverSetting],
) -> Result<Vec<bool>> {
    let bound = (rho0.local_dim()? as f64).log2();
    (1..=observers.len())
        .map(|k| Ok(observer_uncertainty(scenario, rho0, &observers[..k])? < bound))
        .collect()
}

/// Canonical-basis oracle evaluation matching an analytic parameter set:
/// predecessors with qualities `f_list`, current precision `g_n`, on the
/// isotropic state of weight `p`.
pub fn canonical_uncertainty(
    scenario: Scenario,
    d: usize,
    p: f64,
    g_n: f64,
    predecessors: &[(f64, f64)],
) -> Result<f64> {
    let rho0 = isotropic(d, p)?;
    let mut observers = predecessors
        .iter()
        .map(|&(g, f)| ObserverSetting::canonical(d, g, f))
        .collect::<Result<Vec<_>>>()?;
    observers.push(ObserverSetting::canonical(d, g_n, 0.0)?);
    observer_uncertainty(scenario, &rho0, &observers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointer::{unsharp_povm, PointerKind};

    fn fourier(d: usize) -> ProjectorSet {
        ProjectorSet::canonical(d, BasisLabel::Fourier).unwrap()
    }

    fn computational(d: usize) -> ProjectorSet {
        ProjectorSet::canonical(d, BasisLabel::Computational).unwrap()
    }

    fn spec(p: ProjectorSet, f: f64, g: f64, side: Side) -> InstrumentSpec {
        InstrumentSpec::new(p, f, g, side).unwrap()
    }

    fn local(p: &CMatrix, d: usize, on_a: bool) -> CMatrix {
        if on_a {
            linalg::kron(p, &linalg::identity(d))
        } else {
            linalg::kron(&linalg::identity(d), p)
        }
    }

    // Literal projector-sandwich sums, independent of the frame trick.
    fn literal_one_sided(rho: &CMatrix, proj: &ProjectorSet, f: f64) -> CMatrix {
        let d = proj.dim();
        let mut out = rho.scale(f);
        for p in proj.projectors() {
            let pp = local(p, d, true);
            out += (&pp * rho * &pp).scale(1.0 - f);
        }
        out
    }

    fn literal_two_sided(rho: &CMatrix, proj: &ProjectorSet, f: f64) -> CMatrix {
        let d = proj.dim();
        let ps = proj.projectors();
        let mut out = rho.scale(f);
        for i in 0..d {
            for j in 0..d {
                let pij = linalg::kron(&ps[i], &ps[j]);
                out += (&pij * rho * &pij).scale(1.0 - f);
                for k in 0..d {
                    for l in 0..d {
                        if i != k && j != l {
                            let pkl = linalg::kron(&ps[k], &ps[l]);
                            out += (&pij * rho * &pkl).scale(f * f - f);
                        }
                    }
                }
            }
        }
        out
    }

    fn literal_selective(rho: &CMatrix, proj: &ProjectorSet, g: f64, i: usize) -> CMatrix {
        let d = proj.dim();
        let df = d as f64;
        let cf = cross_amplitude(d, g);
        let ps: Vec<_> = proj.projectors().iter().map(|p| local(p, d, true)).collect();
        let mut out = rho.scale(cf / df);
        out += (&ps[i] * rho * &ps[i]).scale((1.0 + (df - 1.0) * g - cf) / df);
        let mut rest = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            if j != i {
                rest += &ps[j] * rho * &ps[j];
            }
        }
        for k in 0..d {
            for l in 0..d {
                if k != l && k != i && l != i {
                    rest += &ps[k] * rho * &ps[l];
                }
            }
        }
        out + rest.scale((1.0 - g - cf) / df)
    }

    fn random_state(d: usize, seed: u64) -> DensityMatrix {
        // Deterministic pseudo-random mixed state A A† / tr.
        let n = d * d;
        let mut x = seed;
        let mut next = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % 10_000) as f64 / 10_000.0 - 0.5
        };
        let a = CMatrix::from_fn(n, n, |_, _| num_complex::Complex64::new(next(), next()));
        let m = &a * a.adjoint();
        let t = m.trace().re;
        DensityMatrix::new(m.scale(1.0 / t)).unwrap()
    }

    #[test]
    fn maximally_entangled_properties() {
        let bell = maximally_entangled(2).unwrap();
        let m = bell.matrix();
        for (r, s) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(r, s)] - c(0.5)).norm() < 1e-15);
        }
        for d in [2, 3, 5] {
            let rho = maximally_entangled(d).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-12);
            let rb = rho.reduced_b().unwrap();
            assert!(linalg::max_abs(&(rb - linalg::identity(d).scale(1.0 / d as f64))) < 1e-15);
            rho.validate().unwrap();
        }
        assert!(matches!(maximally_entangled(12), Err(Error::OracleLimit(_))));
        assert!(matches!(maximally_entangled(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn isotropic_endpoints() {
        let d = 3;
        let one = isotropic(d, 1.0).unwrap();
        assert!(linalg::max_abs(&(one.matrix() - maximally_entangled(d).unwrap().matrix())) < 1e-15);
        let zero = isotropic(d, 0.0).unwrap();
        assert!(linalg::max_abs(&(zero.matrix() - linalg::identity(9).scale(1.0 / 9.0))) < 1e-15);
        assert!(isotropic_is_separable(d, 0.25));
        assert!(!isotropic_is_separable(d, 0.26));
        assert!(isotropic(d, 1.1).is_err());
    }

    #[test]
    fn nonselective_matches_literal_sums() {
        for d in [2, 3] {
            let rho = random_state(d, 7 + d as u64);
            for (proj, f) in [(fourier(d), 0.3), (computational(d), 0.8)] {
                let one = nonselective_map(&rho, &spec(proj.clone(), f, 0.5, Side::AOnly)).unwrap();
                let lit = literal_one_sided(rho.matrix(), &proj, f);
                assert!(linalg::max_abs(&(one.matrix() - lit)) < 1e-12);
                let two = nonselective_map(&rho, &spec(proj.clone(), f, 0.5, Side::Both)).unwrap();
                let lit2 = literal_two_sided(rho.matrix(), &proj, f);
                assert!(linalg::max_abs(&(two.matrix() - lit2)) < 1e-12);
            }
        }
    }

    #[test]
    fn two_sided_map_is_product_of_local_maps() {
        let d = 3;
        let rho = random_state(d, 99);
        let f = 0.45;
        let proj = fourier(d);
        let both = nonselective_map(&rho, &spec(proj.clone(), f, 0.6, Side::Both)).unwrap();
        // A then B, with the B-side map written as a swap-conjugated A map.
        let after_a = literal_one_sided(rho.matrix(), &proj, f);
        let mut after_b = after_a.scale(f);
        for p in proj.projectors() {
            let pp = local(p, d, false);
            after_b += (&pp * &after_a * &pp).scale(1.0 - f);
        }
        assert!(linalg::max_abs(&(both.matrix() - after_b)) < 1e-12);
    }

    #[test]
    fn nonselective_limits() {
        let d = 2;
        let rho = maximally_entangled(d).unwrap();
        let id = nonselective_map(&rho, &spec(computational(d), 1.0, 0.0, Side::AOnly)).unwrap();
        assert!(linalg::max_abs(&(id.matrix() - rho.matrix())) < 1e-15);
        let deph = nonselective_map(&rho, &spec(computational(d), 0.0, 1.0, Side::AOnly)).unwrap();
        assert!(deph.matrix()[(0, 3)].norm() < 1e-15);
        assert!((deph.matrix()[(0, 0)] - c(0.5)).norm() < 1e-15);
        let half = nonselective_map(&rho, &spec(computational(d), 0.5, 0.5, Side::AOnly)).unwrap();
        assert!((half.matrix()[(0, 3)] - c(0.25)).norm() < 1e-15);
        assert!((half.trace() - 1.0).abs() < 1e-12);
        let wrong = spec(computational(3), 0.5, 0.5, Side::AOnly);
        assert!(matches!(nonselective_map(&rho, &wrong), Err(Error::Shape(_))));
    }

    #[test]
    fn selective_matches_literal_and_probabilities() {
        for d in [2, 3] {
            let rho = random_state(d, 3 + d as u64);
            let proj = fourier(d);
            for g in [0.0, 0.35, 0.7, 1.0] {
                let s = spec(proj.clone(), 0.0, g, Side::AOnly);
                let mut total = 0.0;
                for i in 0..d {
                    let (p, post) = selective_post_state(&rho, &s, i).unwrap();
                    let lit = literal_selective(rho.matrix(), &proj, g, i);
                    assert!(linalg::max_abs(&(post.matrix() - lit)) < 1e-12);
                    assert!((post.trace() - p).abs() < 1e-10);
                    post.validate().unwrap();
                    total += p;
                }
                assert!((total - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn selective_limits() {
        let d = 3;
        let rho = random_state(d, 41);
        let proj = computational(d);
        let sharp = spec(proj.clone(), 0.0, 1.0, Side::AOnly);
        for i in 0..d {
            let (p, post) = selective_post_state(&rho, &sharp, i).unwrap();
            let pi = local(&proj.projectors()[i], d, true);
            assert!((p - (&pi * rho.matrix()).trace().re).abs() < 1e-12);
            assert!(linalg::max_abs(&(post.matrix() - &pi * rho.matrix() * &pi)) < 1e-12);
        }
        let blind = spec(proj, 1.0, 0.0, Side::AOnly);
        for i in 0..d {
            assert!((selective_post_state(&rho, &blind, i).unwrap().0 - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(selective_post_state(&rho, &blind, 3).is_err());
    }

    #[test]
    fn selective_states_sum_to_unsharp_nonselective_map() {
        // The outcome-summed post-state keeps off-diagonal blocks with
        // weight (2 𝓕 + d2 (1 - G))/d, the unsharp pointer's quality.
        for d in [2, 3, 4] {
            let rho = random_state(d, 11 * d as u64);
            let proj = fourier(d);
            for g in [0.2, 0.6, 0.95] {
                let f = crate::pointer::quality(PointerKind::Unsharp, d as u64, g, None).unwrap();
                let s = spec(proj.clone(), f, g, Side::AOnly);
                let mut sum = CMatrix::zeros(d * d, d * d);
                for i in 0..d {
                    sum += selective_post_state(&rho, &s, i).unwrap().1.matrix();
                }
                let ns = nonselective_map(&rho, &s).unwrap();
                assert!(linalg::max_abs(&(sum - ns.matrix())) < 1e-10);
            }
        }
    }

    #[test]
    fn qutrit_selective_spectrum_on_bell_state() {
        let d = 3;
        let g = 0.7;
        let rho = maximally_entangled(d).unwrap();
        let s = spec(fourier(d), 0.0, g, Side::AOnly);
        let mut total = 0.0;
        for i in 0..d {
            let (p, post) = selective_post_state(&rho, &s, i).unwrap();
            total += p;
            let rb = post.reduced_b().unwrap();
            let mut eig = linalg::hermitian_eigenvalues(&rb);
            eig.sort_by(f64::total_cmp);
            let lo = (1.0 - g) / 9.0;
            let hi = (1.0 + 2.0 * g) / 9.0;
            assert!((eig[0] - lo).abs() < 1e-12 && (eig[1] - lo).abs() < 1e-12);
            assert!((eig[2] - hi).abs() < 1e-12);
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_sided_tables() {
        let d = 3;
        let rho = maximally_entangled(d).unwrap();
        let z = computational(d);
        let t = two_sided_table(&rho, &z, 1.0, &z, 1.0).unwrap();
        for (i, row) in t.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-12);
            }
        }
        let u = two_sided_table(&rho, &z, 0.0, &z, 0.0).unwrap();
        assert!(u.iter().flatten().all(|&p| (p - 1.0 / 9.0).abs() < 1e-12));
        // Fourier on both sides: x1 + x2 = 0 mod d carries (1 + d1 G^2)/d^2.
        let g = 0.8;
        let x = fourier(d);
        let t = two_sided_table(&rho, &x, g, &x, g).unwrap();
        let total: f64 = t.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let pat = crate::analytic::ts1_probability_pattern(3, g * g).unwrap();
        for (i, row) in t.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                assert!(p >= 0.0);
                assert!((p - pat.mass(Observable::X, i as u64, j as u64)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_sided_table_matches_povm_expectations() {
        let d = 3;
        let rho = random_state(d, 5);
        let x = fourier(d);
        let (ga, gb) = (0.3, 0.9);
        let ea = unsharp_povm(ga, &x).unwrap().elements;
        let eb = unsharp_povm(gb, &x).unwrap().elements;
        let t = two_sided_probs(
            &rho,
            &spec(x.clone(), 0.0, ga, Side::AOnly),
            &spec(x.clone(), 0.0, gb, Side::AOnly),
        )
        .unwrap();
        for i in 0..d {
            for j in 0..d {
                let want = (linalg::kron(&ea[i], &eb[j]) * rho.matrix()).trace().re;
                assert!((t[i][j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uncertainty_limits() {
        for d in [2, 3, 5] {
            let bell = maximally_entangled(d).unwrap();
            let (x, z) = (fourier(d), computational(d));
            assert!(uncertainty_one_sided(&bell, &x, &z, 1.0).unwrap().abs() < 1e-9);
            assert!(uncertainty_two_sided(&bell, &x, &z, 1.0, 1.0).unwrap().abs() < 1e-9);
            let mixed = isotropic(d, 0.0).unwrap();
            let two_log = 2.0 * (d as f64).log2();
            for g in [0.0, 0.5, 1.0] {
                assert!((uncertainty_one_sided(&mixed, &x, &z, g).unwrap() - two_log).abs() < 1e-9);
                assert!((uncertainty_two_sided(&mixed, &x, &z, g, g).unwrap() - two_log).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn qutrit_one_sided_matches_closed_form() {
        let bell = maximally_entangled(3).unwrap();
        let u = uncertainty_one_sided(&bell, &fourier(3), &computational(3), 0.6).unwrap();
        let want = crate::analytic::uncertainty_os1(3, 0.6).unwrap();
        assert!((u - want).abs() < 1e-9);
    }

    #[test]
    fn quadratic_pair_two_sided_fails_witness_at_d5() {
        let d = 5;
        let bell = maximally_entangled(d).unwrap();
        let q1 = ProjectorSet::canonical(d, BasisLabel::Quadratic(1)).unwrap();
        let q2 = ProjectorSet::canonical(d, BasisLabel::Quadratic(2)).unwrap();
        let u = uncertainty_two_sided(&bell, &q1, &q2, 1.0, 1.0).unwrap();
        assert!(u >= (d as f64).log2());
    }

    #[test]
    fn sequential_identity_and_averaging() {
        let d = 3;
        let rho = random_state(d, 17);
        match sequential_state(&rho, &[], SequenceMode::Averaged).unwrap() {
            SequentialOutput::Averaged(s) => {
                assert!(linalg::max_abs(&(s.matrix() - rho.matrix())) < 1e-15)
            }
            _ => unreachable!(),
        }
        let slot = |f: f64, g: f64| ChainSlot {
            x: spec(fourier(d), f, g, Side::AOnly),
            z: spec(computational(d), f, g, Side::AOnly),
        };
        let chain = vec![slot(0.7, 0.5), slot(0.4, 0.8)];
        let branches = sequential_branches(&rho, &chain).unwrap();
        assert_eq!(branches.len(), 4);
        let mut mean = CMatrix::zeros(9, 9);
        for b in &branches {
            assert!((b.state.trace() - 1.0).abs() < 1e-10);
            b.state.validate().unwrap();
            mean += b.state.matrix().scale(0.25);
        }
        let avg = sequential_average(&rho, &chain).unwrap();
        assert!(linalg::max_abs(&(avg.matrix() - mean)) < 1e-14);
    }

    #[test]
    fn averaged_unsharp_state_is_luders_mixture() {
        for d in [2usize, 3] {
            let g = 0.9;
            let rho = maximally_entangled(d).unwrap();
            let f = crate::pointer::quality(PointerKind::Unsharp, d as u64, g, None).unwrap();
            let chain = vec![ChainSlot {
                x: spec(fourier(d), f, g, Side::AOnly),
                z: spec(computational(d), f, g, Side::AOnly),
            }];
            let avg = sequential_average(&rho, &chain).unwrap();
            let mut luders = CMatrix::zeros(d * d, d * d);
            for proj in [fourier(d), computational(d)] {
                for m in unsharp_povm(g, &proj).unwrap().operators {
                    let mm = local(&m, d, true);
                    luders += (&mm * rho.matrix() * mm.adjoint()).scale(0.5);
                }
            }
            assert!(linalg::max_abs(&(avg.matrix() - luders)) < 1e-12);
        }
    }

    #[test]
    fn oracle_limits_are_enforced() {
        let rho = maximally_entangled(2).unwrap();
        let obs = vec![ObserverSetting::canonical(2, 0.9, 0.3).unwrap(); 5];
        assert!(matches!(
            observer_uncertainty(Scenario::Os1, &rho, &obs),
            Err(Error::OracleLimit(_))
        ));
        assert!(observer_uncertainty(Scenario::Os1, &rho, &[]).is_err());
    }

    #[test]
    fn instrument_spec_validation() {
        assert!(InstrumentSpec::new(fourier(2), 0.9, 0.9, Side::AOnly).is_err());
        assert!(InstrumentSpec::new(fourier(2), 0.5, 1.2, Side::AOnly).is_err());
        assert!(InstrumentSpec::new(fourier(2), 0.6, 0.8, Side::AOnly).is_ok());
    }
}
