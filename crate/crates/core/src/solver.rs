//! Inversion of the closed forms: critical precisions, observer chains,
//! threshold dimensions, isotropic weights and equal-precision windows.

use serde::Serialize;

use crate::analytic::{self, ChainParams};
use crate::error::{Error, Result};
use crate::mub::{self, BasisLabel, ProjectorSet};
use crate::oracle;
use crate::pointer::{PointerKind, PointerModel};
use crate::scenario::Scenario;

/// Longest greedy chain explored by [`max_observers`].
pub const MAX_CHAIN: usize = 20;
/// A witness must beat `log2 d` by this many bits to count in searches that
/// are otherwise decided by rounding.
pub const WITNESS_EPS: f64 = 1e-12;
/// Allowed `|U(G_crit) - log2 d|` of a feasible result.
pub const CERTIFICATE_TOL: f64 = 1e-7;
pub const EQUAL_PRECISION_GRID: usize = 4001;
const PRECONDITION_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) || max_iter == 0 {
            return Err(Error::Domain(format!("tolerance {tol}, {max_iter} iterations")));
        }
        Ok(SolverOptions { tol, max_iter })
    }
}

/// Final bisection interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub iterations: usize,
}

/// Root of `f` on `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, opts: &SolverOptions) -> Result<(f64, Bracket)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NumericFailure("NaN at bisection endpoint".into()));
    }
    let done = |x: f64, iterations| {
        Ok((
            x,
            Bracket {
                lo: x,
                hi: x,
                tol: opts.tol,
                iterations,
            },
        ))
    };
    if fa == 0.0 {
        return done(a, 0);
    }
    if fb == 0.0 {
        return done(b, 0);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(Error::NumericFailure(format!(
            "no sign change on [{lo}, {hi}]: {fa:e}, {fb:e}"
        )));
    }
    let rising = fa < 0.0;
    let mut iterations = 0;
    while b - a > opts.tol && iterations < opts.max_iter {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm.is_nan() {
            return Err(Error::NumericFailure(format!("NaN at {m}")));
        }
        if fm == 0.0 {
            return done(m, iterations + 1);
        }
        if (fm < 0.0) == rising {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    if b - a > opts.tol && 0.5 * (a + b) > a && 0.5 * (a + b) < b {
        return Err(Error::NumericFailure(format!(
            "bisection stopped at width {:e} after {iterations} iterations",
            b - a
        )));
    }
    Ok((
        0.5 * (a + b),
        Bracket {
            lo: a,
            hi: b,
            tol: opts.tol,
            iterations,
        },
    ))
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub d: u64,
    pub pointer: PointerModel,
    pub p: f64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, d: u64, pointer: PointerModel) -> Self {
        ScenarioConfig {
            scenario,
            d,
            pointer,
            p: 1.0,
        }
    }

    pub fn with_weight(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidDimension(self.d));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidWeight(self.p));
        }
        Ok(())
    }

    /// `log2 d`.
    pub fn bound(&self) -> f64 {
        (self.d as f64).log2()
    }

    pub fn params(&self, g_n: f64, f_list: &[f64]) -> ChainParams {
        ChainParams::new(self.d, g_n, f_list.to_vec()).with_weight(self.p)
    }

    /// `U - log2 d` of observer `f_list.len() + 1`.
    pub fn excess(&self, g_n: f64, f_list: &[f64]) -> Result<f64> {
        Ok(analytic::scenario_uncertainty(self.scenario, &self.params(g_n, f_list))? - self.bound())
    }

    pub fn quality(&self, g: f64) -> Result<f64> {
        self.pointer.quality(self.d, g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalResult {
    pub n: usize,
    /// `None` when observer `n` cannot witness entanglement.
    pub g_crit: Option<f64>,
    /// Closed-form value before the `G <= 1` feasibility cut.
    pub unconstrained: Option<f64>,
    /// Precisions of observers `1..n-1`.
    pub g_chain: Vec<f64>,
    /// Quality factors of observers `1..n-1`.
    pub f_chain: Vec<f64>,
    /// `U(G_crit) - log2 d`.
    pub certificate: Option<f64>,
    pub bracket: Option<Bracket>,
}

impl CriticalResult {
    pub fn feasible(&self) -> bool {
        self.g_crit.is_some()
    }

    fn infeasible(n: usize, g_chain: Vec<f64>, f_chain: Vec<f64>) -> Self {
        CriticalResult {
            n,
            g_crit: None,
            unconstrained: None,
            g_chain,
            f_chain,
            certificate: None,
            bracket: None,
        }
    }
}

/// Root `μ_c` of `U(d, μ) = log2 d`; `G1c` of the one-sided scenarios.
pub fn critical_mu(d: u64, opts: &SolverOptions) -> Result<(f64, Bracket)> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let bound = (d as f64).log2();
    bisect(|mu| Ok(analytic::uncertainty_os1(d, mu)? - bound), 0.0, 1.0, opts)
}

/// Critical precision of observer `g_prev.len() + 1` given the precisions
/// and qualities of its predecessors.
fn solve_level(
    config: &ScenarioConfig,
    g_prev: &[f64],
    f_prev: &[f64],
    opts: &SolverOptions,
) -> Result<CriticalResult> {
    let n = f_prev.len() + 1;
    match config.scenario {
        Scenario::Os1 | Scenario::Ts1 => {
            let (mu_c, bracket) = critical_mu(config.d, opts)?;
            let two_sided = config.scenario.is_two_sided();
            let product: f64 = f_prev
                .iter()
                .map(|&f| 1.0 + if two_sided { f * f } else { f })
                .product();
            let x = 2f64.powi(n as i32 - 1) * mu_c / (config.p * product);
            let g = if two_sided { x.sqrt() } else { x };
            if !(g <= 1.0) {
                let mut r = CriticalResult::infeasible(n, g_prev.to_vec(), f_prev.to_vec());
                r.unconstrained = g.is_finite().then_some(g);
                return Ok(r);
            }
            Ok(CriticalResult {
                n,
                g_crit: Some(g),
                unconstrained: Some(g),
                g_chain: g_prev.to_vec(),
                f_chain: f_prev.to_vec(),
                certificate: Some(config.excess(g, f_prev)?),
                bracket: Some(bracket),
            })
        }
        Scenario::Os2 | Scenario::Ts2 => {
            if config.p == 0.0 || config.excess(1.0, f_prev)? > 0.0 {
                return Ok(CriticalResult::infeasible(n, g_prev.to_vec(), f_prev.to_vec()));
            }
            let (g, bracket) = bisect(|g| config.excess(g, f_prev), 0.0, 1.0, opts)?;
            Ok(CriticalResult {
                n,
                g_crit: Some(g),
                unconstrained: None,
                g_chain: g_prev.to_vec(),
                f_chain: f_prev.to_vec(),
                certificate: Some(config.excess(g, f_prev)?),
                bracket: Some(bracket),
            })
        }
    }
}

fn check_precision(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidPrecision(g));
    }
    Ok(())
}

/// First observer's critical precision.
pub fn critical_g1(config: &ScenarioConfig, opts: &SolverOptions) -> Result<CriticalResult> {
    config.validate()?;
    solve_level(config, &[], &[], opts)
}

/// Critical precision of observer `n` when observers `1..n-1` use
/// `g_choices`, each of which must reach its own critical precision.
pub fn chained_critical(
    config: &ScenarioConfig,
    n: usize,
    g_choices: &[f64],
    opts: &SolverOptions,
) -> Result<CriticalResult> {
    config.validate()?;
    if n == 0 || g_choices.len() != n - 1 {
        return Err(Error::Shape(format!(
            "observer {n} needs {} predecessor precisions, got {}",
            n.saturating_sub(1),
            g_choices.len()
        )));
    }
    let mut f_prev = Vec::with_capacity(n);
    for (k, &g) in g_choices.iter().enumerate() {
        check_precision(g)?;
        let own = solve_level(config, &g_choices[..k], &f_prev, opts)?;
        match own.g_crit {
            None => {
                return Err(Error::PreconditionViolation(format!(
                    "observer {} cannot witness entanglement",
                    k + 1
                )))
            }
            Some(gc) if g < gc - PRECONDITION_SLACK => {
                return Err(Error::PreconditionViolation(format!(
                    "observer {} precision {g} is below its critical value {gc}",
                    k + 1
                )))
            }
            Some(_) => {}
        }
        f_prev.push(config.quality(g)?);
    }
    solve_level(config, g_choices, &f_prev, opts)
}

/// Greedy chain: every observer measures at exactly its critical precision.
/// Ends with the first infeasible level, or after `max_n` levels.
pub fn observer_chain(
    config: &ScenarioConfig,
    max_n: usize,
    opts: &SolverOptions,
) -> Result<Vec<CriticalResult>> {
    config.validate()?;
    let mut g_prev = Vec::new();
    let mut f_prev = Vec::new();
    let mut out = Vec::new();
    while out.len() < max_n {
        let level = solve_level(config, &g_prev, &f_prev, opts)?;
        let g = level.g_crit;
        out.push(level);
        match g {
            Some(g) => {
                f_prev.push(config.quality(g)?);
                g_prev.push(g);
            }
            None => break,
        }
    }
    Ok(out)
}

/// Critical precision of observer `n` in the greedy chain.
pub fn critical_gn(config: &ScenarioConfig, n: usize, opts: &SolverOptions) -> Result<CriticalResult> {
    if n == 0 {
        return Err(Error::Domain("observers are numbered from 1".into()));
    }
    let mut chain = observer_chain(config, n, opts)?;
    if chain.len() == n {
        return Ok(chain.pop().expect("nonempty chain"));
    }
    let last = chain.pop().expect("nonempty chain");
    Ok(CriticalResult::infeasible(n, last.g_chain, last.f_chain))
}

/// [`critical_gn`] restricted to the scenarios that average uncertainties.
pub fn critical_gn_averaged(
    config: &ScenarioConfig,
    n: usize,
    opts: &SolverOptions,
) -> Result<CriticalResult> {
    if !config.scenario.averages_uncertainty() {
        return Err(Error::UnsupportedScenario(format!(
            "{} has a closed-form chain",
            config.scenario
        )));
    }
    critical_gn(config, n, opts)
}

fn feasible_levels(config: &ScenarioConfig, cap: usize, opts: &SolverOptions) -> Result<usize> {
    Ok(observer_chain(config, cap, opts)?
        .iter()
        .filter(|r| r.feasible())
        .count())
}

/// Number of observers sharing entanglement in the greedy chain (capped at
/// [`MAX_CHAIN`]).
pub fn max_observers(config: &ScenarioConfig, opts: &SolverOptions) -> Result<usize> {
    feasible_levels(config, MAX_CHAIN, opts)
}

/// Smallest `d <= d_hi` whose greedy chain reaches `target_n` observers.
/// Exponential bracketing followed by integer bisection; assumes the count
/// is nondecreasing in `d`.
pub fn min_dimension(
    scenario: Scenario,
    pointer: &PointerModel,
    target_n: usize,
    d_hi: u64,
    opts: &SolverOptions,
) -> Result<u64> {
    if target_n == 0 {
        return Err(Error::Domain("target observer count must be positive".into()));
    }
    if d_hi < 2 {
        return Err(Error::InvalidDimension(d_hi));
    }
    let ok = |d: u64| -> Result<bool> {
        let config = ScenarioConfig::new(scenario, d, pointer.clone());
        Ok(feasible_levels(&config, target_n, opts)? >= target_n)
    };
    if ok(2)? {
        return Ok(2);
    }
    let mut lo = 2u64;
    let mut hi = 4u64.min(d_hi);
    loop {
        if ok(hi)? {
            break;
        }
        if hi >= d_hi {
            return Err(Error::NotFound(format!(
                "{scenario}/{} does not reach {target_n} observers for d <= {d_hi}",
                pointer.name()
            )));
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(d_hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `ξ = d2 (1 - G1c) + sqrt(2 (1 - G1c)(2 d1 G1c - d2))`.
pub fn unsharp_xi(d: u64, g1c: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let (d1, d2) = (d as f64 - 1.0, d as f64 - 2.0);
    let radicand = 2.0 * (1.0 - g1c) * (2.0 * d1 * g1c - d2);
    if radicand < 0.0 {
        return Err(Error::Infeasible(format!("negative radicand {radicand:e} in ξ")));
    }
    Ok(d2 * (1.0 - g1c) + radicand.sqrt())
}

/// Range `[G1c, 2ξ/d]` of first-observer precisions that leave a
/// second one-sided observer with an unsharp pointer able to witness.
pub fn unsharp_window(d: u64, opts: &SolverOptions) -> Result<(f64, f64)> {
    let (g1c, _) = critical_mu(d, opts)?;
    Ok((g1c, 2.0 * unsharp_xi(d, g1c)? / d as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropicThresholds {
    /// Below `p1` no observer can witness.
    pub p1: f64,
    /// Smallest weight at which a second observer can still witness, when
    /// at most 1.
    pub p2: Option<f64>,
    pub p2_closed_form: Option<f64>,
    pub p2_numeric: Option<f64>,
}

fn closed_form_p2(config: &ScenarioConfig, g1c: f64) -> Option<f64> {
    let d = config.d as f64;
    match (config.scenario, config.pointer.kind()) {
        (Scenario::Os1, PointerKind::Optimal) => Some(1.25 * g1c),
        (Scenario::Os1, PointerKind::Square) => Some(1.5 * g1c),
        (Scenario::Os1, PointerKind::Unsharp) if config.d == 2 => Some(1.25 * g1c),
        (Scenario::Os1, PointerKind::Unsharp) => {
            Some((3.0 * d - (2.0 * d).sqrt() - 4.0) * g1c / (2.0 * (d - 2.0)))
        }
        (Scenario::Ts1, PointerKind::Optimal) => Some(1.5 * g1c),
        _ => None,
    }
}

/// `p2` from its defining condition: the first observer sits at its
/// critical precision for weight `p`, the second measures projectively.
fn numeric_p2(config: &ScenarioConfig, g1c: f64, opts: &SolverOptions) -> Result<Option<f64>> {
    let two_sided = config.scenario.is_two_sided();
    let first = |p: f64| {
        let g = (g1c / p).min(1.0);
        if two_sided {
            g.sqrt()
        } else {
            g
        }
    };
    let witness_gap = |p: f64| -> Result<f64> {
        let f1 = config.pointer.quality(config.d, first(p))?;
        match config.scenario {
            // μ_2 at G2 = 1 against μ_c; positive when the witness holds.
            Scenario::Os1 => Ok(p * (1.0 + f1) / 2.0 - g1c),
            Scenario::Ts1 => Ok(p * (1.0 + f1 * f1) / 2.0 - g1c),
            Scenario::Os2 | Scenario::Ts2 => {
                let at = config.clone().with_weight(p);
                Ok(-at.excess(1.0, &[f1])?)
            }
        }
    };
    if witness_gap(1.0)? < 0.0 {
        return Ok(None);
    }
    if witness_gap(g1c)? >= 0.0 {
        return Ok(Some(g1c));
    }
    Ok(Some(bisect(witness_gap, g1c, 1.0, opts)?.0))
}

pub fn isotropic_thresholds(config: &ScenarioConfig, opts: &SolverOptions) -> Result<IsotropicThresholds> {
    config.validate()?;
    let (g1c, _) = critical_mu(config.d, opts)?;
    let closed = closed_form_p2(config, g1c);
    let numeric = numeric_p2(config, g1c, opts)?;
    let p2 = closed.or(numeric).filter(|&p| p <= 1.0);
    Ok(IsotropicThresholds {
        p1: g1c,
        p2,
        p2_closed_form: closed,
        p2_numeric: numeric,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EqualPrecisionBounds {
    pub g_lower: f64,
    pub g_upper: f64,
    /// Precision with the largest witness margin.
    pub g_best: f64,
    /// `max(U1, U2) - log2 d` at `g_best`.
    pub margin: f64,
}

/// Window of common precisions `G1 = G2 = G` at which the first two
/// observers both witness entanglement.
pub fn equal_precision_bounds(
    config: &ScenarioConfig,
    opts: &SolverOptions,
) -> Result<Option<EqualPrecisionBounds>> {
    config.validate()?;
    let (lo, hi) = match config.pointer.curve() {
        Some(curve) => {
            let (a, b) = curve.domain();
            (a.max(0.0), b.min(1.0))
        }
        None => (0.0, 1.0),
    };
    let h = |g: f64| -> Result<f64> {
        let first = config.excess(g, &[])?;
        let second = config.excess(g, &[config.quality(g)?])?;
        Ok(first.max(second))
    };
    let steps = EQUAL_PRECISION_GRID - 1;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
        .collect();
    let values = grid.iter().map(|&g| h(g)).collect::<Result<Vec<_>>>()?;
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("nonempty grid");
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(steps)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = (grid[k], values[k]);
    for _ in 0..opts.max_iter {
        if b - a <= opts.tol * 1e-3 {
            break;
        }
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        let (h1, h2) = (h(x1)?, h(x2)?);
        if h1 < best.1 {
            best = (x1, h1);
        }
        if h2 < best.1 {
            best = (x2, h2);
        }
        if h1 < h2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let (g_best, margin) = best;
    if margin >= -WITNESS_EPS {
        return Ok(None);
    }
    let g_lower = if h(lo)? < 0.0 {
        lo
    } else {
        bisect(&h, lo, g_best, opts)?.0
    };
    let g_upper = if h(hi)? < 0.0 {
        hi
    } else {
        bisect(&h, g_best, hi, opts)?.0
    };
    Ok(Some(EqualPrecisionBounds {
        g_lower,
        g_upper,
        g_best,
        margin,
    }))
}

/// Measurement pair of an observer in odd prime dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MubSetting {
    /// Fourier and computational bases.
    Canonical,
    /// The two quadratic-phase bases `r = 1, 2`.
    Quadratic,
}

impl MubSetting {
    pub fn labels(self) -> (BasisLabel, BasisLabel) {
        match self {
            MubSetting::Canonical => (BasisLabel::Fourier, BasisLabel::Computational),
            MubSetting::Quadratic => (BasisLabel::Quadratic(1), BasisLabel::Quadratic(2)),
        }
    }
}

/// Oracle witness verdict `U < log2 d` for each observer acting on the
/// maximally entangled state with the given basis pairs and precisions.
pub fn alt_mub_witness(
    d: u64,
    scenario: Scenario,
    settings: &[MubSetting],
    precisions: &[f64],
    pointer: &PointerModel,
) -> Result<Vec<bool>> {
    if !mub::is_odd_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if settings.len() != precisions.len() {
        return Err(Error::Shape(format!(
            "{} settings for {} precisions",
            settings.len(),
            precisions.len()
        )));
    }
    let du = d as usize;
    let observers = settings
        .iter()
        .zip(precisions)
        .map(|(s, &g)| {
            check_precision(g)?;
            let (x, z) = s.labels();
            Ok(oracle::ObserverSetting {
                x: ProjectorSet::canonical(du, x)?,
                z: ProjectorSet::canonical(du, z)?,
                precision: g,
                quality: pointer.quality(d, g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    oracle::witness_verdicts(scenario, &oracle::maximally_entangled(du)?, &observers)
}
