//! Cross-checks of the closed forms against the density-matrix oracle, plus
//! structural checks on bases and pointers.

use serde::Serialize;

use crate::analytic::{self, ChainParams};
use crate::error::{Error, Result};
use crate::linalg;
use crate::mub::{self, BasisLabel, ProjectorSet};
use crate::oracle::{self, ChainSlot, InstrumentSpec, Side};
use crate::pointer::{self, PointerModel};
use crate::scenario::{Observable, Scenario};
use crate::solver::{self, MubSetting, ScenarioConfig, SolverOptions};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub dims: Vec<usize>,
    pub tol: f64,
    pub precisions: Vec<f64>,
    pub weights: Vec<f64>,
    pub max_observers: usize,
    pub pointers: Vec<PointerModel>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            dims: vec![2, 3, 5],
            tol: 1e-9,
            precisions: (1..=10).map(|k| k as f64 / 10.0).collect(),
            weights: vec![1.0, 0.8],
            max_observers: 3,
            pointers: vec![
                PointerModel::unsharp(),
                PointerModel::optimal(),
                PointerModel::square(),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    max_deviation: f64,
}

impl Tally {
    fn add(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN must fail the check.
        if deviation.is_nan() || deviation > self.max_deviation {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
    }

    fn record(self, name: impl Into<String>, tol: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            cases: self.cases,
            max_deviation: self.max_deviation,
            tol,
            passed: self.max_deviation <= tol,
        }
    }
}

/// Predecessor precisions for level `n`: a rotation through the grid so
/// that observers in one chain differ.
fn predecessors(grid: &[f64], start: usize, count: usize) -> Vec<f64> {
    (1..=count).map(|k| grid[(start + 3 * k) % grid.len()]).collect()
}

fn equivalence(opts: &VerifyOptions, scenario: Scenario) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    for &d in &opts.dims {
        for pointer in &opts.pointers {
            for &p in &opts.weights {
                for (i, &g) in opts.precisions.iter().enumerate() {
                    for n in 1..=opts.max_observers {
                        let g_prev = predecessors(&opts.precisions, i, n - 1);
                        let f_prev = g_prev
                            .iter()
                            .map(|&gk| pointer.quality(d as u64, gk))
                            .collect::<Result<Vec<_>>>()?;
                        let params = ChainParams::new(d as u64, g, f_prev.clone()).with_weight(p);
                        let closed = analytic::scenario_uncertainty(scenario, &params)?;
                        let pairs: Vec<_> = g_prev.into_iter().zip(f_prev).collect();
                        let brute = oracle::canonical_uncertainty(scenario, d, p, g, &pairs)?;
                        tally.add((closed - brute).abs());
                    }
                }
            }
        }
    }
    Ok(tally.record(format!("{scenario} uncertainty"), opts.tol))
}

fn canonical_pair(d: usize) -> Result<(ProjectorSet, ProjectorSet)> {
    Ok((
        ProjectorSet::canonical(d, BasisLabel::Fourier)?,
        ProjectorSet::canonical(d, BasisLabel::Computational)?,
    ))
}

fn ts1_pattern(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    for &d in &opts.dims {
        let (x, z) = canonical_pair(d)?;
        for &p in &opts.weights {
            let rho = oracle::isotropic(d, p)?;
            for &g in &opts.precisions {
                let pattern = analytic::ts1_probability_pattern(d as u64, p * g * g)?;
                for (obs, proj) in [(Observable::X, &x), (Observable::Z, &z)] {
                    let spec = InstrumentSpec::new(proj.clone(), 0.0, g, Side::AOnly)?;
                    let table = oracle::two_sided_probs(&rho, &spec, &spec)?;
                    for (a, row) in table.iter().enumerate() {
                        for (b, &prob) in row.iter().enumerate() {
                            tally.add((prob - pattern.mass(obs, a as u64, b as u64)).abs());
                        }
                    }
                }
            }
        }
    }
    Ok(tally.record("ts1 probability pattern", opts.tol))
}

fn os2_spectra(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    let pointer = PointerModel::optimal();
    for &d in &opts.dims {
        let (x, z) = canonical_pair(d)?;
        let p = opts.weights.last().copied().unwrap_or(1.0);
        let rho0 = oracle::isotropic(d, p)?;
        for (i, &g) in opts.precisions.iter().enumerate() {
            let g_prev = predecessors(&opts.precisions, i, 2);
            let f_prev = g_prev
                .iter()
                .map(|&gk| pointer.quality(d as u64, gk))
                .collect::<Result<Vec<_>>>()?;
            let slots = g_prev
                .iter()
                .zip(&f_prev)
                .map(|(&gk, &fk)| {
                    Ok(ChainSlot {
                        x: InstrumentSpec::new(x.clone(), fk, gk, Side::AOnly)?,
                        z: InstrumentSpec::new(z.clone(), fk, gk, Side::AOnly)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let params = ChainParams::new(d as u64, g, f_prev).with_weight(p);
            for branch in oracle::sequential_branches(&rho0, &slots)? {
                for (obs, proj) in [(Observable::X, &x), (Observable::Z, &z)] {
                    let (e0, e1) = analytic::os2_branch_eigenvalues(&params, &branch.history, obs)?;
                    for state in oracle::conditional_states_b(&branch.state, proj, g)? {
                        let mut eig = linalg::hermitian_eigenvalues(&state);
                        eig.sort_by(f64::total_cmp);
                        let mut want = vec![e1; d - 1];
                        want.push(e0);
                        want.sort_by(f64::total_cmp);
                        for (got, w) in eig.iter().zip(&want) {
                            tally.add((got - w).abs());
                        }
                    }
                }
            }
        }
    }
    Ok(tally.record("os2 branch spectra", opts.tol))
}

fn mub_structure(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    for &d in &opts.dims {
        let mut labels = vec![BasisLabel::Computational, BasisLabel::Fourier];
        if mub::is_odd_prime(d as u64) {
            labels.extend([BasisLabel::Quadratic(1), BasisLabel::Quadratic(2)]);
        }
        let sets = labels
            .iter()
            .map(|&l| ProjectorSet::canonical(d, l))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in sets.iter().enumerate() {
            tally.add(a.basis().orthonormality_defect());
            tally.add(a.completeness_defect());
            tally.add(a.idempotence_defect());
            for b in &sets[i + 1..] {
                for row in a.basis().overlaps(b.basis()) {
                    for o in row {
                        tally.add((o - 1.0 / d as f64).abs());
                    }
                }
            }
        }
    }
    Ok(tally.record("mub structure", opts.tol))
}

fn pointer_structure(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    for &d in &opts.dims {
        let proj = ProjectorSet::canonical(d, BasisLabel::Fourier)?;
        for pointer in &opts.pointers {
            let mut last = f64::INFINITY;
            for &g in &opts.precisions {
                let f = pointer.quality(d as u64, g)?;
                // Violations of the trade-off or of monotonicity count as deviations.
                tally.add((f * f + g * g - 1.0).max(0.0));
                tally.add((f - last).max(0.0));
                last = f;
            }
        }
        for &g in &opts.precisions {
            let povm = pointer::unsharp_povm(g, &proj)?;
            let mut sum = linalg::identity(d).scale(-1.0);
            for (e, m) in povm.elements.iter().zip(&povm.operators) {
                sum += e;
                tally.add(linalg::max_abs(&(m * m - e)));
            }
            tally.add(linalg::max_abs(&sum));
            let states = pointer::unsharp_pointer_states(d, g)?;
            let (f_states, g_states) = pointer::pointer_quality_and_precision(&states);
            tally.add((g_states - g).abs());
            tally.add((f_states - pointer::quality(pointer::PointerKind::Unsharp, d as u64, g, None)?).abs());
        }
    }
    Ok(tally.record("pointer structure", opts.tol))
}

fn selective_consistency(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    for &d in &opts.dims {
        let proj = ProjectorSet::canonical(d, BasisLabel::Fourier)?;
        let rho = oracle::isotropic(d, 0.9)?;
        for &g in &opts.precisions {
            let f = pointer::quality(pointer::PointerKind::Unsharp, d as u64, g, None)?;
            let spec = InstrumentSpec::new(proj.clone(), f, g, Side::AOnly)?;
            let mut sum = linalg::identity(d * d).scale(0.0);
            let mut total = 0.0;
            for i in 0..d {
                let (prob, post) = oracle::selective_post_state(&rho, &spec, i)?;
                tally.add((prob - post.trace()).abs());
                total += prob;
                sum += post.matrix();
            }
            tally.add((total - 1.0).abs());
            tally.add(linalg::max_abs(&(sum - oracle::nonselective_map(&rho, &spec)?.matrix())));
        }
    }
    Ok(tally.record("selective consistency", opts.tol))
}

/// Expected alternative-basis verdicts; deviation 1 per mismatch.
fn alt_mub(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    let sopts = SolverOptions::default();
    let pointer = PointerModel::optimal();
    let matches = |got: Vec<bool>, want: &[bool]| if got == want { 0.0 } else { 1.0 };
    for &d in opts.dims.iter().filter(|&&d| mub::is_odd_prime(d as u64)) {
        let du = d as u64;
        for s in [Scenario::Os1, Scenario::Os2] {
            for &g in &opts.precisions {
                let quad = solver::alt_mub_witness(du, s, &[MubSetting::Quadratic], &[g], &pointer)?;
                let canon = solver::alt_mub_witness(du, s, &[MubSetting::Canonical], &[g], &pointer)?;
                tally.add(matches(quad, &canon));
            }
        }
        for s in [Scenario::Ts1, Scenario::Ts2] {
            let v = solver::alt_mub_witness(du, s, &[MubSetting::Quadratic], &[1.0], &pointer)?;
            tally.add(matches(v, &[false]));
        }
        let g1c = solver::critical_mu(du, &sopts)?.0;
        for &g1 in opts.precisions.iter().filter(|&&g| g > g1c) {
            let v = solver::alt_mub_witness(
                du,
                Scenario::Os1,
                &[MubSetting::Canonical, MubSetting::Quadratic],
                &[g1, 1.0],
                &pointer,
            )?;
            tally.add(matches(v, &[true, false]));
        }
    }
    Ok(tally.record("alternative bases", opts.tol))
}

/// Root certificates and `G1c^TS = sqrt(G1c^OS)` at every verified dimension.
fn solver_roots(opts: &VerifyOptions) -> Result<CheckRecord> {
    let mut tally = Tally::default();
    let sopts = SolverOptions::default();
    for &d in &opts.dims {
        let os = solver::critical_g1(&ScenarioConfig::new(Scenario::Os1, d as u64, PointerModel::optimal()), &sopts)?;
        let ts = solver::critical_g1(&ScenarioConfig::new(Scenario::Ts1, d as u64, PointerModel::optimal()), &sopts)?;
        if let (Some(a), Some(b)) = (os.g_crit, ts.g_crit) {
            tally.add(((b * b - a).abs() - 1e-8).max(0.0));
        }
        for s in Scenario::ALL {
            for pointer in &opts.pointers {
                let config = ScenarioConfig::new(s, d as u64, pointer.clone());
                for level in solver::observer_chain(&config, opts.max_observers, &sopts)? {
                    if let Some(c) = level.certificate {
                        tally.add((c.abs() - solver::CERTIFICATE_TOL).max(0.0));
                    }
                }
            }
        }
    }
    Ok(tally.record("solver certificates", opts.tol))
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.dims.is_empty() {
        return Err(Error::Domain("no dimensions to verify".into()));
    }
    for &d in &opts.dims {
        if d < 2 {
            return Err(Error::InvalidDimension(d as u64));
        }
        if d > oracle::MAX_DIM {
            return Err(Error::OracleLimit(format!("d = {d} > {}", oracle::MAX_DIM)));
        }
    }
    if opts.max_observers == 0 || opts.max_observers > oracle::MAX_OBSERVERS {
        return Err(Error::OracleLimit(format!("{} observers", opts.max_observers)));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance {}", opts.tol)));
    }
    let mut checks = Vec::new();
    for s in Scenario::ALL {
        checks.push(equivalence(opts, s)?);
    }
    checks.push(ts1_pattern(opts)?);
    checks.push(os2_spectra(opts)?);
    checks.push(selective_consistency(opts)?);
    checks.push(mub_structure(opts)?);
    checks.push(pointer_structure(opts)?);
    checks.push(alt_mub(opts)?);
    checks.push(solver_roots(opts)?);
    Ok(VerifyReport { checks })
}
