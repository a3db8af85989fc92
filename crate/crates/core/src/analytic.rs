//! Closed-form uncertainties for the four sequential scenarios.
//!
//! Everything here is scalar: the formulas take the current observer's
//! precision and the predecessors' quality factors, never matrices, so they
//! stay cheap at any `d`. Pointer families are resolved by the solver.

use crate::error::{Error, Result};
use crate::scenario::{Observable, Scenario};

/// Binary Shannon entropy in bits, `H2(0) = H2(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy of {x}")));
    }
    Ok(h2(x))
}

// Clamped variant for arguments that are probabilities up to rounding.
fn h2(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::Domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn check_d(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Precision of the current observer plus the quality factors of the
/// `n - 1` observers before it (`F_0 = 1` is implicit), on an isotropic
/// state of weight `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainParams {
    pub d: u64,
    pub g_n: f64,
    pub f_list: Vec<f64>,
    pub p: f64,
}

impl ChainParams {
    pub fn new(d: u64, g_n: f64, f_list: Vec<f64>) -> Self {
        ChainParams {
            d,
            g_n,
            f_list,
            p: 1.0,
        }
    }

    pub fn with_weight(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// Observer index `n`.
    pub fn n(&self) -> usize {
        self.f_list.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        check_d(self.d)?;
        check_unit("G_n", self.g_n)?;
        check_unit("p", self.p)?;
        for (k, &f) in self.f_list.iter().enumerate() {
            check_unit(&format!("F_{}", k + 1), f)?;
        }
        Ok(())
    }

    fn squared(&self) -> ChainParams {
        ChainParams {
            d: self.d,
            g_n: self.g_n * self.g_n,
            f_list: self.f_list.iter().map(|f| f * f).collect(),
            p: self.p,
        }
    }
}

/// `μ_n = p G_n prod_{k<n} (1 + F_k) / 2^n`.
pub fn mu_n(params: &ChainParams) -> f64 {
    let prod: f64 = params.f_list.iter().map(|f| 0.5 * (1.0 + f)).product();
    // (1 + F_0) / 2 = 1
    params.p * params.g_n * prod
}

/// Two-sided analogue of [`mu_n`] with squared precision and qualities.
pub fn nu_n(params: &ChainParams) -> f64 {
    mu_n(&params.squared())
}

/// `H(X|B) + H(Z|B)` for the maximally entangled state seen through an
/// effective correlation `μ`: `2[H2((1 + d1 μ)/d) + d1 (1 - μ)/d log2 d1]`.
pub fn uncertainty_os1(d: u64, mu: f64) -> Result<f64> {
    check_d(d)?;
    check_unit("mu", mu)?;
    Ok(2.0 * conditional_entropy(d, mu))
}

/// Same functional form as [`uncertainty_os1`], evaluated at `ν`.
pub fn uncertainty_ts1(d: u64, nu: f64) -> Result<f64> {
    uncertainty_os1(d, nu)
}

/// `H2(q) + (1 - q) log2 d1` with `q = (1 + d1 x)/d`: the conditional
/// entropy of one observable when the conditional states have spectrum
/// `{(1 + d1 x)/d^2, (1 - x)/d^2 x d1}`.
fn conditional_entropy(d: u64, x: f64) -> f64 {
    let df = d as f64;
    let d1 = df - 1.0;
    let q = (1.0 + d1 * x) / df;
    let spread = if d == 2 {
        0.0
    } else {
        d1 * (1.0 - x) / df * d1.log2()
    };
    h2(q) + spread
}

/// Average of the one-sided uncertainty over the `2^{n-1}` histories of
/// predecessor settings, with the predecessors' settings known to the
/// current observer.
pub fn uncertainty_os2(params: &ChainParams) -> Result<f64> {
    params.validate()?;
    Ok(averaged(params))
}

/// Two-sided analogue of [`uncertainty_os2`] (squared precision and qualities).
pub fn uncertainty_ts2(params: &ChainParams) -> Result<f64> {
    params.validate()?;
    Ok(averaged(&params.squared()))
}

// (1/2^{n-2}) { sum_{i_1..i_{n-1}} H2((1 + d1 G prod F_k^{i_k})/d)
//              + d1/d [2^{n-1} - G/2 prod (1 + F_k)] log2 d1 }
fn averaged(params: &ChainParams) -> f64 {
    let d = params.d;
    let df = d as f64;
    let d1 = df - 1.0;
    let g = params.p * params.g_n;
    let m = params.f_list.len();

    // Products prod_k F_k^{i_k} over all exponent patterns, built by doubling.
    let mut products = Vec::with_capacity(1 << m);
    products.push(1.0);
    for &f in &params.f_list {
        let len = products.len();
        for k in 0..len {
            products.push(products[k] * f);
        }
    }
    let entropy_sum: f64 = products
        .iter()
        .map(|&prod| h2((1.0 + d1 * g * prod) / df))
        .sum();
    let spread = if d == 2 {
        0.0
    } else {
        let full: f64 = params.f_list.iter().map(|f| 1.0 + f).product();
        d1 / df * ((1u64 << m) as f64 - g * full) * d1.log2()
    };
    // 2^{n-2} = 2^{m-1}
    (entropy_sum + spread) * 2f64.powi(1 - m as i32)
}

/// The scenario's uncertainty for observer `n = f_list.len() + 1`.
pub fn scenario_uncertainty(scenario: Scenario, params: &ChainParams) -> Result<f64> {
    params.validate()?;
    match scenario {
        Scenario::Os1 => uncertainty_os1(params.d, mu_n(params)),
        Scenario::Ts1 => uncertainty_ts1(params.d, nu_n(params)),
        Scenario::Os2 => uncertainty_os2(params),
        Scenario::Ts2 => uncertainty_ts2(params),
    }
}

/// Joint outcome distribution of matched two-sided measurements on the
/// maximally entangled state: mass `(1 + d1 ν)/d^2` on each correlated
/// cell and `(1 - ν)/d^2` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityPattern {
    pub d: u64,
    pub correlated: f64,
    pub uncorrelated: f64,
}

impl ProbabilityPattern {
    /// Fourier outcomes are correlated when `x1 + x2 ≡ 0 (mod d)`,
    /// computational outcomes when `z1 = z2`.
    pub fn in_support(&self, observable: Observable, a: u64, b: u64) -> bool {
        match observable {
            Observable::X => (a + b) % self.d == 0,
            Observable::Z => a == b,
        }
    }

    pub fn support(&self, observable: Observable) -> Vec<(u64, u64)> {
        (0..self.d)
            .map(|a| match observable {
                Observable::X => (a, (self.d - a) % self.d),
                Observable::Z => (a, a),
            })
            .collect()
    }

    pub fn mass(&self, observable: Observable, a: u64, b: u64) -> f64 {
        if self.in_support(observable, a, b) {
            self.correlated
        } else {
            self.uncorrelated
        }
    }

    pub fn total(&self) -> f64 {
        let df = self.d as f64;
        df * self.correlated + df * (df - 1.0) * self.uncorrelated
    }
}

pub fn ts1_probability_pattern(d: u64, nu: f64) -> Result<ProbabilityPattern> {
    check_d(d)?;
    check_unit("nu", nu)?;
    let df = d as f64;
    Ok(ProbabilityPattern {
        d,
        correlated: (1.0 + (df - 1.0) * nu) / (df * df),
        uncorrelated: (1.0 - nu) / (df * df),
    })
}

/// Spectrum of the conditional state of `B` in one history of the
/// shared-settings one-sided scenario: `(ε0, ε1)` with multiplicities
/// `1` and `d - 1`. `history[k]` is the setting of observer `k + 1`.
pub fn os2_branch_eigenvalues(
    params: &ChainParams,
    history: &[Observable],
    observable: Observable,
) -> Result<(f64, f64)> {
    params.validate()?;
    if history.len() != params.f_list.len() {
        return Err(Error::Shape(format!(
            "history has {} entries for {} predecessors",
            history.len(),
            params.f_list.len()
        )));
    }
    let prod: f64 = params
        .f_list
        .iter()
        .zip(history)
        .map(|(&f, &e)| if e == observable { 1.0 } else { f })
        .product();
    let x = params.p * params.g_n * prod;
    let df = params.d as f64;
    Ok(((1.0 + (df - 1.0) * x) / (df * df), (1.0 - x) / (df * df)))
}
