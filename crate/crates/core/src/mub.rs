//! Mutually unbiased bases for a single qudit and the incompatibility of
//! POVM pairs built from them.
//!
//! Three families are available: the computational basis, the Fourier
//! basis, and for odd prime `d` the `d - 1` quadratic-phase bases
//! `|a>_r = d^{-1/2} sum_n exp(2 pi i r (a + n)^2 / d) |n>`. For `d = 2` the
//! quadratic label `r = 1` denotes the eigenbasis of the second Pauli
//! operator so that all three qubit MUBs are addressable uniformly.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, EIGEN_FLOOR};

/// Tolerance for orthonormality and completeness checks.
pub const BASIS_TOL: f64 = 1e-12;
/// Tolerance for POVM validity checks.
pub const POVM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Computational,
    Fourier,
    Quadratic(u32),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Computational => f.write_str("computational"),
            BasisLabel::Fourier => f.write_str("fourier"),
            BasisLabel::Quadratic(r) => write!(f, "quadratic({r})"),
        }
    }
}

/// An orthonormal basis stored as the columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct Basis {
    label: BasisLabel,
    columns: CMatrix,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    /// Component `n` of basis vector `a`.
    pub fn component(&self, a: usize, n: usize) -> Complex64 {
        self.columns[(n, a)]
    }

    pub fn vector(&self, a: usize) -> Vec<Complex64> {
        self.columns.column(a).iter().copied().collect()
    }

    /// Unitary whose columns are the basis vectors.
    pub fn unitary(&self) -> &CMatrix {
        &self.columns
    }

    /// `max_{a,b} | <v_a|v_b> - δ_ab |`
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.columns.adjoint() * &self.columns;
        linalg::max_abs(&(gram - linalg::identity(self.dim())))
    }

    /// Squared overlaps `|<u_a|w_b>|^2` with another basis, row-major in `a`.
    pub fn overlaps(&self, other: &Basis) -> Vec<Vec<f64>> {
        let g = self.columns.adjoint() * &other.columns;
        (0..self.dim())
            .map(|a| (0..other.dim()).map(|b| g[(a, b)].norm_sqr()).collect())
            .collect()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d as u64));
    }
    Ok(())
}

fn phase(numerator: u64, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * numerator as f64 / d as f64)
}

pub fn computational_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    Ok(Basis {
        label: BasisLabel::Computational,
        columns: linalg::identity(d),
    })
}

/// Vector `x` has components `exp(2 pi i x n / d) / sqrt(d)`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    let dd = d as u64;
    let columns = CMatrix::from_fn(d, d, |n, x| phase((x as u64 * n as u64) % dd, d) * norm);
    Ok(Basis {
        label: BasisLabel::Fourier,
        columns,
    })
}

pub fn is_odd_prime(d: u64) -> bool {
    if d < 3 || d % 2 == 0 {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Quadratic-phase basis `r` for odd prime `d` (or the `σ_y` eigenbasis for
/// `d = 2, r = 1`).
pub fn quadratic_mub(d: usize, r: u32) -> Result<Basis> {
    check_dim(d)?;
    if d == 2 {
        if r != 1 {
            return Err(Error::InvalidIndex {
                index: r as u64,
                max: 1,
            });
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::i();
        let columns = CMatrix::from_column_slice(2, 2, &[c(s), i * s, c(s), -i * s]);
        return Ok(Basis {
            label: BasisLabel::Quadratic(1),
            columns,
        });
    }
    if !is_odd_prime(d as u64) {
        return Err(Error::UnsupportedDimension(d as u64));
    }
    if r == 0 || r as usize >= d {
        return Err(Error::InvalidIndex {
            index: r as u64,
            max: d as u64 - 1,
        });
    }
    let norm = 1.0 / (d as f64).sqrt();
    let dd = d as u64;
    let columns = CMatrix::from_fn(d, d, |n, a| {
        let s = (a as u64 + n as u64) % dd;
        phase((r as u64 * ((s * s) % dd)) % dd, d) * norm
    });
    Ok(Basis {
        label: BasisLabel::Quadratic(r),
        columns,
    })
}

pub fn basis(d: usize, label: BasisLabel) -> Result<Basis> {
    match label {
        BasisLabel::Computational => computational_basis(d),
        BasisLabel::Fourier => fourier_basis(d),
        BasisLabel::Quadratic(r) => quadratic_mub(d, r),
    }
}

/// Rank-one projectors `|v_i><v_i|` of a basis.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    basis: Basis,
    projectors: Vec<CMatrix>,
}

impl ProjectorSet {
    pub fn new(basis: Basis) -> Self {
        let projectors = (0..basis.dim())
            .map(|i| {
                let v = basis.columns.column(i);
                &v * v.adjoint()
            })
            .collect();
        ProjectorSet { basis, projectors }
    }

    pub fn canonical(d: usize, label: BasisLabel) -> Result<Self> {
        Ok(Self::new(basis(d, label)?))
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn label(&self) -> BasisLabel {
        self.basis.label
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .projectors
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, p| acc + p);
        linalg::max_abs(&(sum - linalg::identity(self.dim())))
    }

    pub fn idempotence_defect(&self) -> f64 {
        self.projectors
            .iter()
            .map(|p| linalg::max_abs(&(p * p - p)))
            .fold(0.0, f64::max)
    }
}

fn validate_povm(elements: &[CMatrix], name: &str) -> Result<usize> {
    let first = elements
        .first()
        .ok_or_else(|| Error::InvalidPovm(format!("{name} is empty")))?;
    let n = first.nrows();
    let mut sum = CMatrix::zeros(n, n);
    for (k, e) in elements.iter().enumerate() {
        if e.nrows() != n || e.ncols() != n {
            return Err(Error::Shape(format!("{name}[{k}] is not {n}x{n}")));
        }
        if linalg::hermiticity_defect(e) > POVM_TOL {
            return Err(Error::InvalidPovm(format!("{name}[{k}] is not Hermitian")));
        }
        let min = linalg::hermitian_eigenvalues(e)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidPovm(format!(
                "{name}[{k}] has negative eigenvalue {min:e}"
            )));
        }
        sum += e;
    }
    let defect = linalg::max_abs(&(sum - linalg::identity(n)));
    if defect > POVM_TOL {
        return Err(Error::InvalidPovm(format!(
            "{name} sums to identity only within {defect:e}"
        )));
    }
    Ok(n)
}

/// `c'' = max_{x,z} tr(X_x Z_z)`.
pub fn incompatibility(povm_x: &[CMatrix], povm_z: &[CMatrix]) -> Result<f64> {
    let nx = validate_povm(povm_x, "X")?;
    let nz = validate_povm(povm_z, "Z")?;
    if nx != nz {
        return Err(Error::Shape(format!("POVMs act on {nx} and {nz} dimensions")));
    }
    let mut best = f64::NEG_INFINITY;
    for x in povm_x {
        for z in povm_z {
            best = best.max((x * z).trace().re);
        }
    }
    Ok(best)
}
