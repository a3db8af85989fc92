//! Small dense complex matrix helpers used by the basis constructions and
//! the density-matrix oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues below this are treated as genuine negativity, not rounding.
pub const EIGEN_FLOOR: f64 = -1e-10;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues of a Hermitian matrix (the anti-Hermitian part is discarded).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Eigenvalues clipped at zero. Anything below [`EIGEN_FLOOR`] aborts; the
/// clipped spectrum is rescaled to keep the original trace.
pub fn clipped_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    let mut eig = hermitian_eigenvalues(m);
    let total: f64 = eig.iter().sum();
    if let Some(min) = eig.iter().copied().reduce(f64::min) {
        if min < EIGEN_FLOOR {
            return Err(Error::NumericFailure(format!(
                "eigenvalue {min:e} below floor {EIGEN_FLOOR:e}"
            )));
        }
    }
    let mut clipped = 0.0;
    for e in eig.iter_mut() {
        if *e < 0.0 {
            *e = 0.0;
        }
        clipped += *e;
    }
    if clipped > 0.0 && clipped != total {
        let s = total / clipped;
        eig.iter_mut().for_each(|e| *e *= s);
    }
    Ok(eig)
}

/// `-sum λ log2 λ` over a (possibly unnormalized) spectrum, with `0 log 0 = 0`.
pub fn shannon_bits<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    weights
        .into_iter()
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum()
}

/// Von Neumann entropy in bits of a positive (not necessarily unit-trace)
/// Hermitian matrix.
pub fn entropy_bits(m: &CMatrix) -> Result<f64> {
    Ok(shannon_bits(clipped_spectrum(m)?))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = m.nrows();
    let mut root = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < EIGEN_FLOOR {
            return Err(Error::NumericFailure(format!(
                "square root of matrix with eigenvalue {lambda:e}"
            )));
        }
        let v = eig.eigenvectors.column(k);
        root += (&v * v.adjoint()).scale(lambda.max(0.0).sqrt());
    }
    Ok(root)
}

/// Partial trace over the first factor of a `d_a * d_b` bipartite operator
/// stored with index `a * d_b + b`.
pub fn partial_trace_first(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d_b, d_b);
    for a in 0..d_a {
        for b in 0..d_b {
            for b2 in 0..d_b {
                out[(b, b2)] += m[(a * d_b + b, a * d_b + b2)];
            }
        }
    }
    out
}
