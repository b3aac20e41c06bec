//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here operates on `ndarray` arrays of `num_complex::Complex64`.
//! The dimensions in play are small (state spaces up to a few hundred), so
//! the kernels favour determinism and simplicity over asymptotic speed: a
//! cyclic Jacobi eigensolver for Hermitian matrices, a Padé scaling-and-
//! squaring exponential for general matrices, and pivoted Gram-Schmidt for
//! rank-revealing orthonormalization. The two matrix-exponential routes
//! (spectral for Hermitian input, Padé for anything) are deliberately
//! independent so one can serve as an oracle for the other in tests.

mod eigh;
mod expm;
mod orth;
mod random;

pub use eigh::{eigh, spectral_norm, trace_norm_hermitian};
pub use expm::{expm, expm_hermitian, lu_solve};
pub use orth::{complete_unitary, orthonormal_columns, qr_unitary};
pub use random::{ginibre, random_density, random_hermitian, random_state_vector, random_unitary};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{SimError, SimResult};

/// Complex double-precision scalar.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = Array2<C64>;
/// Dense complex vector.
pub type CVector = Array1<C64>;
/// Dense real matrix.
pub type RMatrix = Array2<f64>;
/// Dense real vector.
pub type RVector = Array1<f64>;

/// `n x n` identity matrix.
pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    ndarray::linalg::kron(&a.view(), &b.view())
}

/// Matrix trace.
pub fn trace(a: &CMatrix) -> C64 {
    a.diag().sum()
}

/// Largest entry magnitude; zero for empty input.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(a: &CMatrix) -> f64 {
    let mut best = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Largest magnitude of `a - a†`; zero iff `a` is exactly Hermitian.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Largest magnitude of `u†u - 1`; zero iff `u` is exactly unitary.
pub fn unitary_deviation(u: &CMatrix) -> f64 {
    let gram = dagger(u).dot(u);
    max_abs(&(&gram - &identity(u.ncols())))
}

/// Checks that `a` is square and returns its dimension.
pub fn check_square(a: &CMatrix, what: &str) -> SimResult<usize> {
    if a.nrows() != a.ncols() {
        return Err(SimError::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// Checks hermiticity of `a` within `tol` and returns the symmetrized matrix
/// `(a + a†)/2` with the roundoff-level skew removed.
pub fn check_hermitian(a: &CMatrix, tol: f64, what: &str) -> SimResult<CMatrix> {
    check_square(a, what)?;
    let dev = hermitian_deviation(a);
    if dev > tol {
        return Err(SimError::NotStructured(format!(
            "{what} is not Hermitian: deviation {dev:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok((a + &dagger(a)).mapv(|z| 0.5 * z))
}

/// Largest singular value, computed spectrally from `a†a`.
pub fn operator_norm(a: &CMatrix) -> SimResult<f64> {
    check_square(a, "operator norm input")?;
    spectral_norm(a)
}
