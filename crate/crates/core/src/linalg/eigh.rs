//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! For a Hermitian `A`, each sweep visits every off-diagonal pair `(p, q)`
//! and applies the complex rotation
//!
//! ```text
//! U(p,q) = [ c        s·φ ]        φ = a_pq / |a_pq|,
//!          [ -s·φ*    c   ]        tan(2θ) determined by the 2x2 block,
//! ```
//!
//! which zeroes `a_pq` in `U† A U`. Off-diagonal mass decreases
//! monotonically and the iteration converges quadratically; eigenvalues are
//! returned in ascending order with the eigenvector columns permuted to
//! match. The routine is deterministic for a given input.

use ndarray::Array1;

use super::{check_hermitian, frobenius_norm, CMatrix};
use crate::error::{SimError, SimResult};

const MAX_SWEEPS: usize = 60;
const OFF_TOL: f64 = 1e-14;

/// Sum of squared magnitudes of strictly off-diagonal entries.
fn off_norm(a: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                s += a[[i, j]].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.
///
/// The input may carry roundoff-level skew; it is symmetrized after a
/// hermiticity check at `1e-8` absolute tolerance.
pub fn eigh(a: &CMatrix) -> SimResult<(Array1<f64>, CMatrix)> {
    let mut m = check_hermitian(a, 1e-8, "eigh input")?;
    let n = m.nrows();
    if n == 0 {
        return Err(SimError::InvalidArgument("eigh of empty matrix".into()));
    }
    let mut v = super::identity(n);
    let scale = frobenius_norm(&m).max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phi = apq / mag;
                let tau = (m[[q, q]].re - m[[p, p]].re) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phi * s;

                // Columns: B ← B·U, applied to both m and the accumulator v.
                for k in 0..n {
                    let bkp = m[[k, p]];
                    let bkq = m[[k, q]];
                    m[[k, p]] = c * bkp - sp.conj() * bkq;
                    m[[k, q]] = sp * bkp + c * bkq;
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - sp.conj() * vkq;
                    v[[k, q]] = sp * vkp + c * vkq;
                }
                // Rows: B ← U†·B.
                for k in 0..n {
                    let bpk = m[[p, k]];
                    let bqk = m[[q, k]];
                    m[[p, k]] = c * bpk - sp * bqk;
                    m[[q, k]] = sp.conj() * bpk + c * bqk;
                }
            }
        }
    }
    if !converged && off_norm(&m) > OFF_TOL * scale {
        return Err(SimError::NoConvergence(format!(
            "Jacobi eigensolver: off-diagonal norm {:.3e} after {MAX_SWEEPS} sweeps",
            off_norm(&m)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));

    let eigenvalues = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut vectors = CMatrix::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    Ok((eigenvalues, vectors))
}

/// Largest singular value of `a`, from the spectrum of `a†a`.
pub fn spectral_norm(a: &CMatrix) -> SimResult<f64> {
    let gram = super::dagger(a).dot(a);
    let (vals, _) = eigh(&gram)?;
    Ok(vals.iter().fold(0.0f64, |acc, &x| acc.max(x.max(0.0))).sqrt())
}

/// Trace norm `Σ|λ_i|` of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &CMatrix) -> SimResult<f64> {
    let (vals, _) = eigh(a)?;
    Ok(vals.iter().map(|x| x.abs()).sum())
}
