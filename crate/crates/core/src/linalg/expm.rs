//! Matrix exponentials and the linear solves backing them.
//!
//! [`expm`] is the degree-13 Padé approximant with scaling and squaring
//! (Higham 2005) and works for arbitrary complex matrices, including the
//! non-Hermitian Liouville-space generators of open-system dynamics.
//! [`expm_hermitian`] instead exponentiates through the spectral
//! decomposition, `V e^{z·λ} V†`. The two share no code, which makes them
//! usable as mutual cross-checks.

use super::{check_hermitian, check_square, eigh, identity, one_norm, CMatrix, C64};
use crate::error::{SimError, SimResult};

/// Padé-13 coefficients b_0..b_13.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// 1-norm threshold above which the argument is scaled down by powers of 2.
const THETA13: f64 = 5.371_920_351_148_152;

/// Solves `a·x = b` for matrix `b` by LU factorization with partial
/// pivoting.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> SimResult<CMatrix> {
    let n = check_square(a, "lu_solve coefficient matrix")?;
    if b.nrows() != n {
        return Err(SimError::DimensionMismatch(format!(
            "lu_solve right-hand side has {} rows, expected {n}",
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = x.ncols();

    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[[k, k]].norm();
        for r in (k + 1)..n {
            let mag = lu[[r, k]].norm();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best < 1e-300 {
            return Err(SimError::NotStructured(
                "lu_solve: matrix is singular to working precision".into(),
            ));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[pivot, j]];
                lu[[pivot, j]] = tmp;
            }
            for j in 0..m {
                let tmp = x[[k, j]];
                x[[k, j]] = x[[pivot, j]];
                x[[pivot, j]] = tmp;
            }
        }
        let diag = lu[[k, k]];
        for r in (k + 1)..n {
            let factor = lu[[r, k]] / diag;
            if factor.norm() == 0.0 {
                continue;
            }
            lu[[r, k]] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[[k, j]];
                lu[[r, j]] -= sub;
            }
            for j in 0..m {
                let sub = factor * x[[k, j]];
                x[[r, j]] -= sub;
            }
        }
    }
    // Back substitution on the upper triangle.
    for j in 0..m {
        for k in (0..n).rev() {
            let mut acc = x[[k, j]];
            for r in (k + 1)..n {
                acc -= lu[[k, r]] * x[[r, j]];
            }
            x[[k, j]] = acc / lu[[k, k]];
        }
    }
    Ok(x)
}

/// Matrix exponential `e^A` for a general complex square matrix.
pub fn expm(a: &CMatrix) -> SimResult<CMatrix> {
    let n = check_square(a, "expm input")?;
    if n == 0 {
        return Err(SimError::InvalidArgument("expm of empty matrix".into()));
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = C64::new((0.5f64).powi(squarings as i32), 0.0);
    let a1 = a.mapv(|z| z * scale);

    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let eye = identity(n);
    let b = |i: usize| C64::new(PADE13[i], 0.0);

    let inner_u = a6.mapv(|z| z * b(13)) + a4.mapv(|z| z * b(11)) + a2.mapv(|z| z * b(9));
    let u_poly = a6.dot(&inner_u)
        + a6.mapv(|z| z * b(7))
        + a4.mapv(|z| z * b(5))
        + a2.mapv(|z| z * b(3))
        + eye.mapv(|z| z * b(1));
    let u = a1.dot(&u_poly);

    let inner_v = a6.mapv(|z| z * b(12)) + a4.mapv(|z| z * b(10)) + a2.mapv(|z| z * b(8));
    let v = a6.dot(&inner_v)
        + a6.mapv(|z| z * b(6))
        + a4.mapv(|z| z * b(4))
        + a2.mapv(|z| z * b(2))
        + eye.mapv(|z| z * b(0));

    let mut result = lu_solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

/// `V e^{z·λ} V†` for Hermitian `h = V diag(λ) V†`.
///
/// With `z = -i·t` this is the propagator `e^{-i t h}`.
pub fn expm_hermitian(h: &CMatrix, z: C64) -> SimResult<CMatrix> {
    let h = check_hermitian(h, 1e-8, "expm_hermitian input")?;
    let (vals, vecs) = eigh(&h)?;
    let n = vals.len();
    let mut phased = CMatrix::zeros((n, n));
    for (j, col) in vecs.columns().into_iter().enumerate() {
        let factor = (z * vals[j]).exp();
        phased.column_mut(j).assign(&col.mapv(|x| x * factor));
    }
    Ok(phased.dot(&super::dagger(&vecs)))
}
