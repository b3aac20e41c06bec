//! Orthonormalization with rank detection.

use super::{CMatrix, CVector, C64};
use crate::error::{SimError, SimResult};

/// Orthonormal basis for the column span of `a`, by column-pivoted modified
/// Gram-Schmidt with one reorthogonalization pass.
///
/// Columns whose residual norm falls below `tol` (relative to the largest
/// original column norm) are treated as linearly dependent and dropped, so
/// the result has exactly `rank(a)` vectors. Pivoting keeps the selection
/// deterministic under degeneracy: at each step the remaining column with
/// the largest residual is taken, ties broken by lowest index.
pub fn orthonormal_columns(a: &CMatrix, tol: f64) -> Vec<CVector> {
    let m = a.ncols();
    let mut residuals: Vec<CVector> = (0..m).map(|j| a.column(j).to_owned()).collect();
    let scale = residuals
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut basis: Vec<CVector> = Vec::new();
    let mut used = vec![false; m];

    loop {
        let mut pivot = None;
        let mut best = tol * scale;
        for (j, r) in residuals.iter().enumerate() {
            if used[j] {
                continue;
            }
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > best {
                best = norm;
                pivot = Some(j);
            }
        }
        let Some(j) = pivot else { break };
        used[j] = true;
        let mut v = residuals[j].clone();
        // Second projection pass for numerical orthogonality.
        for b in &basis {
            let overlap: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            v = &v - &b.mapv(|x| x * overlap);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= tol * scale {
            continue;
        }
        let v = v.mapv(|z| z / norm);
        for (k, r) in residuals.iter_mut().enumerate() {
            if used[k] {
                continue;
            }
            let overlap: C64 = v.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
            *r = &*r - &v.mapv(|x| x * overlap);
        }
        basis.push(v);
    }
    basis
}

/// Completes a set of orthonormal columns to a full unitary.
///
/// The first `k` columns of the result are the input columns, untouched;
/// the remaining `n-k` are drawn deterministically from the identity basis
/// by column-pivoted Gram-Schmidt (largest residual first, ties to the
/// lowest index), so the completion is reproducible.
pub fn complete_unitary(v: &CMatrix) -> SimResult<CMatrix> {
    let (n, k) = (v.nrows(), v.ncols());
    if k > n {
        return Err(SimError::DimensionMismatch(format!(
            "cannot complete {k} columns in dimension {n}"
        )));
    }
    for a in 0..k {
        for b in a..k {
            let overlap: C64 = v
                .column(a)
                .iter()
                .zip(v.column(b).iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            let expected = if a == b { 1.0 } else { 0.0 };
            if (overlap - expected).norm() > 1e-10 {
                return Err(SimError::NotStructured(format!(
                    "columns {a} and {b} are not orthonormal (overlap {overlap:.3e})"
                )));
            }
        }
    }
    let mut u = CMatrix::zeros((n, n));
    u.slice_mut(ndarray::s![.., ..k]).assign(v);
    // Residuals of the identity basis after projecting out the input span.
    let mut residuals: Vec<CVector> = (0..n)
        .map(|j| {
            let mut e = CVector::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            for c in 0..k {
                let col = v.column(c);
                let overlap: C64 = col.iter().zip(e.iter()).map(|(x, y)| x.conj() * y).sum();
                e = &e - &col.mapv(|x| x * overlap);
            }
            e
        })
        .collect();
    let mut used = vec![false; n];
    for next in k..n {
        let mut pivot = 0usize;
        let mut best = -1.0f64;
        for (j, r) in residuals.iter().enumerate() {
            if used[j] {
                continue;
            }
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > best + 1e-15 {
                best = norm;
                pivot = j;
            }
        }
        if best < 1e-8 {
            return Err(SimError::NoConvergence(
                "orthonormal completion ran out of independent directions".into(),
            ));
        }
        used[pivot] = true;
        let mut w = residuals[pivot].clone();
        // Reorthogonalize against everything accepted so far.
        for c in 0..next {
            let col = u.column(c);
            let overlap: C64 = col.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum();
            w = &w - &col.to_owned().mapv(|x| x * overlap);
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let w = w.mapv(|z| z / norm);
        for (j, r) in residuals.iter_mut().enumerate() {
            if used[j] {
                continue;
            }
            let overlap: C64 = w.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
            *r = &*r - &w.mapv(|x| x * overlap);
        }
        u.column_mut(next).assign(&w);
    }
    Ok(u)
}

/// Unitary `Q` of the QR factorization of a full-rank square matrix.
///
/// Gram-Schmidt produces the unique factorization in which `R` has positive
/// real diagonal, so applying this to a matrix of i.i.d. complex Gaussians
/// yields a Haar-distributed unitary.
pub fn qr_unitary(a: &CMatrix) -> SimResult<CMatrix> {
    let n = super::check_square(a, "qr_unitary input")?;
    let mut q = CMatrix::zeros((n, n));
    for j in 0..n {
        let mut v = a.column(j).to_owned();
        // Two projection passes; plain MGS loses orthogonality for
        // ill-conditioned samples.
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let overlap: C64 = qi.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                v = &v - &qi.mapv(|x| x * overlap);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(SimError::NotStructured(
                "qr_unitary: input is rank deficient".into(),
            ));
        }
        q.column_mut(j).assign(&v.mapv(|z| z / norm));
    }
    Ok(q)
}
