//! Heisenberg-Weyl operators and their eigenbases.
//!
//! For dimension `d` with `ω = e^{i2π/d}`, the operator `M_{jk}` combines a
//! cyclic shift by `j` with `k` applications of the clock phase:
//!
//! ```text
//! M_{jk}[i, (i+j) mod d] = ω^{k·((i+j) mod d)},     all other entries 0.
//! ```
//!
//! Special cases: `M_{00} = 1`, `M_{10}` is the shift `X` (`d = 2`: Pauli X),
//! `M_{01}` is the clock `Z`. The family is unitary and trace-orthogonal,
//! `tr(M_{jk}† M_{j'k'}) = d·δ_{jj'}δ_{kk'}`, so it serves as an operator
//! basis for density matrices.
//!
//! Each `M_{jk}` satisfies `(M_{jk})^d = c·1` for a unimodular scalar `c`,
//! so its eigenvalues are `λ_m = c^{1/d} ω^m` (principal root). Eigenspaces
//! are obtained from the spectral averages
//! `P_m = (1/d) Σ_l λ_m^{-l} M^l`, which avoids a general eigensolver and
//! keeps degenerate cases deterministic.

use std::f64::consts::TAU;

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, C64};

use super::BasisLabel;

/// Validates the index pair `(j, k)` for dimension `d`.
fn check_indices(j: usize, k: usize, d: usize) -> SimResult<()> {
    if d == 0 {
        return Err(SimError::InvalidArgument(
            "Heisenberg-Weyl dimension must be positive".into(),
        ));
    }
    if j >= d || k >= d {
        return Err(SimError::InvalidArgument(format!(
            "Heisenberg-Weyl indices ({j},{k}) out of range for dimension {d}"
        )));
    }
    Ok(())
}

/// The Heisenberg-Weyl operator `M_{jk}` in dimension `d`.
pub fn hw_operator(j: usize, k: usize, d: usize) -> SimResult<CMatrix> {
    check_indices(j, k, d)?;
    let mut m = CMatrix::zeros((d, d));
    for i in 0..d {
        let col = (i + j) % d;
        let phase = TAU * (k as f64) * (col as f64) / (d as f64);
        m[[i, col]] = C64::new(phase.cos(), phase.sin());
    }
    Ok(m)
}

/// All index pairs `(j, k)` in row-major order, `(0,0)` first.
pub fn hw_indices(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |j| (0..d).map(move |k| (j, k)))
}

/// Row-major index pairs with the identity `(0,0)` omitted.
pub fn hw_indices_traceless(d: usize) -> impl Iterator<Item = (usize, usize)> {
    hw_indices(d).filter(|&(j, k)| (j, k) != (0, 0))
}

/// Orthonormal eigenbasis of `M_{jk}`, as a [`BasisLabel`].
///
/// Eigenvectors are grouped by eigenvalue `λ_m = c^{1/d} ω^m` in ascending
/// `m`; zero-rank `m` are skipped. Within a degenerate eigenspace, vectors
/// come from pivoted Gram-Schmidt on the spectral projector's columns, and
/// every vector is phase-fixed so its first nonnegligible component is real
/// and positive. `(j,k) = (0,0)` returns the computational basis.
pub fn hw_eigenbasis(j: usize, k: usize, d: usize) -> SimResult<BasisLabel> {
    check_indices(j, k, d)?;
    if j == 0 && k == 0 {
        return Ok(BasisLabel::computational(d));
    }
    let m = hw_operator(j, k, d)?;

    // Powers M^0 .. M^{d-1}, then c from M^d = c·1.
    let mut powers: Vec<CMatrix> = Vec::with_capacity(d);
    powers.push(linalg::identity(d));
    for l in 1..d {
        powers.push(powers[l - 1].dot(&m));
    }
    let m_d = powers[d - 1].dot(&m);
    let c = m_d[[0, 0]];
    let off = linalg::max_abs(&(&m_d - &linalg::identity(d).mapv(|x| x * c)));
    if (c.norm() - 1.0).abs() > 1e-10 || off > 1e-10 {
        return Err(SimError::NotStructured(format!(
            "M^d is not a unimodular multiple of the identity (deviation {off:.3e})"
        )));
    }
    let root = C64::from_polar(1.0, c.arg() / d as f64);

    let mut columns = CMatrix::zeros((d, d));
    let mut filled = 0usize;
    for m_idx in 0..d {
        let omega_m = C64::from_polar(1.0, TAU * m_idx as f64 / d as f64);
        let lambda = root * omega_m;
        // P_m = (1/d) Σ_l λ^{-l} M^l; a projector of rank = multiplicity.
        let mut proj = CMatrix::zeros((d, d));
        let mut lambda_inv_l = C64::new(1.0, 0.0);
        for power in powers.iter() {
            proj = proj + power.mapv(|x| x * lambda_inv_l);
            lambda_inv_l /= lambda;
        }
        proj = proj.mapv(|x| x / d as f64);
        let rank = linalg::trace(&proj).re.round() as i64;
        if rank <= 0 {
            continue;
        }
        let mut vectors = linalg::orthonormal_columns(&proj, 1e-8);
        if vectors.len() != rank as usize {
            return Err(SimError::NoConvergence(format!(
                "spectral projector rank {rank} but {} orthonormal columns found",
                vectors.len()
            )));
        }
        for v in vectors.iter_mut() {
            let lead = v
                .iter()
                .find(|z| z.norm() > 1e-8)
                .copied()
                .unwrap_or(C64::new(1.0, 0.0));
            let phase = lead.conj() / lead.norm();
            *v = v.mapv(|z| z * phase);
            columns.column_mut(filled).assign(v);
            filled += 1;
        }
    }
    if filled != d {
        return Err(SimError::NoConvergence(format!(
            "eigenbasis incomplete: {filled} of {d} vectors"
        )));
    }
    BasisLabel::heisenberg_weyl_from_columns(j, k, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs, trace};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // --- operator entries -------------------------------------------------

    #[test]
    fn identity_shift_and_clock_in_dimension_two() {
        let id = hw_operator(0, 0, 2).unwrap();
        assert!(max_abs(&(&id - &linalg::identity(2))) < 1e-15);
        let x = hw_operator(1, 0, 2).unwrap();
        assert_eq!(x[[0, 1]], c(1.0, 0.0));
        assert_eq!(x[[1, 0]], c(1.0, 0.0));
        assert_eq!(x[[0, 0]], c(0.0, 0.0));
        let z = hw_operator(0, 1, 2).unwrap();
        assert_abs_diff_eq!(z[[0, 0]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z[[1, 1]].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn qutrit_entries_match_phase_rule() {
        let m = hw_operator(1, 1, 3).unwrap();
        let omega = C64::from_polar(1.0, TAU / 3.0);
        assert!((m[[0, 1]] - omega).norm() < 1e-14);
        assert!((m[[1, 2]] - omega * omega).norm() < 1e-14);
        assert!((m[[2, 0]] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn operators_are_unitary() {
        for d in 2..=6 {
            for (j, k) in hw_indices(d) {
                let m = hw_operator(j, k, d).unwrap();
                assert!(
                    linalg::unitary_deviation(&m) < 1e-13,
                    "M_({j},{k}) in d={d} not unitary"
                );
            }
        }
    }

    #[test]
    fn trace_orthogonality() {
        for d in [2usize, 3, 5] {
            for (j, k) in hw_indices(d) {
                for (jp, kp) in hw_indices(d) {
                    let a = hw_operator(j, k, d).unwrap();
                    let b = hw_operator(jp, kp, d).unwrap();
                    let overlap = trace(&dagger(&a).dot(&b));
                    let expected = if (j, k) == (jp, kp) { d as f64 } else { 0.0 };
                    assert!(
                        (overlap - c(expected, 0.0)).norm() < 1e-12,
                        "d={d}: tr(M({j},{k})† M({jp},{kp})) = {overlap}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range_indices() {
        assert!(hw_operator(2, 0, 2).is_err());
        assert!(hw_operator(0, 3, 3).is_err());
        assert!(hw_operator(0, 0, 0).is_err());
    }

    // --- eigenbases --------------------------------------------------------

    fn assert_is_eigenbasis(j: usize, k: usize, d: usize) {
        let m = hw_operator(j, k, d).unwrap();
        let basis = hw_eigenbasis(j, k, d).unwrap();
        let b = basis.vectors();
        assert!(linalg::unitary_deviation(b) < 1e-12, "({j},{k},{d}) not orthonormal");
        // Each column is an eigenvector: M b = λ b with |λ| = 1.
        let mb = m.dot(b);
        for col in 0..d {
            let v = b.column(col);
            let mv = mb.column(col);
            let lambda: C64 = v.iter().zip(mv.iter()).map(|(x, y)| x.conj() * y).sum();
            assert!((lambda.norm() - 1.0).abs() < 1e-10, "({j},{k},{d}) col {col}: |λ|≠1");
            let residual: f64 = mv
                .iter()
                .zip(v.iter())
                .map(|(y, x)| (y - lambda * x).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-10, "({j},{k},{d}) col {col}: residual {residual}");
        }
    }

    #[test]
    fn clock_eigenbasis_is_computational() {
        let basis = hw_eigenbasis(0, 1, 2).unwrap();
        // Z eigenvectors with eigenvalue order m=0 (λ=1, |0>) then m=1 (λ=-1, |1>).
        assert!(max_abs(&(basis.vectors() - &linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn shift_eigenbasis_is_plus_minus() {
        let basis = hw_eigenbasis(1, 0, 2).unwrap();
        let b = basis.vectors();
        let s = 1.0 / 2f64.sqrt();
        assert!((b[[0, 0]] - c(s, 0.0)).norm() < 1e-12);
        assert!((b[[1, 0]] - c(s, 0.0)).norm() < 1e-12);
        assert!((b[[0, 1]] - c(s, 0.0)).norm() < 1e-12);
        assert!((b[[1, 1]] - c(-s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_label_is_computational() {
        let basis = hw_eigenbasis(0, 0, 5).unwrap();
        assert!(max_abs(&(basis.vectors() - &linalg::identity(5))) < 1e-15);
    }

    #[test]
    fn degenerate_double_shift_in_dimension_four() {
        // M_{20} = X² has eigenvalues ±1, each with multiplicity 2.
        assert_is_eigenbasis(2, 0, 4);
        let basis = hw_eigenbasis(2, 0, 4).unwrap();
        let m = hw_operator(2, 0, 4).unwrap();
        let mb = m.dot(basis.vectors());
        // First two columns: λ = +1; last two: λ = -1 (ascending m with ranks 2,0,2,0).
        for col in 0..2 {
            let diff: f64 = mb
                .column(col)
                .iter()
                .zip(basis.vectors().column(col).iter())
                .map(|(y, x)| (y - x).norm_sqr())
                .sum();
            assert!(diff < 1e-20);
        }
        for col in 2..4 {
            let diff: f64 = mb
                .column(col)
                .iter()
                .zip(basis.vectors().column(col).iter())
                .map(|(y, x)| (y + x).norm_sqr())
                .sum();
            assert!(diff < 1e-20);
        }
    }

    #[test]
    fn all_bases_valid_up_to_dimension_six() {
        for d in 2..=6 {
            for (j, k) in hw_indices_traceless(d) {
                assert_is_eigenbasis(j, k, d);
            }
        }
    }

    #[test]
    fn phase_convention_leading_component_real_positive() {
        for d in [2usize, 3, 4, 5] {
            for (j, k) in hw_indices_traceless(d) {
                let basis = hw_eigenbasis(j, k, d).unwrap();
                for col in 0..d {
                    let v = basis.vectors().column(col);
                    let lead = v.iter().find(|z| z.norm() > 1e-8).unwrap();
                    assert!(
                        lead.im.abs() < 1e-10 && lead.re > 0.0,
                        "({j},{k},{d}) col {col}: leading component {lead}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenbasis_is_deterministic() {
        let a = hw_eigenbasis(2, 3, 6).unwrap();
        let b = hw_eigenbasis(2, 3, 6).unwrap();
        assert_eq!(a.vectors(), b.vectors());
    }
}
