//! Generalized Bloch coordinates of density matrices.
//!
//! Expanding a density matrix in the trace-orthogonal Heisenberg-Weyl
//! family gives
//!
//! ```text
//! ρ = (1/d) Σ_{jk} n_{jk} M_{jk},      n_{jk} = tr(M_{jk}† ρ),
//! ```
//!
//! with `n_{00} = tr ρ = 1` fixed. The remaining `d² - 1` complex
//! coefficients are the generalized Bloch vector; their real and imaginary
//! parts play the role of positions and momenta of the mixed-state
//! hidden particles (see [`crate::opensys::DensityVector`]). Parseval gives
//! `tr ρ² = (1/d) Σ_{jk} |n_{jk}|²` including the `(0,0)` term.

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, C64};

use super::{hw_indices, hw_indices_traceless, hw_operator, DensityMatrix};

/// Default lower bound on reconstruction eigenvalues: coordinates mapping
/// to a state with an eigenvalue below `-STATE_PSD_TOL` are rejected.
pub const STATE_PSD_TOL: f64 = 1e-8;

/// Generalized Bloch vector `n_{jk} = tr(M_{jk}† ρ)` for `(j,k) ≠ (0,0)` in
/// row-major index order; length `d² - 1`.
pub fn bloch_vector(rho: &DensityMatrix) -> SimResult<Vec<C64>> {
    let d = rho.dim();
    let mut coords = Vec::with_capacity(d * d - 1);
    for (j, k) in hw_indices_traceless(d) {
        let m = hw_operator(j, k, d)?;
        coords.push(linalg::trace(&linalg::dagger(&m).dot(rho.matrix())));
    }
    Ok(coords)
}

/// Full coordinate list including the trace coordinate `n_{00}` at index 0;
/// length `d²`. Unlike [`bloch_vector`] this accepts any matrix, so it can
/// be applied to tomography estimates.
pub fn density_vector_coords(rho: &CMatrix) -> SimResult<Vec<C64>> {
    let d = linalg::check_square(rho, "density coordinates input")?;
    let mut coords = Vec::with_capacity(d * d);
    for (j, k) in hw_indices(d) {
        let m = hw_operator(j, k, d)?;
        coords.push(linalg::trace(&linalg::dagger(&m).dot(rho)));
    }
    Ok(coords)
}

/// Reconstructs `ρ = (1 + Σ n_{jk} M_{jk})/d` from a traceless Bloch vector
/// (the `(0,0)` coefficient is implicitly 1), using the default positivity
/// tolerance [`STATE_PSD_TOL`].
pub fn state_from_bloch(coords: &[C64], d: usize) -> SimResult<DensityMatrix> {
    state_from_bloch_with_tol(coords, d, STATE_PSD_TOL)
}

/// [`state_from_bloch`] with an explicit positivity tolerance: the
/// reconstruction fails if any eigenvalue is below `-psd_tol`, and
/// hermiticity of the reconstructed matrix is required at the same level.
pub fn state_from_bloch_with_tol(
    coords: &[C64],
    d: usize,
    psd_tol: f64,
) -> SimResult<DensityMatrix> {
    if d == 0 {
        return Err(SimError::InvalidArgument("dimension must be positive".into()));
    }
    if coords.len() != d * d - 1 {
        return Err(SimError::DimensionMismatch(format!(
            "expected {} Bloch coefficients for dimension {d}, got {}",
            d * d - 1,
            coords.len()
        )));
    }
    let mut mat = linalg::identity(d);
    for (idx, (j, k)) in hw_indices_traceless(d).enumerate() {
        let m = hw_operator(j, k, d)?;
        mat = mat + m.mapv(|x| x * coords[idx]);
    }
    mat = mat.mapv(|x| x / d as f64);

    let herm_dev = linalg::hermitian_deviation(&mat);
    if herm_dev > psd_tol {
        return Err(SimError::NotStructured(format!(
            "Bloch coordinates give a non-Hermitian matrix (deviation {herm_dev:.3e})"
        )));
    }
    let sym = (&mat + &linalg::dagger(&mat)).mapv(|x| 0.5 * x);
    let (vals, _) = linalg::eigh(&sym)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -psd_tol {
        return Err(SimError::NotStructured(format!(
            "Bloch coordinates give eigenvalue {min:.3e} below -{psd_tol:.1e}"
        )));
    }
    // Keep the exact linear reconstruction (no clipping): downstream
    // consumers decide how to treat borderline estimates.
    DensityMatrix::from_estimate(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, random_state_vector};
    use crate::statespace::PureState;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn qubit_ground_state_coordinates() {
        // For d=2 the traceless order is (0,1), (1,0), (1,1):
        // tr(Z†|0><0|) = 1, tr(X†|0><0|) = 0, tr(M_{11}†|0><0|) = 0.
        let rho = DensityMatrix::pure(&PureState::basis_state(2, 0).unwrap());
        let n = bloch_vector(&rho).unwrap();
        assert_eq!(n.len(), 3);
        assert!((n[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(n[1].norm() < 1e-14);
        assert!(n[2].norm() < 1e-14);
    }

    #[test]
    fn plus_state_coordinates() {
        // |+><+|: tr(Z ρ) = 0, tr(X ρ) = 1, and with M_{11} = [[0,-1],[1,0]]
        // the last coefficient is tr(M_{11}† ρ) = ρ_{10} - ρ_{01} = 0.
        let psi = PureState::two_level_superposition(2, 0, 1, c(1.0, 0.0)).unwrap();
        let rho = DensityMatrix::pure(&psi);
        let n = bloch_vector(&rho).unwrap();
        assert!(n[0].norm() < 1e-14);
        assert!((n[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(n[2].norm() < 1e-14);
    }

    #[test]
    fn trace_coordinate_is_one() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let coords = density_vector_coords(rho.matrix()).unwrap();
        assert_eq!(coords.len(), 9);
        assert!((coords[0] - c(1.0, 0.0)).norm() < 1e-14);
        for z in &coords[1..] {
            assert!(z.norm() < 1e-14, "mixed state has no traceless component");
        }
    }

    #[test]
    fn purity_identity_from_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for d in [2usize, 3, 4, 5] {
            // Random mixed state: convex mix of two pure states.
            let a = DensityMatrix::pure(&PureState::new(random_state_vector(d, &mut rng)).unwrap());
            let b = DensityMatrix::pure(&PureState::new(random_state_vector(d, &mut rng)).unwrap());
            let rho = DensityMatrix::from_estimate(
                a.matrix().mapv(|x| 0.3 * x) + b.matrix().mapv(|x| 0.7 * x),
            )
            .unwrap();
            let coords = density_vector_coords(rho.matrix()).unwrap();
            let coord_purity: f64 =
                coords.iter().map(|z| z.norm_sqr()).sum::<f64>() / d as f64;
            assert_abs_diff_eq!(coord_purity, rho.purity(), epsilon = 1e-12);
        }
    }

    #[test]
    fn round_trip_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [2usize, 3, 4, 6] {
            let rho = DensityMatrix::pure(&PureState::new(random_state_vector(d, &mut rng)).unwrap());
            let n = bloch_vector(&rho).unwrap();
            let back = state_from_bloch(&n, d).unwrap();
            let err = max_abs(&(back.matrix() - rho.matrix()));
            assert!(err < 1e-12, "d={d}: round trip error {err}");
        }
    }

    #[test]
    fn rejects_nonpositive_coordinates() {
        // A Bloch vector of length 3 with |n| > 1 for d=2 is outside the
        // state space: n_z = 2 gives eigenvalues (1.5, -0.5).
        let coords = vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(state_from_bloch(&coords, 2).is_err());
        // Same coordinates pass with a huge tolerance.
        assert!(state_from_bloch_with_tol(&coords, 2, 1.0).is_ok());
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(state_from_bloch(&[c(1.0, 0.0)], 2).is_err());
    }

    #[test]
    fn non_hermitian_coordinates_are_rejected() {
        // For d=2, hermiticity requires n_{01} real and n_{11}* = -n_{11}·(-1)
        // ... simplest violation: a complex clock coefficient.
        let coords = vec![c(0.0, 0.7), c(0.0, 0.0), c(0.0, 0.0)];
        let err = state_from_bloch(&coords, 2);
        assert!(err.is_err());
    }

    #[test]
    fn pure_state_bloch_norm() {
        // Pure states satisfy Σ|n|² = d - 1 (purity identity with tr ρ² = 1).
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2usize, 3, 5] {
            let rho = DensityMatrix::pure(&PureState::new(random_state_vector(d, &mut rng)).unwrap());
            let n = bloch_vector(&rho).unwrap();
            let total: f64 = n.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(total, (d - 1) as f64, epsilon = 1e-11);
        }
    }
}
