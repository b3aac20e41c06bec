//! Lindblad generators and density-vector trajectories.
//!
//! On the vectorized state `|ρ>` the master equation reads
//! `i|ρ̇> = 𝓛̂|ρ>` with
//!
//! ```text
//! 𝓛̂ = 𝓗̂ + i Σ_a γ_a (L_a ⊗ L_a* - ½ L_a†L_a ⊗ 1 - ½ 1 ⊗ L_aᵗL_a*),
//! 𝓗̂ = Ĥ ⊗ 1 - 1 ⊗ Ĥ*.
//! ```
//!
//! `𝓗̂` is Hermitian, so purely unitary evolution of the `d²` hidden
//! particles is itself a Hamiltonian flow; the jump terms are the
//! non-Hermitian part that contracts purity while the functional
//! `<η| = vec(1)†` stays frozen (trace preservation).

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::STRUCTURAL_TOL;

use super::{frame_matrix, vectorize_matrix, DensityVector};

/// Largest dimension for which dense superoperator exponentiation is
/// attempted (`𝓛̂` is `d²×d²`).
pub const MAX_DENSE_DIM: usize = 64;

/// The commutator superoperator `𝓗̂ = Ĥ⊗1 - 1⊗Ĥ*` of a Hermitian `Ĥ`,
/// acting on row-major vectorized density matrices. `𝓗̂` is Hermitian.
pub fn unitary_liouvillian(h: &CMatrix) -> SimResult<CMatrix> {
    let d = h.nrows();
    let h = linalg::check_hermitian(h, STRUCTURAL_TOL, "Liouvillian Hamiltonian")?;
    let eye = linalg::identity(d);
    Ok(&linalg::kron(&h, &eye) - &linalg::kron(&eye, &h.mapv(|z| z.conj())))
}

/// A Lindblad master-equation generator: Hamiltonian part plus weighted
/// jump operators, assembled into the dense superoperator `𝓛̂`.
pub struct LindbladGenerator {
    h: CMatrix,
    jumps: Vec<(f64, CMatrix)>,
    liouvillian: CMatrix,
}

impl LindbladGenerator {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    /// `(γ_a, L_a)` pairs as supplied.
    pub fn jumps(&self) -> &[(f64, CMatrix)] {
        &self.jumps
    }

    /// The assembled `d²×d²` superoperator `𝓛̂`.
    pub fn matrix(&self) -> &CMatrix {
        &self.liouvillian
    }
}

/// Assembles `𝓛̂` from a Hamiltonian and `(rate, jump operator)` pairs,
/// verifying that the trace functional is conserved: `<η|𝓛̂ = 0`.
pub fn lindblad_generator(h: &CMatrix, jumps: Vec<(f64, CMatrix)>) -> SimResult<LindbladGenerator> {
    let d = h.nrows();
    let h = linalg::check_hermitian(h, STRUCTURAL_TOL, "Lindblad Hamiltonian")?;
    let mut liouvillian = unitary_liouvillian(&h)?;
    let eye = linalg::identity(d);
    for (idx, (gamma, l)) in jumps.iter().enumerate() {
        if !gamma.is_finite() || *gamma < 0.0 {
            return Err(SimError::InvalidArgument(format!(
                "jump rate #{idx} is {gamma}; rates must be finite and nonnegative"
            )));
        }
        if l.nrows() != d || l.ncols() != d {
            return Err(SimError::DimensionMismatch(format!(
                "jump operator #{idx} is {}x{}, expected {d}x{d}",
                l.nrows(),
                l.ncols()
            )));
        }
        let l_conj = l.mapv(|z| z.conj());
        let ldl = linalg::dagger(l).dot(l);
        let term = &linalg::kron(l, &l_conj)
            - &(&linalg::kron(&ldl, &eye) + &linalg::kron(&eye, &ldl.mapv(|z| z.conj())))
                .mapv(|z| 0.5 * z);
        liouvillian = liouvillian + term.mapv(|z| z * C64::new(0.0, *gamma));
    }
    // <η|𝓛̂ = 0: summing each column of 𝓛̂ over the vec(1) positions
    // must vanish, otherwise evolution would leak trace.
    let mut worst = 0.0f64;
    for c in 0..d * d {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            acc += liouvillian[[i * d + i, c]];
        }
        worst = worst.max(acc.norm());
    }
    if worst > STRUCTURAL_TOL {
        return Err(SimError::InvariantBreach(format!(
            "assembled generator violates trace preservation by {worst:.3e}"
        )));
    }
    Ok(LindbladGenerator {
        h,
        jumps,
        liouvillian,
    })
}

/// A sampled density-vector trajectory.
#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    steps: Vec<u64>,
    times: Vec<f64>,
    states: Vec<DensityVector>,
}

impl DensityTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityVector] {
        &self.states
    }

    pub fn initial(&self) -> &DensityVector {
        self.states.first().expect("trajectory is never empty")
    }

    pub fn final_state(&self) -> &DensityVector {
        self.states.last().expect("trajectory is never empty")
    }

    /// Purity (`tr ρ²`) per sample; the monitored, never enforced,
    /// "time-dependent normalization" of the particle ensemble.
    pub fn purities(&self) -> Vec<f64> {
        self.states.iter().map(DensityVector::purity).collect()
    }

    /// Worst `|n_00 - 1|` along the trajectory.
    pub fn max_trace_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.trace_coordinate() - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }
}

/// Integrates `i|ρ̇> = 𝓛̂|ρ>` from `dv0` over `[0, t]`, recording `samples`
/// evenly spaced snapshots (including both endpoints for `samples ≥ 2`).
///
/// The propagator for one grid interval is computed once by dense Padé
/// exponentiation and re-applied, so the only stepping error is roundoff
/// accumulation; trace conservation is re-validated at every sample.
pub fn evolve_density_vector(
    gen: &LindbladGenerator,
    dv0: &DensityVector,
    t: f64,
    samples: usize,
) -> SimResult<DensityTrajectory> {
    let d = gen.dim();
    if dv0.dim() != d {
        return Err(SimError::DimensionMismatch(format!(
            "generator dimension {d} vs state dimension {}",
            dv0.dim()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(SimError::InvalidArgument(
            "evolution time must be finite and nonnegative".into(),
        ));
    }
    if samples == 0 {
        return Err(SimError::InvalidArgument(
            "at least one trajectory sample is required".into(),
        ));
    }
    if d > MAX_DENSE_DIM {
        return Err(SimError::SizeLimit(format!(
            "dense superoperator evolution limited to dimension {MAX_DENSE_DIM}, got {d}"
        )));
    }

    let omega_dagger = linalg::dagger(&frame_matrix(d)?);
    let rho0 = dv0.to_density()?;
    let mut vec_state = vectorize_matrix(rho0.matrix());

    let times: Vec<f64> = if samples == 1 {
        vec![t]
    } else {
        (0..samples)
            .map(|i| t * i as f64 / (samples - 1) as f64)
            .collect()
    };
    let tau = if samples == 1 { t } else { times[1] - times[0] };
    let propagator = linalg::expm(&gen.matrix().mapv(|z| z * C64::new(0.0, -tau)))?;

    let mut traj = DensityTrajectory {
        steps: Vec::with_capacity(samples),
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
    };
    for (idx, &time) in times.iter().enumerate() {
        if idx > 0 || samples == 1 {
            vec_state = propagator.dot(&vec_state);
        }
        let coords: CVector = omega_dagger.dot(&vec_state);
        let dv = DensityVector::new(d, coords.to_vec()).map_err(|e| match e {
            SimError::InvariantBreach(msg) => {
                SimError::InvariantBreach(format!("at t={time:.6}: {msg}"))
            }
            other => other,
        })?;
        traj.steps.push(idx as u64);
        traj.times.push(time);
        traj.states.push(dv);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        dagger, expm, expm_hermitian, hermitian_deviation, max_abs, random_density,
        random_hermitian, random_state_vector,
    };
    use crate::opensys::{devectorize, matrix_from_vectorized, vectorize_density};
    use crate::statespace::{DensityMatrix, PureState};
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_z() -> CMatrix {
        array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
    }

    fn lowering() -> CMatrix {
        // |0><1|
        array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]
    }

    fn plus_density() -> DensityMatrix {
        let psi = PureState::two_level_superposition(2, 0, 1, c(1.0, 0.0)).unwrap();
        DensityMatrix::pure(&psi)
    }

    fn zero_matrix(d: usize) -> CMatrix {
        CMatrix::zeros((d, d))
    }

    #[test]
    fn pauli_z_liouvillian_is_the_pinned_diagonal() {
        let lh = unitary_liouvillian(&pauli_z()).unwrap();
        let expected = [0.0, 2.0, -2.0, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { c(expected[i], 0.0) } else { c(0.0, 0.0) };
                assert!((lh[[i, j]] - want).norm() < 1e-15);
            }
        }
        assert!(hermitian_deviation(&lh) < 1e-15);
    }

    #[test]
    fn liouvillian_annihilates_the_identity_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let d = 3;
        let lh = unitary_liouvillian(&random_hermitian(d, &mut rng)).unwrap();
        let eta = vectorize_matrix(&linalg::identity(d));
        let image = lh.dot(&eta);
        assert!(image.iter().map(|z| z.norm()).fold(0.0f64, f64::max) < 1e-12);
    }

    #[test]
    fn pure_state_reduction_matches_state_vector_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let d = 3;
        let h = random_hermitian(d, &mut rng);
        let psi = PureState::new(random_state_vector(d, &mut rng)).unwrap();
        let t = 1.1;

        let gen = lindblad_generator(&h, vec![]).unwrap();
        let dv0 = vectorize_density(&DensityMatrix::pure(&psi)).unwrap();
        let traj = evolve_density_vector(&gen, &dv0, t, 3).unwrap();
        let rho_t = devectorize(traj.final_state()).unwrap();

        let u = expm_hermitian(&h, c(0.0, -t)).unwrap();
        let phi = PureState::new(u.dot(psi.amplitudes())).unwrap();
        assert!(rho_t.fidelity_with_pure(&phi).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn no_jumps_reduces_to_the_unitary_liouvillian() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let h = random_hermitian(4, &mut rng);
        let gen = lindblad_generator(&h, vec![]).unwrap();
        let lh = unitary_liouvillian(&h).unwrap();
        assert!(max_abs(&(gen.matrix() - &lh)) < 1e-300);
    }

    #[test]
    fn amplitude_damping_follows_the_closed_form() {
        let gamma = 0.8;
        let t = 1.25;
        let gen = lindblad_generator(&zero_matrix(2), vec![(gamma, lowering())]).unwrap();
        let dv0 = vectorize_density(&plus_density()).unwrap();
        let traj = evolve_density_vector(&gen, &dv0, t, 6).unwrap();
        for (&time, dv) in traj.times().iter().zip(traj.states()) {
            let rho = devectorize(dv).unwrap();
            let m = rho.matrix();
            // Populations relax as e^{-γt}, coherences as e^{-γt/2}.
            assert_abs_diff_eq!(m[[1, 1]].re, 0.5 * (-gamma * time).exp(), epsilon = 1e-10);
            assert_abs_diff_eq!(m[[0, 1]].re, 0.5 * (-0.5 * gamma * time).exp(), epsilon = 1e-10);
            assert_abs_diff_eq!(m[[0, 1]].im, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m[[0, 0]].re + m[[1, 1]].re, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn excited_population_after_unit_gamma_t() {
        let gamma = 1.0;
        let psi1 = PureState::basis_state(2, 1).unwrap();
        let gen = lindblad_generator(&zero_matrix(2), vec![(gamma, lowering())]).unwrap();
        let dv0 = vectorize_density(&DensityMatrix::pure(&psi1)).unwrap();
        let traj = evolve_density_vector(&gen, &dv0, 1.0, 2).unwrap();
        let rho = devectorize(traj.final_state()).unwrap();
        assert_abs_diff_eq!(rho.matrix()[[1, 1]].re, (-1.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn dephasing_kills_coherence_and_keeps_populations() {
        let gamma = 0.3;
        let t = 2.0;
        let gen = lindblad_generator(&zero_matrix(2), vec![(gamma, pauli_z())]).unwrap();
        let dv0 = vectorize_density(&plus_density()).unwrap();
        let traj = evolve_density_vector(&gen, &dv0, t, 5).unwrap();
        let rho = devectorize(traj.final_state()).unwrap();
        let m = rho.matrix();
        assert_abs_diff_eq!(m[[0, 1]].re, 0.5 * (-2.0 * gamma * t).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(m[[0, 0]].re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(m[[1, 1]].re, 0.5, epsilon = 1e-10);
        // Unital generator: purity never increases along the trajectory.
        let purities = traj.purities();
        for w in purities.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "purity increased: {w:?}");
        }
    }

    #[test]
    fn unitary_generator_preserves_purity_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        let d = 3;
        let gen = lindblad_generator(&random_hermitian(d, &mut rng), vec![]).unwrap();
        let dv0 = vectorize_density(&DensityMatrix::new(random_density(d, &mut rng)).unwrap())
            .unwrap();
        let traj = evolve_density_vector(&gen, &dv0, 3.0, 50).unwrap();
        let p0 = dv0.purity();
        for p in traj.purities() {
            assert_abs_diff_eq!(p, p0, epsilon = 1e-10);
        }
        assert!(traj.max_trace_deviation() < 1e-10);
    }

    #[test]
    fn zero_time_returns_the_input() {
        let gen = lindblad_generator(&pauli_z(), vec![(0.5, lowering())]).unwrap();
        let dv0 = vectorize_density(&plus_density()).unwrap();
        let traj = evolve_density_vector(&gen, &dv0, 0.0, 1).unwrap();
        assert_eq!(traj.len(), 1);
        for (a, b) in traj.final_state().coefficients().iter().zip(dv0.coefficients()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn negative_rates_and_times_are_rejected() {
        assert!(lindblad_generator(&zero_matrix(2), vec![(-0.1, lowering())]).is_err());
        let gen = lindblad_generator(&zero_matrix(2), vec![]).unwrap();
        let dv0 = vectorize_density(&plus_density()).unwrap();
        assert!(evolve_density_vector(&gen, &dv0, -1.0, 2).is_err());
        assert!(evolve_density_vector(&gen, &dv0, 1.0, 0).is_err());
    }

    #[test]
    fn trace_functional_is_conserved_for_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        for trial in 0..20 {
            let d = if trial % 2 == 0 { 2 } else { 3 };
            let h = random_hermitian(d, &mut rng);
            let jumps: Vec<(f64, CMatrix)> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    (
                        rng.gen_range(0.0..1.0),
                        crate::linalg::ginibre(d, &mut rng),
                    )
                })
                .collect();
            let gen = lindblad_generator(&h, jumps).unwrap();
            let mut worst = 0.0f64;
            for col in 0..d * d {
                let mut acc = c(0.0, 0.0);
                for i in 0..d {
                    acc += gen.matrix()[[i * d + i, col]];
                }
                worst = worst.max(acc.norm());
            }
            assert!(worst < 1e-10, "trace leak {worst}");
        }
    }

    #[test]
    fn stepped_evolution_matches_one_shot_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(139);
        for trial in 0..20 {
            let d = if trial % 2 == 0 { 2 } else { 3 };
            let h = random_hermitian(d, &mut rng);
            let jumps: Vec<(f64, CMatrix)> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    (
                        rng.gen_range(0.0..0.8),
                        crate::linalg::ginibre(d, &mut rng),
                    )
                })
                .collect();
            let gen = lindblad_generator(&h, jumps).unwrap();
            let rho0 = DensityMatrix::new(random_density(d, &mut rng)).unwrap();
            let dv0 = vectorize_density(&rho0).unwrap();
            let t = rng.gen_range(0.1..2.0);

            let traj = evolve_density_vector(&gen, &dv0, t, 7).unwrap();
            let stepped = devectorize(traj.final_state()).unwrap();

            let one_shot = expm(&gen.matrix().mapv(|z| z * c(0.0, -t))).unwrap();
            let vec_t = one_shot.dot(&vectorize_matrix(rho0.matrix()));
            let direct = matrix_from_vectorized(&vec_t).unwrap();

            let dist = stepped.trace_distance(&DensityMatrix::from_estimate(direct).unwrap());
            assert!(dist.unwrap() < 1e-8, "trial {trial}: distance too large");
            assert!(traj.max_trace_deviation() < 1e-10);
        }
    }

    #[test]
    fn unitary_flow_is_hamiltonian_in_the_hidden_coordinates() {
        // In the frame coordinates n = Ω†vec(ρ)/1, the unitary part evolves
        // as i·ṅ = 𝓗̃ n with Hermitian 𝓗̃ = Ω†𝓗̂Ω/d, i.e. exactly a
        // Schrödinger flow on d² particles. The flow is canonical for the
        // halved quadratic form h = ½ n†𝓗̃n (the same convention the
        // dynamics module pins): ∂h/∂𝒬 = -𝒫̇ and ∂h/∂𝒫 = 𝒬̇.
        let mut rng = ChaCha8Rng::seed_from_u64(149);
        let d = 2;
        let n2 = d * d;
        let lh = unitary_liouvillian(&random_hermitian(d, &mut rng)).unwrap();
        let omega = frame_matrix(d).unwrap();
        let h_tilde = dagger(&omega).dot(&lh).dot(&omega).mapv(|z| z / d as f64);
        assert!(hermitian_deviation(&h_tilde) < 1e-12);

        // Off-shell phase-space point (no normalization required).
        let qs: Vec<f64> = (0..n2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ps: Vec<f64> = (0..n2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scalar = |q: &[f64], p: &[f64]| -> f64 {
            let n = CVector::from_shape_fn(n2, |i| c(q[i], p[i]));
            let hn = h_tilde.dot(&n);
            0.5 * n.iter().zip(hn.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        };
        let n = CVector::from_shape_fn(n2, |i| c(qs[i], ps[i]));
        let flow = h_tilde.dot(&n).mapv(|z| z * c(0.0, -1.0));
        let eps = 1e-5;
        for a in 0..n2 {
            let mut qp = qs.clone();
            qp[a] += eps;
            let mut qm = qs.clone();
            qm[a] -= eps;
            let dh_dq = (scalar(&qp, &ps) - scalar(&qm, &ps)) / (2.0 * eps);
            assert_abs_diff_eq!(dh_dq, -flow[a].im, epsilon = 1e-6);

            let mut pp = ps.clone();
            pp[a] += eps;
            let mut pm = ps.clone();
            pm[a] -= eps;
            let dh_dp = (scalar(&qs, &pp) - scalar(&qs, &pm)) / (2.0 * eps);
            assert_abs_diff_eq!(dh_dp, flow[a].re, epsilon = 1e-6);
        }
    }
}
