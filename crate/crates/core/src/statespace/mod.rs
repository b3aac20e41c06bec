//! States, hidden-particle phase space, and operator-basis coordinates.
//!
//! The core encoding: expand a pure state `ψ` in an orthonormal basis
//! `{|b_i>}` and read each coefficient as the phase-space coordinates of a
//! classical particle,
//!
//! ```text
//! ψ = Σ_i (q_i + i·p_i) |b_i>,            Σ_i (q_i² + p_i²) = 1.
//! ```
//!
//! The norm constraint is the only physical restriction on the particle
//! configuration; everything else (dynamics, measurement statistics) is a
//! function on this constrained phase space. Mixed states get the analogous
//! treatment one level up in [`crate::opensys`], via coordinates of the
//! density matrix in the Heisenberg-Weyl operator basis ([`hw_operator`]).

mod bloch;
mod hw;

pub use bloch::{bloch_vector, density_vector_coords, state_from_bloch, state_from_bloch_with_tol};
pub use hw::{hw_eigenbasis, hw_indices, hw_indices_traceless, hw_operator};

use std::sync::Arc;

use ndarray::Array1;

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, CVector, RVector, C64};
use crate::{NORM_TOL, ROUND_TRIP_TOL, STRUCTURAL_TOL};

/// A normalized pure state in a `d`-dimensional Hilbert space, stored in the
/// computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Wraps an amplitude vector, requiring `|‖ψ‖² - 1| ≤` [`NORM_TOL`].
    pub fn new(amps: CVector) -> SimResult<Self> {
        if amps.is_empty() {
            return Err(SimError::InvalidArgument("empty state vector".into()));
        }
        let dev = (amps.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(SimError::InvalidParticleSet {
                deviation: dev,
                tol: NORM_TOL,
            });
        }
        Ok(Self { amps })
    }

    /// Wraps an amplitude vector after rescaling it to unit norm.
    pub fn normalized(amps: CVector) -> SimResult<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(SimError::InvalidArgument(
                "cannot normalize a (near-)zero vector".into(),
            ));
        }
        Ok(Self {
            amps: amps.mapv(|z| z / norm),
        })
    }

    /// Computational basis state `|i>`.
    pub fn basis_state(dim: usize, i: usize) -> SimResult<Self> {
        if i >= dim {
            return Err(SimError::InvalidArgument(format!(
                "basis index {i} out of range for dimension {dim}"
            )));
        }
        let mut amps = CVector::zeros(dim);
        amps[i] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Equal superposition `(|i> + phase·|j>)/√2`.
    pub fn two_level_superposition(
        dim: usize,
        i: usize,
        j: usize,
        phase: C64,
    ) -> SimResult<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(SimError::InvalidArgument(format!(
                "superposition indices ({i},{j}) invalid for dimension {dim}"
            )));
        }
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(SimError::InvalidArgument(
                "superposition phase must be unimodular".into(),
            ));
        }
        let s = 1.0 / 2f64.sqrt();
        let mut amps = CVector::zeros(dim);
        amps[i] = C64::new(s, 0.0);
        amps[j] = phase * s;
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// Canonically conjugate momenta `π_i = i·ψ_i*` of the amplitude
    /// coordinates (the pairing under which the Schrödinger flow is exactly
    /// Hamiltonian with generator `<ψ|H|ψ>`).
    pub fn conjugate_momenta(&self) -> CVector {
        self.amps.mapv(|z| C64::new(0.0, 1.0) * z.conj())
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &PureState) -> SimResult<C64> {
        if self.dim() != other.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "inner product between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Fidelity `|<self|other>|²`.
    pub fn fidelity(&self, other: &PureState) -> SimResult<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Expectation value `<ψ|A|ψ>` (complex for non-Hermitian `A`).
    pub fn expectation(&self, a: &CMatrix) -> SimResult<C64> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "operator is {}x{}, state dimension {}",
                a.nrows(),
                a.ncols(),
                self.dim()
            )));
        }
        let av = a.dot(&self.amps);
        Ok(self
            .amps
            .iter()
            .zip(av.iter())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }
}

/// Which orthonormal basis a set of phase-space coordinates refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisKind {
    /// The computational basis `{|0>, ..., |d-1>}`.
    Computational,
    /// The eigenbasis of the Heisenberg-Weyl operator `M_{jk}`.
    HeisenbergWeyl { j: usize, k: usize },
    /// A caller-supplied orthonormal basis.
    Custom(String),
}

/// An orthonormal basis together with its provenance label.
///
/// The basis vectors are the columns of [`BasisLabel::vectors`]; the matrix
/// is shared (`Arc`), so clones are cheap.
#[derive(Debug, Clone)]
pub struct BasisLabel {
    kind: BasisKind,
    vectors: Arc<CMatrix>,
}

impl BasisLabel {
    /// The computational basis in dimension `d`.
    pub fn computational(d: usize) -> Self {
        Self {
            kind: BasisKind::Computational,
            vectors: Arc::new(linalg::identity(d)),
        }
    }

    /// The eigenbasis of `M_{jk}`; see [`hw_eigenbasis`].
    pub fn heisenberg_weyl(j: usize, k: usize, d: usize) -> SimResult<Self> {
        hw_eigenbasis(j, k, d)
    }

    /// A custom basis from orthonormal columns (checked at
    /// [`STRUCTURAL_TOL`]).
    pub fn custom(name: impl Into<String>, vectors: CMatrix) -> SimResult<Self> {
        let dev = linalg::unitary_deviation(&vectors);
        if vectors.nrows() != vectors.ncols() || dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "basis columns not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            kind: BasisKind::Custom(name.into()),
            vectors: Arc::new(vectors),
        })
    }

    pub(crate) fn heisenberg_weyl_from_columns(
        j: usize,
        k: usize,
        columns: CMatrix,
    ) -> SimResult<Self> {
        let dev = linalg::unitary_deviation(&columns);
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "eigenbasis columns not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            kind: BasisKind::HeisenbergWeyl { j, k },
            vectors: Arc::new(columns),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    /// Basis vectors as matrix columns.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Short human-readable identifier, e.g. `computational` or `hw(1,2)`.
    pub fn description(&self) -> String {
        match &self.kind {
            BasisKind::Computational => "computational".into(),
            BasisKind::HeisenbergWeyl { j, k } => format!("hw({j},{k})"),
            BasisKind::Custom(name) => format!("custom({name})"),
        }
    }

    fn is_identity(&self) -> bool {
        matches!(self.kind, BasisKind::Computational)
    }
}

impl PartialEq for BasisLabel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.vectors == other.vectors
    }
}

/// Phase-space configuration of the `d` hidden particles carried by a pure
/// state relative to a [`BasisLabel`].
#[derive(Debug, Clone)]
pub struct HiddenParticleSet {
    basis: BasisLabel,
    q: RVector,
    p: RVector,
}

impl HiddenParticleSet {
    /// Wraps coordinates, enforcing the norm constraint
    /// `|Σ(q² + p²) - 1| ≤` [`NORM_TOL`].
    pub fn new(basis: BasisLabel, q: RVector, p: RVector) -> SimResult<Self> {
        let d = basis.dim();
        if q.len() != d || p.len() != d {
            return Err(SimError::DimensionMismatch(format!(
                "particle coordinates ({}, {}) do not match basis dimension {d}",
                q.len(),
                p.len()
            )));
        }
        let set = Self { basis, q, p };
        let dev = set.norm_deviation();
        if dev > NORM_TOL {
            return Err(SimError::InvalidParticleSet {
                deviation: dev,
                tol: NORM_TOL,
            });
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    /// Particle positions `q_i = Re <b_i|ψ>`.
    pub fn positions(&self) -> &RVector {
        &self.q
    }

    /// Particle momenta `p_i = Im <b_i|ψ>`.
    pub fn momenta(&self) -> &RVector {
        &self.p
    }

    /// Total phase-space norm `Σ_i (q_i² + p_i²)`; equals 1 for a valid set.
    pub fn norm_squared(&self) -> f64 {
        self.q.iter().map(|x| x * x).sum::<f64>() + self.p.iter().map(|x| x * x).sum::<f64>()
    }

    /// `|Σ(q² + p²) - 1|`.
    pub fn norm_deviation(&self) -> f64 {
        (self.norm_squared() - 1.0).abs()
    }

    /// Coordinates as complex coefficients `q_i + i·p_i`.
    pub fn coefficients(&self) -> CVector {
        Array1::from_iter(
            self.q
                .iter()
                .zip(self.p.iter())
                .map(|(&q, &p)| C64::new(q, p)),
        )
    }

    /// Coordinates stacked as a real vector `(q_1..q_d, p_1..p_d)` — the
    /// layout on which [`crate::dynamics::SymplecticMap`] acts.
    pub fn stacked(&self) -> RVector {
        let d = self.dim();
        let mut v = RVector::zeros(2 * d);
        v.slice_mut(ndarray::s![..d]).assign(&self.q);
        v.slice_mut(ndarray::s![d..]).assign(&self.p);
        v
    }

    /// Inverse of [`HiddenParticleSet::stacked`].
    pub fn from_stacked(basis: BasisLabel, v: &RVector) -> SimResult<Self> {
        let d = basis.dim();
        if v.len() != 2 * d {
            return Err(SimError::DimensionMismatch(format!(
                "stacked vector length {} does not match 2x{d}",
                v.len()
            )));
        }
        Self::new(
            basis,
            v.slice(ndarray::s![..d]).to_owned(),
            v.slice(ndarray::s![d..]).to_owned(),
        )
    }
}

/// Expands `ψ` in `basis` and returns the resulting particle configuration
/// `(q_i, p_i) = (Re <b_i|ψ>, Im <b_i|ψ>)`.
pub fn to_phase_space(state: &PureState, basis: &BasisLabel) -> SimResult<HiddenParticleSet> {
    if state.dim() != basis.dim() {
        return Err(SimError::DimensionMismatch(format!(
            "state dimension {} does not match basis dimension {}",
            state.dim(),
            basis.dim()
        )));
    }
    let coeffs = if basis.is_identity() {
        state.amplitudes().clone()
    } else {
        linalg::dagger(basis.vectors()).dot(state.amplitudes())
    };
    HiddenParticleSet::new(
        basis.clone(),
        coeffs.mapv(|z| z.re),
        coeffs.mapv(|z| z.im),
    )
}

/// Reassembles the pure state `ψ = Σ_i (q_i + i·p_i)|b_i>` from a particle
/// configuration.
pub fn from_phase_space(particles: &HiddenParticleSet) -> SimResult<PureState> {
    let coeffs = particles.coefficients();
    let amps = if particles.basis.is_identity() {
        coeffs
    } else {
        particles.basis.vectors().dot(&coeffs)
    };
    PureState::new(amps)
}

/// A density matrix, validated to be Hermitian, unit-trace, and positive
/// semidefinite within fixed tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity and trace at [`ROUND_TRIP_TOL`] and
    /// eigenvalue positivity at `-1e-10`.
    pub fn new(mat: CMatrix) -> SimResult<Self> {
        let d = linalg::check_square(&mat, "density matrix")?;
        if d == 0 {
            return Err(SimError::InvalidArgument("empty density matrix".into()));
        }
        let herm_dev = linalg::hermitian_deviation(&mat);
        if herm_dev > ROUND_TRIP_TOL {
            return Err(SimError::NotStructured(format!(
                "density matrix not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let tr = linalg::trace(&mat);
        if (tr - C64::new(1.0, 0.0)).norm() > ROUND_TRIP_TOL {
            return Err(SimError::NotStructured(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let (vals, _) = linalg::eigh(&mat)?;
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(SimError::NotStructured(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix without physicality checks. Intended for tomography
    /// estimates, which may legitimately be slightly nonphysical and must be
    /// reported as-is.
    pub fn from_estimate(mat: CMatrix) -> SimResult<Self> {
        linalg::check_square(&mat, "density matrix estimate")?;
        Ok(Self { mat })
    }

    /// Rank-one projector `|ψ><ψ|`.
    pub fn pure(state: &PureState) -> Self {
        let d = state.dim();
        let a = state.amplitudes();
        let mat = CMatrix::from_shape_fn((d, d), |(i, j)| a[i] * a[j].conj());
        Self { mat }
    }

    /// The maximally mixed state `1/d`.
    pub fn maximally_mixed(d: usize) -> SimResult<Self> {
        if d == 0 {
            return Err(SimError::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self {
            mat: linalg::identity(d).mapv(|z| z / d as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.dot(&self.mat).diag().sum().re
    }

    /// `<ψ|ρ|ψ>`, the fidelity against a pure target.
    pub fn fidelity_with_pure(&self, state: &PureState) -> SimResult<f64> {
        Ok(state.expectation(&self.mat)?.re)
    }

    /// Trace distance `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> SimResult<f64> {
        if self.dim() != other.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "trace distance between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(0.5 * linalg::trace_norm_hermitian(&(&self.mat - &other.mat))?)
    }
}

/// Operator-norm (largest singular value) distance between two same-sized
/// matrices; the strong simulation metric.
pub fn operator_norm_distance(a: &CMatrix, b: &CMatrix) -> SimResult<f64> {
    if a.dim() != b.dim() {
        return Err(SimError::DimensionMismatch(format!(
            "operator norm distance between {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    linalg::operator_norm(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state_vector, random_unitary};
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // --- PureState ----------------------------------------------------------

    #[test]
    fn rejects_unnormalized_state() {
        let v = array![c(1.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            PureState::new(v),
            Err(SimError::InvalidParticleSet { .. })
        ));
    }

    #[test]
    fn normalized_constructor_rescales() {
        let v = array![c(3.0, 0.0), c(0.0, 4.0)];
        let psi = PureState::normalized(v).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[1].im, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_momenta_pair() {
        let psi = PureState::normalized(array![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let pi = psi.conjugate_momenta();
        assert_eq!(pi[0], c(0.0, 0.6));
        assert_eq!(pi[1], c(0.8, 0.0));
    }

    // --- phase-space round trip ----------------------------------------------

    #[test]
    fn computational_encoding_reads_off_components() {
        let psi = PureState::normalized(array![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let basis = BasisLabel::computational(2);
        let hp = to_phase_space(&psi, &basis).unwrap();
        assert_abs_diff_eq!(hp.positions()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(hp.positions()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hp.momenta()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hp.momenta()[1], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(hp.norm_squared(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn plus_state_in_shift_eigenbasis_is_single_particle() {
        // |+> is the first eigenvector of M_{10}, so all weight sits on
        // particle 0.
        let psi = PureState::normalized(array![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let basis = BasisLabel::heisenberg_weyl(1, 0, 2).unwrap();
        let hp = to_phase_space(&psi, &basis).unwrap();
        assert_abs_diff_eq!(hp.positions()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hp.positions()[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hp.momenta()[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn round_trip_through_random_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for d in [2usize, 3, 5, 8] {
            let psi = PureState::new(random_state_vector(d, &mut rng)).unwrap();
            let basis = BasisLabel::custom("random", random_unitary(d, &mut rng)).unwrap();
            let hp = to_phase_space(&psi, &basis).unwrap();
            let back = from_phase_space(&hp).unwrap();
            assert!(psi.fidelity(&back).unwrap() > 1.0 - 1e-12);
            let diff: f64 = psi
                .amplitudes()
                .iter()
                .zip(back.amplitudes().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < crate::ROUND_TRIP_TOL, "d={d}: round trip error {diff}");
        }
    }

    #[test]
    fn rejects_norm_violating_particles() {
        let basis = BasisLabel::computational(2);
        let q = array![1.0, 0.1];
        let p = array![0.0, 0.0];
        assert!(matches!(
            HiddenParticleSet::new(basis, q, p),
            Err(SimError::InvalidParticleSet { .. })
        ));
    }

    #[test]
    fn stacked_layout_round_trips() {
        let basis = BasisLabel::computational(3);
        let q = array![0.5, 0.5, 0.0];
        let p = array![0.5, 0.0, 0.5];
        let hp = HiddenParticleSet::new(basis.clone(), q.clone(), p.clone()).unwrap();
        let stacked = hp.stacked();
        assert_eq!(stacked.len(), 6);
        assert_eq!(stacked[1], 0.5);
        assert_eq!(stacked[3], 0.5);
        let back = HiddenParticleSet::from_stacked(basis, &stacked).unwrap();
        assert_eq!(back.positions(), &q);
        assert_eq!(back.momenta(), &p);
    }

    proptest! {
        #[test]
        fn norm_is_basis_invariant(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 2 + (seed as usize % 5);
            let psi = PureState::new(random_state_vector(d, &mut rng)).unwrap();
            let basis = BasisLabel::custom("haar", random_unitary(d, &mut rng)).unwrap();
            let hp = to_phase_space(&psi, &basis).unwrap();
            prop_assert!((hp.norm_squared() - 1.0).abs() < 1e-12);
        }
    }

    // --- DensityMatrix --------------------------------------------------------

    #[test]
    fn pure_density_matrix_has_unit_purity() {
        let psi = PureState::two_level_superposition(2, 0, 1, c(0.0, 1.0)).unwrap();
        let rho = DensityMatrix::pure(&psi);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.fidelity_with_pure(&psi).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn maximally_mixed_purity() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        // Trace ≠ 1.
        assert!(DensityMatrix::new(linalg::identity(2)).is_err());
        // Negative eigenvalue, trace 1, Hermitian.
        let m = array![[c(1.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]];
        assert!(DensityMatrix::new(m.clone()).is_err());
        assert!(DensityMatrix::from_estimate(m).is_ok());
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let r0 = DensityMatrix::pure(&PureState::basis_state(2, 0).unwrap());
        let r1 = DensityMatrix::pure(&PureState::basis_state(2, 1).unwrap());
        assert_abs_diff_eq!(r0.trace_distance(&r1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn operator_norm_distance_of_paulis() {
        let x = hw_operator(1, 0, 2).unwrap();
        let z = hw_operator(0, 1, 2).unwrap();
        // X - Z = [[-1, 1], [1, 1]] has eigenvalues ±√2.
        assert_abs_diff_eq!(
            operator_norm_distance(&x, &z).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(operator_norm_distance(&x, &x).unwrap(), 0.0, epsilon = 1e-12);
    }
}
