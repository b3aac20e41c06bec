//! Verifying a black-box simulator against an exact unitary.
//!
//! The strong figure of merit is `sup_ψ ‖Uψ - sim(ψ)‖`. When the simulator
//! exposes its own linear action the supremum is computed exactly as the
//! operator norm `‖U - S‖`; otherwise it is probed on a finite input set
//! (the informationally complete tomography family by default) and is a
//! lower bound. Weak figures compare expectation values of named
//! observables over the same probes. A declared state-preparation error
//! `ε0` composes additively: the total bound is `strong_distance + ε0`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::{
    evolve, flow_jacobian, symplectic_to_unitary, EvolveMethod, QuadraticHamiltonian,
};
use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix};
use crate::statespace::{
    from_phase_space, operator_norm_distance, to_phase_space, BasisLabel, PureState,
};
use crate::STRUCTURAL_TOL;

use super::qpt_input_states;

/// A black-box map from pure states to pure states.
pub trait Simulator {
    fn dim(&self) -> usize;

    /// Runs the simulator on one input.
    fn apply(&self, input: &PureState) -> SimResult<PureState>;

    /// The simulator's linear action, if it can disclose one. Enables the
    /// exact operator-norm route for the strong distance; black boxes
    /// return `None` and are probed instead.
    fn matrix(&self) -> Option<CMatrix> {
        None
    }
}

/// A simulator that is literally multiplication by a fixed matrix.
pub struct MatrixSimulator {
    mat: CMatrix,
}

impl MatrixSimulator {
    /// The matrix must be close enough to an isometry that unit inputs stay
    /// unit to within the state-norm tolerance; this is checked per apply.
    pub fn new(mat: CMatrix) -> SimResult<Self> {
        linalg::check_square(&mat, "simulator matrix")?;
        Ok(Self { mat })
    }
}

impl Simulator for MatrixSimulator {
    fn dim(&self) -> usize {
        self.mat.nrows()
    }

    fn apply(&self, input: &PureState) -> SimResult<PureState> {
        if input.dim() != self.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "simulator dimension {} vs input dimension {}",
                self.dim(),
                input.dim()
            )));
        }
        PureState::new(self.mat.dot(input.amplitudes()))
    }

    fn matrix(&self) -> Option<CMatrix> {
        Some(self.mat.clone())
    }
}

/// The SAC engine as a simulator of `e^{-itH}`: inputs are encoded as
/// hidden particles in the computational basis, propagated by [`evolve`],
/// and decoded back to amplitudes.
pub struct SacSimulator {
    h: QuadraticHamiltonian,
    t: f64,
    method: EvolveMethod,
}

impl SacSimulator {
    pub fn new(h: QuadraticHamiltonian, t: f64, method: EvolveMethod) -> SimResult<Self> {
        if !t.is_finite() {
            return Err(SimError::InvalidArgument(
                "evolution time must be finite".into(),
            ));
        }
        Ok(Self { h, t, method })
    }
}

impl Simulator for SacSimulator {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply(&self, input: &PureState) -> SimResult<PureState> {
        let basis = BasisLabel::computational(self.dim());
        let particles = to_phase_space(input, &basis)?;
        let traj = evolve(&self.h, &particles, self.t, self.method, 2)?;
        from_phase_space(traj.final_state())
    }

    fn matrix(&self) -> Option<CMatrix> {
        // Only the spectral propagator has a closed-form linear action;
        // midpoint integration stays a black box and gets probed.
        if !self.h.is_static() || !matches!(self.method, EvolveMethod::Exact) {
            return None;
        }
        let basis = BasisLabel::computational(self.dim());
        let map = flow_jacobian(&self.h, self.t, &basis).ok()?;
        symplectic_to_unitary(&map).ok()
    }
}

/// Verification verdict; serializes to
/// `{strong_distance, weak, epsilon0, pass, runs}`.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// `sup ‖Uψ - sim(ψ)‖`: exact when the simulator exposed its matrix,
    /// otherwise the maximum over the probe set.
    pub strong_distance: f64,
    /// Per-observable `sup_i |⟨O⟩_target - ⟨O⟩_simulated|` over the probes.
    pub weak: BTreeMap<String, f64>,
    /// Declared state-preparation error, composed additively into
    /// [`VerificationReport::total_bound`].
    pub epsilon0: f64,
    /// `strong_distance ≤ ε` for the tolerance the caller demanded.
    pub pass: bool,
    /// Number of simulator invocations consumed.
    pub runs: u64,
}

impl VerificationReport {
    /// Total simulation error bound `strong_distance + ε0`.
    pub fn total_bound(&self) -> f64 {
        self.strong_distance + self.epsilon0
    }
}

/// Compares `simulator` against the exact unitary `simulatee`.
///
/// Probes come from `inputs` when given, otherwise the `d²`-state
/// tomography family is used. `epsilon` is the acceptance threshold on the
/// strong distance; `epsilon0` is a declared initialization error that
/// only enters the reported total bound.
pub fn verify_simulator(
    simulatee: &CMatrix,
    simulator: &dyn Simulator,
    inputs: Option<&[PureState]>,
    observables: &[(String, CMatrix)],
    epsilon: f64,
    epsilon0: f64,
) -> SimResult<VerificationReport> {
    let d = linalg::check_square(simulatee, "simulatee")?;
    let u_dev = linalg::unitary_deviation(simulatee);
    if u_dev > STRUCTURAL_TOL {
        return Err(SimError::NotStructured(format!(
            "simulatee is not unitary: deviation {u_dev:.3e}"
        )));
    }
    if simulator.dim() != d {
        return Err(SimError::DimensionMismatch(format!(
            "simulatee dimension {d} vs simulator dimension {}",
            simulator.dim()
        )));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0 && epsilon0.is_finite() && epsilon0 >= 0.0) {
        return Err(SimError::InvalidArgument(
            "epsilon and epsilon0 must be finite and nonnegative".into(),
        ));
    }
    let owned_probes;
    let probes: &[PureState] = match inputs {
        Some(set) => {
            if set.is_empty() {
                return Err(SimError::InvalidArgument("empty probe set".into()));
            }
            set
        }
        None => {
            owned_probes = qpt_input_states(d)?;
            &owned_probes
        }
    };
    let mut obs_checked = Vec::with_capacity(observables.len());
    for (name, o) in observables {
        obs_checked.push((name.clone(), linalg::check_hermitian(o, STRUCTURAL_TOL, "observable")?));
    }

    let mut probe_sup = 0.0f64;
    let mut weak: BTreeMap<String, f64> = obs_checked
        .iter()
        .map(|(name, _)| (name.clone(), 0.0))
        .collect();
    let mut runs = 0u64;
    for psi in probes {
        if psi.dim() != d {
            return Err(SimError::DimensionMismatch(format!(
                "probe dimension {} vs simulatee dimension {d}",
                psi.dim()
            )));
        }
        let target = simulatee.dot(psi.amplitudes());
        let simulated = simulator.apply(psi)?;
        runs += 1;
        let diff = &target - simulated.amplitudes();
        probe_sup = probe_sup.max(diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        if !obs_checked.is_empty() {
            let target_state = PureState::new(target)?;
            for (name, o) in &obs_checked {
                let gap = (target_state.expectation(o)? - simulated.expectation(o)?).norm();
                let entry = weak.get_mut(name).expect("observable registered above");
                if *entry < gap {
                    *entry = gap;
                }
            }
        }
    }

    let strong_distance = match simulator.matrix() {
        Some(m) => {
            if m.nrows() != d || m.ncols() != d {
                return Err(SimError::DimensionMismatch(
                    "simulator matrix dimension mismatch".into(),
                ));
            }
            operator_norm_distance(simulatee, &m)?
        }
        None => probe_sup,
    };

    Ok(VerificationReport {
        strong_distance,
        weak,
        epsilon0,
        pass: strong_distance <= epsilon,
        runs,
    })
}
