//! Process tomography through repeated state tomography.
//!
//! A channel `E` is probed on the informationally complete input family
//! `{|i>} ∪ {(|i>+|j>)/√2} ∪ {(|i>+i|j>)/√2}` (`d²` states). Each output is
//! reconstructed by [`super::sac_qst_density`] (`d²` runs each, `d⁴`
//! total), matrix units are recovered by linearity,
//!
//! ```text
//! E(|i><j|) = E(ρ⁺) + i·E(ρʸ) - (1+i)/2·(E_ii + E_jj),    i ≠ j,
//! ```
//!
//! and assembled into the normalized Choi matrix
//! `C = (1/d) Σ_ij E(|i><j|) ⊗ |i><j|` with `tr C = 1`.

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, C64};
use crate::statespace::{DensityMatrix, PureState};
use crate::STRUCTURAL_TOL;

use super::{sac_qst_density, ReadoutMode};

/// A completely positive trace-preserving map probed as a black box.
pub trait QuantumChannel {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &DensityMatrix) -> SimResult<DensityMatrix>;
}

/// Conjugation by a unitary: `ρ ↦ UρU†`.
pub struct UnitaryChannel {
    u: CMatrix,
}

impl UnitaryChannel {
    pub fn new(u: CMatrix) -> SimResult<Self> {
        linalg::check_square(&u, "channel unitary")?;
        let dev = linalg::unitary_deviation(&u);
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "channel matrix is not unitary: deviation {dev:.3e}"
            )));
        }
        Ok(Self { u })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }
}

impl QuantumChannel for UnitaryChannel {
    fn dim(&self) -> usize {
        self.u.nrows()
    }

    fn apply(&self, rho: &DensityMatrix) -> SimResult<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "channel dimension {} does not match state dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        DensityMatrix::from_estimate(self.u.dot(rho.matrix()).dot(&linalg::dagger(&self.u)))
    }
}

/// A Kraus-operator channel `ρ ↦ Σ_a K_a ρ K_a†`, validated to be
/// trace preserving (`Σ K†K = 1`).
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> SimResult<Self> {
        if ops.is_empty() {
            return Err(SimError::InvalidArgument("empty Kraus set".into()));
        }
        let d = linalg::check_square(&ops[0], "Kraus operator")?;
        let mut completeness = CMatrix::zeros((d, d));
        for k in &ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(SimError::DimensionMismatch(
                    "Kraus operators of mixed dimensions".into(),
                ));
            }
            completeness = completeness + linalg::dagger(k).dot(k);
        }
        let dev = linalg::max_abs(&(&completeness - &linalg::identity(d)));
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "Kraus set is not trace preserving: Σ K†K deviates by {dev:.3e}"
            )));
        }
        Ok(Self { ops })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }
}

impl QuantumChannel for KrausChannel {
    fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    fn apply(&self, rho: &DensityMatrix) -> SimResult<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "channel dimension {} does not match state dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        let mut out = CMatrix::zeros((self.dim(), self.dim()));
        for k in &self.ops {
            out = out + k.dot(rho.matrix()).dot(&linalg::dagger(k));
        }
        DensityMatrix::from_estimate(out)
    }
}

/// The normalized Choi matrix of a Kraus set, constructed directly:
/// `C = (1/d) Σ_a w_a w_a†` with `w_a = Σ_i (K_a|i>) ⊗ |i>`.
///
/// This is the oracle route against which [`sac_qpt`] estimates are tested.
pub fn choi_from_kraus(ops: &[CMatrix]) -> SimResult<CMatrix> {
    if ops.is_empty() {
        return Err(SimError::InvalidArgument("empty Kraus set".into()));
    }
    let d = linalg::check_square(&ops[0], "Kraus operator")?;
    let mut choi = CMatrix::zeros((d * d, d * d));
    for k in ops {
        if k.nrows() != d || k.ncols() != d {
            return Err(SimError::DimensionMismatch(
                "Kraus operators of mixed dimensions".into(),
            ));
        }
        // w[(s,i)] = K[s,i]: output index fast over s, ancilla/input over i.
        let mut w = crate::CVector::zeros(d * d);
        for s in 0..d {
            for i in 0..d {
                w[s * d + i] = k[[s, i]];
            }
        }
        for r in 0..d * d {
            for c in 0..d * d {
                choi[[r, c]] += w[r] * w[c].conj();
            }
        }
    }
    Ok(choi.mapv(|x| x / d as f64))
}

/// The informationally complete probe family
/// `{|i>} ∪ {(|i>+|j>)/√2, i<j} ∪ {(|i>+i|j>)/√2, i<j}`, `d²` states.
pub fn qpt_input_states(d: usize) -> SimResult<Vec<PureState>> {
    if d == 0 {
        return Err(SimError::InvalidArgument("dimension must be positive".into()));
    }
    let mut states = Vec::with_capacity(d * d);
    for i in 0..d {
        states.push(PureState::basis_state(d, i)?);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            states.push(PureState::two_level_superposition(d, i, j, C64::new(1.0, 0.0))?);
            states.push(PureState::two_level_superposition(d, i, j, C64::new(0.0, 1.0))?);
        }
    }
    Ok(states)
}

/// Number of runs a process tomography of dimension `d` consumes.
pub fn process_runs(d: usize) -> u64 {
    let d = d as u64;
    d * d * d * d
}

/// Process-tomography result: normalized Choi matrix plus bookkeeping.
#[derive(Debug, Clone)]
pub struct ProcessEstimate {
    dim: usize,
    choi: CMatrix,
    run_count: u64,
}

impl ProcessEstimate {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Normalized Choi matrix (`tr = 1`), output factor first:
    /// `C = (1/d) Σ_ij E(|i><j|) ⊗ |i><j|`.
    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn run_count(&self) -> u64 {
        self.run_count
    }

    /// `‖C - C†‖_max`; small for faithful estimates.
    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.choi)
    }

    /// `|tr C - 1|`.
    pub fn trace_deviation(&self) -> f64 {
        (linalg::trace(&self.choi) - C64::new(1.0, 0.0)).norm()
    }

    /// Deviation of the reduced input state `tr_out C` from `1/d`
    /// (trace preservation of the estimated channel).
    pub fn trace_preservation_deviation(&self) -> f64 {
        let d = self.dim;
        let mut reduced = CMatrix::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..d {
                    acc += self.choi[[s * d + i, s * d + j]];
                }
                reduced[[i, j]] = acc;
            }
        }
        let target = linalg::identity(d).mapv(|x| x / d as f64);
        linalg::max_abs(&(&reduced - &target))
    }

    /// Trace distance `½‖C - C'‖₁` between two Choi estimates (both
    /// Hermitian-symmetrized first).
    pub fn choi_trace_distance(&self, other: &CMatrix) -> SimResult<f64> {
        if other.dim() != self.choi.dim() {
            return Err(SimError::DimensionMismatch(
                "Choi matrices of different dimensions".into(),
            ));
        }
        let diff = &self.choi - other;
        let sym = (&diff + &linalg::dagger(&diff)).mapv(|x| 0.5 * x);
        Ok(0.5 * linalg::trace_norm_hermitian(&sym)?)
    }
}

/// SAC process tomography: probes `channel` on the complete input family,
/// reconstructs every output by state tomography, and assembles the Choi
/// estimate. Consumes exactly `d⁴` runs.
pub fn sac_qpt(channel: &dyn QuantumChannel, mode: ReadoutMode) -> SimResult<ProcessEstimate> {
    let d = channel.dim();
    if d == 0 {
        return Err(SimError::InvalidArgument("channel on empty space".into()));
    }
    let inputs = qpt_input_states(d)?;
    let mut run_count = 0u64;

    // Estimated outputs per input state, in the qpt_input_states order.
    let mut outputs: Vec<CMatrix> = Vec::with_capacity(inputs.len());
    for input in &inputs {
        let rho_in = DensityMatrix::pure(input);
        let rho_out = channel.apply(&rho_in)?;
        if rho_out.dim() != d {
            return Err(SimError::DimensionMismatch(format!(
                "channel returned dimension {} for input dimension {d}",
                rho_out.dim()
            )));
        }
        let qst = sac_qst_density(&rho_out, mode)?;
        run_count += qst.runs();
        outputs.push(qst.reconstruction().state.matrix().clone());
    }

    // Index of the (i,j) superposition pair in the input list.
    let pair_index = |i: usize, j: usize| -> usize {
        // Pairs are emitted for i<j in row-major order after the d basis
        // states; each pair contributes two states (real, imaginary).
        let mut idx = d;
        for a in 0..d {
            for b in (a + 1)..d {
                if (a, b) == (i, j) {
                    return idx;
                }
                idx += 2;
            }
        }
        unreachable!("pair index out of range")
    };

    let half = C64::new(0.5, 0.0);
    let i_unit = C64::new(0.0, 1.0);
    let mut choi = CMatrix::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            // E(|i><j|) by linearity from the probed combinations.
            let block: CMatrix = if i == j {
                outputs[i].clone()
            } else {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                let idx = pair_index(a, b);
                let e_plus = &outputs[idx];
                let e_imag = &outputs[idx + 1];
                let diag = (&outputs[a] + &outputs[b]).mapv(|x| x * half);
                if i < j {
                    e_plus + &e_imag.mapv(|x| x * i_unit) - diag.mapv(|x| x * (C64::new(1.0, 1.0)))
                } else {
                    e_plus - &e_imag.mapv(|x| x * i_unit) - diag.mapv(|x| x * (C64::new(1.0, -1.0)))
                }
            };
            // C += E(|i><j|) ⊗ |i><j| / d.
            for r in 0..d {
                for s in 0..d {
                    choi[[r * d + i, s * d + j]] += block[[r, s]] / d as f64;
                }
            }
        }
    }
    debug_assert_eq!(run_count, process_runs(d));
    Ok(ProcessEstimate {
        dim: d,
        choi,
        run_count,
    })
}
