//! State tomography from hidden-particle readout.
//!
//! Measuring in the eigenbasis of `M_{jk}` means encoding the state as
//! hidden particles relative to that basis and reading the coordinates
//! `(q_m, p_m)` off the classical system; outcome probabilities are the
//! quadratic functions `Pr(m) = q_m² + p_m²`, and the operator-basis
//! coordinate follows by pooling eigenvalues:
//!
//! ```text
//! n_{jk} = tr(M_{jk}† ρ) = Σ_m λ_m* · Pr(m),      M_{jk} b_m = λ_m b_m.
//! ```
//!
//! One run per basis covers all `d²` operator indices, and plain linear
//! inversion `ρ = (1 + Σ n M)/d` reconstructs the state. The default
//! readout is deterministic (infinite statistics); a seeded finite-shot
//! mode adds multinomial noise.

mod process;
mod verify;

pub use process::{
    choi_from_kraus, process_runs, qpt_input_states, sac_qpt, KrausChannel, ProcessEstimate,
    QuantumChannel, UnitaryChannel,
};
pub use verify::{verify_simulator, MatrixSimulator, SacSimulator, Simulator, VerificationReport};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{SimError, SimResult};
use crate::linalg::{self, C64};
use crate::statespace::{
    hw_indices, hw_operator, to_phase_space, BasisKind, BasisLabel, DensityMatrix, PureState,
};
use crate::STRUCTURAL_TOL;

/// Outcome statistics of one measurement basis.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    basis: BasisLabel,
    probabilities: Vec<f64>,
    readouts: Option<Vec<(f64, f64)>>,
    shots: Option<u64>,
}

impl MeasurementRecord {
    fn validated(self) -> SimResult<Self> {
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(SimError::InvariantBreach(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if self.probabilities.iter().any(|&p| p < -1e-15) {
            return Err(SimError::InvariantBreach(
                "negative outcome probability".into(),
            ));
        }
        Ok(self)
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Raw particle coordinates per outcome; present only for deterministic
    /// readout of pure states.
    pub fn readouts(&self) -> Option<&[(f64, f64)]> {
        self.readouts.as_deref()
    }

    /// Number of shots behind the statistics; `None` means exact readout.
    pub fn shots(&self) -> Option<u64> {
        self.shots
    }
}

/// Measurement statistics model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutMode {
    /// Deterministic readout of the particle coordinates — infinite
    /// statistics.
    Exact,
    /// Multinomial sampling with `shots` draws per basis, seeded for
    /// reproducibility.
    Sampled { shots: u64, seed: u64 },
}

/// Projective measurement of a pure state: encodes the state as hidden
/// particles in `basis` and reads out exact coordinates and probabilities.
pub fn measure_basis_probabilities(
    state: &PureState,
    basis: &BasisLabel,
) -> SimResult<MeasurementRecord> {
    let particles = to_phase_space(state, basis)?;
    let readouts: Vec<(f64, f64)> = particles
        .positions()
        .iter()
        .zip(particles.momenta().iter())
        .map(|(&q, &p)| (q, p))
        .collect();
    let probabilities = readouts.iter().map(|&(q, p)| q * q + p * p).collect();
    MeasurementRecord {
        basis: basis.clone(),
        probabilities,
        readouts: Some(readouts),
        shots: None,
    }
    .validated()
}

/// Projective measurement of a density matrix: `Pr(m) = <b_m|ρ|b_m>`.
/// No raw particle readout exists for mixed states.
pub fn measure_density_probabilities(
    rho: &DensityMatrix,
    basis: &BasisLabel,
) -> SimResult<MeasurementRecord> {
    if rho.dim() != basis.dim() {
        return Err(SimError::DimensionMismatch(format!(
            "state dimension {} does not match basis dimension {}",
            rho.dim(),
            basis.dim()
        )));
    }
    let b = basis.vectors();
    let rb = rho.matrix().dot(b);
    let probabilities = (0..basis.dim())
        .map(|m| {
            b.column(m)
                .iter()
                .zip(rb.column(m).iter())
                .map(|(x, y)| (x.conj() * y).re)
                .sum::<f64>()
        })
        .collect();
    MeasurementRecord {
        basis: basis.clone(),
        probabilities,
        readouts: None,
        shots: None,
    }
    .validated()
}

/// Replaces exact probabilities by empirical frequencies from `shots`
/// multinomial draws. The stream index keeps independent bases independent
/// under a shared seed.
fn sample_record(
    record: &MeasurementRecord,
    shots: u64,
    seed: u64,
    stream: u64,
) -> SimResult<MeasurementRecord> {
    if shots == 0 {
        return Err(SimError::InvalidArgument("shots must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let weights = WeightedIndex::new(
        record
            .probabilities
            .iter()
            .map(|&p| p.max(0.0))
            .collect::<Vec<_>>(),
    )
    .map_err(|e| SimError::InvalidArgument(format!("invalid outcome distribution: {e}")))?;
    let mut counts = vec![0u64; record.probabilities.len()];
    for _ in 0..shots {
        counts[weights.sample(&mut rng)] += 1;
    }
    MeasurementRecord {
        basis: record.basis.clone(),
        probabilities: counts.iter().map(|&c| c as f64 / shots as f64).collect(),
        readouts: None,
        shots: Some(shots),
    }
    .validated()
}

/// Eigenvalue of the record's operator attached to each basis vector, via
/// the Rayleigh quotient `λ_m = <b_m|M_{jk}|b_m>`.
fn record_eigenvalues(record: &MeasurementRecord) -> SimResult<Vec<C64>> {
    let (j, k) = match record.basis.kind() {
        BasisKind::HeisenbergWeyl { j, k } => (*j, *k),
        BasisKind::Computational => (0, 0),
        BasisKind::Custom(name) => {
            return Err(SimError::InvalidArgument(format!(
                "record basis `{name}` is not a Heisenberg-Weyl eigenbasis"
            )))
        }
    };
    let d = record.basis.dim();
    let m = hw_operator(j, k, d)?;
    let b = record.basis.vectors();
    let mb = m.dot(b);
    Ok((0..d)
        .map(|col| {
            b.column(col)
                .iter()
                .zip(mb.column(col).iter())
                .map(|(x, y)| x.conj() * y)
                .sum()
        })
        .collect())
}

/// Pools outcome statistics into the operator-basis coordinates
/// `n_{jk} = Σ_m λ_m*·Pr(m)`, returned in row-major `(j,k)` order without
/// `(0,0)`. Requires exactly one record per traceless index pair.
pub fn expectations_from_probabilities(records: &[MeasurementRecord]) -> SimResult<Vec<C64>> {
    if records.is_empty() {
        return Err(SimError::InvalidArgument("no measurement records".into()));
    }
    let d = records[0].basis.dim();
    let mut by_index: Vec<Option<&MeasurementRecord>> = vec![None; d * d];
    for record in records {
        if record.basis.dim() != d {
            return Err(SimError::DimensionMismatch(
                "records mix different dimensions".into(),
            ));
        }
        let (j, k) = match record.basis.kind() {
            BasisKind::HeisenbergWeyl { j, k } => (*j, *k),
            BasisKind::Computational => (0, 0),
            BasisKind::Custom(name) => {
                return Err(SimError::InvalidArgument(format!(
                    "record basis `{name}` is not a Heisenberg-Weyl eigenbasis"
                )))
            }
        };
        if (j, k) == (0, 0) {
            // The trace coordinate is fixed to 1; a (0,0) run carries no
            // tomographic information and is simply skipped here.
            continue;
        }
        let slot = &mut by_index[j * d + k];
        if slot.is_some() {
            return Err(SimError::InvalidArgument(format!(
                "duplicate record for basis ({j},{k})"
            )));
        }
        *slot = Some(record);
    }
    let mut coords = Vec::with_capacity(d * d - 1);
    for (j, k) in hw_indices(d) {
        if (j, k) == (0, 0) {
            continue;
        }
        let record = by_index[j * d + k].ok_or_else(|| {
            SimError::InvalidArgument(format!("missing record for basis ({j},{k})"))
        })?;
        let lambdas = record_eigenvalues(record)?;
        coords.push(
            lambdas
                .iter()
                .zip(record.probabilities.iter())
                .map(|(lam, &p)| lam.conj() * p)
                .sum(),
        );
    }
    Ok(coords)
}

/// Linear-inversion estimate with physicality diagnostics.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// The (Hermitian-symmetrized) estimate. May carry small negative
    /// eigenvalues unless clipping was requested.
    pub state: DensityMatrix,
    /// Hermiticity deviation of the raw (pre-symmetrization) estimate.
    pub hermiticity_deviation: f64,
    /// Smallest eigenvalue of the symmetrized estimate.
    pub min_eigenvalue: f64,
    /// Whether negative eigenvalues were clipped away.
    pub clipped: bool,
}

/// Largest negative eigenvalue magnitude tolerated before linear inversion
/// reports the estimate as nonphysical.
pub const INVERSION_PSD_TOL: f64 = 1e-8;

/// Reconstructs `ρ = (1 + Σ n_{jk} M_{jk})/d` from operator-basis
/// coordinates (row-major traceless order).
///
/// The estimate is Hermitian-symmetrized and reported as-is, including
/// small negative eigenvalues, unless `clip` is set, in which case negative
/// eigenvalues are zeroed and the spectrum renormalized. Estimates with an
/// eigenvalue below `-`[`INVERSION_PSD_TOL`] are rejected; use
/// [`qst_linear_inversion_with_tol`] when the coordinates carry known
/// statistical noise.
pub fn qst_linear_inversion(coords: &[C64], d: usize, clip: bool) -> SimResult<Reconstruction> {
    qst_linear_inversion_with_tol(coords, d, clip, INVERSION_PSD_TOL)
}

/// [`qst_linear_inversion`] with a caller-chosen rejection tolerance:
/// estimates whose smallest eigenvalue falls below `-psd_tol` are rejected
/// as nonphysical, everything above is reported with diagnostics.
pub fn qst_linear_inversion_with_tol(
    coords: &[C64],
    d: usize,
    clip: bool,
    psd_tol: f64,
) -> SimResult<Reconstruction> {
    if d == 0 {
        return Err(SimError::InvalidArgument("dimension must be positive".into()));
    }
    if coords.len() != d * d - 1 {
        return Err(SimError::DimensionMismatch(format!(
            "expected {} coordinates for dimension {d}, got {}",
            d * d - 1,
            coords.len()
        )));
    }
    let mut raw = linalg::identity(d);
    let mut idx = 0usize;
    for (j, k) in hw_indices(d) {
        if (j, k) == (0, 0) {
            continue;
        }
        let m = hw_operator(j, k, d)?;
        raw = raw + m.mapv(|x| x * coords[idx]);
        idx += 1;
    }
    raw = raw.mapv(|x| x / d as f64);

    let hermiticity_deviation = linalg::hermitian_deviation(&raw);
    let sym = (&raw + &linalg::dagger(&raw)).mapv(|x| 0.5 * x);
    let (vals, vecs) = linalg::eigh(&sym)?;
    let min_eigenvalue = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -psd_tol {
        return Err(SimError::NotStructured(format!(
            "linear inversion produced eigenvalue {min_eigenvalue:.3e} \
             below -{psd_tol:.3e}; estimate rejected"
        )));
    }

    let state = if clip && min_eigenvalue < 0.0 {
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let n = vals.len();
        let mut mat = crate::CMatrix::zeros((n, n));
        for (a, &val) in clipped.iter().enumerate() {
            let col = vecs.column(a);
            let w = val / total;
            for i in 0..n {
                for jj in 0..n {
                    mat[[i, jj]] += col[i] * col[jj].conj() * w;
                }
            }
        }
        DensityMatrix::new(mat)?
    } else {
        DensityMatrix::from_estimate(sym)?
    };
    Ok(Reconstruction {
        state,
        hermiticity_deviation,
        min_eigenvalue,
        clipped: clip && min_eigenvalue < 0.0,
    })
}

/// Full output of a SAC state-tomography experiment.
#[derive(Debug, Clone)]
pub struct QstOutcome {
    records: Vec<MeasurementRecord>,
    description: Vec<f64>,
    coords: Vec<C64>,
    reconstruction: Reconstruction,
    runs: u64,
}

impl QstOutcome {
    /// One record per basis `B_{jk}`, row-major, `(0,0)` first.
    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    /// The classical description of the state: `2(d²-1)` reals
    /// (interleaved real and imaginary parts of the coordinates).
    pub fn description(&self) -> &[f64] {
        &self.description
    }

    /// Operator-basis coordinates `n_{jk}`, traceless row-major order.
    pub fn coordinates(&self) -> &[C64] {
        &self.coords
    }

    pub fn reconstruction(&self) -> &Reconstruction {
        &self.reconstruction
    }

    /// Number of state preparations consumed (`d²`).
    pub fn runs(&self) -> u64 {
        self.runs
    }
}

enum QstInput<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

fn run_qst(input: QstInput<'_>, mode: ReadoutMode) -> SimResult<QstOutcome> {
    let d = match &input {
        QstInput::Pure(psi) => psi.dim(),
        QstInput::Mixed(rho) => rho.dim(),
    };
    let mut records = Vec::with_capacity(d * d);
    for (stream, (j, k)) in hw_indices(d).enumerate() {
        let basis = BasisLabel::heisenberg_weyl(j, k, d)?;
        let exact = match &input {
            QstInput::Pure(psi) => measure_basis_probabilities(psi, &basis)?,
            QstInput::Mixed(rho) => measure_density_probabilities(rho, &basis)?,
        };
        let record = match mode {
            ReadoutMode::Exact => exact,
            ReadoutMode::Sampled { shots, seed } => {
                sample_record(&exact, shots, seed, stream as u64)?
            }
        };
        records.push(record);
    }
    let coords = expectations_from_probabilities(&records)?;
    let description = coords.iter().flat_map(|z| [z.re, z.im]).collect();
    // Exact readout must invert to a physical state up to roundoff; finite
    // statistics legitimately push eigenvalues negative by O(d/√shots)
    // (each probability has standard error ≤ 1/(2√shots) and the inversion
    // sums d²-1 unit-norm operators scaled by 1/d), so the rejection gate
    // widens to a generous multiple of that floor and the negativity is
    // reported via the diagnostics instead.
    let psd_tol = match mode {
        ReadoutMode::Exact => INVERSION_PSD_TOL,
        ReadoutMode::Sampled { shots, .. } => {
            INVERSION_PSD_TOL.max(10.0 * d as f64 / (shots.max(1) as f64).sqrt())
        }
    };
    let reconstruction = qst_linear_inversion_with_tol(&coords, d, false, psd_tol)?;
    Ok(QstOutcome {
        records,
        description,
        coords,
        reconstruction,
        runs: (d * d) as u64,
    })
}

/// SAC state tomography of a pure state with deterministic readout: one
/// phase-space encoding per Heisenberg-Weyl basis (`d²` runs), classical
/// readout, linear inversion.
pub fn sac_qst(state: &PureState) -> SimResult<QstOutcome> {
    run_qst(QstInput::Pure(state), ReadoutMode::Exact)
}

/// [`sac_qst`] with an explicit readout mode (finite sampling available).
pub fn sac_qst_with_mode(state: &PureState, mode: ReadoutMode) -> SimResult<QstOutcome> {
    run_qst(QstInput::Pure(state), mode)
}

/// State tomography of a density matrix (used by process tomography, where
/// channel outputs are generally mixed).
pub fn sac_qst_density(rho: &DensityMatrix, mode: ReadoutMode) -> SimResult<QstOutcome> {
    run_qst(QstInput::Mixed(rho), mode)
}
