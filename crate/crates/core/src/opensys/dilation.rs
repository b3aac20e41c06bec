//! Kraus channels as unitaries on system ⊗ ancilla, plus a seeded Monte
//! Carlo that simulates a channel acting on a mixture of pure states.
//!
//! A trace-preserving Kraus set `{K_j}` defines the isometry
//! `V = Σ_j K_j ⊗ |j>_A` (system factor first, ancilla second), which is
//! completed to a unitary `U` on the joint space; the original operators
//! come back as the slices `K_j = <j|_A U |0>_A`. Mixture weights are
//! written `w_i` throughout (the conventional letter `p` is taken by the
//! particle momenta).

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, CVector};
use crate::statespace::{DensityMatrix, PureState};
use crate::STRUCTURAL_TOL;

/// Completeness tolerance on `Σ K†K = 1` for dilation inputs.
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-8;

/// A channel dilated to a unitary on system ⊗ ancilla with the ancilla
/// prepared in `|0>`.
pub struct ChannelDilation {
    system_dim: usize,
    ancilla_dim: usize,
    unitary: CMatrix,
}

impl ChannelDilation {
    /// Wraps an explicit dilation unitary. The joint index is
    /// `s·ancilla_dim + j` (system major), and `U` must be unitary.
    pub fn from_unitary(system_dim: usize, ancilla_dim: usize, unitary: CMatrix) -> SimResult<Self> {
        if system_dim == 0 || ancilla_dim == 0 {
            return Err(SimError::InvalidArgument(
                "system and ancilla dimensions must be positive".into(),
            ));
        }
        let n = linalg::check_square(&unitary, "dilation unitary")?;
        if n != system_dim * ancilla_dim {
            return Err(SimError::DimensionMismatch(format!(
                "unitary of dimension {n} does not match system {system_dim} x ancilla {ancilla_dim}"
            )));
        }
        let dev = linalg::unitary_deviation(&unitary);
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "dilation matrix is not unitary: deviation {dev:.3e}"
            )));
        }
        Ok(Self {
            system_dim,
            ancilla_dim,
            unitary,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// The Kraus operators `K_j = <j|_A U |0>_A`.
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        kraus_from_dilation(self)
    }
}

/// Builds the minimal dilation of a trace-preserving Kraus set: ancilla
/// dimension = number of operators, isometry columns placed at ancilla-in
/// `|0>`, completion chosen deterministically (column-pivoted) so repeated
/// runs give the same unitary.
pub fn dilate_kraus_set(kraus: &[CMatrix]) -> SimResult<ChannelDilation> {
    if kraus.is_empty() {
        return Err(SimError::InvalidArgument("empty Kraus set".into()));
    }
    let d = linalg::check_square(&kraus[0], "Kraus operator")?;
    let a = kraus.len();
    let mut completeness = CMatrix::zeros((d, d));
    for k in kraus {
        if k.nrows() != d || k.ncols() != d {
            return Err(SimError::DimensionMismatch(
                "Kraus operators of mixed dimensions".into(),
            ));
        }
        completeness = completeness + linalg::dagger(k).dot(k);
    }
    let dev = linalg::max_abs(&(&completeness - &linalg::identity(d)));
    if dev > KRAUS_COMPLETENESS_TOL {
        return Err(SimError::NotStructured(format!(
            "Kraus set is not trace preserving: Σ K†K deviates by {dev:.3e}"
        )));
    }

    // Isometry V[(s,j), s'] = K_j[s, s']; V†V = Σ K†K = 1.
    let n = d * a;
    let mut v = CMatrix::zeros((n, d));
    for (j, k) in kraus.iter().enumerate() {
        for s in 0..d {
            for sp in 0..d {
                v[[s * a + j, sp]] = k[[s, sp]];
            }
        }
    }
    let completed = linalg::complete_unitary(&v)?;
    // Route column s' of V to joint column (s', anc=0); completion columns
    // fill the remaining ancilla-in slots in order.
    let mut unitary = CMatrix::zeros((n, n));
    for sp in 0..d {
        unitary.column_mut(sp * a).assign(&completed.column(sp));
    }
    let mut extra = d;
    for sp in 0..d {
        for m in 1..a {
            unitary.column_mut(sp * a + m).assign(&completed.column(extra));
            extra += 1;
        }
    }
    ChannelDilation::from_unitary(d, a, unitary)
}

/// Slices the Kraus operators back out of a dilation:
/// `K_j[s,s'] = U[s·a + j, s'·a]`.
pub fn kraus_from_dilation(dilation: &ChannelDilation) -> Vec<CMatrix> {
    let (d, a) = (dilation.system_dim, dilation.ancilla_dim);
    (0..a)
        .map(|j| {
            CMatrix::from_shape_fn((d, d), |(s, sp)| dilation.unitary[[s * a + j, sp * a]])
        })
        .collect()
}

/// Kahan-compensated matrix accumulator: the Monte Carlo reduction must not
/// depend on how shots are grouped, so each entry carries its own
/// compensation term.
struct CompensatedSum {
    sum: CMatrix,
    comp: CMatrix,
}

impl CompensatedSum {
    fn zeros(d: usize) -> Self {
        Self {
            sum: CMatrix::zeros((d, d)),
            comp: CMatrix::zeros((d, d)),
        }
    }

    fn add(&mut self, m: &CMatrix) {
        for ((i, j), &x) in m.indexed_iter() {
            let y = x - self.comp[[i, j]];
            let t = self.sum[[i, j]] + y;
            self.comp[[i, j]] = (t - self.sum[[i, j]]) - y;
            self.sum[[i, j]] = t;
        }
    }
}

/// Monte Carlo simulation of a dilated channel on a pure-state mixture
/// `ρ = Σ_i w_i |ψ_i><ψ_i|`.
///
/// Each shot draws `i ~ w`, then an outcome `j` with probability
/// `q_{ij} = ‖K_j ψ_i‖²`, and deposits the normalized outcome projector.
/// Shot `s` uses its own deterministic RNG stream (`seed`, stream `s`), so
/// the estimate is bit-reproducible and shots could run in any order.
pub fn mixture_dilation_simulate(
    dilation: &ChannelDilation,
    mixture: &[(f64, PureState)],
    shots: u64,
    seed: u64,
) -> SimResult<DensityMatrix> {
    let d = dilation.system_dim;
    if mixture.is_empty() {
        return Err(SimError::InvalidArgument("empty mixture".into()));
    }
    if shots == 0 {
        return Err(SimError::InvalidArgument("at least one shot required".into()));
    }
    let mut total = 0.0;
    for (w, psi) in mixture {
        if !w.is_finite() || *w < 0.0 {
            return Err(SimError::InvalidArgument(format!(
                "mixture weight {w} must be finite and nonnegative"
            )));
        }
        if psi.dim() != d {
            return Err(SimError::DimensionMismatch(format!(
                "mixture state dimension {} vs channel dimension {d}",
                psi.dim()
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > STRUCTURAL_TOL {
        return Err(SimError::InvalidArgument(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }

    let kraus = dilation.kraus_operators();
    // Outcomes are deterministic given (input, branch): precompute the
    // branch probabilities and normalized outcome projectors.
    let mut branch_probs: Vec<Vec<f64>> = Vec::with_capacity(mixture.len());
    let mut projectors: Vec<Vec<Option<CMatrix>>> = Vec::with_capacity(mixture.len());
    for (_, psi) in mixture {
        let mut probs = Vec::with_capacity(kraus.len());
        let mut projs = Vec::with_capacity(kraus.len());
        for k in &kraus {
            let out: CVector = k.dot(psi.amplitudes());
            let q: f64 = out.iter().map(|z| z.norm_sqr()).sum();
            probs.push(q);
            if q > 1e-300 {
                let scale = 1.0 / q;
                projs.push(Some(CMatrix::from_shape_fn((d, d), |(r, c)| {
                    out[r] * out[c].conj() * scale
                })));
            } else {
                projs.push(None);
            }
        }
        branch_probs.push(probs);
        projectors.push(projs);
    }

    let weight_dist = WeightedIndex::new(mixture.iter().map(|(w, _)| *w))
        .map_err(|e| SimError::InvalidArgument(format!("invalid mixture weights: {e}")))?;
    let branch_dists: Vec<WeightedIndex<f64>> = branch_probs
        .iter()
        .map(|probs| {
            WeightedIndex::new(probs.iter().cloned()).map_err(|e| {
                SimError::InvariantBreach(format!("branch probabilities degenerate: {e}"))
            })
        })
        .collect::<SimResult<_>>()?;

    let mut acc = CompensatedSum::zeros(d);
    for shot in 0..shots {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        let i = weight_dist.sample(&mut rng);
        let j = branch_dists[i].sample(&mut rng);
        let proj = projectors[i][j]
            .as_ref()
            .expect("zero-probability branch cannot be sampled");
        acc.add(proj);
    }
    DensityMatrix::new(acc.sum.mapv(|z| z / shots as f64))
}
