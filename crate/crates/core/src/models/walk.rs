//! Discrete-time coined quantum walk on a line segment.
//!
//! The walker lives on positions `x ∈ {-d, ..., d}` (dimension `2d+1`)
//! with a two-level coin in front: joint index `c·(2d+1) + (x+d)`. One
//! step is `U = S(C ⊗ 1)` with coin operator `C` (Hadamard by default)
//! and the conditional shift `S = P₀⊗X† + P₁⊗X`, where the cyclic shift
//! satisfies `X|x+1⟩ = |x⟩`. The walk is run entirely through the
//! phase-space engine: one symplectic map per step applied to the hidden
//! particles of every (coin, position) mode. The shift wraps cyclically,
//! so requiring `T ≤ d` guarantees the boundary is never reached.

use ndarray::Array1;

use crate::dynamics::{apply_symplectic, unitary_to_symplectic};
use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::statespace::{to_phase_space, BasisLabel, HiddenParticleSet, PureState};
use crate::{NORM_TOL, STRUCTURAL_TOL};

/// The walk configuration: line half-width `d`, step count `T`, initial
/// coin state, and the coin operator.
pub struct WalkSpec {
    half_width: usize,
    steps: usize,
    coin: [C64; 2],
    coin_op: CMatrix,
}

impl WalkSpec {
    /// A walk with the Hadamard coin. The coin state must be normalized;
    /// the walker starts at `x = 0`.
    pub fn new(half_width: usize, steps: usize, coin: [C64; 2]) -> SimResult<Self> {
        if half_width == 0 {
            return Err(SimError::InvalidArgument(
                "walk half-width must be at least 1".into(),
            ));
        }
        let norm_sq = coin[0].norm_sqr() + coin[1].norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(SimError::InvalidArgument(format!(
                "coin state must be normalized: |c|^2 = {norm_sq}"
            )));
        }
        Ok(Self {
            half_width,
            steps,
            coin,
            coin_op: hadamard_coin(),
        })
    }

    /// Replaces the coin operator; it must be a 2×2 unitary.
    pub fn with_coin_op(mut self, coin_op: CMatrix) -> SimResult<Self> {
        if coin_op.nrows() != 2 || coin_op.ncols() != 2 {
            return Err(SimError::DimensionMismatch(format!(
                "coin operator is {}x{}, expected 2x2",
                coin_op.nrows(),
                coin_op.ncols()
            )));
        }
        let dev = linalg::unitary_deviation(&coin_op);
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "coin operator is not unitary: deviation {dev:.3e}"
            )));
        }
        self.coin_op = coin_op;
        Ok(self)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn coin(&self) -> [C64; 2] {
        self.coin
    }

    pub fn coin_op(&self) -> &CMatrix {
        &self.coin_op
    }

    /// Walker-register dimension `2d+1`.
    pub fn walker_dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Joint dimension `2(2d+1)`.
    pub fn dim(&self) -> usize {
        2 * self.walker_dim()
    }

    /// Joint index of the (coin, position) mode: `c·(2d+1) + (x+d)`.
    pub fn mode_index(&self, coin: usize, x: i64) -> SimResult<usize> {
        let d = self.half_width as i64;
        if coin > 1 {
            return Err(SimError::InvalidArgument(format!(
                "coin index {coin} out of range"
            )));
        }
        if x < -d || x > d {
            return Err(SimError::InvalidArgument(format!(
                "position {x} outside [-{d}, {d}]"
            )));
        }
        Ok(coin * self.walker_dim() + (x + d) as usize)
    }

    /// Position labels in index order: `-d, ..., d`.
    pub fn positions(&self) -> Vec<i64> {
        let d = self.half_width as i64;
        (-d..=d).collect()
    }
}

/// The Hadamard coin.
pub fn hadamard_coin() -> CMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ndarray::array![[h, h], [h, -h]]
}

/// The cyclic lowering shift on `dim` positions: `X|x+1⟩ = |x⟩`, with
/// `X|lowest⟩ = |highest⟩` closing the cycle.
pub fn shift_operator(dim: usize) -> CMatrix {
    let mut x = CMatrix::zeros((dim, dim));
    for j in 0..dim {
        x[[(j + dim - 1) % dim, j]] = C64::new(1.0, 0.0);
    }
    x
}

/// One walk step `U = S(C ⊗ 1)`: coin toss, then shift the walker up for
/// coin 0 (`X†`) and down for coin 1 (`X`).
pub fn walk_step_unitary(spec: &WalkSpec) -> CMatrix {
    let w = spec.walker_dim();
    let x = shift_operator(w);
    let x_dag = linalg::dagger(&x);
    let mut s = CMatrix::zeros((2 * w, 2 * w));
    for i in 0..w {
        for j in 0..w {
            s[[i, j]] = x_dag[[i, j]];
            s[[w + i, w + j]] = x[[i, j]];
        }
    }
    s.dot(&linalg::kron(spec.coin_op(), &linalg::identity(w)))
}

/// A completed walk: the phase-space state after every step plus the
/// derived position statistics.
pub struct WalkOutcome {
    half_width: usize,
    states: Vec<HiddenParticleSet>,
    sigmas: Vec<f64>,
    distribution: Vec<f64>,
}

impl WalkOutcome {
    /// Snapshots after `0..=T` steps.
    pub fn states(&self) -> &[HiddenParticleSet] {
        &self.states
    }

    pub fn step_count(&self) -> usize {
        self.states.len() - 1
    }

    fn walker_dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Final position distribution `P(x) = Σ_c (q² + p²)`, indexed by
    /// `x + d`.
    pub fn distribution(&self) -> &[f64] {
        &self.distribution
    }

    /// Position distribution after `step` steps.
    pub fn distribution_at(&self, step: usize) -> SimResult<Vec<f64>> {
        let state = self.states.get(step).ok_or_else(|| {
            SimError::InvalidArgument(format!(
                "step {step} out of range 0..={}",
                self.states.len() - 1
            ))
        })?;
        let w = self.walker_dim();
        let q = state.positions();
        let p = state.momenta();
        let mut dist = vec![0.0; w];
        for c in 0..2 {
            for m in 0..w {
                let i = c * w + m;
                dist[m] += q[i] * q[i] + p[i] * p[i];
            }
        }
        Ok(dist)
    }

    /// Position standard deviation after each step.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Final position standard deviation `σ(T)`.
    pub fn sigma(&self) -> f64 {
        *self.sigmas.last().expect("at least the initial state")
    }

    /// The `(q, p)` readout of one (coin, position) mode after every step.
    pub fn mode_trajectory(&self, coin: usize, x: i64) -> SimResult<Vec<(f64, f64)>> {
        let d = self.half_width as i64;
        if coin > 1 || x < -d || x > d {
            return Err(SimError::InvalidArgument(format!(
                "mode (coin {coin}, x {x}) out of range"
            )));
        }
        let idx = coin * self.walker_dim() + (x + d) as usize;
        Ok(self
            .states
            .iter()
            .map(|s| (s.positions()[idx], s.momenta()[idx]))
            .collect())
    }
}

fn sigma_of(dist: &[f64], half_width: usize) -> f64 {
    let d = half_width as i64;
    let total: f64 = dist.iter().sum();
    let mut mean = 0.0;
    let mut second = 0.0;
    for (m, &p) in dist.iter().enumerate() {
        let x = (m as i64 - d) as f64;
        mean += x * p;
        second += x * x * p;
    }
    mean /= total;
    second /= total;
    (second - mean * mean).max(0.0).sqrt()
}

/// Runs the walk through per-step symplectic maps (exact evolution).
///
/// Requires `T ≤ d` so the cyclic wrap of the shift is never reached.
pub fn run_walk(spec: &WalkSpec) -> SimResult<WalkOutcome> {
    if spec.steps > spec.half_width {
        return Err(SimError::InvalidArgument(format!(
            "step count {} exceeds half-width {}: the walker could wrap",
            spec.steps, spec.half_width
        )));
    }
    let dim = spec.dim();
    let mut amps: CVector = Array1::zeros(dim);
    amps[spec.mode_index(0, 0)?] = spec.coin[0];
    amps[spec.mode_index(1, 0)?] = spec.coin[1];
    let initial = PureState::new(amps)?;

    let u = walk_step_unitary(spec);
    let map = unitary_to_symplectic(&u)?;
    let basis = BasisLabel::computational(dim);

    let mut states = Vec::with_capacity(spec.steps + 1);
    states.push(to_phase_space(&initial, &basis)?);
    for _ in 0..spec.steps {
        let next = apply_symplectic(&map, states.last().expect("nonempty"))?;
        states.push(next);
    }

    let mut outcome = WalkOutcome {
        half_width: spec.half_width,
        states,
        sigmas: Vec::new(),
        distribution: Vec::new(),
    };
    outcome.sigmas = (0..=spec.steps)
        .map(|s| outcome.distribution_at(s).map(|d| sigma_of(&d, spec.half_width)))
        .collect::<SimResult<_>>()?;
    outcome.distribution = outcome.distribution_at(spec.steps)?;
    Ok(outcome)
}

/// Amplitude-domain reference evolution for cross-checking: applies the
/// step unitary directly to the state vector.
pub fn walk_amplitudes(spec: &WalkSpec) -> SimResult<Vec<PureState>> {
    let dim = spec.dim();
    let mut amps: CVector = Array1::zeros(dim);
    amps[spec.mode_index(0, 0)?] = spec.coin[0];
    amps[spec.mode_index(1, 0)?] = spec.coin[1];
    let u = walk_step_unitary(spec);
    let mut states = vec![PureState::new(amps)?];
    for _ in 0..spec.steps {
        let next = u.dot(states.last().expect("nonempty").amplitudes());
        states.push(PureState::new(next)?);
    }
    Ok(states)
}
