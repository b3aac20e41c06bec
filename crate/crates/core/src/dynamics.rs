//! Hamiltonian dynamics of the hidden particles.
//!
//! In basis coordinates `c = q + i·p` the Schrödinger equation
//! `ċ = -i·h·c` splits, with `h = A + iB` (`A` real symmetric, `B` real
//! antisymmetric), into the linear real flow
//!
//! ```text
//! q̇ =  A p + B q                  d/dt (q; p) = F (q; p),
//! ṗ = -A q + B p                  F = [[B, A], [-A, B]],  Fᵗ = -F.
//! ```
//!
//! The classical generator is the energy `H(q,p) = <ψ|Ĥ|ψ> = c†hc`. Its
//! canonical flow in the pair `(q_i, P_i = 2p_i)` is exactly the Schrödinger
//! flow above; equivalently, in the plain `(q, p)` pair the flow belongs to
//! `H/2`. [`flow_field`] returns the physical (Schrödinger) field and the
//! tests pin the factor against finite differences of
//! [`classical_hamiltonian`].
//!
//! Because `F` is antisymmetric, the implicit-midpoint step is the Cayley
//! transform `(1 - τF/2)^{-1}(1 + τF/2)`, an orthogonal symplectic matrix:
//! the particle norm `Σ(q²+p²)` and the symplectic form are preserved
//! exactly (up to roundoff) at any step size, while the trajectory itself
//! converges at second order. Time-dependent generators are handled by
//! freezing `h` at each step midpoint.

use std::fmt;
use std::sync::Arc;

use ndarray::{s, Array1, Array2};

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, CVector, RMatrix, RVector, C64};
use crate::statespace::{BasisLabel, HiddenParticleSet};
use crate::STRUCTURAL_TOL;

/// A Hamiltonian operator `Ĥ`, possibly time dependent, inducing a
/// quadratic classical generator on phase space.
#[derive(Clone)]
pub struct QuadraticHamiltonian {
    dim: usize,
    kind: HamiltonianKind,
}

#[derive(Clone)]
enum HamiltonianKind {
    Static(Arc<CMatrix>),
    TimeDependent(Arc<dyn Fn(f64) -> CMatrix + Send + Sync>),
}

impl fmt::Debug for QuadraticHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            HamiltonianKind::Static(_) => {
                write!(f, "QuadraticHamiltonian::Static(dim={})", self.dim)
            }
            HamiltonianKind::TimeDependent(_) => {
                write!(f, "QuadraticHamiltonian::TimeDependent(dim={})", self.dim)
            }
        }
    }
}

impl QuadraticHamiltonian {
    /// A time-independent Hamiltonian; hermiticity is checked at
    /// [`STRUCTURAL_TOL`] and roundoff-level skew removed.
    pub fn new(matrix: CMatrix) -> SimResult<Self> {
        let dim = linalg::check_square(&matrix, "Hamiltonian")?;
        if dim == 0 {
            return Err(SimError::InvalidArgument("empty Hamiltonian".into()));
        }
        let sym = linalg::check_hermitian(&matrix, STRUCTURAL_TOL, "Hamiltonian")?;
        Ok(Self {
            dim,
            kind: HamiltonianKind::Static(Arc::new(sym)),
        })
    }

    /// A time-dependent Hamiltonian `t ↦ Ĥ(t)`. Hermiticity is checked at
    /// every queried time.
    pub fn time_dependent(
        dim: usize,
        f: impl Fn(f64) -> CMatrix + Send + Sync + 'static,
    ) -> SimResult<Self> {
        if dim == 0 {
            return Err(SimError::InvalidArgument("empty Hamiltonian".into()));
        }
        Ok(Self {
            dim,
            kind: HamiltonianKind::TimeDependent(Arc::new(f)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_static(&self) -> bool {
        matches!(self.kind, HamiltonianKind::Static(_))
    }

    /// The operator at time `t` (constant for static Hamiltonians).
    pub fn at(&self, t: f64) -> SimResult<CMatrix> {
        match &self.kind {
            HamiltonianKind::Static(m) => Ok(m.as_ref().clone()),
            HamiltonianKind::TimeDependent(f) => {
                let m = f(t);
                if m.nrows() != self.dim || m.ncols() != self.dim {
                    return Err(SimError::DimensionMismatch(format!(
                        "Hamiltonian closure returned {}x{} at t={t}, expected {}",
                        m.nrows(),
                        m.ncols(),
                        self.dim
                    )));
                }
                linalg::check_hermitian(&m, STRUCTURAL_TOL, "Hamiltonian(t)")
            }
        }
    }

    /// The operator rotated into `basis` coordinates, `B† Ĥ(t) B`.
    fn in_basis(&self, basis: &BasisLabel, t: f64) -> SimResult<CMatrix> {
        let m = self.at(t)?;
        if basis.dim() != self.dim {
            return Err(SimError::DimensionMismatch(format!(
                "Hamiltonian dimension {} does not match basis dimension {}",
                self.dim,
                basis.dim()
            )));
        }
        match basis.kind() {
            crate::statespace::BasisKind::Computational => Ok(m),
            _ => Ok(linalg::dagger(basis.vectors()).dot(&m).dot(basis.vectors())),
        }
    }
}

/// Splits a Hermitian matrix in basis coordinates into its real symmetric
/// and real antisymmetric parts `h = A + iB`.
fn split_hermitian(h: &CMatrix) -> (RMatrix, RMatrix) {
    let n = h.nrows();
    let mut a = RMatrix::zeros((n, n));
    let mut b = RMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            // Symmetrize explicitly so roundoff skew cannot leak into F.
            a[[i, j]] = 0.5 * (h[[i, j]].re + h[[j, i]].re);
            b[[i, j]] = 0.5 * (h[[i, j]].im - h[[j, i]].im);
        }
    }
    (a, b)
}

/// The antisymmetric flow matrix `F = [[B, A], [-A, B]]` acting on stacked
/// `(q, p)` coordinates.
fn flow_matrix(h: &CMatrix) -> RMatrix {
    let n = h.nrows();
    let (a, b) = split_hermitian(h);
    let mut f = RMatrix::zeros((2 * n, 2 * n));
    f.slice_mut(s![..n, ..n]).assign(&b);
    f.slice_mut(s![..n, n..]).assign(&a);
    f.slice_mut(s![n.., ..n]).assign(&a.mapv(|x| -x));
    f.slice_mut(s![n.., n..]).assign(&b);
    f
}

/// The classical generator `H(q,p) = <ψ|Ĥ(t)|ψ>` evaluated on a particle
/// configuration.
pub fn classical_hamiltonian(
    h: &QuadraticHamiltonian,
    particles: &HiddenParticleSet,
    t: f64,
) -> SimResult<f64> {
    let hb = h.in_basis(particles.basis(), t)?;
    Ok(energy_of_coefficients(&hb, &particles.coefficients()))
}

/// `c† h c` for arbitrary (not necessarily normalized) coefficients.
pub(crate) fn energy_of_coefficients(h: &CMatrix, c: &CVector) -> f64 {
    let hc = h.dot(c);
    c.iter()
        .zip(hc.iter())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Instantaneous particle velocities `(q̇, ṗ)` under the Schrödinger flow.
pub fn flow_field(
    h: &QuadraticHamiltonian,
    particles: &HiddenParticleSet,
    t: f64,
) -> SimResult<(RVector, RVector)> {
    let hb = h.in_basis(particles.basis(), t)?;
    let hc = hb.dot(&particles.coefficients());
    // ċ = -i·(hc): q̇ = Im(hc), ṗ = -Re(hc).
    Ok((hc.mapv(|z| z.im), hc.mapv(|z| -z.re)))
}

/// A linear map on stacked `(q_1..q_d, p_1..p_d)` coordinates preserving
/// the symplectic form `Δ = [[0, -1], [1, 0]]`.
#[derive(Debug, Clone)]
pub struct SymplecticMap {
    mat: Arc<RMatrix>,
}

impl SymplecticMap {
    /// Validates `‖SΔSᵗ - Δ‖_∞ ≤` [`STRUCTURAL_TOL`].
    pub fn new(mat: RMatrix) -> SimResult<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 || mat.nrows() == 0 {
            return Err(SimError::DimensionMismatch(format!(
                "symplectic map must be even-dimensional square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = Self::symplectic_deviation(&mat);
        if dev > STRUCTURAL_TOL {
            return Err(SimError::NotStructured(format!(
                "matrix is not symplectic: deviation {dev:.3e}"
            )));
        }
        Ok(Self { mat: Arc::new(mat) })
    }

    /// Identity map on `d` particles.
    pub fn identity(d: usize) -> Self {
        Self {
            mat: Arc::new(Array2::eye(2 * d)),
        }
    }

    /// The symplectic form matrix `Δ` for `d` particles.
    pub fn delta(d: usize) -> RMatrix {
        let mut delta = RMatrix::zeros((2 * d, 2 * d));
        for i in 0..d {
            delta[[i, d + i]] = -1.0;
            delta[[d + i, i]] = 1.0;
        }
        delta
    }

    /// `‖SΔSᵗ - Δ‖_∞` (largest entry magnitude).
    pub fn symplectic_deviation(mat: &RMatrix) -> f64 {
        let d = mat.nrows() / 2;
        let delta = Self::delta(d);
        let lhs = mat.dot(&delta).dot(&mat.t());
        (&lhs - &delta).iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    /// Number of particles `d` (the matrix is `2d x 2d`).
    pub fn particles(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.mat
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticMap) -> SimResult<SymplecticMap> {
        if self.particles() != other.particles() {
            return Err(SimError::DimensionMismatch(format!(
                "composing maps on {} and {} particles",
                self.particles(),
                other.particles()
            )));
        }
        Ok(SymplecticMap {
            mat: Arc::new(self.mat.dot(other.mat.as_ref())),
        })
    }

    /// Applies the map to a stacked coordinate vector.
    pub fn apply_stacked(&self, v: &RVector) -> SimResult<RVector> {
        if v.len() != 2 * self.particles() {
            return Err(SimError::DimensionMismatch(format!(
                "stacked vector length {} does not match map on {} particles",
                v.len(),
                self.particles()
            )));
        }
        Ok(self.mat.dot(v))
    }
}

/// The symplectic representation `S_U = [[V, -W], [W, V]]` of a unitary
/// `U = V + iW` acting on basis coefficients.
pub fn unitary_to_symplectic(u: &CMatrix) -> SimResult<SymplecticMap> {
    let n = linalg::check_square(u, "unitary")?;
    let dev = linalg::unitary_deviation(u);
    if dev > STRUCTURAL_TOL {
        return Err(SimError::NotStructured(format!(
            "matrix is not unitary: deviation {dev:.3e}"
        )));
    }
    let mut s_mat = RMatrix::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let v = u[[i, j]].re;
            let w = u[[i, j]].im;
            s_mat[[i, j]] = v;
            s_mat[[i, n + j]] = -w;
            s_mat[[n + i, j]] = w;
            s_mat[[n + i, n + j]] = v;
        }
    }
    SymplecticMap::new(s_mat)
}

/// Recovers the complex matrix `U = V + iW` from a symplectic map of the
/// block form `[[V, -W], [W, V]]`. Fails for symplectic maps that do not
/// commute with the complex structure (e.g. squeezing), which have no
/// unitary counterpart.
pub fn symplectic_to_unitary(map: &SymplecticMap) -> SimResult<CMatrix> {
    let n = map.particles();
    let s = map.matrix();
    let mut structure_dev = 0.0f64;
    let mut u = CMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let v = s[[i, j]];
            let w = s[[n + i, j]];
            structure_dev = structure_dev
                .max((s[[n + i, n + j]] - v).abs())
                .max((s[[i, n + j]] + w).abs());
            u[[i, j]] = C64::new(v, w);
        }
    }
    if structure_dev > STRUCTURAL_TOL {
        return Err(SimError::NotStructured(format!(
            "symplectic map is not complex linear: block deviation {structure_dev:.3e}"
        )));
    }
    Ok(u)
}

/// Applies a symplectic map to a particle configuration. Fails with
/// [`SimError::InvariantBreach`] if the image leaves the unit-norm shell
/// (the map was not norm-preserving).
pub fn apply_symplectic(
    map: &SymplecticMap,
    particles: &HiddenParticleSet,
) -> SimResult<HiddenParticleSet> {
    let image = map.apply_stacked(&particles.stacked())?;
    HiddenParticleSet::from_stacked(particles.basis().clone(), &image).map_err(|e| match e {
        SimError::InvalidParticleSet { deviation, tol } => SimError::InvariantBreach(format!(
            "symplectic image violates the norm constraint: deviation {deviation:.3e} > {tol:.3e}"
        )),
        other => other,
    })
}

/// How [`evolve`] integrates the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvolveMethod {
    /// Spectral propagation `e^{-itH}`; time-independent Hamiltonians only.
    Exact,
    /// Implicit midpoint (Cayley) steps of size at most `dt`.
    Midpoint { dt: f64 },
}

/// A sampled phase-space trajectory with per-sample energies.
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<u64>,
    times: Vec<f64>,
    states: Vec<HiddenParticleSet>,
    energies: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Integrator step index at each sample.
    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[HiddenParticleSet] {
        &self.states
    }

    /// `<ψ|Ĥ(t)|ψ>` at each sample.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn initial(&self) -> &HiddenParticleSet {
        &self.states[0]
    }

    pub fn final_state(&self) -> &HiddenParticleSet {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest norm deviation over the whole trajectory.
    pub fn max_norm_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.norm_deviation())
            .fold(0.0, f64::max)
    }

    /// Largest |E(t) - E(0)| over the whole trajectory.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
    }
}

/// Propagates a particle configuration for time `t`, recording about
/// `samples` evenly spaced snapshots (always including start and end).
pub fn evolve(
    h: &QuadraticHamiltonian,
    initial: &HiddenParticleSet,
    t: f64,
    method: EvolveMethod,
    samples: usize,
) -> SimResult<Trajectory> {
    if samples == 0 {
        return Err(SimError::InvalidArgument(
            "at least one trajectory sample is required".into(),
        ));
    }
    if !t.is_finite() {
        return Err(SimError::InvalidArgument("evolution time must be finite".into()));
    }
    match method {
        EvolveMethod::Exact => evolve_exact(h, initial, t, samples),
        EvolveMethod::Midpoint { dt } => evolve_midpoint(h, initial, t, dt, samples),
    }
}

fn push_sample(
    traj: &mut Trajectory,
    h: &QuadraticHamiltonian,
    basis: &BasisLabel,
    hb_static: Option<&CMatrix>,
    step: u64,
    time: f64,
    coeffs: &CVector,
) -> SimResult<()> {
    let q = coeffs.mapv(|z| z.re);
    let p = coeffs.mapv(|z| z.im);
    let state = HiddenParticleSet::new(basis.clone(), q, p).map_err(|e| match e {
        SimError::InvalidParticleSet { deviation, tol } => SimError::InvariantBreach(format!(
            "norm constraint violated at t={time}: deviation {deviation:.3e} > {tol:.3e}"
        )),
        other => other,
    })?;
    let energy = match hb_static {
        Some(hb) => energy_of_coefficients(hb, coeffs),
        None => energy_of_coefficients(&h.in_basis(basis, time)?, coeffs),
    };
    traj.steps.push(step);
    traj.times.push(time);
    traj.states.push(state);
    traj.energies.push(energy);
    Ok(())
}

/// Evenly spaced sample positions on `0..=n`, first and last included.
fn sample_positions(n: u64, samples: usize) -> Vec<u64> {
    if n == 0 || samples == 1 {
        return vec![n];
    }
    let mut positions = Vec::with_capacity(samples);
    for j in 0..samples {
        let pos = ((j as u128 * n as u128) / (samples as u128 - 1)) as u64;
        if positions.last() != Some(&pos) {
            positions.push(pos);
        }
    }
    positions
}

fn evolve_exact(
    h: &QuadraticHamiltonian,
    initial: &HiddenParticleSet,
    t: f64,
    samples: usize,
) -> SimResult<Trajectory> {
    if !h.is_static() {
        return Err(SimError::InvalidArgument(
            "exact propagation requires a time-independent Hamiltonian".into(),
        ));
    }
    let basis = initial.basis().clone();
    let hb = h.in_basis(&basis, 0.0)?;
    let mut traj = Trajectory {
        steps: Vec::new(),
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
    };
    if t == 0.0 {
        push_sample(&mut traj, h, &basis, Some(&hb), 0, 0.0, &initial.coefficients())?;
        return Ok(traj);
    }
    let (vals, vecs) = linalg::eigh(&hb)?;
    // c(t) = V e^{-itΛ} V† c0; rotate once, phase per sample.
    let modal = linalg::dagger(&vecs).dot(&initial.coefficients());
    for pos in 0..samples as u64 {
        let time = if samples == 1 {
            t
        } else {
            t * pos as f64 / (samples as f64 - 1.0)
        };
        let phased = Array1::from_iter(
            modal
                .iter()
                .zip(vals.iter())
                .map(|(&m, &lam)| m * C64::from_polar(1.0, -lam * time)),
        );
        let coeffs = vecs.dot(&phased);
        push_sample(&mut traj, h, &basis, Some(&hb), pos, time, &coeffs)?;
    }
    Ok(traj)
}

/// The Cayley step matrix `(1 - τF/2)^{-1}(1 + τF/2)` as a real matrix.
fn cayley_step(f: &RMatrix, tau: f64) -> SimResult<RMatrix> {
    let n = f.nrows();
    let half = f.mapv(|x| 0.5 * tau * x);
    let minus = CMatrix::from_shape_fn((n, n), |(i, j)| {
        C64::new(if i == j { 1.0 } else { 0.0 } - half[[i, j]], 0.0)
    });
    let plus = CMatrix::from_shape_fn((n, n), |(i, j)| {
        C64::new(if i == j { 1.0 } else { 0.0 } + half[[i, j]], 0.0)
    });
    let sol = linalg::lu_solve(&minus, &plus)?;
    Ok(sol.mapv(|z| z.re))
}

fn evolve_midpoint(
    h: &QuadraticHamiltonian,
    initial: &HiddenParticleSet,
    t: f64,
    dt: f64,
    samples: usize,
) -> SimResult<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(SimError::InvalidArgument(format!(
            "midpoint step size must be positive and finite, got {dt}"
        )));
    }
    let basis = initial.basis().clone();
    let mut traj = Trajectory {
        steps: Vec::new(),
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
    };

    if t == 0.0 {
        let coeffs = initial.coefficients();
        push_sample(&mut traj, h, &basis, None, 0, 0.0, &coeffs)?;
        return Ok(traj);
    }

    // Uniform steps of size ≤ dt that land exactly on t.
    let n = (t.abs() / dt).ceil().max(1.0) as u64;
    let tau = t / n as f64;

    let static_step = if h.is_static() {
        let hb = h.in_basis(&basis, 0.0)?;
        Some((cayley_step(&flow_matrix(&hb), tau)?, hb))
    } else {
        None
    };

    let positions = sample_positions(n, samples);
    let mut next_sample = 0usize;
    let mut x = initial.stacked();
    let d = basis.dim();
    let coeffs_of = |x: &RVector| -> CVector {
        Array1::from_iter(
            x.slice(s![..d])
                .iter()
                .zip(x.slice(s![d..]).iter())
                .map(|(&q, &p)| C64::new(q, p)),
        )
    };

    if positions[next_sample] == 0 {
        push_sample(
            &mut traj,
            h,
            &basis,
            static_step.as_ref().map(|(_, hb)| hb),
            0,
            0.0,
            &coeffs_of(&x),
        )?;
        next_sample += 1;
    }

    for k in 0..n {
        match &static_step {
            Some((m, _)) => x = m.dot(&x),
            None => {
                let t_mid = (k as f64 + 0.5) * tau;
                let hb = h.in_basis(&basis, t_mid)?;
                let m = cayley_step(&flow_matrix(&hb), tau)?;
                x = m.dot(&x);
            }
        }
        if next_sample < positions.len() && positions[next_sample] == k + 1 {
            let time = (k + 1) as f64 * tau;
            push_sample(
                &mut traj,
                h,
                &basis,
                static_step.as_ref().map(|(_, hb)| hb),
                k + 1,
                time,
                &coeffs_of(&x),
            )?;
            next_sample += 1;
        }
    }
    Ok(traj)
}

/// The Jacobian of the time-`t` flow map on stacked coordinates: for the
/// linear Schrödinger flow this is the symplectic representation of
/// `e^{-itH}` in the given basis. Time-independent Hamiltonians only.
pub fn flow_jacobian(
    h: &QuadraticHamiltonian,
    t: f64,
    basis: &BasisLabel,
) -> SimResult<SymplecticMap> {
    if !h.is_static() {
        return Err(SimError::InvalidArgument(
            "flow Jacobian requires a time-independent Hamiltonian".into(),
        ));
    }
    let hb = h.in_basis(basis, 0.0)?;
    let u = linalg::expm_hermitian(&hb, C64::new(0.0, -t))?;
    unitary_to_symplectic(&u)
}
