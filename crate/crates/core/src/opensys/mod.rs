//! Mixed states and nonunitary evolution.
//!
//! A density matrix becomes a classical object in two steps. Vectorizing
//! row-major, `|ρ>_{i·d+j} = ρ[i,j]`, turns superoperators into `d²×d²`
//! matrices; expanding in the Heisenberg-Weyl frame,
//!
//! ```text
//! ρ = (1/d) Σ_{jk} n_{jk} M_{jk},      n_{jk} = tr(M_{jk}† ρ),
//! ```
//!
//! turns `ρ` into `d²` hidden particles with positions `𝒬 = Re n` and
//! momenta `𝒫 = Im n`; the trace rides along as the frozen coordinate
//! `n_{00} = 1` and `(1/d) Σ (𝒬² + 𝒫²) = tr ρ²` replaces the norm
//! constraint. Unitary flows stay Hamiltonian in these coordinates;
//! Lindblad dissipation adds the contraction that shrinks the purity.
//!
//! [`lindblad`]-side: generators, density-vector trajectories.
//! [`dilation`]-side: Kraus channels as unitaries on system⊗ancilla plus
//! a seeded Monte Carlo over pure-state mixtures.

mod dilation;
mod lindblad;

pub use dilation::{
    dilate_kraus_set, kraus_from_dilation, mixture_dilation_simulate, ChannelDilation,
};
pub use lindblad::{
    evolve_density_vector, lindblad_generator, unitary_liouvillian, DensityTrajectory,
    LindbladGenerator,
};

use crate::error::{SimError, SimResult};
use crate::linalg::{CMatrix, CVector, C64};
use crate::statespace::{density_vector_coords, hw_indices, state_from_bloch, DensityMatrix};
use crate::STRUCTURAL_TOL;

/// Row-major vectorization `|a>_{i·d+j} = a[i,j]`, under which
/// `vec(XρY) = (X ⊗ Yᵗ) vec(ρ)`.
pub fn vectorize_matrix(a: &CMatrix) -> CVector {
    let (r, c) = (a.nrows(), a.ncols());
    CVector::from_shape_fn(r * c, |idx| a[[idx / c, idx % c]])
}

/// Inverse of [`vectorize_matrix`] for square shapes.
pub fn matrix_from_vectorized(v: &CVector) -> SimResult<CMatrix> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(SimError::DimensionMismatch(format!(
            "vector of length {n} is not a vectorized square matrix"
        )));
    }
    Ok(CMatrix::from_shape_fn((d, d), |(i, j)| v[i * d + j]))
}

/// The frame matrix `Ω` whose columns are the vectorized Heisenberg-Weyl
/// operators in row-major `(j,k)` order, so that `vec(ρ) = (1/d) Ω n` and
/// `n = Ω† vec(ρ)`. Satisfies `Ω†Ω = d·1`.
pub fn frame_matrix(d: usize) -> SimResult<CMatrix> {
    if d == 0 {
        return Err(SimError::InvalidArgument("dimension must be positive".into()));
    }
    let mut omega = CMatrix::zeros((d * d, d * d));
    for (col, (j, k)) in hw_indices(d).enumerate() {
        let m = crate::statespace::hw_operator(j, k, d)?;
        omega.column_mut(col).assign(&vectorize_matrix(&m));
    }
    Ok(omega)
}

/// Tolerance on the purity window `tr ρ² ∈ [1/d, 1]` of a density vector.
pub const PURITY_RANGE_TOL: f64 = 1e-8;

/// A density matrix in hidden-particle coordinates: the full coefficient
/// set `n_{jk}` (row-major, `(0,0)` first) with `n_{00} = 1` marking trace
/// preservation.
#[derive(Debug, Clone)]
pub struct DensityVector {
    dim: usize,
    coeffs: Vec<C64>,
}

impl DensityVector {
    /// Wraps a full coefficient set, requiring `n_{00} = 1` within
    /// [`crate::STRUCTURAL_TOL`] and purity inside the physical window.
    pub fn new(dim: usize, coeffs: Vec<C64>) -> SimResult<Self> {
        if dim == 0 {
            return Err(SimError::InvalidArgument("dimension must be positive".into()));
        }
        if coeffs.len() != dim * dim {
            return Err(SimError::DimensionMismatch(format!(
                "expected {} coefficients for dimension {dim}, got {}",
                dim * dim,
                coeffs.len()
            )));
        }
        let trace_dev = (coeffs[0] - C64::new(1.0, 0.0)).norm();
        if trace_dev > STRUCTURAL_TOL {
            return Err(SimError::InvariantBreach(format!(
                "trace coordinate n_00 deviates from 1 by {trace_dev:.3e}"
            )));
        }
        let dv = Self { dim, coeffs };
        let purity = dv.purity();
        if purity < 1.0 / dim as f64 - PURITY_RANGE_TOL || purity > 1.0 + PURITY_RANGE_TOL {
            return Err(SimError::InvariantBreach(format!(
                "purity {purity:.6} outside [{:.6}, 1]",
                1.0 / dim as f64
            )));
        }
        Ok(dv)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All `d²` coefficients, row-major `(j,k)` order, `(0,0)` first.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coefficient(&self, j: usize, k: usize) -> SimResult<C64> {
        if j >= self.dim || k >= self.dim {
            return Err(SimError::InvalidArgument(format!(
                "index ({j},{k}) out of range for dimension {}",
                self.dim
            )));
        }
        Ok(self.coeffs[j * self.dim + k])
    }

    /// Particle positions `𝒬_{jk} = Re n_{jk}`.
    pub fn positions(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.re).collect()
    }

    /// Particle momenta `𝒫_{jk} = Im n_{jk}`.
    pub fn momenta(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.im).collect()
    }

    /// The trace marker `n_{00}` (1 for trace-preserving evolution).
    pub fn trace_coordinate(&self) -> C64 {
        self.coeffs[0]
    }

    /// `tr ρ² = (1/d) Σ_{jk} (𝒬² + 𝒫²)` over **all** coordinates,
    /// including `(0,0)`.
    pub fn purity(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim as f64
    }

    /// Back to matrix form `ρ = (1/d) Σ n_{jk} M_{jk}`.
    pub fn to_density(&self) -> SimResult<DensityMatrix> {
        state_from_bloch(&self.coeffs[1..], self.dim)
    }
}

/// Expands a density matrix in the Heisenberg-Weyl frame.
pub fn vectorize_density(rho: &DensityMatrix) -> SimResult<DensityVector> {
    let coords = density_vector_coords(rho.matrix())?;
    DensityVector::new(rho.dim(), coords)
}

/// Rebuilds the density matrix from hidden-particle coordinates.
pub fn devectorize(dv: &DensityVector) -> SimResult<DensityMatrix> {
    dv.to_density()
}
