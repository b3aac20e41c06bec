//! A one-dimensional field discretized on a grid.
//!
//! The continuum Hamiltonian `-½∂² + V(x)` becomes a tridiagonal matrix
//! on `N` interior points of the box `[a, b]` with hard-wall (Dirichlet)
//! boundaries: the kinetic term is the central second difference, the
//! potential sits on the diagonal. Evolution then goes through the same
//! phase-space machinery as any finite system — the grid amplitudes are
//! the field variables.

use ndarray::Array1;

use crate::dynamics::QuadraticHamiltonian;
use crate::error::{SimError, SimResult};
use crate::linalg::{CMatrix, CVector, C64};
use crate::statespace::PureState;

/// An evenly spaced grid of `n` interior points of `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct FieldGrid {
    n: usize,
    a: f64,
    b: f64,
}

impl FieldGrid {
    pub fn new(n: usize, a: f64, b: f64) -> SimResult<Self> {
        if n < 8 {
            return Err(SimError::InvalidArgument(format!(
                "grid needs at least 8 points, got {n}"
            )));
        }
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(SimError::InvalidArgument(format!(
                "degenerate box [{a}, {b}]"
            )));
        }
        Ok(Self { n, a, b })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `h = (b-a)/(n+1)`; the walls at `a` and `b` carry the
    /// implicit zero boundary values.
    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n as f64 + 1.0)
    }

    /// The interior sample points `x_i = a + (i+1)h`.
    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|i| self.a + (i as f64 + 1.0) * h).collect()
    }

    /// The discretized Hamiltonian for the given potential.
    pub fn hamiltonian<V: Fn(f64) -> f64>(&self, potential: V) -> SimResult<QuadraticHamiltonian> {
        let h = self.spacing();
        let inv_h2 = 1.0 / (h * h);
        let mut m = CMatrix::zeros((self.n, self.n));
        for (i, x) in self.points().into_iter().enumerate() {
            let v = potential(x);
            if !v.is_finite() {
                return Err(SimError::InvalidArgument(format!(
                    "potential is not finite at x = {x}"
                )));
            }
            m[[i, i]] = C64::new(inv_h2 + v, 0.0);
            if i + 1 < self.n {
                m[[i, i + 1]] = C64::new(-0.5 * inv_h2, 0.0);
                m[[i + 1, i]] = C64::new(-0.5 * inv_h2, 0.0);
            }
        }
        QuadraticHamiltonian::new(m)
    }

    /// A normalized Gaussian packet `exp(-(x-x0)²/(4σ²) + i k0 x)` sampled
    /// on the grid.
    pub fn gaussian_packet(&self, center: f64, width: f64, momentum: f64) -> SimResult<PureState> {
        if !(width.is_finite() && width > 0.0) || !center.is_finite() || !momentum.is_finite() {
            return Err(SimError::InvalidArgument(
                "packet parameters must be finite with positive width".into(),
            ));
        }
        let amps: CVector = Array1::from_iter(self.points().into_iter().map(|x| {
            let envelope = (-(x - center).powi(2) / (4.0 * width * width)).exp();
            C64::from_polar(envelope, momentum * x)
        }));
        PureState::normalized(amps)
    }

    /// Position mean and variance of a grid state.
    pub fn position_moments(&self, state: &PureState) -> SimResult<(f64, f64)> {
        if state.dim() != self.n {
            return Err(SimError::DimensionMismatch(format!(
                "state has dimension {}, grid has {}",
                state.dim(),
                self.n
            )));
        }
        let mut mean = 0.0;
        let mut second = 0.0;
        let mut total = 0.0;
        for (x, amp) in self.points().into_iter().zip(state.amplitudes()) {
            let p = amp.norm_sqr();
            total += p;
            mean += x * p;
            second += x * x * p;
        }
        mean /= total;
        second /= total;
        Ok((mean, (second - mean * mean).max(0.0)))
    }
}

/// Convenience wrapper: grid construction plus Hamiltonian assembly.
pub fn field_grid<V: Fn(f64) -> f64>(
    potential: V,
    n: usize,
    a: f64,
    b: f64,
) -> SimResult<QuadraticHamiltonian> {
    FieldGrid::new(n, a, b)?.hamiltonian(potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, EvolveMethod};
    use crate::linalg::{expm_hermitian, hermitian_deviation};
    use crate::models::hilbert_bandwidth;
    use crate::statespace::{from_phase_space, to_phase_space, BasisLabel};

    #[test]
    fn grid_guards_reject_degenerate_input() {
        assert!(FieldGrid::new(7, 0.0, 1.0).is_err());
        assert!(FieldGrid::new(16, 1.0, 1.0).is_err());
        assert!(FieldGrid::new(16, 2.0, -1.0).is_err());
        assert!(FieldGrid::new(16, f64::NAN, 1.0).is_err());
        let grid = FieldGrid::new(16, -1.0, 1.0).unwrap();
        assert!(grid.hamiltonian(|_| f64::INFINITY).is_err(), "non-finite potential");
        assert!(grid.gaussian_packet(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn grid_points_are_interior_and_even() {
        let grid = FieldGrid::new(9, 0.0, 1.0).unwrap();
        let pts = grid.points();
        assert_eq!(pts.len(), 9);
        assert!((pts[0] - 0.1).abs() < 1e-12);
        assert!((pts[8] - 0.9).abs() < 1e-12);
        assert!((grid.spacing() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn discretized_field_is_hermitian_and_two_local() {
        let h = field_grid(|x| 0.5 * x * x, 32, -6.0, 6.0).unwrap();
        assert!(hermitian_deviation(&h.at(0.0).unwrap()) < 1e-12);
        // Hard-wall second difference couples nearest labels only.
        let report = hilbert_bandwidth(&h.at(0.0).unwrap(), None).unwrap();
        assert_eq!(report.linear, 1);
        assert_eq!(report.cyclic, 1);
    }

    #[test]
    fn evolved_field_conserves_norm() {
        let grid = FieldGrid::new(64, -8.0, 8.0).unwrap();
        let h = grid.hamiltonian(|x| 0.5 * x * x).unwrap();
        let psi0 = grid.gaussian_packet(1.0, 0.8, 0.5).unwrap();
        let initial = to_phase_space(&psi0, &BasisLabel::computational(64)).unwrap();
        let traj = evolve(&h, &initial, 1.0, EvolveMethod::Exact, 9).unwrap();
        assert!(traj.max_norm_deviation() < 1e-9);
    }

    #[test]
    fn harmonic_ground_packet_returns_after_one_period() {
        // V = x²/2 has period 2π; the width-1/√2 Gaussian is the continuum
        // ground shape, so after one period the packet must come back to
        // itself up to grid-discretization error.
        let grid = FieldGrid::new(256, -10.0, 10.0).unwrap();
        let h = grid.hamiltonian(|x| 0.5 * x * x).unwrap();
        let psi0 = grid.gaussian_packet(0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0).unwrap();
        let period = 2.0 * std::f64::consts::PI;

        // Phase-space route.
        let initial = to_phase_space(&psi0, &BasisLabel::computational(256)).unwrap();
        let traj = evolve(&h, &initial, period, EvolveMethod::Exact, 2).unwrap();
        let evolved = from_phase_space(traj.final_state()).unwrap();
        assert!(evolved.fidelity(&psi0).unwrap() >= 0.999);

        // Independent matrix-exponential route agrees.
        let u = expm_hermitian(&h.at(0.0).unwrap(), C64::new(0.0, -period)).unwrap();
        let oracle = PureState::new(u.dot(psi0.amplitudes())).unwrap();
        assert!(oracle.fidelity(&psi0).unwrap() >= 0.999);
        let cross = evolved.fidelity(&oracle).unwrap();
        assert!(cross > 1.0 - 1e-9, "routes disagree: fidelity {cross}");
    }

    #[test]
    fn free_packet_spreads_monotonically() {
        let grid = FieldGrid::new(128, -20.0, 20.0).unwrap();
        let h = grid.hamiltonian(|_| 0.0).unwrap();
        let psi0 = grid.gaussian_packet(0.0, 1.0, 0.0).unwrap();
        let initial = to_phase_space(&psi0, &BasisLabel::computational(128)).unwrap();
        let traj = evolve(&h, &initial, 1.6, EvolveMethod::Exact, 5).unwrap();
        let mut variances = Vec::new();
        for state in traj.states() {
            let psi = from_phase_space(state).unwrap();
            variances.push(grid.position_moments(&psi).unwrap().1);
        }
        assert!(variances.windows(2).all(|w| w[1] > w[0]), "{variances:?}");

        // Matrix-exponential oracle sees the same growth at the endpoint.
        let u = expm_hermitian(&h.at(0.0).unwrap(), C64::new(0.0, -1.6)).unwrap();
        let oracle = PureState::new(u.dot(psi0.amplitudes())).unwrap();
        let (_, var_oracle) = grid.position_moments(&oracle).unwrap();
        assert!((var_oracle - variances.last().unwrap()).abs() < 1e-8);
    }
}
