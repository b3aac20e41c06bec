//! Strong analog classical (SAC) simulation of finite-dimensional quantum
//! systems.
//!
//! A pure state on a `d`-dimensional Hilbert space is represented by `d`
//! classical "hidden particles" with phase-space coordinates
//! `(q_i, p_i) = (Re ψ_i, Im ψ_i)` relative to a chosen orthonormal basis.
//! Unitary evolution becomes a linear symplectic flow on those coordinates,
//! measurement statistics become quadratic observables, and mixed-state /
//! open-system dynamics act on the analogous operator-basis coordinates of a
//! density matrix.
//!
//! Modules:
//! - [`statespace`]: states, particle sets, Heisenberg-Weyl operator bases,
//!   Bloch coordinates.
//! - [`dynamics`]: classical Hamiltonians, symplectic maps, exact and
//!   implicit-midpoint propagation.
//! - [`tomography`]: state/process read-out from phase-space data and
//!   simulator verification reports.
//! - [`opensys`]: density-vector (Liouville) dynamics, Lindblad generators,
//!   unitary dilations of channels.
//! - [`trotter`]: Suzuki product formulas for local Hamiltonians with error
//!   scans.
//! - [`models`]: worked systems (coined walk, linear-optical meshes, locality
//!   diagnostics, resource counts, discretized fields).
//! - [`io`] / [`cli`]: serialization schemas and the command-line driver.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod opensys;
pub mod statespace;
pub mod tomography;
pub mod trotter;

pub use error::{SimError, SimResult};
pub use linalg::{CMatrix, CVector, C64};

/// Default tolerance for structural checks (hermiticity, unitarity,
/// symplecticity, trace preservation).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Default tolerance for round trips (encode/decode, vectorize/devectorize,
/// decompose/reconstruct).
pub const ROUND_TRIP_TOL: f64 = 1e-12;

/// Largest norm deviation a hidden-particle set may carry before it is
/// rejected as unphysical.
pub const NORM_TOL: f64 = 1e-9;
