//! Worked example systems built on the phase-space engine: a coined
//! quantum walk on a line, linear-optics mesh decomposition, a
//! Hilbert-space locality (bandwidth) measure, simulation cost
//! accounting, and a discretized one-dimensional field.

mod cost;
mod field;
mod locality;
mod optics;
mod walk;

pub use cost::{sac_cost, CostReport, SystemDescriptor, Verdict};
pub use field::{field_grid, FieldGrid};
pub use locality::{hilbert_bandwidth, BandwidthReport, BANDWIDTH_TOL};
pub use optics::{mesh_decompose, MeshElement, OpticalMesh, MESH_RECONSTRUCTION_TOL};
pub use walk::{
    hadamard_coin, run_walk, shift_operator, walk_amplitudes, walk_step_unitary, WalkOutcome,
    WalkSpec,
};
