//! Triangular beam-splitter mesh decomposition of mode unitaries.
//!
//! Any `N×N` unitary acting on optical modes factors into at most
//! `N(N-1)/2` two-mode beam splitters plus `N` output phase shifters.
//! We null the below-diagonal entries row by row from the bottom up
//! (within a row, left to right): entry `(r, c)` is cleared by
//! right-multiplying with the adjoint of a splitter on modes `(c, c+1)`
//! with `θ = atan2(|a|, |b|)` and `φ = arg a − arg b`, where
//! `a = U[r,c]`, `b = U[r,c+1]`. What remains is a diagonal of phases,
//! so `U = D · T_K ⋯ T_1` with the splitters listed in application
//! order. The nulling order is a choice; any triangular sweep works.

use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::linalg::{self, CMatrix, C64};
use crate::STRUCTURAL_TOL;

/// Reconstruction accuracy the decomposition guarantees.
pub const MESH_RECONSTRUCTION_TOL: f64 = 1e-10;

/// Entries smaller than this are treated as already nulled and get no
/// splitter.
const NULL_SKIP_TOL: f64 = 1e-14;

/// One mesh element, in application order within [`OpticalMesh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshElement {
    /// Beam splitter on modes `(mode, mode+1)` with block
    /// `[[e^{iφ}cosθ, −sinθ], [e^{iφ}sinθ, cosθ]]`.
    Splitter { mode: usize, theta: f64, phi: f64 },
    /// Phase shifter `e^{iφ}` on a single mode.
    Phase { mode: usize, phi: f64 },
}

impl MeshElement {
    /// The element embedded into the full mode space.
    pub fn unitary(&self, modes: usize) -> SimResult<CMatrix> {
        let mut u = linalg::identity(modes);
        self.apply_left(&mut u)?;
        Ok(u)
    }

    /// Left-multiplies a matrix by the embedded element in place.
    fn apply_left(&self, m: &mut CMatrix) -> SimResult<()> {
        let n = m.nrows();
        match *self {
            MeshElement::Splitter { mode, theta, phi } => {
                if mode + 1 >= n {
                    return Err(SimError::InvalidArgument(format!(
                        "splitter on modes ({mode}, {}) exceeds mode count {n}",
                        mode + 1
                    )));
                }
                let (b00, b01, b10, b11) = splitter_block(theta, phi);
                for j in 0..m.ncols() {
                    let top = m[[mode, j]];
                    let bot = m[[mode + 1, j]];
                    m[[mode, j]] = b00 * top + b01 * bot;
                    m[[mode + 1, j]] = b10 * top + b11 * bot;
                }
            }
            MeshElement::Phase { mode, phi } => {
                if mode >= n {
                    return Err(SimError::InvalidArgument(format!(
                        "phase shifter on mode {mode} exceeds mode count {n}"
                    )));
                }
                let factor = C64::from_polar(1.0, phi);
                for j in 0..m.ncols() {
                    m[[mode, j]] *= factor;
                }
            }
        }
        Ok(())
    }
}

fn splitter_block(theta: f64, phi: f64) -> (C64, C64, C64, C64) {
    let (sin, cos) = theta.sin_cos();
    let front = C64::from_polar(1.0, phi);
    (
        front * cos,
        C64::new(-sin, 0.0),
        front * sin,
        C64::new(cos, 0.0),
    )
}

/// A factored mode unitary: elements listed in application order (the
/// first element acts on the input first).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpticalMesh {
    modes: usize,
    elements: Vec<MeshElement>,
}

impl OpticalMesh {
    pub fn new(modes: usize, elements: Vec<MeshElement>) -> SimResult<Self> {
        if modes == 0 {
            return Err(SimError::InvalidArgument("mode count must be positive".into()));
        }
        let mesh = Self { modes, elements };
        for element in &mesh.elements {
            // Validate index ranges by embedding once.
            element.unitary(modes)?;
        }
        Ok(mesh)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn elements(&self) -> &[MeshElement] {
        &self.elements
    }

    pub fn splitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, MeshElement::Splitter { .. }))
            .count()
    }

    pub fn phase_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, MeshElement::Phase { .. }))
            .count()
    }

    /// Multiplies the elements back together.
    pub fn reconstruct(&self) -> SimResult<CMatrix> {
        let mut acc = linalg::identity(self.modes);
        for element in &self.elements {
            element.apply_left(&mut acc)?;
        }
        Ok(acc)
    }
}

/// Factors a mode unitary into a triangular splitter mesh plus output
/// phases, reconstructing within [`MESH_RECONSTRUCTION_TOL`].
pub fn mesh_decompose(u: &CMatrix) -> SimResult<OpticalMesh> {
    let n = linalg::check_square(u, "mode unitary")?;
    let dev = linalg::unitary_deviation(u);
    if dev > STRUCTURAL_TOL {
        return Err(SimError::NotStructured(format!(
            "mode matrix is not unitary: deviation {dev:.3e}"
        )));
    }
    let mut m = u.clone();
    let mut elements = Vec::new();
    for r in (1..n).rev() {
        for c in 0..r {
            let a = m[[r, c]];
            if a.norm() <= NULL_SKIP_TOL {
                continue;
            }
            let b = m[[r, c + 1]];
            let theta = a.norm().atan2(b.norm());
            let phi = a.arg() - b.arg();
            // Right-multiply by the splitter adjoint: columns (c, c+1)
            // mix so that the (r, c) entry cancels.
            let (b00, b01, b10, b11) = splitter_block(theta, phi);
            let (d00, d01) = (b00.conj(), b10.conj());
            let (d10, d11) = (b01.conj(), b11.conj());
            for i in 0..n {
                let left = m[[i, c]];
                let right = m[[i, c + 1]];
                m[[i, c]] = left * d00 + right * d10;
                m[[i, c + 1]] = left * d01 + right * d11;
            }
            elements.push(MeshElement::Splitter {
                mode: c,
                theta,
                phi,
            });
        }
    }
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                residual = residual.max(m[[i, j]].norm());
            }
        }
    }
    if residual > MESH_RECONSTRUCTION_TOL {
        return Err(SimError::NoConvergence(format!(
            "triangular nulling left off-diagonal residual {residual:.3e}"
        )));
    }
    for mode in 0..n {
        elements.push(MeshElement::Phase {
            mode,
            phi: m[[mode, mode]].arg(),
        });
    }
    OpticalMesh::new(n, elements)
}
