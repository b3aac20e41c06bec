//! Artifact file formats.
//!
//! - States and matrices: JSON `{"dim": d, "re": [...], "im": [...]}`,
//!   row-major for matrices.
//! - Trajectories, distributions, and scans: CSV with floats printed as
//!   `{:.16e}` (17 significant digits), so identical data gives
//!   byte-identical files.
//! - Each run directory gets a `manifest.json` with the effective
//!   config, seed, crate version, wall time, and a SHA-256 checksum of
//!   every data file. The wall-time entry is the only field expected to
//!   differ between reruns.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array1;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::Trajectory;
use crate::error::{SimError, SimResult};
use crate::linalg::{CMatrix, C64};
use crate::models::WalkOutcome;
use crate::opensys::DensityTrajectory;
use crate::statespace::PureState;
use crate::trotter::ErrorScan;

/// JSON schema shared by states (`re`/`im` of length `dim`) and square
/// matrices (length `dim²`, row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexArrayJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexArrayJson {
    pub fn from_state(state: &PureState) -> Self {
        Self {
            dim: state.dim(),
            re: state.amplitudes().iter().map(|z| z.re).collect(),
            im: state.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_matrix(m: &CMatrix) -> SimResult<Self> {
        let dim = crate::linalg::check_square(m, "serialized matrix")?;
        Ok(Self {
            dim,
            re: m.iter().map(|z| z.re).collect(),
            im: m.iter().map(|z| z.im).collect(),
        })
    }

    fn checked_lengths(&self, expect: usize, what: &str) -> SimResult<()> {
        if self.re.len() != expect || self.im.len() != expect {
            return Err(SimError::DimensionMismatch(format!(
                "{what} of dim {} needs {expect} entries, got re: {}, im: {}",
                self.dim,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(())
    }

    pub fn to_state(&self) -> SimResult<PureState> {
        self.checked_lengths(self.dim, "state")?;
        let amps = Array1::from_iter(
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&re, &im)| C64::new(re, im)),
        );
        PureState::new(amps)
    }

    pub fn to_matrix(&self) -> SimResult<CMatrix> {
        self.checked_lengths(self.dim * self.dim, "matrix")?;
        let mut m = CMatrix::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for j in 0..self.dim {
                let k = i * self.dim + j;
                m[[i, j]] = C64::new(self.re[k], self.im[k]);
            }
        }
        Ok(m)
    }
}

/// Prints a float with 17 significant digits (round-trip exact).
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trajectory CSV, shared schema `step,t,basis,index,q,p,energy`: one
/// row per (sample, mode), samples outermost.
pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "t", "basis", "index", "q", "p", "energy"])?;
    for (s, state) in traj.states().iter().enumerate() {
        let step = traj.steps()[s];
        let t = traj.times()[s];
        let energy = traj.energies()[s];
        let basis = state.basis().description();
        for i in 0..state.dim() {
            w.write_record([
                step.to_string(),
                fmt(t),
                basis.clone(),
                i.to_string(),
                fmt(state.positions()[i]),
                fmt(state.momenta()[i]),
                fmt(energy),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Walk trajectory in the shared schema. The walk is a discrete map with
/// no Hamiltonian, so `t` is the step number and the energy column is
/// `NaN` by convention.
pub fn write_walk_trajectory_csv<W: Write>(out: W, walk: &WalkOutcome) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "t", "basis", "index", "q", "p", "energy"])?;
    for (s, state) in walk.states().iter().enumerate() {
        let basis = state.basis().description();
        for i in 0..state.dim() {
            w.write_record([
                s.to_string(),
                fmt(s as f64),
                basis.clone(),
                i.to_string(),
                fmt(state.positions()[i]),
                fmt(state.momenta()[i]),
                fmt(f64::NAN),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Position distribution CSV `x,prob`.
pub fn write_distribution_csv<W: Write>(
    out: W,
    positions: &[i64],
    probabilities: &[f64],
) -> SimResult<()> {
    if positions.len() != probabilities.len() {
        return Err(SimError::DimensionMismatch(format!(
            "{} positions vs {} probabilities",
            positions.len(),
            probabilities.len()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "prob"])?;
    for (x, p) in positions.iter().zip(probabilities) {
        w.write_record([x.to_string(), fmt(*p)])?;
    }
    w.flush()?;
    Ok(())
}

/// Product-formula scan CSV `r,error,bound`.
pub fn write_scan_csv<W: Write>(out: W, scan: &ErrorScan) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "error", "bound"])?;
    for row in scan.rows() {
        w.write_record([row.repetitions.to_string(), fmt(row.error), fmt(row.bound)])?;
    }
    w.flush()?;
    Ok(())
}

/// Density-vector trajectory CSV `step,t,j,k,Q,P,purity,trace`: one row
/// per (sample, frame label), labels in row-major `(j,k)` order.
pub fn write_density_trajectory_csv<W: Write>(
    out: W,
    traj: &DensityTrajectory,
) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "t", "j", "k", "Q", "P", "purity", "trace"])?;
    for (s, state) in traj.states().iter().enumerate() {
        let step = traj.steps()[s];
        let t = traj.times()[s];
        let purity = state.purity();
        let trace = state.trace_coordinate().re;
        let d = state.dim();
        for j in 0..d {
            for k in 0..d {
                let n = state.coefficient(j, k)?;
                w.write_record([
                    step.to_string(),
                    fmt(t),
                    j.to_string(),
                    k.to_string(),
                    fmt(n.re),
                    fmt(n.im),
                    fmt(purity),
                    fmt(trace),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// SHA-256 checksum as lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The run manifest: effective configuration, seed, crate version, wall
/// time, and a checksum for every artifact written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub wall_time_seconds: f64,
    /// Artifact file name → SHA-256 checksum.
    pub checksums: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        Self {
            command: command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: 0.0,
            checksums: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, name: impl Into<String>, contents: &[u8]) {
        self.checksums.insert(name.into(), sha256_hex(contents));
    }
}

/// Writes a run's artifacts into one directory and accumulates the
/// manifest.
pub struct RunWriter {
    dir: PathBuf,
    manifest: Manifest,
}

impl RunWriter {
    /// Creates the output directory (and parents) if needed.
    pub fn new(
        dir: impl Into<PathBuf>,
        command: impl Into<String>,
        config: serde_json::Value,
        seed: u64,
    ) -> SimResult<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            manifest: Manifest::new(command, config, seed),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes one artifact and records its checksum.
    pub fn write_file(&mut self, name: &str, contents: &[u8]) -> SimResult<()> {
        fs::write(self.dir.join(name), contents)?;
        self.manifest.record(name, contents);
        Ok(())
    }

    /// Writes `manifest.json` (pretty-printed, keys in declaration
    /// order) and returns the manifest.
    pub fn finalize(mut self, wall_time_seconds: f64) -> SimResult<Manifest> {
        self.manifest.wall_time_seconds = wall_time_seconds;
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(self.manifest)
    }
}
