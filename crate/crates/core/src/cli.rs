//! Command-line experiment runner.
//!
//! Every subcommand assembles an effective configuration from an
//! optional JSON file (`--config`) overridden by flags, runs, and
//! writes its artifacts plus a `manifest.json` into the output
//! directory. All randomness comes from one master `--seed`, split into
//! fixed per-purpose streams, so a fixed config and seed reproduce the
//! data files byte for byte; only the manifest's wall-time entry
//! varies between runs.
//!
//! Exit codes: `0` success; `2` malformed configuration or arguments
//! (domain violations, unreadable files); `3` numerical failure
//! (structural checks, invariant breaches, non-convergence, or a
//! verification/invariant gate missing the requested tolerance).
//! Artifacts are written before the gates are evaluated, so a run that
//! exits `3` still leaves its report on disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve, unitary_to_symplectic, EvolveMethod, QuadraticHamiltonian, SymplecticMap,
};
use crate::error::{SimError, SimResult};
use crate::io::{
    write_density_trajectory_csv, write_distribution_csv, write_scan_csv, write_trajectory_csv,
    write_walk_trajectory_csv, ComplexArrayJson, RunWriter,
};
use crate::linalg::{
    self, expm_hermitian, max_abs, random_hermitian, random_state_vector, random_unitary, CMatrix,
    C64,
};
use crate::models::{
    mesh_decompose, run_walk, sac_cost, SystemDescriptor, WalkSpec,
};
use crate::opensys::{evolve_density_vector, lindblad_generator, vectorize_density};
use crate::statespace::{from_phase_space, to_phase_space, BasisLabel, DensityMatrix, PureState};
use crate::tomography::{
    choi_from_kraus, sac_qpt, sac_qst_with_mode, verify_simulator, ReadoutMode, SacSimulator,
    UnitaryChannel,
};
use crate::trotter::{error_scan, LocalHamiltonian};

/// Exit code for configuration and argument problems.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical failures and missed invariant gates.
pub const EXIT_NUMERIC: u8 = 3;

/// Classifies an error into the documented exit codes.
pub fn exit_code_for(err: &SimError) -> u8 {
    match err {
        SimError::InvalidArgument(_)
        | SimError::DimensionMismatch(_)
        | SimError::SizeLimit(_)
        | SimError::Io(_) => EXIT_CONFIG,
        SimError::NotStructured(_)
        | SimError::InvalidParticleSet { .. }
        | SimError::InvariantBreach(_)
        | SimError::NoConvergence(_) => EXIT_NUMERIC,
    }
}

/// Deterministic split of the master seed: one independent stream per
/// purpose within a run.
fn component_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Parser)]
#[command(
    name = "sacsim",
    version,
    about = "Classical phase-space simulation experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a state under a quadratic Hamiltonian and record the
    /// phase-space trajectory.
    Evolve(EvolveArgs),
    /// Run a coined quantum walk and record trajectories and the
    /// position distribution.
    Walk(WalkArgs),
    /// State and process tomography plus a simulator verification
    /// report.
    Tomography(TomographyArgs),
    /// Open-system density-vector evolution under a Lindblad generator.
    Lindblad(LindbladArgs),
    /// Product-formula error scan over repetition counts.
    #[command(name = "trotter-scan")]
    TrotterScan(TrotterScanArgs),
    /// Decompose a mode unitary into a beam-splitter mesh.
    Optics(OpticsArgs),
    /// Cost accounting for a system descriptor.
    Cost(CostArgs),
    /// Discretized 1-D field evolution on a grid.
    Field(FieldArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<subcommand>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Numerical acceptance tolerance (meaning is per subcommand).
    #[arg(long)]
    tol: Option<f64>,
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> SimResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| SimError::InvalidArgument(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| SimError::InvalidArgument(format!("config {}: {e}", p.display())))
        }
    }
}

fn read_matrix(path: &Path) -> SimResult<CMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| SimError::InvalidArgument(format!("matrix file {}: {e}", path.display())))?;
    let parsed: ComplexArrayJson = serde_json::from_str(&text)
        .map_err(|e| SimError::InvalidArgument(format!("matrix file {}: {e}", path.display())))?;
    parsed.to_matrix()
}

fn read_state(path: &Path) -> SimResult<PureState> {
    let text = fs::read_to_string(path)
        .map_err(|e| SimError::InvalidArgument(format!("state file {}: {e}", path.display())))?;
    let parsed: ComplexArrayJson = serde_json::from_str(&text)
        .map_err(|e| SimError::InvalidArgument(format!("state file {}: {e}", path.display())))?;
    parsed.to_state()
}

fn json_bytes<T: Serialize>(value: &T) -> SimResult<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn state_json_bytes(state: &PureState) -> SimResult<Vec<u8>> {
    json_bytes(&ComplexArrayJson::from_state(state))
}

/// Runs the CLI; `main` forwards the returned exit code.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(args) => run_evolve(args),
        Command::Walk(args) => run_walk_cmd(args),
        Command::Tomography(args) => run_tomography(args),
        Command::Lindblad(args) => run_lindblad(args),
        Command::TrotterScan(args) => run_trotter_scan(args),
        Command::Optics(args) => run_optics(args),
        Command::Cost(args) => run_cost(args),
        Command::Field(args) => run_field(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

// ---------------------------------------------------------------------------
// evolve

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MethodChoice {
    Exact,
    Midpoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvolveConfig {
    dim: usize,
    t: f64,
    samples: usize,
    method: MethodChoice,
    dt: f64,
    seed: u64,
    /// Gate on the trajectory's worst norm deviation.
    tol: f64,
    hamiltonian: Option<PathBuf>,
    state: Option<PathBuf>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dim: 4,
            t: 1.0,
            samples: 9,
            method: MethodChoice::Exact,
            dt: 1e-3,
            seed: 0,
            tol: 1e-9,
            hamiltonian: None,
            state: None,
        }
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// State-space dimension for generated inputs.
    #[arg(long)]
    dim: Option<usize>,
    /// Evolution time.
    #[arg(long)]
    t: Option<f64>,
    /// Trajectory samples (including both endpoints).
    #[arg(long)]
    samples: Option<usize>,
    /// Integrator: exact spectral flow or implicit midpoint.
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// Midpoint step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Hamiltonian matrix JSON (default: seeded random Hermitian).
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Initial state JSON (default: seeded random state).
    #[arg(long)]
    state: Option<PathBuf>,
}

fn run_evolve(args: &EvolveArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: EvolveConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.method {
        cfg.method = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = &args.hamiltonian {
        cfg.hamiltonian = Some(v.clone());
    }
    if let Some(v) = &args.state {
        cfg.state = Some(v.clone());
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }

    let h_matrix = match &cfg.hamiltonian {
        Some(path) => read_matrix(path)?,
        None => random_hermitian(cfg.dim, &mut component_rng(cfg.seed, 1)),
    };
    let h = QuadraticHamiltonian::new(h_matrix)?;
    let psi = match &cfg.state {
        Some(path) => read_state(path)?,
        None => PureState::new(random_state_vector(h.dim(), &mut component_rng(cfg.seed, 0)))?,
    };
    let initial = to_phase_space(&psi, &BasisLabel::computational(h.dim()))?;
    let method = match cfg.method {
        MethodChoice::Exact => EvolveMethod::Exact,
        MethodChoice::Midpoint => EvolveMethod::Midpoint { dt: cfg.dt },
    };
    let traj = evolve(&h, &initial, cfg.t, method, cfg.samples)?;
    let final_state = from_phase_space(traj.final_state())?;

    #[derive(Serialize)]
    struct Summary {
        dim: usize,
        t: f64,
        samples: usize,
        max_norm_deviation: f64,
        max_energy_drift: f64,
    }
    let summary = Summary {
        dim: h.dim(),
        t: cfg.t,
        samples: cfg.samples,
        max_norm_deviation: traj.max_norm_deviation(),
        max_energy_drift: traj.max_energy_drift(),
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/evolve"));
    let mut writer = RunWriter::new(out, "evolve", serde_json::to_value(&cfg)?, cfg.seed)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &traj)?;
    writer.write_file("trajectory.csv", &csv)?;
    writer.write_file("initial_state.json", &state_json_bytes(&psi)?)?;
    writer.write_file("final_state.json", &state_json_bytes(&final_state)?)?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    if summary.max_norm_deviation > cfg.tol {
        return Err(SimError::InvariantBreach(format!(
            "norm deviation {:.3e} exceeds tolerance {:.3e}",
            summary.max_norm_deviation, cfg.tol
        )));
    }
    println!("ok: evolve artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// walk

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct WalkConfig {
    /// Line half-width.
    d: usize,
    /// Step count.
    #[serde(rename = "T")]
    steps: usize,
    seed: u64,
    /// Gate on |Σ_x P(x) - 1| of the final distribution.
    tol: f64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            d: 100,
            steps: 100,
            seed: 0,
            tol: 1e-10,
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Line half-width d (positions -d..=d).
    #[arg(long = "d")]
    d: Option<usize>,
    /// Number of steps T (requires T <= d).
    #[arg(long = "T")]
    steps: Option<usize>,
}

fn run_walk_cmd(args: &WalkArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: WalkConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.d {
        cfg.d = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }

    let coin_vec = random_state_vector(2, &mut component_rng(cfg.seed, 0));
    let spec = WalkSpec::new(cfg.d, cfg.steps, [coin_vec[0], coin_vec[1]])?;
    let outcome = run_walk(&spec)?;

    #[derive(Serialize)]
    struct Summary {
        d: usize,
        steps: usize,
        sigma: f64,
        sigmas: Vec<f64>,
    }
    let summary = Summary {
        d: cfg.d,
        steps: cfg.steps,
        sigma: outcome.sigma(),
        sigmas: outcome.sigmas().to_vec(),
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/walk"));
    let mut writer = RunWriter::new(out, "walk", serde_json::to_value(&cfg)?, cfg.seed)?;
    let mut traj_csv = Vec::new();
    write_walk_trajectory_csv(&mut traj_csv, &outcome)?;
    writer.write_file("walk_trajectory.csv", &traj_csv)?;
    let mut dist_csv = Vec::new();
    write_distribution_csv(&mut dist_csv, &spec.positions(), outcome.distribution())?;
    writer.write_file("distribution.csv", &dist_csv)?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    let total: f64 = outcome.distribution().iter().sum();
    if (total - 1.0).abs() > cfg.tol {
        return Err(SimError::InvariantBreach(format!(
            "final distribution sums to {total}, off by more than {:.3e}",
            cfg.tol
        )));
    }
    println!("ok: walk artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// tomography

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ReadoutChoice {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TomographyConfig {
    dim: usize,
    mode: ReadoutChoice,
    shots: u64,
    /// Evolution time of the verified simulator.
    t: f64,
    /// Declared state-preparation error entering the total bound.
    epsilon0: f64,
    seed: u64,
    /// Strong-distance acceptance threshold ε for verification.
    tol: f64,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            mode: ReadoutChoice::Exact,
            shots: 10_000,
            t: 1.0,
            epsilon0: 0.0,
            seed: 0,
            tol: 1e-6,
        }
    }
}

#[derive(Args)]
struct TomographyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// System dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Readout statistics: exact coordinates or finite sampling.
    #[arg(long, value_enum)]
    mode: Option<ReadoutChoice>,
    /// Shots per basis in sampled mode.
    #[arg(long)]
    shots: Option<u64>,
    /// Evolution time of the verified simulator.
    #[arg(long)]
    t: Option<f64>,
    /// Declared preparation error epsilon_0.
    #[arg(long)]
    epsilon0: Option<f64>,
}

fn standard_observables(d: usize) -> Vec<(String, CMatrix)> {
    let mut number = CMatrix::zeros((d, d));
    let mut hop = CMatrix::zeros((d, d));
    for k in 0..d {
        number[[k, k]] = C64::new(k as f64, 0.0);
        if k + 1 < d {
            hop[[k, k + 1]] = C64::new(1.0, 0.0);
            hop[[k + 1, k]] = C64::new(1.0, 0.0);
        }
    }
    vec![("number".into(), number), ("hop".into(), hop)]
}

fn run_tomography(args: &TomographyArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: TomographyConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.mode {
        cfg.mode = v;
    }
    if let Some(v) = args.shots {
        cfg.shots = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = args.epsilon0 {
        cfg.epsilon0 = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }

    let mode = match cfg.mode {
        ReadoutChoice::Exact => ReadoutMode::Exact,
        ReadoutChoice::Sampled => ReadoutMode::Sampled {
            shots: cfg.shots,
            seed: cfg.seed.wrapping_add(3),
        },
    };

    // State tomography of a seeded random pure state.
    let psi = PureState::new(random_state_vector(
        cfg.dim,
        &mut component_rng(cfg.seed, 0),
    ))?;
    let qst = sac_qst_with_mode(&psi, mode)?;

    #[derive(Serialize)]
    struct QstArtifact {
        dim: usize,
        runs: u64,
        description: Vec<f64>,
        min_eigenvalue: f64,
        hermiticity_deviation: f64,
        fidelity_to_prepared: f64,
    }
    let qst_artifact = QstArtifact {
        dim: cfg.dim,
        runs: qst.runs(),
        description: qst.description().to_vec(),
        min_eigenvalue: qst.reconstruction().min_eigenvalue,
        hermiticity_deviation: qst.reconstruction().hermiticity_deviation,
        fidelity_to_prepared: qst.reconstruction().state.fidelity_with_pure(&psi)?,
    };

    // Process tomography of a seeded random unitary channel.
    let u = random_unitary(cfg.dim, &mut component_rng(cfg.seed, 2));
    let channel = UnitaryChannel::new(u.clone())?;
    let estimate = sac_qpt(&channel, mode)?;
    let exact_choi = choi_from_kraus(std::slice::from_ref(&u))?;

    #[derive(Serialize)]
    struct QptArtifact {
        dim: usize,
        runs: u64,
        hermiticity_deviation: f64,
        trace_deviation: f64,
        trace_preservation_deviation: f64,
        distance_to_exact: f64,
    }
    let qpt_artifact = QptArtifact {
        dim: cfg.dim,
        runs: estimate.run_count(),
        hermiticity_deviation: estimate.hermiticity_deviation(),
        trace_deviation: estimate.trace_deviation(),
        trace_preservation_deviation: estimate.trace_preservation_deviation(),
        distance_to_exact: estimate.choi_trace_distance(&exact_choi)?,
    };

    // Verification of the phase-space simulator against the exact
    // propagator of a seeded random Hamiltonian.
    let h_matrix = random_hermitian(cfg.dim, &mut component_rng(cfg.seed, 1));
    let target = expm_hermitian(&h_matrix, C64::new(0.0, -cfg.t))?;
    let simulator = SacSimulator::new(
        QuadraticHamiltonian::new(h_matrix)?,
        cfg.t,
        EvolveMethod::Exact,
    )?;
    let report = verify_simulator(
        &target,
        &simulator,
        None,
        &standard_observables(cfg.dim),
        cfg.tol,
        cfg.epsilon0,
    )?;

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/tomography"));
    let mut writer = RunWriter::new(out, "tomography", serde_json::to_value(&cfg)?, cfg.seed)?;
    writer.write_file("qst.json", &json_bytes(&qst_artifact)?)?;
    writer.write_file("qpt.json", &json_bytes(&qpt_artifact)?)?;
    writer.write_file("verify.json", &json_bytes(&report)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    if !report.pass {
        return Err(SimError::InvariantBreach(format!(
            "verification failed: strong distance {:.3e} exceeds epsilon {:.3e}",
            report.strong_distance, cfg.tol
        )));
    }
    println!("ok: tomography artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// lindblad

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum JumpChoice {
    Damping,
    Dephasing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct LindbladConfig {
    dim: usize,
    t: f64,
    samples: usize,
    gamma: f64,
    jump: JumpChoice,
    seed: u64,
    /// Gate on the worst trace-coordinate deviation.
    tol: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            t: 1.0,
            samples: 9,
            gamma: 0.5,
            jump: JumpChoice::Damping,
            seed: 0,
            tol: 1e-8,
        }
    }
}

#[derive(Args)]
struct LindbladArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// System dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Evolution time.
    #[arg(long)]
    t: Option<f64>,
    /// Trajectory samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Jump rate gamma.
    #[arg(long)]
    gamma: Option<f64>,
    /// Jump operator family.
    #[arg(long, value_enum)]
    jump: Option<JumpChoice>,
}

fn run_lindblad(args: &LindbladArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: LindbladConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = args.jump {
        cfg.jump = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }
    if cfg.dim < 2 {
        return Err(SimError::InvalidArgument(
            "lindblad dimension must be at least 2".into(),
        ));
    }

    // Number-operator Hamiltonian with either a lowering (damping) or a
    // number (dephasing) jump.
    let d = cfg.dim;
    let mut h = CMatrix::zeros((d, d));
    let mut jump = CMatrix::zeros((d, d));
    for k in 0..d {
        h[[k, k]] = C64::new(k as f64, 0.0);
        match cfg.jump {
            JumpChoice::Damping => {
                if k > 0 {
                    jump[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
                }
            }
            JumpChoice::Dephasing => {
                jump[[k, k]] = C64::new(k as f64, 0.0);
            }
        }
    }
    let generator = lindblad_generator(&h, vec![(cfg.gamma, jump)])?;

    // Uniform-superposition initial state: maximal coherence to decay.
    let amps = Array1::from_elem(d, C64::new(1.0 / (d as f64).sqrt(), 0.0));
    let rho0 = DensityMatrix::pure(&PureState::new(amps)?);
    let dv0 = vectorize_density(&rho0)?;
    let traj = evolve_density_vector(&generator, &dv0, cfg.t, cfg.samples)?;

    #[derive(Serialize)]
    struct Summary {
        dim: usize,
        t: f64,
        gamma: f64,
        purity_initial: f64,
        purity_final: f64,
        max_trace_deviation: f64,
    }
    let purities = traj.purities();
    let summary = Summary {
        dim: d,
        t: cfg.t,
        gamma: cfg.gamma,
        purity_initial: purities[0],
        purity_final: *purities.last().expect("nonempty trajectory"),
        max_trace_deviation: traj.max_trace_deviation(),
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/lindblad"));
    let mut writer = RunWriter::new(out, "lindblad", serde_json::to_value(&cfg)?, cfg.seed)?;
    let mut csv = Vec::new();
    write_density_trajectory_csv(&mut csv, &traj)?;
    writer.write_file("density_trajectory.csv", &csv)?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    if summary.max_trace_deviation > cfg.tol {
        return Err(SimError::InvariantBreach(format!(
            "trace coordinate drifted by {:.3e}, beyond {:.3e}",
            summary.max_trace_deviation, cfg.tol
        )));
    }
    println!("ok: lindblad artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// trotter-scan

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrotterScanConfig {
    chi: usize,
    t: f64,
    r: Vec<usize>,
    /// 1 = single qubit (X+Z); n ≥ 2 = transverse-field chain on n
    /// qubits.
    parties: usize,
    seed: u64,
}

impl Default for TrotterScanConfig {
    fn default() -> Self {
        Self {
            chi: 1,
            t: 1.0,
            r: vec![4, 8, 16, 32, 64],
            parties: 1,
            seed: 0,
        }
    }
}

#[derive(Args)]
struct TrotterScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Product-formula level (approximation order 2·chi).
    #[arg(long)]
    chi: Option<usize>,
    /// Total evolution time.
    #[arg(long)]
    t: Option<f64>,
    /// Repetition counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<usize>>,
    /// Qubit count of the scanned model.
    #[arg(long)]
    parties: Option<usize>,
}

fn scan_model(parties: usize) -> SimResult<LocalHamiltonian> {
    let x = ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ];
    let z = ndarray::array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ];
    if parties <= 1 {
        return LocalHamiltonian::new(1, 2, vec![(vec![0], x), (vec![0], z)]);
    }
    let zz = linalg::kron(&z, &z);
    let mut terms: Vec<(Vec<usize>, CMatrix)> =
        (0..parties).map(|i| (vec![i], x.clone())).collect();
    for i in 0..parties - 1 {
        terms.push((vec![i, i + 1], zz.clone()));
    }
    LocalHamiltonian::new(parties, 2, terms)
}

fn run_trotter_scan(args: &TrotterScanArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: TrotterScanConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.chi {
        cfg.chi = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = &args.r {
        cfg.r = v.clone();
    }
    if let Some(v) = args.parties {
        cfg.parties = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }

    let h = scan_model(cfg.parties)?;
    let scan = error_scan(&h, cfg.t, cfg.chi, &cfg.r)?;

    #[derive(Serialize)]
    struct Summary {
        order: usize,
        t: f64,
        repetitions: Vec<usize>,
        slope: Option<f64>,
        expected_slope: f64,
        at_roundoff_floor: bool,
        retained: usize,
    }
    let summary = Summary {
        order: scan.order(),
        t: scan.time(),
        repetitions: cfg.r.clone(),
        slope: scan.slope(),
        expected_slope: scan.expected_slope(),
        at_roundoff_floor: scan.at_roundoff_floor(),
        retained: scan.retained(),
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/trotter-scan"));
    let mut writer = RunWriter::new(out, "trotter-scan", serde_json::to_value(&cfg)?, cfg.seed)?;
    let mut csv = Vec::new();
    write_scan_csv(&mut csv, &scan)?;
    writer.write_file("scan.csv", &csv)?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;
    println!("ok: trotter-scan artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// optics

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OpticsConfig {
    modes: usize,
    seed: u64,
    /// Gate on the mesh reconstruction error.
    tol: f64,
    unitary: Option<PathBuf>,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            modes: 6,
            seed: 0,
            tol: 1e-10,
            unitary: None,
        }
    }
}

#[derive(Args)]
struct OpticsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Mode count for the generated target unitary.
    #[arg(long)]
    modes: Option<usize>,
    /// Target unitary JSON (default: seeded Haar-random).
    #[arg(long)]
    unitary: Option<PathBuf>,
}

fn run_optics(args: &OpticsArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: OpticsConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.modes {
        cfg.modes = v;
    }
    if let Some(v) = &args.unitary {
        cfg.unitary = Some(v.clone());
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }

    let u = match &cfg.unitary {
        Some(path) => read_matrix(path)?,
        None => random_unitary(cfg.modes, &mut component_rng(cfg.seed, 0)),
    };
    let mesh = mesh_decompose(&u)?;
    let reconstructed = mesh.reconstruct()?;
    let reconstruction_error = max_abs(&(&reconstructed - &u));
    let map = unitary_to_symplectic(&reconstructed)?;
    let symplectic_deviation = SymplecticMap::symplectic_deviation(map.matrix());

    #[derive(Serialize)]
    struct Summary {
        modes: usize,
        splitters: usize,
        phases: usize,
        reconstruction_error: f64,
        symplectic_deviation: f64,
    }
    let summary = Summary {
        modes: mesh.modes(),
        splitters: mesh.splitter_count(),
        phases: mesh.phase_count(),
        reconstruction_error,
        symplectic_deviation,
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/optics"));
    let mut writer = RunWriter::new(out, "optics", serde_json::to_value(&cfg)?, cfg.seed)?;
    writer.write_file("mesh.json", &json_bytes(&mesh)?)?;
    writer.write_file(
        "unitary.json",
        &json_bytes(&ComplexArrayJson::from_matrix(&u)?)?,
    )?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    if reconstruction_error > cfg.tol {
        return Err(SimError::InvariantBreach(format!(
            "mesh reconstruction error {reconstruction_error:.3e} exceeds {:.3e}",
            cfg.tol
        )));
    }
    println!("ok: optics artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// cost

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemChoice {
    Qudit,
    ManyBody,
    LinearOptics,
    Cluster,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CostConfig {
    system: SystemDescriptor,
    seed: u64,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            system: SystemDescriptor::Qudit { dim: 3 },
            seed: 0,
        }
    }
}

#[derive(Args)]
struct CostArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Descriptor kind; combines with the matching size flags below.
    #[arg(long, value_enum)]
    system: Option<SystemChoice>,
    /// Qudit dimension (system = qudit).
    #[arg(long)]
    dim: Option<usize>,
    /// Party count (system = many-body).
    #[arg(long)]
    parties: Option<usize>,
    /// Local dimension (system = many-body).
    #[arg(long)]
    local_dim: Option<usize>,
    /// Mode count (system = linear-optics).
    #[arg(long)]
    modes: Option<usize>,
    /// Qubit count (system = cluster).
    #[arg(long)]
    qubits: Option<usize>,
}

fn run_cost(args: &CostArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: CostConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(kind) = args.system {
        cfg.system = match kind {
            SystemChoice::Qudit => SystemDescriptor::Qudit {
                dim: args.dim.unwrap_or(3),
            },
            SystemChoice::ManyBody => SystemDescriptor::ManyBody {
                parties: args.parties.unwrap_or(10),
                local_dim: args.local_dim.unwrap_or(2),
            },
            SystemChoice::LinearOptics => SystemDescriptor::LinearOptics {
                modes: args.modes.unwrap_or(1024),
            },
            SystemChoice::Cluster => SystemDescriptor::ClusterState {
                qubits: args.qubits.unwrap_or(10),
            },
        };
    }

    let report = sac_cost(&cfg.system, None)?;
    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/cost"));
    let mut writer = RunWriter::new(out, "cost", serde_json::to_value(&cfg)?, cfg.seed)?;
    writer.write_file("cost.json", &json_bytes(&report)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;
    println!("ok: cost artifacts written");
    Ok(())
}

// ---------------------------------------------------------------------------
// field

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PotentialChoice {
    Harmonic,
    Free,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FieldConfig {
    n: usize,
    a: f64,
    b: f64,
    potential: PotentialChoice,
    t: f64,
    samples: usize,
    center: f64,
    width: f64,
    momentum: f64,
    seed: u64,
    /// Gate on the trajectory's worst norm deviation.
    tol: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            n: 256,
            a: -10.0,
            b: 10.0,
            potential: PotentialChoice::Harmonic,
            t: 2.0 * std::f64::consts::PI,
            samples: 9,
            center: 0.0,
            width: std::f64::consts::FRAC_1_SQRT_2,
            momentum: 0.0,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid points.
    #[arg(long)]
    n: Option<usize>,
    /// Left box edge.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Right box edge.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Potential on the grid.
    #[arg(long, value_enum)]
    potential: Option<PotentialChoice>,
    /// Evolution time (default: one harmonic period 2π).
    #[arg(long)]
    t: Option<f64>,
    /// Trajectory samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Packet center.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<f64>,
    /// Packet width sigma.
    #[arg(long)]
    width: Option<f64>,
    /// Packet momentum.
    #[arg(long, allow_hyphen_values = true)]
    momentum: Option<f64>,
}

fn run_field(args: &FieldArgs) -> SimResult<()> {
    let start = Instant::now();
    let mut cfg: FieldConfig = load_config(args.common.config.as_deref())?;
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.a {
        cfg.a = v;
    }
    if let Some(v) = args.b {
        cfg.b = v;
    }
    if let Some(v) = args.potential {
        cfg.potential = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.center {
        cfg.center = v;
    }
    if let Some(v) = args.width {
        cfg.width = v;
    }
    if let Some(v) = args.momentum {
        cfg.momentum = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tol {
        cfg.tol = v;
    }

    let grid = crate::models::FieldGrid::new(cfg.n, cfg.a, cfg.b)?;
    let h = match cfg.potential {
        PotentialChoice::Harmonic => grid.hamiltonian(|x| 0.5 * x * x)?,
        PotentialChoice::Free => grid.hamiltonian(|_| 0.0)?,
    };
    let psi0 = grid.gaussian_packet(cfg.center, cfg.width, cfg.momentum)?;
    let initial = to_phase_space(&psi0, &BasisLabel::computational(cfg.n))?;
    let traj = evolve(&h, &initial, cfg.t, EvolveMethod::Exact, cfg.samples)?;
    let final_state = from_phase_space(traj.final_state())?;
    let (mean, variance) = grid.position_moments(&final_state)?;

    #[derive(Serialize)]
    struct Summary {
        n: usize,
        a: f64,
        b: f64,
        t: f64,
        fidelity_with_initial: f64,
        final_mean: f64,
        final_variance: f64,
        max_norm_deviation: f64,
    }
    let summary = Summary {
        n: cfg.n,
        a: cfg.a,
        b: cfg.b,
        t: cfg.t,
        fidelity_with_initial: final_state.fidelity(&psi0)?,
        final_mean: mean,
        final_variance: variance,
        max_norm_deviation: traj.max_norm_deviation(),
    };

    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out/field"));
    let mut writer = RunWriter::new(out, "field", serde_json::to_value(&cfg)?, cfg.seed)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &traj)?;
    writer.write_file("trajectory.csv", &csv)?;
    writer.write_file("initial_state.json", &state_json_bytes(&psi0)?)?;
    writer.write_file("final_state.json", &state_json_bytes(&final_state)?)?;
    writer.write_file("summary.json", &json_bytes(&summary)?)?;
    writer.finalize(start.elapsed().as_secs_f64())?;

    if summary.max_norm_deviation > cfg.tol {
        return Err(SimError::InvariantBreach(format!(
            "norm deviation {:.3e} exceeds tolerance {:.3e}",
            summary.max_norm_deviation, cfg.tol
        )));
    }
    println!("ok: field artifacts written");
    Ok(())
}
