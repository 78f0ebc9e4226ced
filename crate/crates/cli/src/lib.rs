//! Command-line driver: mapping, transpilation, dynamics benchmarks and the
//! self-test suite. Every command writes `summary.json` into `--out`.
//!
//! Exit codes: 0 when every check passes, 1 when a deviation exceeds its
//! threshold (or an artifact cannot be written), 2 on invalid input.

pub mod checks;
pub mod io;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sbm::fock::{sbm_map, FockCutoff};
use sbm::models::{
    dilate, dilated_circuit_step, dilated_step, discretize_ohmic, fmo_hamiltonian, tls_donor_population,
    tls_hamiltonian, SpinBosonPropagator, SpinBosonSpec,
};
use sbm::numerics::{expm_hermitian, trace_fidelity};
use sbm::random::{haar_unitary, random_hermitian};
use sbm::simulate::{
    circuit_matrix, propagate_dynamics, InitialState, PopulationSeries, PropagationMode, Stepping, DEFAULT_CUTOFF,
};
use sbm::transpile::{compile_circuit, reconstruct, transpile, SnailCircuit, Units};
use sbm::units::{DEFAULT_STEPS, DEFAULT_TAU_FS, WAVENUMBER_FS_TO_RAD};
use sbm::{ComplexMatrix, HermitianMatrix, SbmError};

use crate::io::{report_tol, write_json, write_text, MatrixFile, OperatorFile};

/// Largest accepted mapping residual.
pub const MAP_THRESHOLD: f64 = 1e-12;
/// Largest accepted `1 − fidelity` for a transpiled unitary.
pub const INFIDELITY_THRESHOLD: f64 = 1e-9;
/// Largest accepted population deviation between routes.
pub const DEVIATION_THRESHOLD: f64 = 1e-8;
/// Largest accepted leakage out of the qubit subspace.
pub const LEAKAGE_THRESHOLD: f64 = 1e-10;
/// Largest accepted deviation of the matrix dilation from `P·v`.
pub const DILATION_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "sbm", version, about = "Single-bosonic-mode mapping, SNAIL compilation and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory for artifacts and `summary.json`.
    #[arg(long, global = true, default_value = "sbm-out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a Hermitian matrix onto one bosonic mode.
    Map(MapArgs),
    /// Transpile a 1- or 2-qubit unitary into rotations, CZ and SNAIL records.
    Transpile(TranspileArgs),
    /// Propagate a 2×2 or 4×4 Hamiltonian directly and on SNAIL modes.
    Simulate(SimulateArgs),
    /// Built-in benchmark models.
    #[command(subcommand)]
    Bench(Bench),
    /// Run the numbered checks and write their summary.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Matrix JSON (`{"units", "real", "imag"}`).
    pub input: Option<PathBuf>,
    /// Map a seeded random Hermitian matrix of this size instead.
    #[arg(long, conflicts_with = "input")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fock levels; defaults to twice the matrix size.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["unitary", "hamiltonian", "random"])))]
pub struct TranspileArgs {
    /// Unitary matrix JSON.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Hamiltonian matrix JSON, transpiled as `exp(−iτH)`.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Seeded Haar-random two-qubit unitary.
    #[arg(long)]
    pub random: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step in fs (cm⁻¹ input) or atomic units (dimensionless input).
    #[arg(long, default_value_t = DEFAULT_TAU_FS)]
    pub tau: f64,
    /// Per-mode Fock cutoff for checking the compiled circuit.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct DynamicsArgs {
    /// Step in fs.
    #[arg(long, default_value_t = DEFAULT_TAU_FS)]
    pub tau: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Per-mode Fock cutoff of the SNAIL route.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Hamiltonian matrix JSON.
    pub hamiltonian: PathBuf,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Initial basis state.
    #[arg(long, default_value_t = 0)]
    pub initial: usize,
}

#[derive(Debug, Subcommand)]
pub enum Bench {
    /// Donor/acceptor pair against the closed-form Rabi solution.
    Tls(TlsArgs),
    /// Four-site FMO exciton model, SNAIL route against direct propagation.
    Fmo(DynamicsArgs),
    /// Desk-scale spin-boson population map, dilated and compiled.
    Spinboson(SpinBosonArgs),
}

#[derive(Debug, Args)]
pub struct TlsArgs {
    /// Half energy gap, cm⁻¹.
    #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Coupling, cm⁻¹.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
}

#[derive(Debug, Args)]
pub struct SpinBosonArgs {
    /// Model JSON with the same field names as the flags below.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long = "epsilon_sb", alias = "epsilon-sb", allow_negative_numbers = true)]
    pub epsilon_sb: Option<f64>,
    #[arg(long = "delta_sb", alias = "delta-sb", allow_negative_numbers = true)]
    pub delta_sb: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long = "omega_c", alias = "omega-c", allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    #[arg(long = "omega_max", alias = "omega-max", allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    #[arg(long = "n_modes", aliases = ["n-modes", "modes"])]
    pub n_modes: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Per-mode bath cutoff.
    #[arg(long, default_value_t = checks::DESK_BATH_CUTOFF)]
    pub cutoff: usize,
    /// Per-mode Fock cutoff for the compiled dilation.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub circuit_cutoff: usize,
    /// Sample every `stride`-th step of `dt`.
    #[arg(long, default_value_t = checks::SAMPLE_STRIDE)]
    pub stride: usize,
    #[arg(long, default_value_t = checks::SAMPLE_COUNT)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bath cutoff of the spin-boson check.
    #[arg(long, default_value_t = 3)]
    pub cutoff: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input or parameters (exit 2).
    Invalid(String),
    /// Anything else that stops the command (exit 1).
    Failed(anyhow::Error),
}

impl From<SbmError> for CliError {
    fn from(e: SbmError) -> Self {
        match e {
            SbmError::Io(e) => CliError::Failed(e.into()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Invalid => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Invalid => "invalid",
        }
    }

    fn from_checks(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Outcome of one command: the summary fields and the lines for stdout.
#[derive(Debug)]
pub struct Report {
    pub status: Status,
    pub summary: Value,
    pub lines: Vec<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Map(_) => "map",
            Command::Transpile(_) => "transpile",
            Command::Simulate(_) => "simulate",
            Command::Bench(Bench::Tls(_)) => "bench tls",
            Command::Bench(Bench::Fmo(_)) => "bench fmo",
            Command::Bench(Bench::Spinboson(_)) => "bench spinboson",
            Command::Selftest(_) => "selftest",
        }
    }
}

/// Run one command, write `summary.json` and return the exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Failed(anyhow::anyhow!("creating {}: {e}", cli.out.display())))
        .and_then(|_| execute(&cli.command, &cli.out));
    let (status, mut summary) = match result {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            (report.status, report.summary)
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            (Status::Invalid, json!({ "error": msg }))
        }
        Err(CliError::Failed(e)) => {
            eprintln!("error: {e:#}");
            (Status::Fail, json!({ "error": format!("{e:#}") }))
        }
    };
    if let Value::Object(map) = &mut summary {
        map.insert("command".into(), json!(cli.command.name()));
        map.insert("status".into(), json!(status.label()));
    }
    if let Err(e) = write_json(&cli.out, "summary.json", &summary) {
        match e {
            CliError::Failed(e) => eprintln!("error: {e:#}"),
            CliError::Invalid(msg) => eprintln!("error: {msg}"),
        }
        return status.code().max(Status::Fail.code());
    }
    status.code()
}

pub fn execute(command: &Command, out: &Path) -> Result<Report, CliError> {
    let tol = report_tol()?;
    match command {
        Command::Map(a) => cmd_map(a, out, tol),
        Command::Transpile(a) => cmd_transpile(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Bench(Bench::Tls(a)) => cmd_bench_tls(a, out),
        Command::Bench(Bench::Fmo(a)) => cmd_bench_fmo(a, out),
        Command::Bench(Bench::Spinboson(a)) => cmd_bench_spinboson(a, out),
        Command::Selftest(a) => cmd_selftest(a),
    }
}

fn cutoff(levels: usize) -> Result<FockCutoff, CliError> {
    Ok(FockCutoff::new(levels)?)
}

fn cmd_map(a: &MapArgs, out: &Path, tol: f64) -> Result<Report, CliError> {
    let (m, units) = match (&a.input, a.random) {
        (Some(path), None) => {
            let f = MatrixFile::read(path)?;
            (f.to_matrix()?, f.units)
        }
        (None, Some(k)) if k > 0 => (
            random_hermitian(&mut ChaCha8Rng::seed_from_u64(a.seed), k),
            Units::Dimensionless,
        ),
        _ => return Err(CliError::Invalid("give a matrix file or --random K with K ≥ 1".into())),
    };
    let h = HermitianMatrix::new(m)?;
    let k = h.dim();
    let d = match a.cutoff {
        Some(levels) => cutoff(levels)?,
        None => FockCutoff::default_for(k),
    };
    let mapped = sbm_map(&h, d)?;
    let (top, off) = (mapped.top_block_residual(), mapped.off_block_residual());
    let operator = OperatorFile::new(k, &mapped.operator, units, tol);
    write_json(out, "operator.json", &operator)?;
    let passed = top <= MAP_THRESHOLD && off <= MAP_THRESHOLD;
    Ok(Report {
        status: if passed { Status::Pass } else { Status::Invalid },
        summary: json!({
            "k": k,
            "cutoff": d.levels(),
            "top_block_residual": top,
            "off_block_residual": off,
            "threshold": MAP_THRESHOLD,
            "report_tol": tol,
            "entries": operator.entries.len(),
        }),
        lines: vec![
            format!("mapped {k}x{k} onto {} Fock levels ({} entries)", d.levels(), operator.entries.len()),
            format!("top-block residual {top:.3e}, off-block residual {off:.3e} (threshold {MAP_THRESHOLD:.0e})"),
        ],
    })
}

fn phase_scale(units: Units) -> f64 {
    match units {
        Units::Wavenumber => WAVENUMBER_FS_TO_RAD,
        Units::Dimensionless => 1.0,
    }
}

/// Fidelity of the compiled circuit's qubit block against `u`.
fn compiled_fidelity(c: &SnailCircuit, u: &ComplexMatrix, levels: usize) -> Result<f64, CliError> {
    let full = circuit_matrix(c, cutoff(levels)?)?;
    let w = c.width;
    let fock = |q: usize| (0..w).fold(0, |acc, j| acc * levels + ((q >> (w - 1 - j)) & 1));
    let n = 1 << w;
    let block = ComplexMatrix::from_shape_fn((n, n), |(i, j)| full[[fock(i), fock(j)]]);
    Ok(trace_fidelity(&block, u))
}

fn cmd_transpile(a: &TranspileArgs, out: &Path) -> Result<Report, CliError> {
    let (u, source) = if let Some(path) = &a.unitary {
        (MatrixFile::read(path)?.to_matrix()?, "unitary".to_string())
    } else if let Some(path) = &a.hamiltonian {
        if !(a.tau > 0.0 && a.tau.is_finite()) {
            return Err(CliError::Invalid(format!("tau must be positive, got {}", a.tau)));
        }
        let f = MatrixFile::read(path)?;
        let h = HermitianMatrix::new(f.to_matrix()?)?;
        (expm_hermitian(h.matrix(), a.tau * phase_scale(f.units))?, format!("exp(-i tau H), tau = {}", a.tau))
    } else {
        (haar_unitary(&mut ChaCha8Rng::seed_from_u64(a.seed), 4), format!("haar seed {}", a.seed))
    };
    let ir = transpile(&u)?;
    let compiled = compile_circuit(&ir)?;
    let fidelity = trace_fidelity(&reconstruct(&ir)?, &u);
    let snail_fidelity = compiled_fidelity(&compiled, &u, a.cutoff)?;
    write_text(out, "circuit.json", &(ir.to_json()? + "\n"))?;
    write_text(out, "compiled.json", &(compiled.to_json()? + "\n"))?;
    let passed = 1.0 - fidelity <= INFIDELITY_THRESHOLD && 1.0 - snail_fidelity <= INFIDELITY_THRESHOLD;
    Ok(Report {
        status: Status::from_checks(passed),
        summary: json!({
            "source": source,
            "width": ir.width,
            "cz_count": ir.cz_count(),
            "rotation_count": ir.rotation_count(),
            "fidelity": fidelity,
            "snail_fidelity": snail_fidelity,
            "infidelity_threshold": INFIDELITY_THRESHOLD,
            "unstable_gates": compiled.unstable_gates(),
        }),
        lines: vec![
            format!("{} qubit(s): {} CZ, {} rotations", ir.width, ir.cz_count(), ir.rotation_count()),
            format!("fidelity {fidelity:.15}, compiled on Fock space {snail_fidelity:.15}"),
        ],
    })
}

struct Dynamics {
    direct: PopulationSeries,
    snail: PopulationSeries,
    circuit: SnailCircuit,
}

fn run_dynamics(
    h: &HermitianMatrix,
    labels: &[String],
    d: DynamicsArgs,
    scale: f64,
    initial: usize,
) -> Result<Dynamics, CliError> {
    let stepping = Stepping {
        tau: d.tau,
        steps: d.steps,
        scale,
        cutoff: cutoff(d.cutoff)?,
    };
    let init = InitialState::Basis(initial);
    let direct = propagate_dynamics(h, stepping, &init, PropagationMode::Direct, labels)?;
    let snail = propagate_dynamics(h, stepping, &init, PropagationMode::Snail, labels)?;
    let circuit = compile_circuit(&transpile(&expm_hermitian(h.matrix(), d.tau * scale)?)?)?;
    Ok(Dynamics { direct, snail, circuit })
}

fn dynamics_report(run: &Dynamics, d: DynamicsArgs, out: &Path, mut extra: Vec<(String, f64)>) -> Result<Report, CliError> {
    write_text(out, "direct.csv", &run.direct.to_csv())?;
    write_text(out, "snail.csv", &run.snail.to_csv())?;
    write_text(out, "circuit.json", &(run.circuit.to_json()? + "\n"))?;
    let deviation = run.direct.max_deviation(&run.snail);
    let leakage = run.snail.max_leakage();
    extra.insert(0, ("max_deviation".into(), deviation));
    let passed = extra.iter().all(|(_, v)| *v <= DEVIATION_THRESHOLD) && leakage <= LEAKAGE_THRESHOLD;
    let mut summary = json!({
        "tau": d.tau,
        "steps": d.steps,
        "cutoff": d.cutoff,
        "max_leakage": leakage,
        "deviation_threshold": DEVIATION_THRESHOLD,
        "leakage_threshold": LEAKAGE_THRESHOLD,
        "gates_per_step": run.circuit.gates.len(),
    });
    let mut lines = Vec::new();
    for (name, v) in &extra {
        summary[name.as_str()] = json!(v);
        lines.push(format!("{name} {v:.3e} (threshold {DEVIATION_THRESHOLD:.0e})"));
    }
    lines.push(format!("max leakage {leakage:.3e} (threshold {LEAKAGE_THRESHOLD:.0e})"));
    Ok(Report {
        status: Status::from_checks(passed),
        summary,
        lines,
    })
}

fn site_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("site{i}")).collect()
}

fn cmd_simulate(a: &SimulateArgs, out: &Path) -> Result<Report, CliError> {
    let f = MatrixFile::read(&a.hamiltonian)?;
    let h = HermitianMatrix::new(f.to_matrix()?)?;
    let run = run_dynamics(&h, &site_labels(h.dim()), a.dynamics, phase_scale(f.units), a.initial)?;
    dynamics_report(&run, a.dynamics, out, Vec::new())
}

fn cmd_bench_tls(a: &TlsArgs, out: &Path) -> Result<Report, CliError> {
    let h = tls_hamiltonian(a.epsilon, a.delta);
    let labels = vec!["donor".to_string(), "acceptor".to_string()];
    let run = run_dynamics(&h, &labels, a.dynamics, WAVENUMBER_FS_TO_RAD, 0)?;
    let rabi = run
        .snail
        .times
        .iter()
        .zip(&run.snail.values)
        .map(|(t, row)| (row[0] - tls_donor_population(a.epsilon, a.delta, *t, WAVENUMBER_FS_TO_RAD)).abs())
        .fold(0.0, f64::max);
    let mut report = dynamics_report(&run, a.dynamics, out, vec![("rabi_deviation".into(), rabi)])?;
    report.summary["epsilon"] = json!(a.epsilon);
    report.summary["delta"] = json!(a.delta);
    Ok(report)
}

fn cmd_bench_fmo(a: &DynamicsArgs, out: &Path) -> Result<Report, CliError> {
    let run = run_dynamics(&fmo_hamiltonian(), &site_labels(4), *a, WAVENUMBER_FS_TO_RAD, 0)?;
    dynamics_report(&run, *a, out, Vec::new())
}

fn spin_boson_spec(a: &SpinBosonArgs) -> Result<SpinBosonSpec, CliError> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Failed(anyhow::anyhow!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?
        }
        None => SpinBosonSpec::desk(),
    };
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut spec.epsilon_sb, a.epsilon_sb);
    set(&mut spec.delta_sb, a.delta_sb);
    set(&mut spec.beta, a.beta);
    set(&mut spec.xi, a.xi);
    set(&mut spec.omega_c, a.omega_c);
    set(&mut spec.omega_max, a.omega_max);
    set(&mut spec.dt, a.dt);
    if let Some(n) = a.n_modes {
        spec.n_modes = n;
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_bench_spinboson(a: &SpinBosonArgs, out: &Path) -> Result<Report, CliError> {
    let spec = spin_boson_spec(a)?;
    if a.samples == 0 || a.stride == 0 {
        return Err(CliError::Invalid("stride and samples must be positive".into()));
    }
    let bath = discretize_ohmic(&spec)?;
    let times = spec.sample_times(a.stride, a.samples);
    let propagator = SpinBosonPropagator::new(&spec, &bath, cutoff(a.cutoff)?)?;
    let ops = propagator.superoperator(&times);
    let direct = propagator.propagate([1.0, 0.0], &times)?;

    let circuit_cutoff = cutoff(a.circuit_cutoff)?;
    let mut snail = PopulationSeries {
        times: times.clone(),
        labels: direct.labels.clone(),
        values: Vec::with_capacity(times.len()),
        leakage: Vec::with_capacity(times.len()),
    };
    let (mut dilation, mut circuit, mut max_rescale) = (0.0f64, 0.0f64, 1.0f64);
    for p in &ops.matrices {
        let d = dilate(p)?;
        max_rescale = max_rescale.max(d.rescale);
        let exact = dilated_step(&d, &[1.0, 0.0])?;
        dilation = dilation.max((exact[0] - p[[0, 0]]).abs()).max((exact[1] - p[[1, 0]]).abs());
        let step = dilated_circuit_step(&d, &[1.0, 0.0], circuit_cutoff)?;
        circuit = circuit
            .max((step.populations[0] - exact[0]).abs())
            .max((step.populations[1] - exact[1]).abs());
        snail.values.push(step.populations.to_vec());
        snail.leakage.push(step.leakage);
    }
    let identity = ops.matrices[0]
        .indexed_iter()
        .map(|((i, j), x)| (x - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let column_sums = ops.max_column_sum_error();
    let leakage = snail.max_leakage();

    write_text(out, "superoperator.csv", &ops.to_csv()?)?;
    write_text(out, "direct.csv", &direct.to_csv())?;
    write_text(out, "snail.csv", &snail.to_csv())?;
    write_json(out, "spec.json", &spec)?;

    let passed = identity <= DILATION_THRESHOLD
        && column_sums <= DEVIATION_THRESHOLD
        && dilation <= DILATION_THRESHOLD
        && circuit <= DEVIATION_THRESHOLD
        && leakage <= LEAKAGE_THRESHOLD;
    Ok(Report {
        status: Status::from_checks(passed),
        summary: json!({
            "spec": spec,
            "bath_cutoff": a.cutoff,
            "circuit_cutoff": a.circuit_cutoff,
            "samples": times.len(),
            "ensemble_size": propagator.ensemble().len(),
            "p0_identity_error": identity,
            "column_sum_error": column_sums,
            "dilation_deviation": dilation,
            "circuit_deviation": circuit,
            "max_deviation": direct.max_deviation(&snail),
            "max_leakage": leakage,
            "max_rescale": max_rescale,
            "dilation_threshold": DILATION_THRESHOLD,
            "deviation_threshold": DEVIATION_THRESHOLD,
            "leakage_threshold": LEAKAGE_THRESHOLD,
        }),
        lines: vec![
            format!(
                "{} modes at cutoff {}: dimension {}, {} ensemble members, {} samples",
                spec.n_modes,
                a.cutoff,
                2 * a.cutoff.pow(spec.n_modes as u32),
                propagator.ensemble().len(),
                times.len()
            ),
            format!("P(0) identity error {identity:.3e}, column sums {column_sums:.3e}"),
            format!("dilation deviation {dilation:.3e}, compiled circuit deviation {circuit:.3e}"),
            format!("max leakage {leakage:.3e}, max rescale {max_rescale:.6}"),
        ],
    })
}

fn cmd_selftest(a: &SelftestArgs) -> Result<Report, CliError> {
    let checks = checks::suite(a.seed, a.cutoff)?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        status: Status::from_checks(passed),
        lines: checks.iter().map(|c| c.to_string()).collect(),
        summary: json!({
            "seed": a.seed,
            "bath_cutoff": a.cutoff,
            "passed": passed,
            "checks": checks,
        }),
    })
}
