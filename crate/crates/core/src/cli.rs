//! Command-line interface.
//!
//! Three subcommands:
//!
//! - `experiment` — Monte-Carlo MSE-vs-iteration comparison of the four
//!   algorithms over a random sensing ensemble; writes a CSV table.
//! - `prox-curve` — tabulates the ideal proximal map and the diode transfer
//!   function over a grid; writes a CSV table.
//! - `calibrate` — solves a resistor calibration and prints the `(R, R′)`
//!   pair.
//!
//! Every parameter has a baked-in default matching the reference
//! experiment. A `--config <path>` file with `key = value` lines (and `#`
//! comments) can override defaults; explicit flags override the file. Keys
//! equal the long flag names. Given identical flags and config file, output
//! files are byte-identical across runs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::diode::{v_out, CircuitParams, DiodeParams};
use crate::error::{Error, Result};
use crate::harness::{run_experiment, write_curves, EnsembleConfig};
use crate::noise::{NoiseConfig, NoiseParams};
use crate::proxops::{L1Params, McpParams};
use crate::solver::{ProxKind, SolverConfig};

#[derive(Debug, Parser)]
#[command(
    name = "diode-prox",
    version,
    about = "Sparse recovery with ideal and diode-circuit proximal stages",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
// One short-lived value exists per process, so the variant size spread
// (ExperimentArgs carries ~30 options) costs nothing worth boxing for.
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the Monte-Carlo MSE-vs-iteration experiment and write a CSV
    /// table with one column per algorithm.
    Experiment(ExperimentArgs),
    /// Tabulate the ideal proximal map and the diode transfer function
    /// over an input grid and write a CSV table.
    ProxCurve(ProxCurveArgs),
    /// Solve a resistor calibration and print the (R, R') pair.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args, Default)]
struct ExperimentArgs {
    /// Read `key = value` defaults from this file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV path [default: mse_curves.csv]
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Comma-separated algorithm labels to run
    /// [default: ista-l1,ista-mcp,diode-l1,diode-mcp]
    #[arg(long, value_name = "LIST")]
    algorithms: Option<String>,
    /// Number of Monte-Carlo trials [default: 200]
    #[arg(long)]
    trials: Option<usize>,
    /// Iterations per trial [default: 2000]
    #[arg(long)]
    iterations: Option<usize>,
    /// Base seed; every per-trial stream derives from it [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Measurement count M [default: 32]
    #[arg(long)]
    m: Option<usize>,
    /// Signal length N [default: 64]
    #[arg(long)]
    n: Option<usize>,
    /// Per-element activation probability of the signal [default: 0.1]
    #[arg(long)]
    nonzero_prob: Option<f64>,
    /// Measurement-noise variance [default: 1e-5]
    #[arg(long)]
    sigma2: Option<f64>,
    /// Regularization weight [default: 0.15]
    #[arg(long)]
    lambda: Option<f64>,
    /// MCP shape parameter [default: 27]
    #[arg(long)]
    alpha: Option<f64>,
    /// Fixed step size; by default 0.99/theta_max(A^T A) per trial
    #[arg(long)]
    step_size: Option<f64>,
    /// Input resistance R of the soft-threshold circuit [default: 35]
    #[arg(long)]
    r_l1: Option<f64>,
    /// Output resistance R' of the MCP circuit [default: 1.04]
    #[arg(long)]
    r_prime_mcp: Option<f64>,
    /// Identity crossing point of the MCP circuit transfer [default: 1.5]
    #[arg(long)]
    k: Option<f64>,
    /// Diode saturation current in amperes [default: 1.4e-14]
    #[arg(long)]
    saturation_current: Option<f64>,
    /// Diode emission coefficient [default: 1]
    #[arg(long)]
    emission_coefficient: Option<f64>,
    /// Diode thermal voltage in volts [default: 0.026]
    #[arg(long)]
    thermal_voltage: Option<f64>,
    /// Circuit temperature in kelvin [default: 300]
    #[arg(long)]
    temperature: Option<f64>,
    /// Noise bandwidth in hertz [default: 1e10]
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Amplifier noise variance [default: 3.84e-8]
    #[arg(long)]
    amplifier_variance: Option<f64>,
    /// Combining-circuit capacitance in farads; requires --r-cmb and must
    /// be consistent with --bandwidth
    #[arg(long)]
    capacitance: Option<f64>,
    /// Combining-circuit resistance in ohms; requires --capacitance
    #[arg(long)]
    r_cmb: Option<f64>,
    /// All circuit-noise injection: on|off [default: on]
    #[arg(long, value_name = "on|off")]
    noise: Option<String>,
    /// Amplifier noise on the gradient step: on|off [default: on]
    #[arg(long, value_name = "on|off")]
    amplifier_noise: Option<String>,
    /// Shot+thermal noise at the diode input: on|off [default: on]
    #[arg(long, value_name = "on|off")]
    oem_noise: Option<String>,
    /// Thermal noise at the diode output: on|off [default: on]
    #[arg(long, value_name = "on|off")]
    eom_noise: Option<String>,
    /// Worker threads for trials; 0 uses all cores [default: 1]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct ProxCurveArgs {
    /// Read `key = value` defaults from this file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV path [default: prox_curve.csv]
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Which penalty the circuit approximates: l1|mcp [default: l1]
    #[arg(long, value_name = "l1|mcp")]
    mode: Option<String>,
    /// Lower end of the input grid [default: -3]
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    /// Upper end of the input grid [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    /// Number of grid points, endpoints included [default: 1201]
    #[arg(long)]
    points: Option<usize>,
    /// Regularization weight of the ideal map [default: 0.15]
    #[arg(long)]
    lambda: Option<f64>,
    /// Step size of the ideal map; 1 tabulates prox of lambda*J [default: 1]
    #[arg(long)]
    epsilon: Option<f64>,
    /// MCP shape parameter of the ideal map [default: 27]
    #[arg(long)]
    alpha: Option<f64>,
    /// Input resistance R of the soft-threshold circuit [default: 35]
    #[arg(long)]
    r_l1: Option<f64>,
    /// Output resistance R' of the MCP circuit [default: 1.04]
    #[arg(long)]
    r_prime_mcp: Option<f64>,
    /// Identity crossing point of the MCP circuit transfer [default: 1.5]
    #[arg(long)]
    k: Option<f64>,
    /// Diode saturation current in amperes [default: 1.4e-14]
    #[arg(long)]
    saturation_current: Option<f64>,
    /// Diode emission coefficient [default: 1]
    #[arg(long)]
    emission_coefficient: Option<f64>,
    /// Diode thermal voltage in volts [default: 0.026]
    #[arg(long)]
    thermal_voltage: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct CalibrateArgs {
    /// Read `key = value` defaults from this file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Which calibration to solve: l1 (R given, R' derived) or
    /// mcp (R' and k given, R derived) [default: l1]
    #[arg(long, value_name = "l1|mcp")]
    mode: Option<String>,
    /// Input resistance R for the l1 calibration [default: 35]
    #[arg(long)]
    r: Option<f64>,
    /// Output resistance R' for the mcp calibration [default: 1.04]
    #[arg(long)]
    r_prime: Option<f64>,
    /// Identity crossing point for the mcp calibration [default: 1.5]
    #[arg(long)]
    k: Option<f64>,
    /// Diode saturation current in amperes [default: 1.4e-14]
    #[arg(long)]
    saturation_current: Option<f64>,
    /// Diode emission coefficient [default: 1]
    #[arg(long)]
    emission_coefficient: Option<f64>,
    /// Diode thermal voltage in volts [default: 0.026]
    #[arg(long)]
    thermal_voltage: Option<f64>,
}

/// Parse argv, dispatch, and return the process exit code: 0 on success,
/// 2 for configuration problems, 1 for runtime failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and exit 0; real
            // usage errors go to stderr and exit 2.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::ProxCurve(args) => run_prox_curve_cmd(args),
        Command::Calibrate(args) => run_calibrate_cmd(args),
    }
}

// ---------------------------------------------------------------------------
// Config file handling and flag/file/default merging

/// `key = value` entries loaded from a config file, consumed key by key so
/// that leftovers can be rejected as unknown.
#[derive(Debug)]
struct FileValues {
    origin: String,
    entries: BTreeMap<String, String>,
}

impl FileValues {
    fn empty() -> Self {
        Self {
            origin: String::new(),
            entries: BTreeMap::new(),
        }
    }

    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let origin = path.display().to_string();
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{origin}:{}: expected `key = value`, got `{line}`",
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!(
                    "{origin}:{}: empty key or value in `{line}`",
                    idx + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "{origin}:{}: duplicate key `{key}`",
                    idx + 1
                )));
            }
        }
        Ok(Self { origin, entries })
    }

    fn from_args(path: &Option<PathBuf>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::empty()),
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Reject any keys nothing consumed.
    fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        Err(Error::Config(format!(
            "{}: unknown key(s): {}",
            self.origin,
            keys.join(", ")
        )))
    }
}

fn parse_number<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| {
        Error::Config(format!(
            "key `{key}`: cannot parse `{raw}` as {}",
            std::any::type_name::<T>()
        ))
    })
}

fn parse_on_off(key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        other => Err(Error::Config(format!(
            "key `{key}`: expected on or off, got `{other}`"
        ))),
    }
}

/// Flag beats file beats default. A present flag still consumes the file
/// key so it is not reported as unknown.
fn resolve<T: FromStr>(flag: Option<T>, file: &mut FileValues, key: &str, default: T) -> Result<T> {
    let from_file = file.take(key);
    match (flag, from_file) {
        (Some(v), _) => Ok(v),
        (None, Some(raw)) => parse_number(key, &raw),
        (None, None) => Ok(default),
    }
}

fn resolve_opt<T: FromStr>(flag: Option<T>, file: &mut FileValues, key: &str) -> Result<Option<T>> {
    let from_file = file.take(key);
    match (flag, from_file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(raw)) => parse_number(key, &raw).map(Some),
        (None, None) => Ok(None),
    }
}

fn resolve_bool(
    flag: Option<String>,
    file: &mut FileValues,
    key: &str,
    default: bool,
) -> Result<bool> {
    let from_file = file.take(key);
    match (flag, from_file) {
        (Some(raw), _) => parse_on_off(key, &raw),
        (None, Some(raw)) => parse_on_off(key, &raw),
        (None, None) => Ok(default),
    }
}

fn resolve_path(flag: Option<PathBuf>, file: &mut FileValues, key: &str, default: &str) -> PathBuf {
    let from_file = file.take(key);
    match (flag, from_file) {
        (Some(p), _) => p,
        (None, Some(raw)) => PathBuf::from(raw),
        (None, None) => PathBuf::from(default),
    }
}

fn parse_algorithms(raw: &str) -> Result<Vec<ProxKind>> {
    let mut kinds = Vec::new();
    for part in raw.split(',') {
        let label = part.trim();
        let kind = ProxKind::all()
            .into_iter()
            .find(|k| k.label() == label)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm `{label}`; expected any of ista-l1, ista-mcp, \
                     diode-l1, diode-mcp"
                ))
            })?;
        if kinds.contains(&kind) {
            return Err(Error::Config(format!("algorithm `{label}` listed twice")));
        }
        kinds.push(kind);
    }
    Ok(kinds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PenaltyMode {
    L1,
    Mcp,
}

fn parse_mode(raw: &str) -> Result<PenaltyMode> {
    match raw.trim() {
        "l1" => Ok(PenaltyMode::L1),
        "mcp" => Ok(PenaltyMode::Mcp),
        other => Err(Error::Config(format!(
            "key `mode`: expected l1 or mcp, got `{other}`"
        ))),
    }
}

// ---------------------------------------------------------------------------
// experiment

/// Everything the experiment subcommand resolved from defaults, config
/// file, and flags.
#[derive(Debug)]
struct ExperimentPlan {
    ensemble: EnsembleConfig,
    solvers: Vec<SolverConfig>,
    output: PathBuf,
    jobs: usize,
}

fn resolve_experiment(args: ExperimentArgs) -> Result<ExperimentPlan> {
    let mut file = FileValues::from_args(&args.config)?;

    let output = resolve_path(args.output, &mut file, "output", "mse_curves.csv");
    let algorithms = match resolve_opt(args.algorithms, &mut file, "algorithms")? {
        Some(raw) => parse_algorithms(&raw)?,
        None => ProxKind::all().to_vec(),
    };
    let trials = resolve(args.trials, &mut file, "trials", 200)?;
    let iterations = resolve(args.iterations, &mut file, "iterations", 2000)?;
    let seed = resolve(args.seed, &mut file, "seed", 1u64)?;
    let m = resolve(args.m, &mut file, "m", 32)?;
    let n = resolve(args.n, &mut file, "n", 64)?;
    let nonzero_prob = resolve(args.nonzero_prob, &mut file, "nonzero-prob", 0.1)?;
    let sigma2 = resolve(args.sigma2, &mut file, "sigma2", 1e-5)?;
    let lambda = resolve(args.lambda, &mut file, "lambda", 0.15)?;
    let alpha = resolve(args.alpha, &mut file, "alpha", 27.0)?;
    let step_size = resolve_opt(args.step_size, &mut file, "step-size")?;
    let r_l1 = resolve(args.r_l1, &mut file, "r-l1", 35.0)?;
    let r_prime_mcp = resolve(args.r_prime_mcp, &mut file, "r-prime-mcp", 1.04)?;
    let k = resolve(args.k, &mut file, "k", 1.5)?;
    let saturation_current = resolve(
        args.saturation_current,
        &mut file,
        "saturation-current",
        1.4e-14,
    )?;
    let emission_coefficient = resolve(
        args.emission_coefficient,
        &mut file,
        "emission-coefficient",
        1.0,
    )?;
    let thermal_voltage = resolve(args.thermal_voltage, &mut file, "thermal-voltage", 0.026)?;
    let temperature = resolve(args.temperature, &mut file, "temperature", 300.0)?;
    let bandwidth = resolve(args.bandwidth, &mut file, "bandwidth", 1e10)?;
    let amplifier_variance = resolve(
        args.amplifier_variance,
        &mut file,
        "amplifier-variance",
        3.84e-8,
    )?;
    let capacitance = resolve_opt(args.capacitance, &mut file, "capacitance")?;
    let r_cmb = resolve_opt(args.r_cmb, &mut file, "r-cmb")?;
    let noise_on = resolve_bool(args.noise, &mut file, "noise", true)?;
    let amplifier = resolve_bool(args.amplifier_noise, &mut file, "amplifier-noise", true)?;
    let oem = resolve_bool(args.oem_noise, &mut file, "oem-noise", true)?;
    let eom = resolve_bool(args.eom_noise, &mut file, "eom-noise", true)?;
    let jobs = resolve(args.jobs, &mut file, "jobs", 1usize)?;
    file.finish()?;

    let ensemble = EnsembleConfig {
        m,
        n,
        nonzero_prob,
        sigma2,
        trials,
        base_seed: seed,
    };
    ensemble.validate()?;

    let diode = DiodeParams::new(saturation_current, emission_coefficient, thermal_voltage)?;
    let mut noise_params = NoiseParams::new(temperature, bandwidth, amplifier_variance)?;
    match (capacitance, r_cmb) {
        (Some(c), Some(r)) => noise_params = noise_params.with_rc(c, r)?,
        (None, None) => {}
        _ => {
            return Err(Error::Config(
                "capacitance and r-cmb must be given together".into(),
            ))
        }
    }
    let noise = NoiseConfig {
        enabled: noise_on,
        amplifier,
        oem,
        eom,
        seed: 0, // overridden per trial by the harness
    };

    let solvers = algorithms
        .into_iter()
        .map(|kind| -> Result<SolverConfig> {
            let mut cfg = SolverConfig::new(kind, lambda);
            cfg.step_size = step_size;
            cfg.max_iterations = iterations;
            cfg.diode = diode;
            cfg.noise = noise;
            cfg.noise_params = noise_params;
            match kind {
                ProxKind::IdealMcp => cfg.mcp_alpha = Some(alpha),
                ProxKind::DiodeL1 => cfg.circuit = Some(CircuitParams::l1(r_l1)?),
                ProxKind::DiodeMcp => {
                    cfg.circuit = Some(CircuitParams::mcp(r_prime_mcp, k, &diode)?)
                }
                ProxKind::IdealL1 => {}
            }
            cfg.validate()?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentPlan {
        ensemble,
        solvers,
        output,
        jobs,
    })
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<()> {
    let plan = resolve_experiment(args)?;
    let curves = run_experiment(&plan.ensemble, &plan.solvers, plan.jobs)?;
    write_curves(&plan.output, &curves)?;
    println!(
        "wrote {}: {} iterations x {} algorithms, {} trials",
        plan.output.display(),
        curves[0].values.len(),
        curves.len(),
        plan.ensemble.trials
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// prox-curve

struct ProxCurvePlan {
    output: PathBuf,
    grid: Vec<f64>,
    ideal: IdealMap,
    diode: DiodeParams,
    circuit: CircuitParams,
}

enum IdealMap {
    L1(L1Params),
    Mcp(McpParams),
}

impl IdealMap {
    fn apply(&self, v: f64) -> f64 {
        match self {
            IdealMap::L1(p) => p.apply(v),
            IdealMap::Mcp(p) => p.apply(v),
        }
    }
}

/// Evenly spaced grid including both endpoints.
fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() || min >= max {
        return Err(Error::Parameter(format!(
            "grid needs finite min < max, got [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let span = max - min;
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min + span * (i as f64 / last)
            }
        })
        .collect())
}

fn resolve_prox_curve(args: ProxCurveArgs) -> Result<ProxCurvePlan> {
    let mut file = FileValues::from_args(&args.config)?;
    let output = resolve_path(args.output, &mut file, "output", "prox_curve.csv");
    let mode = match resolve_opt(args.mode, &mut file, "mode")? {
        Some(raw) => parse_mode(&raw)?,
        None => PenaltyMode::L1,
    };
    let min = resolve(args.min, &mut file, "min", -3.0)?;
    let max = resolve(args.max, &mut file, "max", 3.0)?;
    let points = resolve(args.points, &mut file, "points", 1201)?;
    let lambda = resolve(args.lambda, &mut file, "lambda", 0.15)?;
    let epsilon = resolve(args.epsilon, &mut file, "epsilon", 1.0)?;
    let alpha = resolve(args.alpha, &mut file, "alpha", 27.0)?;
    let r_l1 = resolve(args.r_l1, &mut file, "r-l1", 35.0)?;
    let r_prime_mcp = resolve(args.r_prime_mcp, &mut file, "r-prime-mcp", 1.04)?;
    let k = resolve(args.k, &mut file, "k", 1.5)?;
    let saturation_current = resolve(
        args.saturation_current,
        &mut file,
        "saturation-current",
        1.4e-14,
    )?;
    let emission_coefficient = resolve(
        args.emission_coefficient,
        &mut file,
        "emission-coefficient",
        1.0,
    )?;
    let thermal_voltage = resolve(args.thermal_voltage, &mut file, "thermal-voltage", 0.026)?;
    file.finish()?;

    let diode = DiodeParams::new(saturation_current, emission_coefficient, thermal_voltage)?;
    let (ideal, circuit) = match mode {
        PenaltyMode::L1 => (
            IdealMap::L1(L1Params::new(epsilon * lambda)?),
            CircuitParams::l1(r_l1)?,
        ),
        PenaltyMode::Mcp => (
            IdealMap::Mcp(McpParams::new(lambda, alpha, epsilon)?),
            CircuitParams::mcp(r_prime_mcp, k, &diode)?,
        ),
    };
    Ok(ProxCurvePlan {
        output,
        grid: grid(min, max, points)?,
        ideal,
        diode,
        circuit,
    })
}

fn run_prox_curve_cmd(args: ProxCurveArgs) -> Result<()> {
    let plan = resolve_prox_curve(args)?;
    let io_err = |e: std::io::Error| Error::Io {
        path: plan.output.display().to_string(),
        source: e,
    };
    let mut rows = Vec::with_capacity(plan.grid.len());
    for &v in &plan.grid {
        rows.push((
            v,
            plan.ideal.apply(v),
            v_out(v, &plan.diode, &plan.circuit)?,
        ));
    }
    let mut out = BufWriter::new(File::create(&plan.output).map_err(io_err)?);
    let mut write_all = || -> std::io::Result<()> {
        writeln!(out, "input,ideal_prox,v_out")?;
        for (v, ideal, diode) in &rows {
            writeln!(out, "{v:e},{ideal:e},{diode:e}")?;
        }
        out.flush()
    };
    write_all().map_err(io_err)?;
    println!(
        "wrote {}: {} points",
        plan.output.display(),
        plan.grid.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// calibrate

fn resolve_calibrate(args: CalibrateArgs) -> Result<(f64, f64)> {
    let mut file = FileValues::from_args(&args.config)?;
    let mode = match resolve_opt(args.mode, &mut file, "mode")? {
        Some(raw) => parse_mode(&raw)?,
        None => PenaltyMode::L1,
    };
    let r = resolve(args.r, &mut file, "r", 35.0)?;
    let r_prime = resolve(args.r_prime, &mut file, "r-prime", 1.04)?;
    let k = resolve(args.k, &mut file, "k", 1.5)?;
    let saturation_current = resolve(
        args.saturation_current,
        &mut file,
        "saturation-current",
        1.4e-14,
    )?;
    let emission_coefficient = resolve(
        args.emission_coefficient,
        &mut file,
        "emission-coefficient",
        1.0,
    )?;
    let thermal_voltage = resolve(args.thermal_voltage, &mut file, "thermal-voltage", 0.026)?;
    file.finish()?;

    let diode = DiodeParams::new(saturation_current, emission_coefficient, thermal_voltage)?;
    let circuit = match mode {
        PenaltyMode::L1 => CircuitParams::l1(r)?,
        PenaltyMode::Mcp => CircuitParams::mcp(r_prime, k, &diode)?,
    };
    Ok((circuit.r(), circuit.r_prime()))
}

fn run_calibrate_cmd(args: CalibrateArgs) -> Result<()> {
    let (r, r_prime) = resolve_calibrate(args)?;
    println!("R = {r}");
    println!("R_prime = {r_prime}");
    Ok(())
}
