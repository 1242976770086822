//! Random problem generation, trial orchestration, and CSV export.
//!
//! A trial draws one sensing problem `y = A·x + w`, hands it to each
//! configured solver, and records the squared-error trajectory. Per-trial
//! seeds derive from a single base seed (see [`crate::seeds`]), so any trial
//! — and any individual noise stream inside it — can be reproduced in
//! isolation, and results are independent of how trials are scheduled
//! across threads.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeds;
use crate::solver::{run, SolverConfig, Trajectory};

/// One drawn sensing problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    /// Sensing matrix, M×N, entries N(0, 1/M).
    pub a: Array2<f64>,
    /// Ground-truth signal: each entry is N(0, 1) with the configured
    /// activation probability, else exactly zero.
    pub x_true: Array1<f64>,
    /// Measurement noise, N(0, σ²).
    pub w: Array1<f64>,
    /// Observations `A·x_true + w`.
    pub y: Array1<f64>,
    pub m: usize,
    pub n: usize,
    /// Variance of the measurement noise `w`.
    pub sigma2: f64,
}

/// Shape and statistics of the random problem ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    /// Measurement count M (rows of A).
    pub m: usize,
    /// Signal length N (columns of A); must exceed M.
    pub n: usize,
    /// Probability that a signal entry is active.
    pub nonzero_prob: f64,
    /// Measurement-noise variance σ².
    pub sigma2: f64,
    pub trials: usize,
    pub base_seed: u64,
}

impl Default for EnsembleConfig {
    /// The reference experiment: M=32, N=64, 10% activity, σ²=1e-5,
    /// 200 trials.
    fn default() -> Self {
        Self {
            m: 32,
            n: 64,
            nonzero_prob: 0.1,
            sigma2: 1e-5,
            trials: 200,
            base_seed: 1,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Parameter("measurement count must be >= 1".into()));
        }
        if self.n <= self.m {
            return Err(Error::Parameter(format!(
                "signal length ({}) must exceed measurement count ({}) in an \
                 underdetermined problem",
                self.n, self.m
            )));
        }
        if !self.nonzero_prob.is_finite() || self.nonzero_prob <= 0.0 || self.nonzero_prob >= 1.0 {
            return Err(Error::Parameter(format!(
                "activation probability must lie strictly between 0 and 1, got {}",
                self.nonzero_prob
            )));
        }
        if !self.sigma2.is_finite() || self.sigma2 < 0.0 {
            return Err(Error::Parameter(format!(
                "measurement-noise variance must be finite and >= 0, got {}",
                self.sigma2
            )));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trial count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draw one problem. The draw order is fixed — A row by row, then the
/// signal, then the measurement noise — and every element consumes the same
/// number of variates regardless of parameter values, so a given generator
/// state always yields structurally aligned draws.
pub fn generate_problem<R: Rng + ?Sized>(rng: &mut R, cfg: &EnsembleConfig) -> ProblemInstance {
    let (m, n) = (cfg.m, cfg.n);
    let col_scale = (1.0 / m as f64).sqrt();
    let mut a = Array2::<f64>::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            a[[i, j]] = rng.sample::<f64, _>(StandardNormal) * col_scale;
        }
    }
    let mut x_true = Array1::<f64>::zeros(n);
    for j in 0..n {
        let active = rng.random::<f64>() < cfg.nonzero_prob;
        let g: f64 = rng.sample(StandardNormal);
        if active {
            x_true[j] = g;
        }
    }
    let w_scale = cfg.sigma2.sqrt();
    let mut w = Array1::<f64>::zeros(m);
    for i in 0..m {
        w[i] = rng.sample::<f64, _>(StandardNormal) * w_scale;
    }
    let y = a.dot(&x_true) + &w;
    ProblemInstance {
        a,
        x_true,
        w,
        y,
        m,
        n,
        sigma2: cfg.sigma2,
    }
}

/// Mean squared error `‖x − x_ref‖²/N`.
pub fn mse(x: &Array1<f64>, x_ref: &Array1<f64>) -> Result<f64> {
    if x.len() != x_ref.len() {
        return Err(Error::Shape(format!(
            "mse over vectors of length {} and {}",
            x.len(),
            x_ref.len()
        )));
    }
    let d = x - x_ref;
    Ok(d.dot(&d) / x.len() as f64)
}

/// Run every solver on every trial. The outer index of the result is the
/// trial, the inner index follows `solver_cfgs`. Each solver's noise seed is
/// overridden with the trial's derived seed so that trial `t` is identical
/// whether run alone or inside the ensemble. `jobs` = 1 runs sequentially,
/// 0 uses all cores, any other value that many threads; the results are
/// identical in every case.
pub fn run_trials(
    ensemble: &EnsembleConfig,
    solver_cfgs: &[SolverConfig],
    jobs: usize,
) -> Result<Vec<Vec<Trajectory>>> {
    ensemble.validate()?;
    if solver_cfgs.is_empty() {
        return Err(Error::Parameter("no solver configurations given".into()));
    }
    for cfg in solver_cfgs {
        cfg.validate()?;
    }
    let run_one = |t: usize| -> Result<Vec<Trajectory>> {
        let trial = seeds::trial_seed(ensemble.base_seed, t as u64);
        let mut problem_rng = ChaCha12Rng::seed_from_u64(seeds::problem_seed(trial));
        let problem = generate_problem(&mut problem_rng, ensemble);
        let noise_seed = seeds::noise_seed(trial);
        solver_cfgs
            .iter()
            .map(|cfg| {
                let mut cfg = cfg.clone();
                cfg.noise.seed = noise_seed;
                run(&problem, &cfg)
            })
            .collect()
    };
    if jobs == 1 {
        (0..ensemble.trials).map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build a {jobs}-thread pool: {e}")))?;
        pool.install(|| (0..ensemble.trials).into_par_iter().map(run_one).collect())
    }
}

/// A trial-averaged squared-error curve for one algorithm.
#[derive(Debug, Clone)]
pub struct MseCurve {
    pub label: String,
    /// Index i holds the ensemble-mean squared error after i iterations;
    /// index 0 is the zero initial point.
    pub values: Vec<f64>,
    /// How many trials went into the average.
    pub trials: usize,
    /// Hash of every parameter that determines the curve, for quick
    /// "same configuration?" checks across runs.
    pub fingerprint: u64,
}

/// Hash the parameters that determine a curve. The per-trial noise seed is
/// excluded — it is derived from the ensemble base seed, which is included.
fn config_fingerprint(ensemble: &EnsembleConfig, cfg: &SolverConfig) -> u64 {
    let circuit = cfg
        .circuit
        .as_ref()
        .map(|c| format!("{}:{}", c.r(), c.r_prime()));
    let desc = format!(
        "label={}|m={}|n={}|p={}|sigma2={}|trials={}|base={}|lambda={}|step={:?}|iters={}|\
         alpha={:?}|is={}|em={}|vt={}|circuit={:?}|noise={}:{}:{}:{}|T={}|B={}|amp_var={}",
        cfg.prox_kind.label(),
        ensemble.m,
        ensemble.n,
        ensemble.nonzero_prob,
        ensemble.sigma2,
        ensemble.trials,
        ensemble.base_seed,
        cfg.lambda,
        cfg.step_size,
        cfg.max_iterations,
        cfg.mcp_alpha,
        cfg.diode.saturation_current(),
        cfg.diode.emission_coefficient(),
        cfg.diode.thermal_voltage(),
        circuit,
        cfg.noise.enabled,
        cfg.noise.amplifier,
        cfg.noise.oem,
        cfg.noise.eom,
        cfg.noise_params.temperature(),
        cfg.noise_params.bandwidth(),
        cfg.noise_params.amplifier_variance(),
    );
    seeds::fnv1a(desc.as_bytes())
}

/// Run the full ensemble and average the trajectories. The mean is folded
/// sequentially in trial order, so the output bytes do not depend on the
/// thread count.
pub fn run_experiment(
    ensemble: &EnsembleConfig,
    solver_cfgs: &[SolverConfig],
    jobs: usize,
) -> Result<Vec<MseCurve>> {
    for cfg in solver_cfgs {
        if cfg.early_stop.is_some() {
            return Err(Error::Parameter(
                "experiment averaging needs fixed-length trajectories; disable early stop".into(),
            ));
        }
        if cfg.max_iterations != solver_cfgs[0].max_iterations {
            return Err(Error::Parameter(
                "all solvers in one experiment must share the iteration budget".into(),
            ));
        }
    }
    let trials = run_trials(ensemble, solver_cfgs, jobs)?;
    let len = solver_cfgs[0].max_iterations + 1;
    let mut sums = vec![vec![0.0_f64; len]; solver_cfgs.len()];
    for trial in &trials {
        for (sum, traj) in sums.iter_mut().zip(trial.iter()) {
            for (s, e) in sum.iter_mut().zip(traj.squared_errors.iter()) {
                *s += e;
            }
        }
    }
    let scale = 1.0 / ensemble.trials as f64;
    Ok(solver_cfgs
        .iter()
        .zip(sums)
        .map(|(cfg, sum)| MseCurve {
            label: cfg.prox_kind.label().to_string(),
            values: sum.into_iter().map(|s| s * scale).collect(),
            trials: ensemble.trials,
            fingerprint: config_fingerprint(ensemble, cfg),
        })
        .collect())
}

/// Write curves as CSV: header `iteration,<label>,...`, one row per
/// iteration, values in scientific notation with full round-trip precision.
pub fn write_curves(path: &Path, curves: &[MseCurve]) -> Result<()> {
    if curves.is_empty() {
        return Err(Error::Parameter("no curves to write".into()));
    }
    let len = curves[0].values.len();
    if curves.iter().any(|c| c.values.len() != len) {
        return Err(Error::Shape(
            "curves of differing lengths cannot share a CSV table".into(),
        ));
    }
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    let mut write_all = || -> std::io::Result<()> {
        write!(out, "iteration")?;
        for c in curves {
            write!(out, ",{}", c.label)?;
        }
        writeln!(out)?;
        for i in 0..len {
            write!(out, "{i}")?;
            for c in curves {
                write!(out, ",{:e}", c.values[i])?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write_all().map_err(io_err)
}
