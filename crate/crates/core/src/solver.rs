//! The proximal-gradient iteration (ISTA) with a pluggable proximal stage.
//!
//! Every algorithm shares the identical gradient step
//! `g = x − ε·Aᵀ(Ax − y)`; they differ only in the element-wise map applied
//! to `g`:
//!
//! - `ista-l1` — ideal soft-thresholding with level `ε·λ`;
//! - `ista-mcp` — the ideal MCP prox (parameterized by the same ε);
//! - `diode-l1` / `diode-mcp` — the diode-network transfer function under
//!   the corresponding resistor calibration.
//!
//! With noise enabled, amplifier noise is added to `g` for every algorithm,
//! and the diode algorithms additionally receive OEM noise (shot + thermal,
//! load `R`) at the transfer input and EOM thermal noise (load `R′`) at its
//! output. All streams derive deterministically from the config's noise seed
//! (see [`crate::seeds`]), and the amplifier stream depends only on that
//! seed — not on the algorithm — so solvers run on the same problem and seed
//! see identical gradient-step perturbations.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::diode::{v_out, CircuitParams, DiodeParams};
use crate::error::{Error, Result};
use crate::harness::{mse, ProblemInstance};
use crate::noise::{shot_variance, thermal_variance, NoiseConfig, NoiseParams};
use crate::proxops::{mcp_penalty_with, L1Params, McpParams};
use crate::seeds;

/// Which proximal stage the solver plugs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxKind {
    IdealL1,
    IdealMcp,
    DiodeL1,
    DiodeMcp,
}

impl ProxKind {
    /// Stable label used in CSV headers and stream-seed derivation.
    pub fn label(&self) -> &'static str {
        match self {
            ProxKind::IdealL1 => "ista-l1",
            ProxKind::IdealMcp => "ista-mcp",
            ProxKind::DiodeL1 => "diode-l1",
            ProxKind::DiodeMcp => "diode-mcp",
        }
    }

    pub fn is_diode(&self) -> bool {
        matches!(self, ProxKind::DiodeL1 | ProxKind::DiodeMcp)
    }

    /// The four algorithms in their conventional presentation order.
    pub fn all() -> [ProxKind; 4] {
        [
            ProxKind::IdealL1,
            ProxKind::IdealMcp,
            ProxKind::DiodeL1,
            ProxKind::DiodeMcp,
        ]
    }
}

/// Full parameterization of one solver run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Regularization weight λ.
    pub lambda: f64,
    /// Step size ε; `None` derives `0.99/θ_max(AᵀA)` from the problem.
    pub step_size: Option<f64>,
    /// Fixed iteration budget.
    pub max_iterations: usize,
    pub prox_kind: ProxKind,
    /// MCP shape α; required for [`ProxKind::IdealMcp`].
    pub mcp_alpha: Option<f64>,
    /// Diode constants for the diode stages.
    pub diode: DiodeParams,
    /// Resistances; required for the diode stages.
    pub circuit: Option<CircuitParams>,
    pub noise: NoiseConfig,
    pub noise_params: NoiseParams,
    /// Test-only: stop once the successive-iterate sup-norm change drops
    /// below this. Experiments use the fixed budget.
    pub early_stop: Option<f64>,
    /// Record an estimate snapshot every this many iterations.
    pub snapshot_every: Option<usize>,
}

impl SolverConfig {
    /// A config with the common defaults: auto step size, 2000 iterations,
    /// default diode constants, noise disabled.
    pub fn new(prox_kind: ProxKind, lambda: f64) -> Self {
        Self {
            lambda,
            step_size: None,
            max_iterations: 2000,
            prox_kind,
            mcp_alpha: None,
            diode: DiodeParams::default(),
            circuit: None,
            noise: NoiseConfig::disabled(),
            noise_params: NoiseParams::default(),
            early_stop: None,
            snapshot_every: None,
        }
    }

    /// Structural validation; step-size-dependent checks (α > ε) run again
    /// after the step size is resolved against a concrete problem.
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::Parameter(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            )));
        }
        if let Some(e) = self.step_size {
            if !e.is_finite() || e <= 0.0 {
                return Err(Error::Parameter(format!(
                    "step size must be finite and > 0, got {e}"
                )));
            }
            if self.prox_kind == ProxKind::IdealMcp {
                // Resolvable now; the prox formula needs α > ε.
                let alpha = self.required_alpha()?;
                McpParams::new(self.lambda, alpha, e)?;
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Parameter("iteration budget must be >= 1".into()));
        }
        if self.prox_kind == ProxKind::IdealMcp {
            self.required_alpha()?;
        }
        if self.prox_kind.is_diode() && self.circuit.is_none() {
            return Err(Error::Parameter(format!(
                "{} requires circuit parameters",
                self.prox_kind.label()
            )));
        }
        if let Some(t) = self.early_stop {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::Parameter(format!(
                    "early-stop tolerance must be finite and > 0, got {t}"
                )));
            }
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::Parameter("snapshot stride must be >= 1".into()));
        }
        Ok(())
    }

    fn required_alpha(&self) -> Result<f64> {
        match self.mcp_alpha {
            Some(a) if a.is_finite() && a > 0.0 => Ok(a),
            Some(a) => Err(Error::Parameter(format!(
                "MCP alpha must be finite and > 0, got {a}"
            ))),
            None => Err(Error::Parameter(
                "ista-mcp requires the MCP shape alpha".into(),
            )),
        }
    }
}

/// Record of one solver run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `‖x[i] − x_true‖²/N` for `i = 0..=iterations`; index 0 is the zero
    /// initial point. Shorter only if an early stop fired.
    pub squared_errors: Vec<f64>,
    /// The estimate after the final recorded iteration.
    pub final_estimate: Array1<f64>,
    /// `(iteration, estimate)` snapshots when a stride was configured.
    pub snapshots: Vec<(usize, Array1<f64>)>,
    /// Iteration at which the early-stop criterion fired, if it did.
    pub converged_at: Option<usize>,
}

/// Largest eigenvalue of `AᵀA` by power iteration, to relative residual
/// `tol`. Deterministic: the start vector is fixed, so repeated calls agree
/// bit-for-bit.
pub fn power_iteration_max_eig(a: &Array2<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let (_, n) = a.dim();
    if n == 0 || a.iter().all(|&x| x == 0.0) {
        return Err(Error::Parameter(
            "power iteration requires a nonzero matrix".into(),
        ));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Parameter(format!(
            "power-iteration tolerance must be finite and > 0, got {tol}"
        )));
    }
    // Deterministic start with a mild ramp so it is not orthogonal to the
    // leading eigenvector of simple structured matrices.
    let mut v = Array1::from_shape_fn(n, |j| 1.0 + 1e-3 * j as f64);
    let norm = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / norm);
    for _ in 0..max_iter {
        let bv = a.t().dot(&a.dot(&v));
        let theta = v.dot(&bv);
        let resid = {
            let r = &bv - &(&v * theta);
            r.dot(&r).sqrt()
        };
        if theta > 0.0 && resid <= tol * theta {
            return Ok(theta);
        }
        let norm = bv.dot(&bv).sqrt();
        if norm == 0.0 {
            return Err(Error::Numeric(
                "power iteration collapsed to the null space".into(),
            ));
        }
        v = bv / norm;
    }
    Err(Error::Numeric(format!(
        "power iteration did not reach tolerance {tol:e} within {max_iter} steps"
    )))
}

/// The step size every algorithm shares: `0.99 / θ_max(AᵀA)`.
pub fn default_step_size(a: &Array2<f64>) -> Result<f64> {
    Ok(0.99 / power_iteration_max_eig(a, 1e-10, 50_000)?)
}

/// One gradient step `x − ε·Aᵀ(Ax − y)`.
pub fn gradient_step(
    x: &Array1<f64>,
    a: &Array2<f64>,
    y: &Array1<f64>,
    epsilon: f64,
) -> Result<Array1<f64>> {
    let (m, n) = a.dim();
    if x.len() != n || y.len() != m {
        return Err(Error::Shape(format!(
            "gradient step with A {m}×{n}, x of length {}, y of length {}",
            x.len(),
            y.len()
        )));
    }
    let r = &a.dot(x) - y;
    Ok(x - &(a.t().dot(&r) * epsilon))
}

/// Which regularizer the objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularizer {
    L1,
    Mcp,
}

/// The cost `λ·J(x) + ½‖Ax − y‖²` with `J` the ℓ1 norm or the element-wise
/// summed MCP penalty (which needs the shape α).
pub fn objective(
    x: &Array1<f64>,
    a: &Array2<f64>,
    y: &Array1<f64>,
    lambda: f64,
    regularizer: Regularizer,
    alpha: Option<f64>,
) -> Result<f64> {
    let (m, n) = a.dim();
    if x.len() != n || y.len() != m {
        return Err(Error::Shape(format!(
            "objective with A {m}×{n}, x of length {}, y of length {}",
            x.len(),
            y.len()
        )));
    }
    let j = match regularizer {
        Regularizer::L1 => x.iter().map(|v| v.abs()).sum::<f64>(),
        Regularizer::Mcp => {
            let alpha = alpha
                .ok_or_else(|| Error::Parameter("MCP objective requires the shape alpha".into()))?;
            x.iter().map(|&v| mcp_penalty_with(v, lambda, alpha)).sum()
        }
    };
    let r = &a.dot(x) - y;
    Ok(lambda * j + 0.5 * r.dot(&r))
}

/// The resolved element-wise stage applied after each gradient step.
enum Stage {
    L1(L1Params),
    Mcp(McpParams),
    Diode(CircuitParams),
}

/// Run the iteration from the zero vector for the configured budget,
/// recording the per-iteration squared error against the ground truth.
pub fn run(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let epsilon = match cfg.step_size {
        Some(e) => e,
        None => default_step_size(&problem.a)?,
    };
    let stage = match cfg.prox_kind {
        ProxKind::IdealL1 => Stage::L1(L1Params::new(epsilon * cfg.lambda)?),
        ProxKind::IdealMcp => {
            // α > ε is only checkable once ε is known.
            Stage::Mcp(McpParams::new(cfg.lambda, cfg.required_alpha()?, epsilon)?)
        }
        ProxKind::DiodeL1 | ProxKind::DiodeMcp => Stage::Diode(
            cfg.circuit
                .expect("validate() guarantees circuit params for diode kinds"),
        ),
    };

    let noise_on = cfg.noise.enabled;
    let mut amp_rng = (noise_on && cfg.noise.amplifier)
        .then(|| ChaCha12Rng::seed_from_u64(seeds::amplifier_stream_seed(cfg.noise.seed)));
    let amp_sigma = cfg.noise_params.amplifier_variance().sqrt();

    let diode_stage = matches!(stage, Stage::Diode(_));
    let mut circuit_rng =
        (noise_on && diode_stage && (cfg.noise.oem || cfg.noise.eom)).then(|| {
            ChaCha12Rng::seed_from_u64(seeds::circuit_stream_seed(
                cfg.noise.seed,
                cfg.prox_kind.label(),
            ))
        });
    // Stage-level variances that do not depend on the signal.
    let (oem_thermal, eom_sigma) = if let Stage::Diode(c) = &stage {
        (
            thermal_variance(&cfg.noise_params, c.r())?,
            thermal_variance(&cfg.noise_params, c.r_prime())?.sqrt(),
        )
    } else {
        (0.0, 0.0)
    };

    let n = problem.n;
    let mut x = Array1::<f64>::zeros(n);
    let mut squared_errors = Vec::with_capacity(cfg.max_iterations + 1);
    squared_errors.push(mse(&x, &problem.x_true)?);
    let mut snapshots = Vec::new();
    let mut converged_at = None;

    for i in 0..cfg.max_iterations {
        let result: Result<Array1<f64>> = (|| {
            let mut g = gradient_step(&x, &problem.a, &problem.y, epsilon)?;
            if let Some(rng) = amp_rng.as_mut() {
                for gi in g.iter_mut() {
                    *gi += rng.sample::<f64, _>(StandardNormal) * amp_sigma;
                }
            }
            match &stage {
                Stage::L1(p) => Ok(g.mapv(|v| p.apply(v))),
                Stage::Mcp(p) => Ok(g.mapv(|v| p.apply(v))),
                Stage::Diode(c) => {
                    if let Some(rng) = circuit_rng.as_mut() {
                        if cfg.noise.oem {
                            // Per-element shot variance uses that element's
                            // own signal level entering the OEM stage.
                            for gi in g.iter_mut() {
                                let var = shot_variance(*gi, &cfg.noise_params) + oem_thermal;
                                *gi += rng.sample::<f64, _>(StandardNormal) * var.sqrt();
                            }
                        }
                    }
                    let mut out = Array1::<f64>::zeros(n);
                    for (o, gi) in out.iter_mut().zip(g.iter()) {
                        *o = v_out(*gi, &cfg.diode, c)?;
                    }
                    if let Some(rng) = circuit_rng.as_mut() {
                        if cfg.noise.eom {
                            for o in out.iter_mut() {
                                *o += rng.sample::<f64, _>(StandardNormal) * eom_sigma;
                            }
                        }
                    }
                    Ok(out)
                }
            }
        })();
        let x_new = result.map_err(|e| Error::Run {
            iteration: i,
            source: Box::new(e),
        })?;

        let err = mse(&x_new, &problem.x_true).map_err(|e| Error::Run {
            iteration: i,
            source: Box::new(e),
        })?;
        if !err.is_finite() {
            return Err(Error::Run {
                iteration: i,
                source: Box::new(Error::Numeric(format!(
                    "squared error became non-finite: {err}"
                ))),
            });
        }
        squared_errors.push(err);

        let change = cfg
            .early_stop
            .map(|_| {
                x_new
                    .iter()
                    .zip(x.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .unwrap_or(f64::INFINITY);
        x = x_new;
        if let Some(every) = cfg.snapshot_every {
            if (i + 1) % every == 0 {
                snapshots.push((i + 1, x.clone()));
            }
        }
        if let Some(tol) = cfg.early_stop {
            if change < tol {
                converged_at = Some(i + 1);
                break;
            }
        }
    }

    Ok(Trajectory {
        squared_errors,
        final_estimate: x,
        snapshots,
        converged_at,
    })
}
