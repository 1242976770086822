//! Ideal proximal operators: soft-thresholding (ℓ1) and the minimax concave
//! penalty (MCP), plus the MCP penalty value itself and a brute-force argmin
//! oracle used by tests.
//!
//! The proximal operator of a penalty J with step size ε is
//! `prox_{εJ}(v) = argmin_x J(x) + (1/(2ε))·(x − v)²`, applied element-wise
//! for vectors. Both operators here have closed forms; the oracle evaluates
//! the argmin directly on a dense grid so the closed forms are testable
//! against the definition rather than against themselves.

use crate::error::{Error, Result};

/// Parameters of the ℓ1 prox: the single threshold `t = ε·λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Params {
    t: f64,
}

impl L1Params {
    /// A validated threshold; must be strictly positive and finite.
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Parameter(format!(
                "soft-threshold level must be finite and > 0, got {t}"
            )));
        }
        Ok(Self { t })
    }

    pub fn threshold(&self) -> f64 {
        self.t
    }

    /// Element-wise soft-thresholding with the validated threshold.
    #[inline]
    pub fn apply(&self, v: f64) -> f64 {
        soft(v, self.t)
    }
}

/// Parameters of the MCP prox: regularization weight λ, shape α, step ε.
/// The closed-form prox requires α > ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McpParams {
    lambda: f64,
    alpha: f64,
    epsilon: f64,
}

impl McpParams {
    pub fn new(lambda: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("alpha", alpha), ("epsilon", epsilon)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Parameter(format!(
                    "MCP {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if alpha <= epsilon {
            return Err(Error::Parameter(format!(
                "MCP prox requires alpha > epsilon, got alpha = {alpha}, epsilon = {epsilon}"
            )));
        }
        Ok(Self {
            lambda,
            alpha,
            epsilon,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Element-wise MCP prox with the validated parameters.
    #[inline]
    pub fn apply(&self, v: f64) -> f64 {
        let a = v.abs();
        let el = self.epsilon * self.lambda;
        let al = self.alpha * self.lambda;
        if a < el {
            0.0
        } else if a <= al {
            // Boundary ties land here, matching the closed form's "≤" bounds;
            // both branch formulas agree at |v| = αλ anyway.
            self.alpha / (self.alpha - self.epsilon) * (v - el * signum0(v))
        } else {
            v
        }
    }
}

/// Sign that maps ±0.0 to 0, so odd symmetry is exact at the origin.
#[inline]
fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Soft-thresholding: `v − t` for `v > t`, `0` for `|v| ≤ t`, `v + t` for
/// `v < −t`. This is `prox_{ελ‖·‖₁}` with `t = ε·λ`.
pub fn soft_threshold(v: f64, t: f64) -> Result<f64> {
    let p = L1Params::new(t)?;
    Ok(p.apply(v))
}

/// The MCP penalty of a single element for bare parameters (λ, α); no step
/// size is involved in the penalty itself:
/// `|x| − x²/(2αλ)` for `|x| ≤ αλ`, saturating at `αλ/2` beyond.
#[inline]
pub fn mcp_penalty_with(x: f64, lambda: f64, alpha: f64) -> f64 {
    let al = alpha * lambda;
    let a = x.abs();
    if a <= al {
        a - x * x / (2.0 * al)
    } else {
        al / 2.0
    }
}

/// The MCP penalty of a single element under validated parameters.
pub fn mcp_penalty(x: f64, p: &McpParams) -> f64 {
    mcp_penalty_with(x, p.lambda, p.alpha)
}

/// Closed-form MCP prox: `0` for `|v| < ελ`;
/// `(α/(α−ε))·(v − ελ·sgn v)` for `ελ ≤ |v| ≤ αλ`; `v` for `|v| > αλ`.
pub fn mcp_prox(v: f64, p: &McpParams) -> f64 {
    p.apply(v)
}

/// Brute-force prox oracle: returns the grid point of
/// `{lo, lo+step, …, ≤ hi}` minimizing `penalty(x) + (1/(2ε))·(x − v)²`.
///
/// Used only by tests, as an implementation of the prox definition that is
/// independent of any closed form. Ties resolve to the leftmost minimizer.
pub fn prox_oracle<F: Fn(f64) -> f64>(
    penalty: F,
    v: f64,
    epsilon: f64,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<f64> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Parameter(format!(
            "oracle step size must be finite and > 0, got {epsilon}"
        )));
    }
    if !step.is_finite() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Parameter(format!(
            "oracle grid is empty or invalid: lo = {lo}, hi = {hi}, step = {step}"
        )));
    }
    let half_inv_eps = 1.0 / (2.0 * epsilon);
    let count = ((hi - lo) / step).floor() as u64;
    let mut best_x = lo;
    let mut best_val = f64::INFINITY;
    for j in 0..=count {
        let x = lo + j as f64 * step;
        let d = x - v;
        let val = penalty(x) + d * d * half_inv_eps;
        if val < best_val {
            best_val = val;
            best_x = x;
        }
    }
    Ok(best_x)
}
