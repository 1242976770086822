//! Diode V-I model, the closed-form transfer function of the
//! resistor/anti-parallel-diode network, and the two resistor calibrations
//! that shape that transfer into an approximate ℓ1 or MCP proximal operator.
//!
//! The network: the input current `I_in` enters a node shunted to ground by
//! the series resistance `R`; an anti-parallel diode pair connects that node
//! to the output node, which is loaded by `R′` to ground. Solving the
//! Kirchhoff equations gives the closed form
//!
//! ```text
//! V_out = sgn(I_in)·R′·{ (mV_T/(R+R′))·W(τ⁻¹·I_s(R+R′)·e^{(I_s(R+R′)+|I_in|R)/τ}) − I_s },
//! τ = m·V_T,
//! ```
//!
//! with `W` the principal-branch Lambert function. The W argument's exponent
//! exceeds 10³ at ordinary signal levels (e.g. `R = 35`, `I_in = 1` gives
//! ≈ 1346), so the argument is always kept as an exponent and evaluated with
//! [`crate::lambert::lambert_w0_of_exp`]; the raw exponential is never
//! formed. Reverse-bias diode current is ignored, so negative inputs are
//! defined by odd symmetry.
//!
//! Calibrations:
//! - ℓ1 mode: `R′ = R/(R−1)` — the unique load making the large-signal slope
//!   `R·R′/(R+R′)` exactly 1, so the transfer mimics soft-thresholding.
//! - MCP mode: given `R′ > 1` and a crossing point `k > 0`,
//!   `R = (R′/(R′−1))·(1 + (mV_T/k)·ln(1 + k/(I_s·R′)))` makes
//!   `v_out(k) = k` hold exactly, mimicking the MCP prox's return to the
//!   identity.

use crate::error::{Error, Result};
use crate::lambert::lambert_w0_of_exp;

/// Physical diode constants. Defaults: `I_s = 1.4e-14` A, `m = 1`,
/// `V_T = 0.026` V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeParams {
    saturation_current: f64,
    emission_coefficient: f64,
    thermal_voltage: f64,
}

impl Default for DiodeParams {
    fn default() -> Self {
        Self {
            saturation_current: 1.4e-14,
            emission_coefficient: 1.0,
            thermal_voltage: 0.026,
        }
    }
}

impl DiodeParams {
    pub fn new(
        saturation_current: f64,
        emission_coefficient: f64,
        thermal_voltage: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("saturation current", saturation_current),
            ("emission coefficient", emission_coefficient),
            ("thermal voltage", thermal_voltage),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Parameter(format!(
                    "diode {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            saturation_current,
            emission_coefficient,
            thermal_voltage,
        })
    }

    pub fn saturation_current(&self) -> f64 {
        self.saturation_current
    }

    pub fn emission_coefficient(&self) -> f64 {
        self.emission_coefficient
    }

    pub fn thermal_voltage(&self) -> f64 {
        self.thermal_voltage
    }

    /// `τ = m·V_T`, the exponential slope scale of the diode.
    fn tau(&self) -> f64 {
        self.emission_coefficient * self.thermal_voltage
    }
}

/// The two tunable resistances, with the MCP identity-crossing point `k`
/// recorded when the parameters came from the MCP calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    r: f64,
    r_prime: f64,
    k: Option<f64>,
}

impl CircuitParams {
    /// ℓ1 calibration: choose `R > 1`, derive `R′ = R/(R−1)`. Unlike the MCP
    /// calibration, the slope condition does not involve the diode constants.
    pub fn l1(r: f64) -> Result<Self> {
        let r_prime = calibrate_l1(r)?;
        Ok(Self {
            r,
            r_prime,
            k: None,
        })
    }

    /// MCP calibration: choose `R′ > 1` and crossing point `k > 0`, derive
    /// `R` so that `v_out(k) = k`.
    pub fn mcp(r_prime: f64, k: f64, d: &DiodeParams) -> Result<Self> {
        let r = calibrate_mcp(r_prime, k, d)?;
        Ok(Self {
            r,
            r_prime,
            k: Some(k),
        })
    }

    /// Directly supplied resistances without a calibration constraint.
    pub fn from_resistances(r: f64, r_prime: f64) -> Result<Self> {
        for (name, v) in [("R", r), ("R'", r_prime)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Parameter(format!(
                    "resistance {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            r,
            r_prime,
            k: None,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_prime(&self) -> f64 {
        self.r_prime
    }

    /// The MCP identity-crossing point, when one was calibrated in.
    pub fn fixed_point(&self) -> Option<f64> {
        self.k
    }
}

/// Forward diode current `I_D = I_s·(e^{V_D/(m·V_T)} − 1)`.
pub fn diode_current(v_d: f64, d: &DiodeParams) -> f64 {
    d.saturation_current * ((v_d / d.tau()).exp_m1())
}

/// The circuit transfer function `v_out(I_in)`; odd in `I_in`, exactly zero
/// at zero, finite for every finite input.
pub fn v_out(i_in: f64, d: &DiodeParams, c: &CircuitParams) -> Result<f64> {
    if !i_in.is_finite() {
        return Err(Error::Numeric(format!(
            "v_out input must be finite, got {i_in}"
        )));
    }
    if i_in == 0.0 {
        return Ok(0.0);
    }
    let s = c.r + c.r_prime;
    let tau = d.tau();
    let i_s = d.saturation_current;
    let a = i_in.abs();
    // W argument as an exponent: ln(I_s·s/τ) + (I_s·s + |I_in|·R)/τ.
    let y = (i_s * s / tau).ln() + (i_s * s + a * c.r) / tau;
    let w = lambert_w0_of_exp(y)?;
    let sign = if i_in > 0.0 { 1.0 } else { -1.0 };
    Ok(sign * c.r_prime * (tau / s * w - i_s))
}

/// Element-wise [`v_out`] over a slice.
pub fn v_out_vec(i_in: &[f64], d: &DiodeParams, c: &CircuitParams) -> Result<Vec<f64>> {
    i_in.iter().map(|&v| v_out(v, d, c)).collect()
}

/// ℓ1-mode calibration: the unique `R′` with `R·R′/(R+R′) = 1`, i.e.
/// `R′ = R/(R−1)`. Requires `R > 1`; no positive load exists otherwise.
pub fn calibrate_l1(r: f64) -> Result<f64> {
    if !r.is_finite() || r <= 1.0 {
        return Err(Error::Calibration(format!(
            "l1 mode needs R > 1 for a positive load resistance, got R = {r}"
        )));
    }
    Ok(r / (r - 1.0))
}

/// MCP-mode calibration: the series resistance making `v_out(k) = k`,
/// `R = (R′/(R′−1))·(1 + (mV_T/k)·ln(1 + k/(I_s·R′)))`.
/// Requires `R′ > 1` and `k > 0`.
pub fn calibrate_mcp(r_prime: f64, k: f64, d: &DiodeParams) -> Result<f64> {
    if !r_prime.is_finite() || r_prime <= 1.0 {
        return Err(Error::Calibration(format!(
            "MCP mode needs R' > 1, got R' = {r_prime}"
        )));
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::Calibration(format!(
            "MCP mode needs a crossing point k > 0, got k = {k}"
        )));
    }
    let tau = d.tau();
    Ok(r_prime / (r_prime - 1.0)
        * (1.0 + tau / k * (1.0 + k / (d.saturation_current * r_prime)).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diode_current_examples() {
        let d = DiodeParams::default();
        assert_eq!(diode_current(0.0, &d), 0.0);
        // V_D = m·V_T·ln 2 doubles the exponential, so I_D = I_s exactly.
        assert_relative_eq!(
            diode_current(0.026 * 2.0_f64.ln(), &d),
            1.4e-14,
            max_relative = 1e-14
        );
        // Direct arithmetic at the knee region (≈ 0.15 mA at 0.6 V).
        assert_relative_eq!(
            diode_current(0.6, &d),
            1.4733583449809434e-4,
            max_relative = 1e-13
        );
    }

    #[test]
    fn v_out_zero_is_exactly_zero() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        assert_eq!(v_out(0.0, &d, &c).unwrap(), 0.0);
        assert_eq!(v_out(-0.0, &d, &c).unwrap(), 0.0);
    }

    #[test]
    fn v_out_l1_approximates_soft_threshold_at_one() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let v = v_out(1.0, &d, &c).unwrap();
        // Frozen high-precision evaluation of the closed form.
        assert_relative_eq!(v, 0.9763423848845275, max_relative = 1e-12);
        // Within 0.01 of the ideal soft threshold value 0.9775.
        assert!((v - 0.9775).abs() < 0.01);
    }

    #[test]
    fn v_out_mcp_fixed_point_at_k() {
        let d = DiodeParams::default();
        let c = CircuitParams::mcp(1.04, 1.5, &d).unwrap();
        let v = v_out(1.5, &d, &c).unwrap();
        assert!((v - 1.5).abs() <= 1e-9, "v_out(1.5) = {v}");
        // Vector form preserves the fixed point with odd symmetry.
        let vv = v_out_vec(&[1.5, -1.5], &d, &c).unwrap();
        assert!((vv[0] - 1.5).abs() <= 1e-9);
        assert!((vv[1] + 1.5).abs() <= 1e-9);
    }

    #[test]
    fn v_out_vec_matches_scalar_map() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let input: Vec<f64> = (0..50).map(|i| -2.0 + 0.08163 * i as f64).collect();
        let vec_form = v_out_vec(&input, &d, &c).unwrap();
        for (x, got) in input.iter().zip(&vec_form) {
            assert_eq!(*got, v_out(*x, &d, &c).unwrap());
        }
        assert!(v_out_vec(&[], &d, &c).unwrap().is_empty());
    }

    #[test]
    fn odd_symmetry_is_exact() {
        let d = DiodeParams::default();
        for c in [
            CircuitParams::l1(35.0).unwrap(),
            CircuitParams::mcp(1.04, 1.5, &d).unwrap(),
        ] {
            let mut i = 0.003;
            while i < 10.0 {
                assert_eq!(
                    v_out(-i, &d, &c).unwrap(),
                    -v_out(i, &d, &c).unwrap(),
                    "asymmetry at {i}"
                );
                i *= 1.37;
            }
        }
    }

    #[test]
    fn strictly_increasing_on_dense_grid() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let mut prev = v_out(-10.0, &d, &c).unwrap();
        let steps = 2000;
        for j in 1..=steps {
            let x = -10.0 + 20.0 * j as f64 / steps as f64;
            let v = v_out(x, &d, &c).unwrap();
            assert!(v > prev, "not increasing at {x}");
            prev = v;
        }
    }

    #[test]
    fn l1_calibration_gives_unit_asymptotic_slope() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let h = 1e-5;
        for sign in [1.0, -1.0] {
            let x = 10.0 * sign;
            let slope = (v_out(x + h, &d, &c).unwrap() - v_out(x - h, &d, &c).unwrap()) / (2.0 * h);
            assert!((slope - 1.0).abs() <= 1e-3, "slope {slope} at {x}");
        }
    }

    #[test]
    fn l1_dead_zone_suppresses_small_inputs() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let mut i = 1e-4;
        while i <= 0.005 {
            let v = v_out(i, &d, &c).unwrap().abs();
            assert!(v < 0.05 * i, "leakage {v} at {i}");
            i += 2.3e-4;
        }
    }

    #[test]
    fn l1_approximation_error_bounded_on_window() {
        // max over [-2, 2] of |v_out − soft_threshold(·, 0.0225)| stays
        // within 0.05 for R = 35 (frozen independent evaluation: ≈ 0.0030).
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        let mut worst = 0.0_f64;
        let steps = 4000;
        for j in 0..=steps {
            let x = -2.0 + 4.0 * j as f64 / steps as f64;
            let ideal = crate::proxops::soft_threshold(x, 0.0225).unwrap();
            let dev = (v_out(x, &d, &c).unwrap() - ideal).abs();
            worst = worst.max(dev);
        }
        assert!(worst <= 0.05, "worst deviation {worst}");
        assert!(worst > 1e-4, "suspiciously perfect approximation");
    }

    #[test]
    fn calibrate_l1_examples() {
        assert_relative_eq!(
            calibrate_l1(35.0).unwrap(),
            35.0 / 34.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            calibrate_l1(25.0).unwrap(),
            25.0 / 24.0,
            max_relative = 1e-15
        );
        // Symmetric solution of 2R'/(2+R') = 1.
        assert_eq!(calibrate_l1(2.0).unwrap(), 2.0);
        // The slope identity R·R'/(R+R') = 1 holds by construction.
        for r in [1.5, 25.0, 35.0, 45.0, 400.0] {
            let rp = calibrate_l1(r).unwrap();
            assert_relative_eq!(r * rp / (r + rp), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn calibrate_l1_rejects_infeasible() {
        assert!(matches!(calibrate_l1(0.5), Err(Error::Calibration(_))));
        assert!(matches!(calibrate_l1(1.0), Err(Error::Calibration(_))));
        assert!(matches!(calibrate_l1(f64::NAN), Err(Error::Calibration(_))));
    }

    #[test]
    fn calibrate_mcp_closed_form_values() {
        // Frozen high-precision evaluations of the closed form at k = 1.5.
        let d = DiodeParams::default();
        assert_relative_eq!(
            calibrate_mcp(1.03, 1.5, &d).unwrap(),
            53.54091660977155,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            calibrate_mcp(1.04, 1.5, &d).unwrap(),
            40.54119419941948,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            calibrate_mcp(1.05, 1.5, &d).unwrap(),
            32.74132741936124,
            max_relative = 1e-13
        );
    }

    #[test]
    fn calibrate_mcp_fixed_point_property_across_settings() {
        // The defining property of the calibration: v_out(k) = k, whatever
        // (R', k) was requested.
        let d = DiodeParams::default();
        for (rp, k) in [
            (1.03, 1.5),
            (1.04, 1.5),
            (1.05, 1.5),
            (1.04, 0.7),
            (1.2, 2.5),
        ] {
            let c = CircuitParams::mcp(rp, k, &d).unwrap();
            let v = v_out(k, &d, &c).unwrap();
            assert!(
                (v - k).abs() <= 1e-9 * k,
                "fixed point violated for R' = {rp}, k = {k}: v_out = {v}"
            );
        }
    }

    #[test]
    fn calibrate_mcp_rejects_infeasible() {
        let d = DiodeParams::default();
        assert!(matches!(
            calibrate_mcp(1.0, 1.5, &d),
            Err(Error::Calibration(_))
        ));
        assert!(matches!(
            calibrate_mcp(0.9, 1.5, &d),
            Err(Error::Calibration(_))
        ));
        assert!(matches!(
            calibrate_mcp(1.04, 0.0, &d),
            Err(Error::Calibration(_))
        ));
        assert!(matches!(
            calibrate_mcp(1.04, -1.0, &d),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn v_out_rejects_non_finite_input() {
        let d = DiodeParams::default();
        let c = CircuitParams::l1(35.0).unwrap();
        assert!(matches!(v_out(f64::NAN, &d, &c), Err(Error::Numeric(_))));
        assert!(matches!(
            v_out(f64::INFINITY, &d, &c),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn parameter_validation_at_construction() {
        assert!(DiodeParams::new(0.0, 1.0, 0.026).is_err());
        assert!(DiodeParams::new(1.4e-14, -1.0, 0.026).is_err());
        assert!(DiodeParams::new(1.4e-14, 1.0, f64::NAN).is_err());
        assert!(CircuitParams::from_resistances(-1.0, 1.0).is_err());
        assert!(CircuitParams::from_resistances(1.0, 0.0).is_err());
        // Uncalibrated resistances do not need R > 1.
        assert!(CircuitParams::from_resistances(0.5, 0.5).is_ok());
    }

    /// Kirchhoff consistency: reconstruct the node equations from the
    /// closed form's output and check current balance. With the diode pair
    /// between input node A and output node B, load R′ at B and shunt R at A:
    /// all diode current flows through R′ (so I_D = V_out/R′), the diode drop
    /// follows from its V-I law, and node A balances
    /// I_in = (V_D + V_out)/R + I_D.
    #[test]
    fn kirchhoff_balance_from_closed_form() {
        let d = DiodeParams::default();
        for c in [
            CircuitParams::l1(35.0).unwrap(),
            CircuitParams::mcp(1.04, 1.5, &d).unwrap(),
        ] {
            for i_in in [0.01, 0.08, 0.3, 1.0, 1.5, 4.0, 9.0] {
                let vo = v_out(i_in, &d, &c).unwrap();
                let i_d = vo / c.r_prime();
                let v_d = d.tau() * (1.0 + i_d / d.saturation_current()).ln();
                let balance = (v_d + vo) / c.r() + i_d;
                let resid = (i_in - balance).abs() / i_in;
                assert!(
                    resid <= 1e-10,
                    "balance residual {resid:e} at I_in = {i_in}, R = {}",
                    c.r()
                );
            }
        }
    }
}
