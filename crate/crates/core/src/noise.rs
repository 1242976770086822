//! Circuit-noise model: variance formulas for the shot and thermal noise of
//! the optical-electrical conversion stages and for the optical amplifier,
//! plus the Gaussian sampler that injects them.
//!
//! Injection points per solver iteration (the declared model; exact
//! summation order inside a physical chain is not observable in the MSE):
//! - amplifier noise, fixed variance, added to the gradient-step result for
//!   every algorithm;
//! - for diode algorithms only: optical-to-electrical (OEM) noise — shot
//!   plus thermal with load `R` — added to the input of the diode transfer,
//!   and electrical-to-optical (EOM) thermal noise with load `R′` added to
//!   its output.
//!
//! Ideal-prox algorithms have no OEM/EOM hardware, so they receive only the
//! amplifier term.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Elementary charge in coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602e-19;
/// Boltzmann constant in joules per kelvin.
pub const BOLTZMANN: f64 = 1.381e-23;

/// Physical noise parameters. Defaults: `T = 300` K, `B = 10` GHz,
/// amplifier variance `3.84e-8`.
///
/// The capacitance/combined-resistance pair is optional documentation of
/// where the bandwidth comes from (`B = 1/(2πC·R_cmb)`); when both are
/// given they must reproduce the stored bandwidth within 1%.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    temperature: f64,
    bandwidth: f64,
    amplifier_variance: f64,
    capacitance: Option<f64>,
    r_cmb: Option<f64>,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            temperature: 300.0,
            bandwidth: 1e10,
            amplifier_variance: 3.84e-8,
            capacitance: None,
            r_cmb: None,
        }
    }
}

impl NoiseParams {
    pub fn new(temperature: f64, bandwidth: f64, amplifier_variance: f64) -> Result<Self> {
        if !temperature.is_finite() || temperature <= 0.0 {
            return Err(Error::Parameter(format!(
                "temperature must be finite and > 0, got {temperature}"
            )));
        }
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::Parameter(format!(
                "bandwidth must be finite and > 0, got {bandwidth}"
            )));
        }
        if !amplifier_variance.is_finite() || amplifier_variance < 0.0 {
            return Err(Error::Parameter(format!(
                "amplifier variance must be finite and >= 0, got {amplifier_variance}"
            )));
        }
        Ok(Self {
            temperature,
            bandwidth,
            amplifier_variance,
            capacitance: None,
            r_cmb: None,
        })
    }

    /// Attach the RC origin of the bandwidth; fails if `1/(2πC·R_cmb)`
    /// disagrees with the stored bandwidth by more than 1%.
    pub fn with_rc(mut self, capacitance: f64, r_cmb: f64) -> Result<Self> {
        let implied = bandwidth(capacitance, r_cmb)?;
        let rel = (implied - self.bandwidth).abs() / self.bandwidth;
        if rel > 0.01 {
            return Err(Error::Parameter(format!(
                "C = {capacitance} F and R_cmb = {r_cmb} Ω imply bandwidth {implied:e} Hz, \
                 which differs from the configured {:e} Hz by {:.1}%",
                self.bandwidth,
                rel * 100.0
            )));
        }
        self.capacitance = Some(capacitance);
        self.r_cmb = Some(r_cmb);
        Ok(self)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn amplifier_variance(&self) -> f64 {
        self.amplifier_variance
    }

    pub fn capacitance(&self) -> Option<f64> {
        self.capacitance
    }

    pub fn r_cmb(&self) -> Option<f64> {
        self.r_cmb
    }
}

/// Which noise stages are active, and the seed all per-run noise streams are
/// derived from. `enabled == false` switches everything off regardless of the
/// per-stage toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub amplifier: bool,
    pub oem: bool,
    pub eom: bool,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            amplifier: true,
            oem: true,
            eom: true,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    /// Everything off; the seed is irrelevant but kept for replay parity.
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Shot-noise variance `2·q·|I_in|·B`. The absolute value keeps the variance
/// nonnegative for the signed signal values that stand in for currents.
pub fn shot_variance(i_in: f64, p: &NoiseParams) -> f64 {
    2.0 * ELEMENTARY_CHARGE * i_in.abs() * p.bandwidth
}

/// Thermal-noise variance `4·k_B·T·B / R_load`.
pub fn thermal_variance(p: &NoiseParams, r_load: f64) -> Result<f64> {
    if !r_load.is_finite() || r_load <= 0.0 {
        return Err(Error::Parameter(format!(
            "thermal load resistance must be finite and > 0, got {r_load}"
        )));
    }
    Ok(4.0 * BOLTZMANN * p.temperature * p.bandwidth / r_load)
}

/// Signal bandwidth of an RC-limited stage, `B = 1/(2π·C·R_cmb)`.
pub fn bandwidth(capacitance: f64, r_cmb: f64) -> Result<f64> {
    for (name, v) in [("capacitance", capacitance), ("combined resistance", r_cmb)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Parameter(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    Ok(1.0 / (2.0 * std::f64::consts::PI * capacitance * r_cmb))
}

/// `n` i.i.d. zero-mean Gaussian samples with the given variance. Variance 0
/// yields exact zeros while still consuming `n` draws, so stream alignment
/// does not depend on parameter values.
pub fn sample_additive_noise<R: Rng + ?Sized>(
    rng: &mut R,
    variance: f64,
    n: usize,
) -> Result<Vec<f64>> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(Error::Parameter(format!(
            "noise variance must be finite and >= 0, got {variance}"
        )));
    }
    let sigma = variance.sqrt();
    Ok((0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * sigma)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn shot_variance_examples() {
        let p = NoiseParams::default();
        assert_eq!(shot_variance(0.0, &p), 0.0);
        // Independent association order guards against transcription slips.
        assert_relative_eq!(
            shot_variance(1e-3, &p),
            (2.0 * 1.602e-19) * (1e-3 * 1e10),
            max_relative = 1e-15
        );
        assert_relative_eq!(shot_variance(1e-3, &p), 3.204e-12, max_relative = 1e-12);
        assert_eq!(shot_variance(-1e-3, &p), shot_variance(1e-3, &p));
    }

    #[test]
    fn thermal_variance_examples() {
        let p = NoiseParams::default();
        assert_relative_eq!(
            thermal_variance(&p, 35.0).unwrap(),
            4.734857142857143e-12,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            thermal_variance(&p, 1.029).unwrap(),
            1.6104956268221574e-10,
            max_relative = 1e-12
        );
        // Variance is linear in bandwidth, so it vanishes in the B → 0 limit.
        let tiny_b = NoiseParams::new(300.0, 1e-30, 0.0).unwrap();
        assert!(thermal_variance(&tiny_b, 35.0).unwrap() < 1e-40);
        assert!(thermal_variance(&p, 0.0).is_err());
        assert!(thermal_variance(&p, -3.0).is_err());
    }

    #[test]
    fn bandwidth_examples() {
        use std::f64::consts::PI;
        assert_relative_eq!(
            bandwidth(1.0 / (2.0 * PI), 1.0).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // C ≈ 15.9 pF with a 1 Ω combined resistance gives ≈ 10 GHz.
        assert_relative_eq!(
            bandwidth(1.59e-11, 1.0).unwrap(),
            1.0009e10,
            max_relative = 1e-3
        );
        let b1 = bandwidth(1e-11, 2.0).unwrap();
        let b2 = bandwidth(2e-11, 2.0).unwrap();
        assert_relative_eq!(b1, 2.0 * b2, max_relative = 1e-12);
        assert!(bandwidth(0.0, 1.0).is_err());
        assert!(bandwidth(1e-11, -1.0).is_err());
    }

    #[test]
    fn rc_consistency_enforced_within_one_percent() {
        let p = NoiseParams::default(); // B = 1e10
                                        // 15.915 pF × 1 Ω → 1.0000e10 Hz: accepted.
        assert!(p.with_rc(1.5915e-11, 1.0).is_ok());
        // 159 nF × 1 Ω → 1.0e4 Hz: rejected as inconsistent.
        assert!(p.with_rc(1.59e-7, 1.0).is_err());
    }

    #[test]
    fn sampler_zero_variance_gives_zeros() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let v = sample_additive_noise(&mut rng, 0.0, 100).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        assert_eq!(v.len(), 100);
    }

    #[test]
    fn sampler_replays_bit_identically() {
        let a = sample_additive_noise(&mut ChaCha12Rng::seed_from_u64(7), 3.84e-8, 1000).unwrap();
        let b = sample_additive_noise(&mut ChaCha12Rng::seed_from_u64(7), 3.84e-8, 1000).unwrap();
        assert_eq!(a, b);
        let c = sample_additive_noise(&mut ChaCha12Rng::seed_from_u64(8), 3.84e-8, 1000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_moments_match_requested_variance() {
        let n = 1_000_000;
        let target = 3.84e-8;
        let v = sample_additive_noise(&mut ChaCha12Rng::seed_from_u64(1234), target, n).unwrap();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        // Mean within 4 standard errors of zero; variance within 1%.
        let se = (target / n as f64).sqrt();
        assert!(mean.abs() <= 4.0 * se, "mean {mean:e} vs SE {se:e}");
        assert!((var - target).abs() / target <= 0.01, "variance {var:e}");
    }

    #[test]
    fn sampler_rejects_negative_variance() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(sample_additive_noise(&mut rng, -1e-9, 10).is_err());
        assert!(sample_additive_noise(&mut rng, f64::NAN, 10).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(NoiseParams::new(0.0, 1e10, 0.0).is_err());
        assert!(NoiseParams::new(300.0, 0.0, 0.0).is_err());
        assert!(NoiseParams::new(300.0, 1e10, -1.0).is_err());
        assert!(NoiseParams::new(300.0, 1e10, 0.0).is_ok());
    }
}
