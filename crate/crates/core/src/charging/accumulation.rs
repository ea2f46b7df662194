use serde::{Deserialize, Serialize};

use super::patch::ChargePatchState;
use crate::error::{Error, Result};
use crate::fluorescence::StandingWaveConfig;

/// Empirical charging law `dQ/dt = eta P_waist (I / I_ref)^(gamma_exp - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargingModelConfig {
    /// Charge yield per incident UV energy (C/J).
    pub eta: f64,
    /// `gamma_exp`; 1 makes the charging rate proportional to power.
    pub intensity_exponent: f64,
    /// Intensity at which the nonlinear factor is 1 (W/m^2).
    pub reference_intensity: f64,
    /// Screening of the patch by the trap electrodes. Not modelled; must stay off.
    pub screening: bool,
}

impl Default for ChargingModelConfig {
    fn default() -> Self {
        ChargingModelConfig {
            eta: 2e-11,
            intensity_exponent: 1.0,
            reference_intensity: 400.0,
            screening: false,
        }
    }
}

impl ChargingModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid("eta", format!("must be >= 0, got {}", self.eta)));
        }
        if !self.intensity_exponent.is_finite() {
            return Err(Error::invalid("intensity_exponent", "must be finite"));
        }
        if !(self.reference_intensity > 0.0) {
            return Err(Error::invalid(
                "reference_intensity",
                format!("must be > 0, got {}", self.reference_intensity),
            ));
        }
        if self.screening {
            return Err(Error::invalid("screening", "electrode screening of the patch is not implemented"));
        }
        Ok(())
    }

    /// C/s
    pub fn charging_rate(&self, sw: &StandingWaveConfig) -> f64 {
        if sw.i_peak == 0.0 || self.eta == 0.0 {
            return 0.0;
        }
        self.eta * power_within_waist(sw) * (sw.i_peak / self.reference_intensity).powf(self.intensity_exponent - 1.0)
    }
}

/// Power of a Gaussian beam with peak intensity `i_peak` falling inside its
/// waist radius: `(1 - e^-2) pi w^2 i_peak / 2`.
pub fn power_within_waist(sw: &StandingWaveConfig) -> f64 {
    (1.0 - (-2.0f64).exp()) * std::f64::consts::PI * sw.waist * sw.waist * sw.i_peak / 2.0
}

/// Patch state after a further exposure of `dt` seconds.
pub fn accumulate_charge(
    cfg: &ChargingModelConfig,
    sw: &StandingWaveConfig,
    dt: f64,
    state: &ChargePatchState,
) -> Result<ChargePatchState> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    cfg.validate()?;
    state.with_charge(state.total_charge + cfg.charging_rate(sw) * dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start() -> ChargePatchState {
        ChargePatchState::from_waist(1e-17, 5e-6, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_yield_changes_nothing() {
        let cfg = ChargingModelConfig {
            eta: 0.0,
            ..Default::default()
        };
        let s = accumulate_charge(&cfg, &StandingWaveConfig::default(), 10.0, &start()).unwrap();
        assert_eq!(s, start());
    }

    #[test]
    fn linear_in_time() {
        let cfg = ChargingModelConfig::default();
        let sw = StandingWaveConfig::default();
        let q0 = start().total_charge;
        let d1 = accumulate_charge(&cfg, &sw, 3.0, &start()).unwrap().total_charge - q0;
        let d2 = accumulate_charge(&cfg, &sw, 6.0, &start()).unwrap().total_charge - q0;
        assert!((d2 / d1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_two_quadruples_with_doubled_intensity() {
        let cfg = ChargingModelConfig {
            intensity_exponent: 2.0,
            ..Default::default()
        };
        let sw = StandingWaveConfig::default();
        let r1 = cfg.charging_rate(&sw);
        let r2 = cfg.charging_rate(&sw.with_intensity(2.0 * sw.i_peak));
        assert!((r2 / r1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn screening_is_rejected() {
        let cfg = ChargingModelConfig {
            screening: true,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
