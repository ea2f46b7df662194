use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trap::IonSpecies;

/// Retroreflected probe beam forming a standing wave above the mirror.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandingWaveConfig {
    /// Single-pass intensity at the ion (W/m^2).
    pub i_peak: f64,
    /// Laser detuning from resonance (rad/s).
    pub detuning: f64,
    /// Beam waist on the mirror (m).
    pub waist: f64,
    /// Detector counts without ion fluorescence (counts/s).
    pub background_rate: f64,
    /// Height of the field node nearest the trap (m).
    pub node_offset: f64,
    /// Detected counts per scattered photon.
    pub collection_efficiency: f64,
}

impl Default for StandingWaveConfig {
    fn default() -> Self {
        StandingWaveConfig {
            i_peak: 400.0,
            detuning: -2.0 * std::f64::consts::PI * 10e6,
            waist: 5e-6,
            background_rate: 10.0,
            // 276 half-wavelengths of 369.5 nm
            node_offset: 276.0 * 369.5e-9 / 2.0,
            collection_efficiency: 5e-3,
        }
    }
}

impl StandingWaveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.i_peak >= 0.0) || !self.i_peak.is_finite() {
            return Err(Error::invalid("i_peak", format!("must be >= 0, got {}", self.i_peak)));
        }
        if !(self.waist > 0.0) {
            return Err(Error::invalid("waist", format!("must be > 0, got {}", self.waist)));
        }
        if !(self.background_rate >= 0.0) {
            return Err(Error::invalid(
                "background_rate",
                format!("must be >= 0, got {}", self.background_rate),
            ));
        }
        if !(self.collection_efficiency >= 0.0) {
            return Err(Error::invalid(
                "collection_efficiency",
                format!("must be >= 0, got {}", self.collection_efficiency),
            ));
        }
        if !self.detuning.is_finite() || !self.node_offset.is_finite() {
            return Err(Error::invalid("detuning", "detuning and node offset must be finite"));
        }
        Ok(())
    }

    pub fn with_detuning(&self, detuning: f64) -> Self {
        StandingWaveConfig {
            detuning,
            ..self.clone()
        }
    }

    pub fn with_intensity(&self, i_peak: f64) -> Self {
        StandingWaveConfig {
            i_peak,
            ..self.clone()
        }
    }
}

/// `4 i_peak sin^2(k (z - node))`: field amplitudes add on retroreflection.
pub fn standing_wave_intensity(cfg: &StandingWaveConfig, species: &IonSpecies, z: f64) -> f64 {
    let s = (species.wavenumber() * (z - cfg.node_offset)).sin();
    4.0 * cfg.i_peak * s * s
}

/// Largest `sin^2(k u)` for `u` in `[u0 - a, u0 + a]`.
pub(crate) fn max_sin2_over(k: f64, u0: f64, a: f64) -> f64 {
    use std::f64::consts::PI;
    let (lo, hi) = (k * (u0 - a), k * (u0 + a));
    // first antinode phase pi/2 + m pi at or above lo
    let m = ((lo - PI / 2.0) / PI).ceil();
    if PI / 2.0 + m * PI <= hi {
        1.0
    } else {
        lo.sin().powi(2).max(hi.sin().powi(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_antinodes_and_period() {
        let sp = IonSpecies::ytterbium_174();
        let cfg = StandingWaveConfig::default();
        let node = cfg.node_offset;
        assert!(standing_wave_intensity(&cfg, &sp, node) < 1e-20);
        let quarter = sp.wavelength / 4.0;
        let anti = standing_wave_intensity(&cfg, &sp, node + quarter);
        assert!((anti - 4.0 * cfg.i_peak).abs() < 1e-12 * anti);
        let half = sp.wavelength / 2.0;
        assert!((half - 184.75e-9).abs() < 1e-15);
        for z in [node + 13e-9, node + 71e-9] {
            let a = standing_wave_intensity(&cfg, &sp, z);
            let b = standing_wave_intensity(&cfg, &sp, z + half);
            assert!((a - b).abs() < 1e-9 * anti);
        }
    }

    #[test]
    fn max_over_interval() {
        let k = 1.0;
        assert_eq!(max_sin2_over(k, 0.0, 2.0), 1.0);
        let v = max_sin2_over(k, 0.0, 0.3);
        assert!((v - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn validation_names_the_field() {
        let cfg = StandingWaveConfig {
            waist: 0.0,
            ..Default::default()
        };
        match cfg.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "waist"),
            other => panic!("{other:?}"),
        }
    }
}
