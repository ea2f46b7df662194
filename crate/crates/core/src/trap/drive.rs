use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two phase-referenced RF sources at a common frequency: the main RF on the
/// rails and a second source on the tweaker electrodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfDrive {
    /// Main RF amplitude (V).
    pub v_main: f64,
    /// Tweaker amplitudes (V) as set on the source.
    pub v_tweaker_left: f64,
    pub v_tweaker_right: f64,
    /// Common drive frequency (rad/s).
    pub omega: f64,
    /// Tweaker phase relative to the main RF (rad), in [-pi, pi).
    pub phase_tweaker: f64,
    /// Multiplicative calibration applied to the tweaker amplitudes, e.g. to
    /// absorb stray capacitance in the voltage pickoff. 1 when unknown.
    pub tweaker_scale: f64,
}

impl RfDrive {
    pub fn new(v_main: f64, omega: f64) -> Result<Self> {
        let drive = RfDrive {
            v_main,
            v_tweaker_left: 0.0,
            v_tweaker_right: 0.0,
            omega,
            phase_tweaker: 0.0,
            tweaker_scale: 1.0,
        };
        drive.validate()?;
        Ok(drive)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::invalid("omega", format!("must be > 0, got {}", self.omega)));
        }
        for (name, v) in [
            ("v_main", self.v_main),
            ("v_tweaker_left", self.v_tweaker_left),
            ("v_tweaker_right", self.v_tweaker_right),
            ("tweaker_scale", self.tweaker_scale),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if !(-PI..PI).contains(&self.phase_tweaker) {
            return Err(Error::invalid(
                "phase_tweaker",
                format!("must lie in [-pi, pi), got {}", self.phase_tweaker),
            ));
        }
        Ok(())
    }

    pub fn with_tweakers(mut self, left: f64, right: f64) -> Self {
        self.v_tweaker_left = left;
        self.v_tweaker_right = right;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase_tweaker = phase;
        self
    }

    /// Both tweakers at `|v|`; a negative `v` is realised as phase -pi.
    pub fn with_signed_tweaker(mut self, v: f64) -> Self {
        self.v_tweaker_left = v.abs();
        self.v_tweaker_right = v.abs();
        self.phase_tweaker = if v < 0.0 { -PI } else { 0.0 };
        self
    }

    pub fn with_main(mut self, v_main: f64) -> Self {
        self.v_main = v_main;
        self
    }

    /// Same drive with every amplitude multiplied by `alpha`.
    pub fn scaled(mut self, alpha: f64) -> Self {
        self.v_main *= alpha;
        self.v_tweaker_left *= alpha;
        self.v_tweaker_right *= alpha;
        self
    }

    /// `exp(i phase)`, exact for the in-phase and anti-phase settings.
    pub fn phase_factor(&self) -> Complex64 {
        if self.phase_tweaker == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if self.phase_tweaker == -PI {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, self.phase_tweaker)
        }
    }

    /// A fixed RF null exists only when the tweaker phasor is real.
    pub fn is_phase_matched(&self) -> bool {
        self.phase_factor().im == 0.0 || self.tweaker_amplitude_sum() == 0.0
    }

    pub fn tweaker_left_applied(&self) -> f64 {
        self.v_tweaker_left * self.tweaker_scale
    }

    pub fn tweaker_right_applied(&self) -> f64 {
        self.v_tweaker_right * self.tweaker_scale
    }

    fn tweaker_amplitude_sum(&self) -> f64 {
        self.tweaker_left_applied() + self.tweaker_right_applied()
    }

    /// Sum of all applied amplitudes; the reference scale for field residuals.
    pub fn total_amplitude(&self) -> f64 {
        self.v_main + self.tweaker_amplitude_sum()
    }
}

/// DDS + amplifier chain driving the tweaker electrodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierCalibration {
    /// Largest DDS amplitude word (10-bit: 1023).
    pub dds_full_scale: u32,
    /// Output amplitude per DDS code in the linear regime, at 0 dB attenuation.
    pub volts_per_code: f64,
    /// Amplifier output ceiling (V).
    pub v_saturation: f64,
    /// Capacitive divider ratio of the voltage monitor.
    pub pickoff_ratio: f64,
}

impl Default for AmplifierCalibration {
    fn default() -> Self {
        AmplifierCalibration {
            dds_full_scale: 1023,
            volts_per_code: 0.03,
            v_saturation: 23.0,
            pickoff_ratio: 220.0,
        }
    }
}

impl AmplifierCalibration {
    /// Tweaker amplitude produced by a DDS code behind `attenuation_db` of input attenuation.
    pub fn dds_to_voltage(&self, code: u32, attenuation_db: f64) -> Result<f64> {
        if code > self.dds_full_scale {
            return Err(Error::DdsCodeOutOfRange {
                code,
                full_scale: self.dds_full_scale,
            });
        }
        let linear = self.volts_per_code * code as f64 * 10f64.powf(-attenuation_db / 20.0);
        Ok(linear.min(self.v_saturation))
    }

    /// Voltage seen on the monitor for a given electrode amplitude.
    pub fn pickoff_reading(&self, v: f64) -> f64 {
        v / self.pickoff_ratio
    }

    pub fn from_pickoff(&self, reading: f64) -> f64 {
        reading * self.pickoff_ratio
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dds_zero_saturation_and_attenuation() {
        let cal = AmplifierCalibration::default();
        assert_eq!(cal.dds_to_voltage(0, 0.0).unwrap(), 0.0);
        assert_eq!(cal.dds_to_voltage(1023, 0.0).unwrap(), 23.0);
        let v = cal.dds_to_voltage(300, 0.0).unwrap();
        let half = cal.dds_to_voltage(300, 20.0 * 2f64.log10()).unwrap();
        assert!((half / v - 0.5).abs() < 1e-12);
        assert!((cal.dds_to_voltage(300, 6.02).unwrap() / v - 0.5).abs() < 2e-4);
        assert!(matches!(
            cal.dds_to_voltage(1024, 0.0),
            Err(Error::DdsCodeOutOfRange { code: 1024, .. })
        ));
    }

    #[test]
    fn dds_output_is_monotone_and_bounded() {
        let cal = AmplifierCalibration::default();
        for att in [0.0, 3.0, 10.0] {
            let mut last = 0.0;
            for code in 0..=cal.dds_full_scale {
                let v = cal.dds_to_voltage(code, att).unwrap();
                assert!(v >= last && v <= cal.v_saturation);
                last = v;
            }
        }
    }

    #[test]
    fn pickoff_round_trip() {
        let cal = AmplifierCalibration::default();
        assert_eq!(cal.pickoff_reading(22.0), 0.1);
        assert!((cal.from_pickoff(cal.pickoff_reading(13.7)) - 13.7).abs() < 1e-12);
    }

    #[test]
    fn drive_validation() {
        let omega = 2.0 * PI * 42.5e6;
        assert!(RfDrive::new(185.0, omega).is_ok());
        assert!(RfDrive::new(185.0, 0.0).is_err());
        assert!(RfDrive::new(-1.0, omega).is_err());
        let d = RfDrive::new(185.0, omega).unwrap().with_phase(PI);
        assert!(d.validate().is_err());
        let d = RfDrive::new(185.0, omega).unwrap().with_signed_tweaker(-3.0);
        assert!(d.validate().is_ok());
        assert_eq!(d.phase_factor(), Complex64::new(-1.0, 0.0));
    }
}
