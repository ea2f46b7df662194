use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};

/// Trapped ion: mass, charge and the two-level cooling transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonSpecies {
    pub label: String,
    /// kg
    pub mass: f64,
    /// C
    pub charge: f64,
    /// Transition wavelength (m).
    pub wavelength: f64,
    /// Natural linewidth gamma (rad/s).
    pub linewidth: f64,
}

impl IonSpecies {
    pub fn new(
        label: impl Into<String>,
        mass: f64,
        charge: f64,
        wavelength: f64,
        linewidth: f64,
    ) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be > 0, got {mass}")));
        }
        if !(wavelength > 0.0) {
            return Err(Error::invalid("wavelength", format!("must be > 0, got {wavelength}")));
        }
        if !(linewidth > 0.0) {
            return Err(Error::invalid("linewidth", format!("must be > 0, got {linewidth}")));
        }
        if charge == 0.0 || !charge.is_finite() {
            return Err(Error::invalid("charge", "must be finite and non-zero"));
        }
        Ok(IonSpecies {
            label: label.into(),
            mass,
            charge,
            wavelength,
            linewidth,
        })
    }

    /// Looks up a species in the bundled constants table.
    pub fn from_table(key: &str) -> Option<Self> {
        let table = constants::table();
        let entry = table.species.get(key)?;
        let phys = &table.physical;
        let mass = entry.atomic_mass_u * phys.atomic_mass_unit
            - entry.charge_state as f64 * phys.electron_mass;
        IonSpecies::new(
            entry.label.clone(),
            mass,
            entry.charge_state as f64 * phys.elementary_charge,
            entry.wavelength_nm * 1e-9,
            2.0 * PI * entry.linewidth_mhz * 1e6,
        )
        .ok()
    }

    pub fn ytterbium_174() -> Self {
        Self::from_table("yb174_ion").expect("bundled table contains yb174_ion")
    }

    /// Laser wavenumber 2 pi / lambda.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Two-level saturation intensity `2 pi^2 hbar gamma c / (3 lambda^3)` in W/m^2.
    pub fn saturation_intensity(&self) -> f64 {
        2.0 * PI * PI * constants::hbar() * self.linewidth * constants::speed_of_light()
            / (3.0 * self.wavelength.powi(3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ytterbium_mass_and_charge() {
        let yb = IonSpecies::ytterbium_174();
        assert!((yb.mass - 2.888e-25).abs() < 1e-28);
        assert_eq!(yb.charge, 1.602176634e-19);
        assert_eq!(yb.wavelength, 369.5e-9);
    }

    #[test]
    fn saturation_intensity_is_recomputed_from_linewidth() {
        let mut yb = IonSpecies::ytterbium_174();
        let base = yb.saturation_intensity();
        yb.linewidth *= 2.0;
        assert!((yb.saturation_intensity() / base - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonphysical_values() {
        assert!(IonSpecies::new("x", 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(IonSpecies::new("x", 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(IonSpecies::new("x", 1.0, 1.0, -1.0, 1.0).is_err());
    }
}
