//! RF trapping: the two-source RF field, pseudopotential, null location and
//! tuning, secular frequencies, micromotion and the tweaker drive chain.

mod drive;
mod frequencies;
mod landscape;
mod solve;
mod species;
mod tuning;

use std::collections::BTreeMap;

pub use drive::{AmplifierCalibration, RfDrive};
pub use frequencies::{trap_frequencies, TrapFrequencies};
pub use landscape::{
    CombinedPotential, ElectrodeDc, HarmonicWell, PotentialEnergy, Pseudopotential, RfField,
};
pub use solve::{find_equilibrium, find_rf_null, RfNull, SolverOptions};
pub use species::IonSpecies;
pub use tuning::{
    micromotion_amplitude, phase_mismatch_micromotion, tweaker_height_curve, HeightCurve,
    HeightPoint, Micromotion, PhaseMismatch,
};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::electrostatics::ElectrodeSet;
use crate::error::Result;
use crate::Point;

/// Static confinement. The harmonic part stands in for an unspecified DC
/// electrode solution; explicit electrode voltages are added on top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcConfinement {
    /// Axial (x) secular frequency from DC alone (rad/s).
    pub omega_axial: f64,
    /// Share of the radial anti-curvature that falls on z (0..=1).
    pub vertical_fraction: f64,
    #[serde(default)]
    pub electrode_voltages: BTreeMap<u32, f64>,
}

impl Default for DcConfinement {
    fn default() -> Self {
        DcConfinement {
            omega_axial: 2.0 * std::f64::consts::PI * 0.5e6,
            vertical_fraction: 0.5,
            electrode_voltages: BTreeMap::new(),
        }
    }
}

/// Electrodes, drive, ion and DC confinement bundled together.
#[derive(Clone, Debug)]
pub struct TrapModel {
    pub electrodes: ElectrodeSet,
    pub drive: RfDrive,
    pub species: IonSpecies,
    pub dc: DcConfinement,
}

impl TrapModel {
    pub fn with_drive(&self, drive: RfDrive) -> Self {
        TrapModel {
            drive,
            ..self.clone()
        }
    }

    pub fn rf_field(&self) -> RfField<'_> {
        RfField::new(&self.electrodes, self.drive)
    }

    pub fn rf_field_phasor(&self, p: &Point) -> Result<Vector3<Complex64>> {
        self.rf_field().phasor(p)
    }

    pub fn pseudopotential(&self) -> Pseudopotential<'_> {
        Pseudopotential::new(&self.electrodes, self.drive, &self.species)
    }

    /// Pseudopotential plus DC terms, with the DC null at `dc_null`.
    pub fn total_potential(&self, dc_null: Point) -> CombinedPotential<'_> {
        let mut total = CombinedPotential::new()
            .with(self.pseudopotential())
            .with(HarmonicWell::dc_quadrupole(
                dc_null,
                self.species.mass,
                self.dc.omega_axial,
                self.dc.vertical_fraction,
            ));
        if !self.dc.electrode_voltages.is_empty() {
            total = total.with(ElectrodeDc {
                set: &self.electrodes,
                voltages: self.dc.electrode_voltages.clone(),
                charge: self.species.charge,
            });
        }
        total
    }

    pub fn find_rf_null(&self, guess: &Point, opts: &SolverOptions) -> Result<RfNull> {
        find_rf_null(&self.electrodes, &self.drive, guess, opts)
    }

    pub fn micromotion(&self, p: &Point) -> Result<Micromotion> {
        micromotion_amplitude(&self.electrodes, &self.drive, &self.species, p)
    }
}

/// RF field phasor at `p`.
pub fn rf_field_phasor(set: &ElectrodeSet, drive: &RfDrive, p: &Point) -> Result<Vector3<Complex64>> {
    RfField::new(set, *drive).phasor(p)
}

/// Pseudopotential energy (J) at `p`.
pub fn pseudopotential(set: &ElectrodeSet, drive: &RfDrive, species: &IonSpecies, p: &Point) -> Result<f64> {
    Pseudopotential::new(set, *drive, species).energy(p)
}
