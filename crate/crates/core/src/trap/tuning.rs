use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::landscape::RfField;
use super::solve::{find_rf_null, minimize_field, SolverOptions};
use super::{IonSpecies, RfDrive};
use crate::electrostatics::ElectrodeSet;
use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightPoint {
    /// Signed tweaker amplitude (V); negative means driven at phase -pi.
    pub voltage: f64,
    pub position: Point,
}

/// RF-null height as a function of tweaker voltage, with a straight-line fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightCurve {
    pub points: Vec<HeightPoint>,
    /// m/V
    pub slope: f64,
    /// m
    pub intercept: f64,
    /// Largest |height - fit| (m).
    pub max_residual: f64,
}

impl HeightCurve {
    pub fn heights(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.position.z).collect()
    }

    /// Total height change spanned by the scan (m).
    pub fn range(&self) -> f64 {
        let h = self.heights();
        let max = h.iter().copied().fold(f64::MIN, f64::max);
        let min = h.iter().copied().fold(f64::MAX, f64::min);
        max - min
    }
}

/// Relocates the RF null for each signed tweaker amplitude (applied equally to
/// both tweakers) and fits height against voltage.
pub fn tweaker_height_curve(
    set: &ElectrodeSet,
    base: &RfDrive,
    voltages: &[f64],
    guess: &Point,
    opts: &SolverOptions,
) -> Result<HeightCurve> {
    if voltages.len() < 2 {
        return Err(Error::invalid("tweaker voltages", "need at least two values"));
    }
    let points = voltages
        .par_iter()
        .map(|&v| {
            let drive = base.with_signed_tweaker(v);
            let null = find_rf_null(set, &drive, guess, opts)?;
            Ok(HeightPoint {
                voltage: v,
                position: null.position,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let v: Vec<f64> = points.iter().map(|p| p.voltage).collect();
    let h: Vec<f64> = points.iter().map(|p| p.position.z).collect();
    let (slope, intercept) = linear_fit(&v, &h);
    let max_residual = v
        .iter()
        .zip(&h)
        .map(|(v, h)| (h - (slope * v + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(HeightCurve {
        points,
        slope,
        intercept,
        max_residual,
    })
}

/// First-order driven micromotion along z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Micromotion {
    /// a_z (m)
    pub amplitude: f64,
    /// Modulation index k a_z.
    pub beta: f64,
}

impl Micromotion {
    pub fn from_field(e_z: f64, drive: &RfDrive, species: &IonSpecies) -> Self {
        let amplitude = species.charge.abs() * e_z.abs() / (species.mass * drive.omega * drive.omega);
        Micromotion {
            amplitude,
            beta: species.wavenumber() * amplitude,
        }
    }
}

/// `a_z = q |E_z| / (m Omega^2)` from the RF phasor at `p`.
pub fn micromotion_amplitude(
    set: &ElectrodeSet,
    drive: &RfDrive,
    species: &IonSpecies,
    p: &Point,
) -> Result<Micromotion> {
    let phasor = RfField::new(set, *drive).phasor(p)?;
    Ok(Micromotion::from_field(phasor.z.norm(), drive, species))
}

/// Best achievable operating point when the tweaker is out of phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMismatch {
    pub position: Point,
    /// Phasor magnitude |E| at the minimum (V/m).
    pub field: f64,
    /// Residual z micromotion there.
    pub micromotion: Micromotion,
}

/// Minimises the RF field magnitude in the transverse plane through `guess`,
/// within `search_radius` of it, and
/// reports the micromotion that remains.
pub fn phase_mismatch_micromotion(
    set: &ElectrodeSet,
    drive: &RfDrive,
    species: &IonSpecies,
    guess: &Point,
    search_radius: f64,
    opts: &SolverOptions,
) -> Result<PhaseMismatch> {
    drive.validate()?;
    if drive.v_main == 0.0 || drive.tweaker_left_applied() + drive.tweaker_right_applied() == 0.0 {
        return Err(Error::invalid(
            "drive",
            "both the main and the tweaker RF source must be on",
        ));
    }
    let field = RfField::new(set, *drive);
    let position = minimize_field(&field, guess, opts)?;
    let distance = (position - guess).norm();
    if distance > search_radius {
        return Err(Error::SearchRegionExhausted { distance });
    }
    let phasor = field.phasor(&position)?;
    Ok(PhaseMismatch {
        position,
        field: phasor.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
        micromotion: Micromotion::from_field(phasor.z.norm(), drive, species),
    })
}
