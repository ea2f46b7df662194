use serde::{Deserialize, Serialize};

use super::accumulation::{accumulate_charge, ChargingModelConfig};
use super::patch::{patch_charge_field_z, ChargePatchState};
use crate::error::{Error, Result};
use crate::fluorescence::StandingWaveConfig;
use crate::trap::IonSpecies;
use crate::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposureSettings {
    /// s
    pub duration: f64,
    /// s
    pub timestep: f64,
    /// Largest displacement still inside the harmonic region (m).
    pub displacement_limit: f64,
    /// Largest displacement change allowed per step (m).
    pub max_step_displacement: f64,
}

impl Default for ExposureSettings {
    fn default() -> Self {
        ExposureSettings {
            duration: 900.0,
            timestep: 0.2,
            displacement_limit: 5e-6,
            max_step_displacement: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// s
    pub t: f64,
    /// Vertical displacement from the uncharged equilibrium (m).
    pub z_displacement: f64,
    /// Patch field at the displaced ion (V/m).
    pub e_z: f64,
    /// Backward difference of `e_z` (V/(m s)); zero at the first point.
    pub de_z_dt: f64,
    /// Patch charge (C).
    pub charge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Vertical secular frequency used for the force balance (rad/s).
    pub omega_z: f64,
    /// `m omega_z^2 / q` (V/m per m).
    pub field_per_displacement: f64,
    /// Largest `|dE/dt - (m omega_z^2 / q) dz/dt|` relative to its rounding bound.
    pub max_identity_violation: f64,
}

/// `(m omega_z^2 / q) dz/dt`: field drift that produces a given vertical drift.
pub fn field_rate_from_velocity(species: &IonSpecies, omega_z: f64, dz_dt: f64) -> f64 {
    species.mass * omega_z * omega_z / species.charge * dz_dt
}

/// Self-consistent displacement `z = q E_z(rest + z) / (m omega_z^2)`.
fn balance(state: &ChargePatchState, rest: &Point, kappa: f64, start: f64) -> Result<(f64, f64)> {
    let mut z = start;
    for _ in 0..100 {
        let e = patch_charge_field_z(state, &Point::new(rest.x, rest.y, rest.z + z))?;
        let next = e / kappa;
        if (next - z).abs() <= 1e-16 + 1e-13 * next.abs() {
            return Ok((next, e));
        }
        z = next;
    }
    Err(Error::NonConvergence {
        what: "force balance",
        iterations: 100,
        residual: z,
    })
}

/// Quasi-static vertical drift of the ion while the patch charges.
///
/// Each step adds charge, then places the ion where the patch force balances
/// the vertical restoring force of a harmonic trap with frequency `omega_z`.
pub fn exposure_simulation(
    charging: &ChargingModelConfig,
    sw: &StandingWaveConfig,
    initial: &ChargePatchState,
    species: &IonSpecies,
    ion_rest: &Point,
    omega_z: f64,
    settings: &ExposureSettings,
) -> Result<Trajectory> {
    charging.validate()?;
    if !(omega_z > 0.0) {
        return Err(Error::invalid("omega_z", format!("must be > 0, got {omega_z}")));
    }
    if !(settings.timestep > 0.0) || !(settings.duration > 0.0) {
        return Err(Error::invalid("timestep", "duration and timestep must be > 0"));
    }
    let kappa = species.mass * omega_z * omega_z / species.charge;
    let steps = (settings.duration / settings.timestep - 1e-9).ceil() as usize;

    let mut state = *initial;
    let (mut z, mut e) = balance(&state, ion_rest, kappa, 0.0)?;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(TrajectoryPoint {
        t: 0.0,
        z_displacement: z,
        e_z: e,
        de_z_dt: 0.0,
        charge: state.total_charge,
    });
    let mut worst = 0.0f64;
    let mut t = 0.0;
    for k in 1..=steps {
        let t_next = (k as f64 * settings.timestep).min(settings.duration);
        let dt = t_next - t;
        state = accumulate_charge(charging, sw, dt, &state)?;
        let (z_new, e_new) = balance(&state, ion_rest, kappa, z)?;
        if (z_new - z).abs() > settings.max_step_displacement {
            return Err(Error::StepTooLarge { step: (z_new - z).abs() });
        }
        if z_new.abs() > settings.displacement_limit {
            return Err(Error::TrapInstability {
                time: t_next,
                displacement: z_new,
                limit: settings.displacement_limit,
            });
        }
        let de_dt = (e_new - e) / dt;
        let dz_dt = (z_new - z) / dt;
        let bound = 8.0 * f64::EPSILON * (e_new.abs() + e.abs()) / dt;
        let violation = (de_dt - kappa * dz_dt).abs();
        if violation > bound {
            return Err(Error::NonConvergence {
                what: "field-displacement identity",
                iterations: k,
                residual: violation,
            });
        }
        if bound > 0.0 {
            worst = worst.max(violation / bound);
        }
        points.push(TrajectoryPoint {
            t: t_next,
            z_displacement: z_new,
            e_z: e_new,
            de_z_dt: de_dt,
            charge: state.total_charge,
        });
        z = z_new;
        e = e_new;
        t = t_next;
    }
    Ok(Trajectory {
        points,
        omega_z,
        field_per_displacement: kappa,
        max_identity_violation: worst,
    })
}
