//! Light-induced charging of the mirror: the field of a Gaussian surface
//! charge, its growth under exposure, the resulting vertical drift of the ion,
//! and the splitting of the axial well once the patch repulsion wins.

mod accumulation;
mod bifurcation;
mod exposure;
mod patch;

pub use accumulation::{accumulate_charge, power_within_waist, ChargingModelConfig};
pub use bifurcation::{
    axial_potential_minima, curvature_threshold, grid_threshold, minima_on_profile, AxialMinima, AxialProfile,
    Classification, ThresholdBracket,
};
pub use exposure::{exposure_simulation, field_rate_from_velocity, ExposureSettings, Trajectory, TrajectoryPoint};
pub use patch::{
    integrated_charge, patch_charge_field, patch_charge_field_z, patch_charge_potential, patch_potential_curvature_xx,
    patch_potential_difference, ChargePatchState,
};
