//! Potentials and fields of rectangular surface electrodes in the gapless-plane
//! approximation.
//!
//! A patch at voltage `v` contributes
//! `v/(2 pi) * sum_ij (-1)^(i+j) atan2((x_i - x)(y_j - y), z R_ij)` at a point
//! `(x, y, z)` above the plane, with `R_ij` the distance to corner `ij`.

mod patch;
mod set;

pub use patch::{ElectrodePatch, ElectrodeRole};
pub use set::{overlapping_pairs, ElectrodeSet, GeometryFile, PatchEntry, Voltages};

use nalgebra::Vector3;

use crate::error::Result;
use crate::Point;

/// Potential of a single patch held at `v` volts.
pub fn patch_potential(patch: &ElectrodePatch, v: f64, p: &Point) -> Result<f64> {
    patch.potential(v, p)
}

/// Field of a single patch held at `v` volts.
pub fn patch_field(patch: &ElectrodePatch, v: f64, p: &Point) -> Result<Vector3<f64>> {
    patch.field(v, p)
}

/// Potential and field of a whole electrode set.
pub fn superpose(set: &ElectrodeSet, voltages: &Voltages, p: &Point) -> Result<(f64, Vector3<f64>)> {
    set.superpose(voltages, p)
}
