//! Simulation of a surface-electrode ion trap patterned on a dielectric mirror.
//!
//! The crate covers the electrostatics of the planar electrodes, the RF null
//! and its tuning with a second, phase-locked RF source, standing-wave
//! fluorescence with micromotion sidebands, synthetic photon counting and
//! micromotion fitting, and charging of the exposed dielectric.

// `!(x > 0.0)` is how inputs reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charging;
pub mod cli;
pub mod config;
pub mod constants;
pub mod electrostatics;
pub mod error;
pub mod fluorescence;
pub mod numerics;
pub mod output;
pub mod taylor;
pub mod trap;

pub use error::{Error, Result};

/// Position in meters.
pub type Point = nalgebra::Vector3<f64>;
