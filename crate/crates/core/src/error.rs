use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation point must lie above the trap plane (z = {z} m)")]
    BelowPlane { z: f64 },

    #[error("invalid electrode patch `{name}`: {reason}")]
    InvalidPatch { name: String, reason: String },

    #[error("electrode patches `{first}` and `{second}` overlap")]
    OverlappingPatches { first: String, second: String },

    #[error("no voltage assigned to electrode role {role}")]
    MissingVoltage { role: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("RF sources are not phase matched (tweaker phase {phase} rad); no fixed RF null exists")]
    PhaseMismatch { phase: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("trap is not confining along principal axis {axis} (curvature {curvature:e} J/m^2)")]
    NotConfining { axis: usize, curvature: f64 },

    #[error("DDS code {code} outside 0..={full_scale}")]
    DdsCodeOutOfRange { code: u32, full_scale: u32 },

    #[error("{what} quadrature missed its tolerance (error estimate {residual:e})")]
    Quadrature { what: &'static str, residual: f64 },

    #[error("singular Jacobian: parameter `{parameter}` is not constrained by the data")]
    SingularJacobian { parameter: &'static str },

    #[error("minimum left the search region (distance {distance:e} m from its centre)")]
    SearchRegionExhausted { distance: f64 },

    #[error("trap instability at t = {time} s: ion displaced {displacement:e} m (limit {limit:e} m)")]
    TrapInstability {
        time: f64,
        displacement: f64,
        limit: f64,
    },

    #[error("time step too coarse: displacement changed by {step:e} m in one step (limit 1 nm)")]
    StepTooLarge { step: f64 },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
