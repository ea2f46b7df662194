//! Standing-wave probe fluorescence: the intensity pattern above the mirror,
//! micromotion sidebands, motion-averaged scattering, photon counting, scans
//! and lineshape fitting.
//!
//! Rates are photons/s scattered by the ion; `detected` rates are counts/s
//! after the collection efficiency and detector background.

mod bessel;
mod counts;
mod fit;
mod lsq;
mod quadrature;
mod scans;
mod scattering;
mod standing_wave;

pub use bessel::{bessel_j0, bessel_j_orders, bessel_weights, default_order, BesselWeights};
pub use counts::{synthesize_counts, CountSample, MeasurementProtocol};
pub use fit::{fit_micromotion, Estimate, FitParameter, LineshapeFitSpec, MicromotionFit};
pub use quadrature::{arcsine_average, chebyshev_offsets, ChebyshevOptions};
pub use scans::{fit_sinusoid, fringe_scan, lineshape_scan, Abscissa, FringeScan, ScanResult, SinusoidFit};
pub use scattering::{
    fringe_visibility, max_scattering_rate, scattering_rate_micromotion, scattering_rate_point, ScatteringModel,
    ScatteringRate, SpatialAverage, LOW_INTENSITY_LIMIT,
};
pub use standing_wave::{standing_wave_intensity, StandingWaveConfig};
