use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::mix_seed;

/// Repeated fixed-length photon counting at each scan point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementProtocol {
    /// s
    pub exposure: f64,
    pub repeats: u32,
    pub rng_seed: u64,
}

impl Default for MeasurementProtocol {
    fn default() -> Self {
        MeasurementProtocol {
            exposure: 0.12,
            repeats: 50,
            rng_seed: 0,
        }
    }
}

impl MeasurementProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.exposure > 0.0) || !self.exposure.is_finite() {
            return Err(Error::invalid("exposure", format!("must be > 0, got {}", self.exposure)));
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    pub counts: Vec<u64>,
    /// Mean count rate (counts/s).
    pub mean_rate: f64,
    /// Standard error of `mean_rate`.
    pub stderr_rate: f64,
}

/// Poisson counts for one scan point. The stream depends only on the
/// protocol seed and `point_index`, never on evaluation order.
pub fn synthesize_counts(rate: f64, protocol: &MeasurementProtocol, point_index: u64) -> Result<CountSample> {
    protocol.validate()?;
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::invalid("rate", format!("must be finite and >= 0, got {rate}")));
    }
    let n = protocol.repeats as usize;
    let mean = rate * protocol.exposure;
    let counts: Vec<u64> = if mean == 0.0 {
        vec![0; n]
    } else {
        let dist = Poisson::new(mean).map_err(|e| Error::invalid("rate", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(protocol.rng_seed, point_index));
        (0..n).map(|_| dist.sample(&mut rng) as u64).collect()
    };
    let m = counts.iter().sum::<u64>() as f64 / n as f64;
    let sd_mean = if n > 1 {
        let var = counts.iter().map(|&c| (c as f64 - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        m.sqrt()
    };
    Ok(CountSample {
        counts,
        mean_rate: m / protocol.exposure,
        stderr_rate: sd_mean / protocol.exposure,
    })
}
