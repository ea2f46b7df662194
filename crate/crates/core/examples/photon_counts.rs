//! Simulated photon counting: repeated Poisson exposures and the scatter of
//! the estimated rate against its reported standard error.

use mirror_trap::fluorescence::{synthesize_counts, MeasurementProtocol};

fn main() -> mirror_trap::Result<()> {
    let protocol = MeasurementProtocol {
        rng_seed: 7,
        ..MeasurementProtocol::default()
    };
    for rate in [10.0, 200.0, 5000.0] {
        let samples: Vec<_> = (0..400)
            .map(|i| synthesize_counts(rate, &protocol, i))
            .collect::<mirror_trap::Result<_>>()?;
        let means: Vec<f64> = samples.iter().map(|s| s.mean_rate).collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let spread = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt();
        let reported = samples.iter().map(|s| s.stderr_rate).sum::<f64>() / samples.len() as f64;
        let expected = (rate / (protocol.exposure * protocol.repeats as f64)).sqrt();
        println!(
            "{rate:>7.0} cps: mean {m:>9.2}, scatter {spread:>7.3}, mean stderr {reported:>7.3}, sqrt(rate/T) {expected:>7.3}"
        );
    }
    Ok(())
}
