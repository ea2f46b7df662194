//! Synthetic noisy lineshapes at the node and the micromotion amplitude
//! recovered from each by least squares.

use std::f64::consts::PI;

use mirror_trap::fluorescence::{
    fit_micromotion, lineshape_scan, LineshapeFitSpec, MeasurementProtocol, ScatteringModel, StandingWaveConfig,
};
use mirror_trap::trap::IonSpecies;

fn main() -> mirror_trap::Result<()> {
    let model = ScatteringModel::new(IonSpecies::ytterbium_174(), StandingWaveConfig::default(), 2.0 * PI * 42.5e6)?;
    let dets: Vec<f64> = (-100..=60).map(|f| 2.0 * PI * 1e6 * f as f64).collect();
    let spec = LineshapeFitSpec::from_model(&model);

    for a_z in [0.0, 10e-9, 20e-9, 40e-9] {
        for seed in 0..3 {
            let protocol = MeasurementProtocol {
                rng_seed: seed,
                ..MeasurementProtocol::default()
            };
            let data = lineshape_scan(&model, &dets, a_z, 0.0, Some(&protocol))?;
            let fit = fit_micromotion(&data, &model, &spec)?;
            let found = match (fit.a_z_upper_bound, fit.a_z.sigma) {
                (Some(b), _) => format!("< {:.2} nm", b * 1e9),
                (None, Some(s)) => format!("{:.3} +/- {:.3} nm", fit.a_z.value.abs() * 1e9, s * 1e9),
                (None, None) => format!("{:.3} nm", fit.a_z.value.abs() * 1e9),
            };
            println!(
                "true {:>4.0} nm  seed {seed}: {found:<22} chi2/dof {:.2}",
                a_z * 1e9,
                fit.reduced_chi_square
            );
        }
    }
    Ok(())
}
