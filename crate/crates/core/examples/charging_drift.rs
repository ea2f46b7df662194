//! Vertical drift of the ion while the probe charges the mirror below it,
//! for a few charging-law exponents.

use std::f64::consts::PI;

use mirror_trap::charging::{exposure_simulation, ChargePatchState, ChargingModelConfig, ExposureSettings};
use mirror_trap::fluorescence::StandingWaveConfig;
use mirror_trap::trap::IonSpecies;
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let species = IonSpecies::ytterbium_174();
    let ion = Point::new(0.0, 0.0, 51.07e-6);
    let omega_z = 2.0 * PI * 4.48e6;
    let settings = ExposureSettings {
        duration: 600.0,
        ..ExposureSettings::default()
    };
    for (intensity, exponent) in [(400.0, 1.0), (800.0, 1.0), (800.0, 2.0)] {
        let sw = StandingWaveConfig::default().with_intensity(intensity);
        let charging = ChargingModelConfig {
            intensity_exponent: exponent,
            ..ChargingModelConfig::default()
        };
        let patch = ChargePatchState::from_waist(0.0, sw.waist, [ion.x, ion.y])?;
        let traj = exposure_simulation(&charging, &sw, &patch, &species, &ion, omega_z, &settings)?;
        print!("I = {:>4.0} mW/cm2, exponent {exponent}:", intensity / 10.0);
        for p in traj.points.iter().step_by(750) {
            print!("  {:>4.0} s {:>7.2} nm", p.t, p.z_displacement * 1e9);
        }
        println!("   (identity check {:.2} of rounding bound)", traj.max_identity_violation);
    }
    Ok(())
}
