//! Fringe scan: the tweaker lifts the ion through the standing wave, and the
//! fluorescence period in volts converts to the node spacing.

use std::f64::consts::PI;
use std::path::Path;

use mirror_trap::electrostatics::ElectrodeSet;
use mirror_trap::fluorescence::{fringe_scan, ScatteringModel, StandingWaveConfig};
use mirror_trap::trap::{DcConfinement, IonSpecies, RfDrive, SolverOptions, TrapModel};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/geometry.toml");
    let trap = TrapModel {
        electrodes: ElectrodeSet::from_file(&geometry)?,
        drive: RfDrive::new(185.0, 2.0 * PI * 42.5e6)?,
        species: IonSpecies::ytterbium_174(),
        dc: DcConfinement::default(),
    };
    let model = ScatteringModel::new(trap.species.clone(), StandingWaveConfig::default(), trap.drive.omega)?;
    let voltages: Vec<f64> = (0..=160).map(|i| -20.0 + 0.25 * i as f64).collect();
    let scan = fringe_scan(&trap, &model, &voltages, None, &Point::new(0.0, 0.0, 50e-6), &SolverOptions::default())?;

    for i in (0..scan.scan.len()).step_by(8) {
        let r = scan.scan.rates[i];
        println!(
            "{:>7.2} V  z = {:.4} um  {:>9.0} cps {}",
            voltages[i],
            scan.ion_heights[i] * 1e6,
            r,
            "#".repeat((r / 1e4).round() as usize)
        );
    }
    let fit = scan.sinusoid.expect("fringes present");
    println!("ion slope       {:.3} nm/V", scan.ion_slope * 1e9);
    println!("voltage period  {:.4} +/- {:.4} V", fit.period, fit.period_sigma);
    println!("spatial period  {:.2} nm (half wavelength {:.2} nm)", scan.spatial_period.unwrap() * 1e9, trap.species.wavelength * 0.5e9);
    Ok(())
}
