//! Moves the RF null vertically with the tweaker electrodes and fits the
//! height against tweaker voltage.

use std::f64::consts::PI;
use std::path::Path;

use mirror_trap::electrostatics::ElectrodeSet;
use mirror_trap::trap::{tweaker_height_curve, RfDrive, SolverOptions};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/geometry.toml");
    let set = ElectrodeSet::from_file(&geometry)?;
    let drive = RfDrive::new(185.0, 2.0 * PI * 42.5e6)?;
    let voltages: Vec<f64> = (-10..=10).map(f64::from).collect();
    let curve = tweaker_height_curve(&set, &drive, &voltages, &Point::new(0.0, 0.0, 50e-6), &SolverOptions::default())?;

    for p in curve.points.iter().step_by(5) {
        println!("{:>6.1} V  ->  z = {:.4} um", p.voltage, p.position.z * 1e6);
    }
    println!("slope          {:.2} nm/V", curve.slope * 1e9);
    println!("height change  {:.1} nm over 20 V", curve.range() * 1e9);
    println!("worst residual {:.2e} of the change", curve.max_residual / curve.range());
    Ok(())
}
