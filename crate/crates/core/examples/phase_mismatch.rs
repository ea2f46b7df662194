//! Residual micromotion when the tweaker drive is not in phase with the main
//! RF: the field no longer vanishes anywhere, so some motion always remains.

use std::f64::consts::PI;
use std::path::Path;

use mirror_trap::electrostatics::ElectrodeSet;
use mirror_trap::trap::{phase_mismatch_micromotion, IonSpecies, RfDrive, SolverOptions};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/geometry.toml");
    let set = ElectrodeSet::from_file(&geometry)?;
    let species = IonSpecies::ytterbium_174();
    let base = RfDrive::new(185.0, 2.0 * PI * 42.5e6)?.with_tweakers(10.0, 10.0);
    let guess = Point::new(0.0, 0.0, 51e-6);

    println!("{:>10} {:>12} {:>14} {:>10}", "phase (deg)", "z (um)", "|E| (V/m)", "a_z (nm)");
    for deg in [0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
        let drive = base.with_phase(f64::to_radians(deg));
        let m = phase_mismatch_micromotion(&set, &drive, &species, &guess, 20e-6, &SolverOptions::default())?;
        println!(
            "{deg:>10.1} {:>12.4} {:>14.3} {:>10.3}",
            m.position.z * 1e6,
            m.field,
            m.micromotion.amplitude * 1e9
        );
    }
    Ok(())
}
