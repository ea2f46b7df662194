//! Pseudopotential depth and secular frequencies at the trapping point, with
//! a harmonic axial term standing in for the DC electrodes.

use std::f64::consts::PI;
use std::path::Path;

use mirror_trap::electrostatics::ElectrodeSet;
use mirror_trap::trap::{
    find_equilibrium, trap_frequencies, DcConfinement, IonSpecies, PotentialEnergy, RfDrive, SolverOptions, TrapModel,
};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/geometry.toml");
    let trap = TrapModel {
        electrodes: ElectrodeSet::from_file(&geometry)?,
        drive: RfDrive::new(185.0, 2.0 * PI * 42.5e6)?,
        species: IonSpecies::ytterbium_174(),
        dc: DcConfinement::default(),
    };
    let opts = SolverOptions::default();
    let null = trap.find_rf_null(&Point::new(0.0, 0.0, 50e-6), &opts)?.position;
    let total = trap.total_potential(null);
    let ion = find_equilibrium(&total, &null, &opts)?;
    let f = trap_frequencies(&total, trap.species.mass, &ion)?;

    println!("ion at z = {:.3} um", ion.z * 1e6);
    for (i, w) in f.omega.iter().enumerate() {
        let axis = f.axes.column(i);
        println!(
            "mode {i}: 2pi x {:.3} MHz along ({:+.3}, {:+.3}, {:+.3})",
            w / (2.0 * PI * 1e6),
            axis[0],
            axis[1],
            axis[2]
        );
    }

    // depth: pseudopotential barrier straight up from the null
    let pp = trap.pseudopotential();
    let mut barrier: f64 = 0.0;
    for i in 1..=400 {
        let z = null.z + i as f64 * 0.5e-6;
        barrier = barrier.max(pp.energy(&Point::new(0.0, 0.0, z))?);
    }
    println!("vertical barrier {:.1} meV", barrier / 1.602176634e-19 * 1e3);
    Ok(())
}
