//! Tweaker drive chain: DDS amplitude code to electrode voltage, the monitor
//! reading, and the null height that voltage produces.

use std::f64::consts::PI;
use std::path::Path;

use mirror_trap::electrostatics::ElectrodeSet;
use mirror_trap::trap::{find_rf_null, AmplifierCalibration, RfDrive, SolverOptions};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/geometry.toml");
    let set = ElectrodeSet::from_file(&geometry)?;
    let cal = AmplifierCalibration::default();
    // the monitor reads about 10% high from stray capacitance
    let base = RfDrive {
        tweaker_scale: 0.9,
        ..RfDrive::new(185.0, 2.0 * PI * 42.5e6)?
    };

    println!("{:>6} {:>8} {:>10} {:>12} {:>10}", "code", "att dB", "V_tweak", "monitor (mV)", "z (um)");
    for (code, att) in [(0, 0.0), (100, 0.0), (300, 0.0), (300, 6.0), (700, 0.0), (1023, 0.0)] {
        let v = cal.dds_to_voltage(code, att)?;
        let null = find_rf_null(&set, &base.with_signed_tweaker(v), &Point::new(0.0, 0.0, 50e-6), &SolverOptions::default())?;
        println!(
            "{code:>6} {att:>8.1} {v:>10.3} {:>12.2} {:>10.4}",
            cal.pickoff_reading(v) * 1e3,
            null.position.z * 1e6
        );
    }
    Ok(())
}
