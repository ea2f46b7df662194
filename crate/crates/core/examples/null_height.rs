//! RF null of two long rails, compared with the infinite-rail result
//! `h = sqrt(a b)` for rails spanning |y| in [a, b].

use std::f64::consts::PI;

use mirror_trap::electrostatics::{ElectrodePatch, ElectrodeRole, ElectrodeSet};
use mirror_trap::trap::{find_rf_null, RfDrive, SolverOptions};
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let (inner, outer) = (30e-6, 87e-6);
    let drive = RfDrive::new(185.0, 2.0 * PI * 42.5e6)?;
    println!("{:>14} {:>14} {:>12}", "rail length", "null z (um)", "rel. error");
    for half_length in [0.2e-3, 0.5e-3, 1e-3, 3.5e-3, 10e-3] {
        let set = ElectrodeSet::new(vec![
            ElectrodePatch::new("rf_left", (-half_length, half_length), (-outer, -inner), ElectrodeRole::MainRf)?,
            ElectrodePatch::new("rf_right", (-half_length, half_length), (inner, outer), ElectrodeRole::MainRf)?,
        ])?;
        let null = find_rf_null(&set, &drive, &Point::new(0.0, 0.0, 40e-6), &SolverOptions::default())?;
        let analytic = (inner * outer).sqrt();
        println!(
            "{:>11.1} mm {:>14.4} {:>12.2e}",
            2e3 * half_length,
            null.position.z * 1e6,
            (null.position.z - analytic) / analytic
        );
    }
    println!("infinite rails: {:.4} um", (inner * outer).sqrt() * 1e6);
    Ok(())
}
