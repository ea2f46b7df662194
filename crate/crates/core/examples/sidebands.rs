//! Micromotion sidebands: Bessel weights and the resulting spectrum for a
//! few modulation indices, evaluated at the standing-wave node.

use std::f64::consts::PI;

use mirror_trap::fluorescence::{bessel_weights, default_order, ScatteringModel, StandingWaveConfig};
use mirror_trap::trap::IonSpecies;

fn main() -> mirror_trap::Result<()> {
    let species = IonSpecies::ytterbium_174();
    let rf = 2.0 * PI * 42.5e6;
    let model = ScatteringModel::new(species.clone(), StandingWaveConfig::default(), rf)?;
    let node = model.sw.node_offset;

    for a_z in [5e-9, 20e-9, 60e-9] {
        let beta = species.wavenumber() * a_z;
        let w = bessel_weights(beta, default_order(beta));
        println!("a_z = {:.0} nm, beta = {beta:.3}, sum J_n^2 - 1 = {:.1e}", a_z * 1e9, w.power_sum() - 1.0);
        for n in 0..=3 {
            print!("  J_{n}^2 = {:.4}", w.get(n).powi(2));
        }
        println!();
        let dets: Vec<f64> = (-12..=4).map(|i| 2.0 * PI * 10e6 * i as f64).collect();
        let rates = model.lineshape(node, a_z, &dets)?;
        let peak = rates.iter().map(|r| r.rate).fold(0.0, f64::max);
        for (d, r) in dets.iter().zip(&rates) {
            let bar = "#".repeat((50.0 * r.rate / peak).round() as usize);
            println!("  {:>6.0} MHz {:>10.0}/s {bar}", d / (2.0 * PI * 1e6), r.rate);
        }
    }
    Ok(())
}
