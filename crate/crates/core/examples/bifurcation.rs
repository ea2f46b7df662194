//! Splitting of the axial well by a charged patch: grid classification for a
//! range of charges and the threshold from the curvature at the centre.

use std::f64::consts::PI;

use mirror_trap::charging::{curvature_threshold, grid_threshold, minima_on_profile, AxialProfile, ChargePatchState};
use mirror_trap::constants::elementary_charge;
use mirror_trap::trap::IonSpecies;
use mirror_trap::Point;

fn main() -> mirror_trap::Result<()> {
    let species = IonSpecies::ytterbium_174();
    let omega_axial = 2.0 * PI * 0.5e6;
    let origin = Point::new(0.0, 0.0, 51.07e-6);
    let e = elementary_charge();
    let shape = ChargePatchState::from_waist(e, 5e-6, [0.0, 0.0])?;
    let profile = AxialProfile::compute(&shape, &origin, (-40e-6, 40e-6), 20e-9)?;

    let q_star = curvature_threshold(&shape, &species, omega_axial, &origin)?.expect("patch curvature is negative");
    println!("curvature threshold {:.1} e", q_star / e);
    for factor in [0.5, 0.9, 0.99, 1.01, 1.1, 1.5] {
        let state = shape.with_charge(factor * q_star)?;
        let m = minima_on_profile(&profile, &state, &species, omega_axial)?;
        let xs: Vec<String> = m.minima.iter().map(|x| format!("{:+.3} um", x * 1e6)).collect();
        println!("{:>5.2} Q*: {:?} [{}]", factor, m.classification, xs.join(", "));
    }
    let bracket = grid_threshold(&profile, &species, omega_axial, 0.25 * q_star, 1e-8)?;
    println!(
        "grid threshold {:.3} e (bracket width {:.1e} e)",
        bracket.midpoint() / e,
        bracket.width() / e
    );
    Ok(())
}
