use std::f64::consts::PI;

use proptest::prelude::*;

use mirror_trap::charging::{accumulate_charge, patch_charge_field_z, ChargePatchState, ChargingModelConfig};
use mirror_trap::electrostatics::{ElectrodePatch, ElectrodeRole};
use mirror_trap::fluorescence::{
    bessel_j_orders, bessel_weights, default_order, standing_wave_intensity, synthesize_counts, MeasurementProtocol,
    ScatteringModel, StandingWaveConfig,
};
use mirror_trap::trap::IonSpecies;
use mirror_trap::Point;

/// Power series, fine for |x| up to about 20 in double precision.
fn j_series(n: usize, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for m in 1..120 {
        term *= -(x / 2.0) * (x / 2.0) / (m as f64 * (m + n) as f64);
        sum += term;
    }
    sum
}

/// Poisson kernel for a grounded plane, integrated by nested quadrature.
fn rectangle_potential_by_quadrature(x: (f64, f64), y: (f64, f64), p: &Point) -> f64 {
    let inner = |xs: f64| {
        quadrature::double_exponential::integrate(
            |ys| {
                let r2 = (xs - p.x).powi(2) + (ys - p.y).powi(2) + p.z * p.z;
                p.z / (r2 * r2.sqrt())
            },
            y.0,
            y.1,
            1e-12,
        )
        .integral
    };
    quadrature::double_exponential::integrate(inner, x.0, x.1, 1e-11).integral / (2.0 * PI)
}

fn patch(x: (f64, f64), y: (f64, f64)) -> ElectrodePatch {
    ElectrodePatch::new("p", x, y, ElectrodeRole::Dc(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_orders_match_power_series(x in 0.0f64..12.0) {
        let j = bessel_j_orders(x, 8);
        for (n, &v) in j.iter().enumerate() {
            prop_assert!((v - j_series(n, x)).abs() < 1e-11, "J_{n}({x}) = {v}");
        }
    }

    #[test]
    fn sideband_weights_sum_to_one(beta in 0.0f64..25.0) {
        let w = bessel_weights(beta, default_order(beta));
        prop_assert!((w.power_sum() - 1.0).abs() < 1e-10);
        for n in 1..=w.n_max() as i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((w.get(-n) - sign * w.get(n)).abs() <= 1e-15);
        }
    }

    #[test]
    fn rectangle_potential_matches_integrated_kernel(
        x0 in -80.0f64..40.0, wx in 5.0f64..120.0,
        y0 in -80.0f64..40.0, wy in 5.0f64..120.0,
        px in -60.0f64..60.0, py in -60.0f64..60.0, pz in 10.0f64..120.0,
    ) {
        let um = 1e-6;
        let (x, y) = ((x0 * um, (x0 + wx) * um), (y0 * um, (y0 + wy) * um));
        let p = Point::new(px * um, py * um, pz * um);
        let closed = patch(x, y).potential(1.0, &p).unwrap();
        let numeric = rectangle_potential_by_quadrature(x, y, &p);
        prop_assert!((closed - numeric).abs() < 1e-9, "{closed} vs {numeric}");
        prop_assert!((0.0..1.0).contains(&closed));
    }

    #[test]
    fn potential_is_linear_in_voltage(v in -300.0f64..300.0, pz in 5.0f64..200.0) {
        let e = patch((-40e-6, 60e-6), (-30e-6, 20e-6));
        let p = Point::new(3e-6, -7e-6, pz * 1e-6);
        let unit = e.potential(1.0, &p).unwrap();
        prop_assert!((e.potential(v, &p).unwrap() - v * unit).abs() <= 1e-12 * v.abs().max(1.0));
    }

    #[test]
    fn field_is_minus_gradient(px in -50.0f64..50.0, py in -50.0f64..50.0, pz in 10.0f64..100.0) {
        let e = patch((-30e-6, 50e-6), (-20e-6, 40e-6));
        let p = Point::new(px * 1e-6, py * 1e-6, pz * 1e-6);
        let f = e.field(1.0, &p).unwrap();
        let h = 1e-9;
        for axis in 0..3 {
            let mut a = p;
            let mut b = p;
            a[axis] += h;
            b[axis] -= h;
            let grad = (e.potential(1.0, &a).unwrap() - e.potential(1.0, &b).unwrap()) / (2.0 * h);
            prop_assert!((f[axis] + grad).abs() < 1e-5 * f.norm().max(1e3), "axis {axis}: {} vs {}", f[axis], -grad);
        }
    }

    #[test]
    fn standing_wave_repeats_every_half_wavelength(z in 0.0f64..100e-6, m in -5i32..5) {
        let yb = IonSpecies::ytterbium_174();
        let sw = StandingWaveConfig::default();
        let half = PI / yb.wavenumber();
        let a = standing_wave_intensity(&sw, &yb, z);
        let b = standing_wave_intensity(&sw, &yb, z + f64::from(m) * half);
        prop_assert!((a - b).abs() <= 1e-6 * 4.0 * sw.i_peak);
        prop_assert!((0.0..=4.0 * sw.i_peak).contains(&a));
    }

    #[test]
    fn scattering_rate_is_nonnegative_and_bounded(
        u in 0.0f64..200e-9, a in 0.0f64..80e-9, det_mhz in -150.0f64..80.0,
    ) {
        let yb = IonSpecies::ytterbium_174();
        let sw = StandingWaveConfig::default();
        let model = ScatteringModel::new(yb.clone(), sw.clone(), 2.0 * PI * 42.5e6).unwrap();
        let r = model.micromotion_at(sw.node_offset + u, a, 2.0 * PI * det_mhz * 1e6).unwrap();
        // resonant, motionless, at an antinode
        let ceiling = 0.5 * yb.linewidth / yb.saturation_intensity() * 4.0 * sw.i_peak;
        prop_assert!(r.rate >= 0.0 && r.rate <= ceiling * (1.0 + 1e-12), "{} > {ceiling}", r.rate);
    }

    #[test]
    fn counts_depend_only_on_seed_and_index(rate in 0.0f64..5e4, seed in any::<u64>(), idx in 0u64..1000) {
        let protocol = MeasurementProtocol { exposure: 0.05, repeats: 20, rng_seed: seed };
        let a = synthesize_counts(rate, &protocol, idx).unwrap();
        let b = synthesize_counts(rate, &protocol, idx).unwrap();
        prop_assert_eq!(&a, &b);
        let total: u64 = a.counts.iter().sum();
        prop_assert!((a.mean_rate - total as f64 / (20.0 * 0.05)).abs() <= 1e-9 * a.mean_rate.max(1.0));
    }

    #[test]
    fn charge_accumulates_additively(dt1 in 0.01f64..100.0, dt2 in 0.01f64..100.0, exponent in 0.5f64..2.5) {
        let law = ChargingModelConfig { intensity_exponent: exponent, ..ChargingModelConfig::default() };
        let sw = StandingWaveConfig::default().with_intensity(600.0);
        let start = ChargePatchState::from_waist(0.0, sw.waist, [0.0, 0.0]).unwrap();
        let two = accumulate_charge(&law, &sw, dt2, &accumulate_charge(&law, &sw, dt1, &start).unwrap()).unwrap();
        let one = accumulate_charge(&law, &sw, dt1 + dt2, &start).unwrap();
        prop_assert!(two.total_charge >= start.total_charge);
        prop_assert!((two.total_charge - one.total_charge).abs() <= 1e-12 * one.total_charge.abs());
    }

    #[test]
    fn patch_field_is_linear_in_charge(q_e in 0.0f64..5000.0, h in 20.0f64..100.0) {
        let e = 1.602176634e-19;
        let unit = ChargePatchState::from_waist(e, 5e-6, [0.0, 0.0]).unwrap();
        let p = Point::new(0.0, 0.0, h * 1e-6);
        let f1 = patch_charge_field_z(&unit, &p).unwrap();
        let fq = patch_charge_field_z(&unit.with_charge(q_e * e).unwrap(), &p).unwrap();
        prop_assert!((fq - q_e * f1).abs() <= 1e-10 * (q_e * f1).abs().max(1e-30));
    }
}
