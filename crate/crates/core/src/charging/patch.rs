use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::Vector3;
use quadrature::double_exponential::integrate;
use serde::{Deserialize, Serialize};

use crate::constants::coulomb_constant;
use crate::error::{Error, Result};
use crate::Point;

/// Positive surface charge with a Gaussian profile on the mirror plane,
/// `sigma(r) = Q / (pi s^2) exp(-r^2 / s^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargePatchState {
    /// C
    pub total_charge: f64,
    /// Gaussian radius `s` (m).
    pub sigma_r: f64,
    /// Patch centre on the plane (m).
    pub center: [f64; 2],
}

/// Radial cutoff in units of `sigma_r`; the density there is 5e-19 of peak.
const U_MAX: f64 = 6.5;
const INNER_TOL: f64 = 1e-13;
/// Largest accepted quadrature error estimate on the normalised integrals.
const ACCEPT: f64 = 1e-9;

impl ChargePatchState {
    pub fn new(total_charge: f64, sigma_r: f64, center: [f64; 2]) -> Result<Self> {
        if !(total_charge >= 0.0) || !total_charge.is_finite() {
            return Err(Error::invalid("total_charge", format!("must be >= 0, got {total_charge}")));
        }
        if !(sigma_r > 0.0) || !sigma_r.is_finite() {
            return Err(Error::invalid("sigma_r", format!("must be > 0, got {sigma_r}")));
        }
        Ok(ChargePatchState {
            total_charge,
            sigma_r,
            center,
        })
    }

    /// Patch following a beam of waist `w`: `sigma_r = w / sqrt(2)`, so the
    /// density follows the intensity profile `exp(-2 r^2 / w^2)`.
    pub fn from_waist(total_charge: f64, waist: f64, center: [f64; 2]) -> Result<Self> {
        Self::new(total_charge, waist / 2f64.sqrt(), center)
    }

    pub fn with_charge(&self, total_charge: f64) -> Result<Self> {
        Self::new(total_charge, self.sigma_r, self.center)
    }

    /// C/m^2
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let s2 = self.sigma_r * self.sigma_r;
        let r2 = (x - self.center[0]).powi(2) + (y - self.center[1]).powi(2);
        self.total_charge / (PI * s2) * (-r2 / s2).exp()
    }

    /// `(Q / pi) int int e^{-u^2} u K(x', y') du dtheta` over the patch in
    /// polar coordinates `(u s, theta)` about its centre.
    fn integrate_kernel<K: Fn(f64, f64) -> f64>(&self, kernel: K, what: &'static str) -> Result<f64> {
        let worst = Cell::new(0.0f64);
        let s = self.sigma_r;
        let [cx, cy] = self.center;
        let outer = integrate(
            |u| {
                let inner = integrate(
                    |theta| kernel(cx + s * u * theta.cos(), cy + s * u * theta.sin()),
                    0.0,
                    2.0 * PI,
                    INNER_TOL,
                );
                worst.set(worst.get().max(inner.error_estimate));
                (-u * u).exp() * u * inner.integral
            },
            0.0,
            U_MAX,
            INNER_TOL,
        );
        let err = outer.error_estimate.max(worst.get());
        if !(err <= ACCEPT) || !outer.integral.is_finite() {
            return Err(Error::Quadrature { what, residual: err });
        }
        Ok(outer.integral / PI)
    }

    fn check(&self, p: &Point) -> Result<f64> {
        if p.z <= 0.0 {
            return Err(Error::BelowPlane { z: p.z });
        }
        let dx = p.x - self.center[0];
        let dy = p.y - self.center[1];
        Ok((dx * dx + dy * dy + p.z * p.z).sqrt())
    }
}

fn separation(p: &Point, x: f64, y: f64) -> (f64, f64, f64, f64) {
    let (dx, dy, dz) = (p.x - x, p.y - y, p.z);
    (dx, dy, dz, (dx * dx + dy * dy + dz * dz).sqrt())
}

/// Electric field (V/m) of the patch at `p`; no screening by nearby conductors.
pub fn patch_charge_field(state: &ChargePatchState, p: &Point) -> Result<Vector3<f64>> {
    let d = state.check(p)?;
    if state.total_charge == 0.0 {
        return Ok(Vector3::zeros());
    }
    let pref = coulomb_constant() * state.total_charge / (d * d);
    let mut e = Vector3::zeros();
    for axis in 0..3 {
        // integrand scaled by d^2 so it is O(1)
        e[axis] = pref
            * state.integrate_kernel(
                |x, y| {
                    let (dx, dy, dz, r) = separation(p, x, y);
                    [dx, dy, dz][axis] * d * d / (r * r * r)
                },
                "patch field",
            )?;
    }
    Ok(e)
}

/// Vertical component of [`patch_charge_field`].
pub fn patch_charge_field_z(state: &ChargePatchState, p: &Point) -> Result<f64> {
    let d = state.check(p)?;
    if state.total_charge == 0.0 {
        return Ok(0.0);
    }
    let pref = coulomb_constant() * state.total_charge / (d * d);
    Ok(pref
        * state.integrate_kernel(
            |x, y| {
                let (_, _, dz, r) = separation(p, x, y);
                dz * d * d / (r * r * r)
            },
            "patch field",
        )?)
}

/// Electrostatic potential (V) of the patch, zero at infinity.
pub fn patch_charge_potential(state: &ChargePatchState, p: &Point) -> Result<f64> {
    let d = state.check(p)?;
    if state.total_charge == 0.0 {
        return Ok(0.0);
    }
    let pref = coulomb_constant() * state.total_charge / d;
    Ok(pref * state.integrate_kernel(|x, y| d / separation(p, x, y).3, "patch potential")?)
}

/// `Phi(p + dx x_hat) - Phi(p)` without cancellation between the two potentials.
pub fn patch_potential_difference(state: &ChargePatchState, p: &Point, dx: f64) -> Result<f64> {
    let d = state.check(p)?;
    if state.total_charge == 0.0 || dx == 0.0 {
        return Ok(0.0);
    }
    let pref = coulomb_constant() * state.total_charge * dx.abs() / (d * d);
    let value = state.integrate_kernel(
        |x, y| {
            let (ax, _, _, d0) = separation(p, x, y);
            let d1 = ((ax + dx).powi(2) + (p.y - y).powi(2) + p.z * p.z).sqrt();
            // 1/d1 - 1/d0 with d0^2 - d1^2 = -(2 ax dx + dx^2)
            -(2.0 * ax * dx + dx * dx) / (d0 * d1 * (d0 + d1)) * d * d / dx.abs()
        },
        "patch potential difference",
    )?;
    Ok(pref * value)
}

/// `d^2 Phi / dx^2` (V/m^2) at `p`.
pub fn patch_potential_curvature_xx(state: &ChargePatchState, p: &Point) -> Result<f64> {
    let d = state.check(p)?;
    if state.total_charge == 0.0 {
        return Ok(0.0);
    }
    let pref = coulomb_constant() * state.total_charge / d.powi(3);
    Ok(pref
        * state.integrate_kernel(
            |x, y| {
                let (ax, _, _, r) = separation(p, x, y);
                (3.0 * ax * ax - r * r) / r.powi(5) * d.powi(3)
            },
            "patch curvature",
        )?)
}

/// Charge recovered by integrating the surface density over the plane.
pub fn integrated_charge(state: &ChargePatchState) -> Result<f64> {
    if state.total_charge == 0.0 {
        return Ok(0.0);
    }
    Ok(state.total_charge * state.integrate_kernel(|_, _| 1.0, "patch charge")?)
}
