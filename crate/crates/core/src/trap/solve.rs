use nalgebra::{Cholesky, Vector3};
use serde::{Deserialize, Serialize};

use super::landscape::{PotentialEnergy, RfField};
use crate::electrostatics::ElectrodeSet;
use crate::error::{Error, Result};
use crate::taylor::Taylor2;
use crate::trap::RfDrive;
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Largest position update per iteration (m).
    pub max_step: f64,
    /// RF null acceptance: |E| per volt of total applied amplitude ((V/m)/V).
    pub null_tolerance: f64,
    /// Equilibrium acceptance: Newton step length (m).
    pub step_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            max_step: 5e-6,
            null_tolerance: 1e-6,
            step_tolerance: 1e-14,
        }
    }
}

/// Located RF null.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfNull {
    pub position: Point,
    /// |E| at the null per volt of applied amplitude ((V/m)/V).
    pub residual: f64,
    pub iterations: usize,
}

pub(crate) struct Minimum {
    pub position: Point,
    pub expansion: Taylor2,
    pub iterations: usize,
}

enum Stop {
    /// Objective value at or below this level.
    Value(f64),
    /// Newton step shorter than this with a positive-definite Hessian.
    Step(f64),
}

fn newton_direction(t: &Taylor2) -> Option<Vector3<f64>> {
    Cholesky::new(t.hessian).map(|c| -c.solve(&t.gradient))
}

fn clamp_step(d: Vector3<f64>, max_step: f64) -> Vector3<f64> {
    let n = d.norm();
    if n > max_step {
        d * (max_step / n)
    } else {
        d
    }
}

/// Backtracking line search with the Armijo condition. Returns the accepted
/// point or `None` when no decrease is found.
fn line_search<F>(f: &F, x: &Point, t: &Taylor2, d: &Vector3<f64>) -> Result<Option<(Point, Taylor2)>>
where
    F: Fn(&Point) -> Result<Taylor2>,
{
    let slope = t.gradient.dot(d);
    if !(slope < 0.0) {
        return Ok(None);
    }
    let mut alpha = 1.0;
    for _ in 0..60 {
        let xn = x + d * alpha;
        if xn.z > 0.0 {
            let tn = f(&xn)?;
            if tn.value <= t.value + 1e-4 * alpha * slope {
                return Ok(Some((xn, tn)));
            }
        }
        alpha *= 0.5;
    }
    Ok(None)
}

/// One sweep of coordinate descent, used when the Hessian is indefinite.
fn coordinate_sweep<F>(f: &F, mut x: Point, mut t: Taylor2, max_step: f64) -> Result<Option<(Point, Taylor2)>>
where
    F: Fn(&Point) -> Result<Taylor2>,
{
    let mut moved = false;
    for i in 0..3 {
        let g = t.gradient[i];
        if g == 0.0 {
            continue;
        }
        let h = t.hessian[(i, i)];
        let step = if h > 0.0 { -g / h } else { -g.signum() * max_step };
        let d = Vector3::ith(i, step.clamp(-max_step, max_step));
        if let Some((xn, tn)) = line_search(f, &x, &t, &d)? {
            x = xn;
            t = tn;
            moved = true;
        }
    }
    Ok(moved.then_some((x, t)))
}

/// Damped Newton minimisation with a coordinate-descent fallback.
fn minimize<F>(f: F, guess: Point, opts: &SolverOptions, stop: Stop, what: &'static str) -> Result<Minimum>
where
    F: Fn(&Point) -> Result<Taylor2>,
{
    if guess.z <= 0.0 {
        return Err(Error::BelowPlane { z: guess.z });
    }
    let mut x = guess;
    let mut t = f(&x)?;
    for it in 0..opts.max_iterations {
        let newton = newton_direction(&t);
        let done = match stop {
            Stop::Value(level) => t.value <= level,
            Stop::Step(tol) => newton.is_some_and(|d| d.norm() <= tol),
        };
        if done {
            return Ok(Minimum {
                position: x,
                expansion: t,
                iterations: it,
            });
        }
        let next = match newton {
            Some(d) => match line_search(&f, &x, &t, &clamp_step(d, opts.max_step))? {
                Some(step) => Some(step),
                None => coordinate_sweep(&f, x, t, opts.max_step)?,
            },
            None => coordinate_sweep(&f, x, t, opts.max_step)?,
        };
        match next {
            Some((xn, tn)) => {
                // no representable progress left
                if xn == x {
                    break;
                }
                x = xn;
                t = tn;
            }
            None => break,
        }
    }
    let residual = match stop {
        Stop::Value(_) => t.value.max(0.0).sqrt(),
        Stop::Step(_) => t.gradient.norm(),
    };
    Err(Error::NonConvergence {
        what,
        iterations: opts.max_iterations,
        residual,
    })
}

/// Locates the point where the RF field vanishes.
///
/// Requires phase-matched sources (tweaker phase 0 or -pi); otherwise the
/// field never vanishes at a fixed point and [`Error::PhaseMismatch`] is returned.
pub fn find_rf_null(
    set: &ElectrodeSet,
    drive: &RfDrive,
    guess: &Point,
    opts: &SolverOptions,
) -> Result<RfNull> {
    drive.validate()?;
    if !drive.is_phase_matched() {
        return Err(Error::PhaseMismatch {
            phase: drive.phase_tweaker,
        });
    }
    let scale = drive.total_amplitude();
    if scale <= 0.0 {
        return Err(Error::invalid("v_main", "all RF amplitudes are zero"));
    }
    let field = RfField::new(set, *drive);
    let norm = 1.0 / (scale * scale);
    let min = minimize(
        |p| Ok(field.magnitude_sq_expansion(p)?.scale(norm)),
        *guess,
        opts,
        Stop::Value(opts.null_tolerance * opts.null_tolerance),
        "RF null search",
    )?;
    Ok(RfNull {
        position: min.position,
        residual: min.expansion.value.max(0.0).sqrt(),
        iterations: min.iterations,
    })
}

/// Local minimum of a potential energy landscape.
pub fn find_equilibrium(
    potential: &dyn PotentialEnergy,
    guess: &Point,
    opts: &SolverOptions,
) -> Result<Point> {
    Ok(minimize(
        |p| potential.expand(p),
        *guess,
        opts,
        Stop::Step(opts.step_tolerance),
        "equilibrium search",
    )?
    .position)
}

/// Minimum of `|E|^2` in the transverse plane through `guess`, without
/// requiring it to reach zero (used for phase-mismatched drives).
///
/// The axial position is left to the static confinement: once the sources are
/// out of phase, `|E|^2` typically curves downward along the rails.
pub(crate) fn minimize_field(
    field: &RfField<'_>,
    guess: &Point,
    opts: &SolverOptions,
) -> Result<Point> {
    let scale = field.drive.total_amplitude();
    let norm = 1.0 / (scale * scale);
    Ok(minimize(
        |p| {
            let mut t = field.magnitude_sq_expansion(p)?.scale(norm);
            // freeze x: zero gradient, unit decoupled curvature
            t.gradient[0] = 0.0;
            for i in 0..3 {
                t.hessian[(0, i)] = 0.0;
                t.hessian[(i, 0)] = 0.0;
            }
            t.hessian[(0, 0)] = 1.0;
            Ok(t)
        },
        *guess,
        opts,
        Stop::Step(opts.step_tolerance),
        "RF field minimisation",
    )?
    .position)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::electrostatics::{ElectrodePatch, ElectrodeRole};
    use crate::trap::landscape::HarmonicWell;

    fn five_wire(half_length: f64) -> ElectrodeSet {
        ElectrodeSet::new(vec![
            ElectrodePatch::new("rf_l", (-half_length, half_length), (-87e-6, -30e-6), ElectrodeRole::MainRf).unwrap(),
            ElectrodePatch::new("rf_r", (-half_length, half_length), (30e-6, 87e-6), ElectrodeRole::MainRf).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn five_wire_null_height() {
        let set = five_wire(3.5e-3);
        let drive = RfDrive::new(185.0, 2.0 * PI * 42.5e6).unwrap();
        let null = find_rf_null(&set, &drive, &Point::new(0.0, 0.0, 40e-6), &SolverOptions::default()).unwrap();
        let analytic = (30e-6f64 * 87e-6).sqrt();
        assert!((null.position.z - analytic).abs() < 0.05e-6, "{:?}", null.position);
        assert!(null.position.y.abs() < 1e-12);
        assert!(null.residual < 1e-6);
    }

    #[test]
    fn rejects_phase_mismatch() {
        let set = five_wire(1e-3);
        let drive = RfDrive::new(185.0, 1e8).unwrap().with_tweakers(1.0, 1.0).with_phase(0.3);
        assert!(matches!(
            find_rf_null(&set, &drive, &Point::new(0.0, 0.0, 5e-5), &SolverOptions::default()),
            Err(Error::PhaseMismatch { .. })
        ));
    }

    #[test]
    fn reports_non_convergence_with_residual() {
        let set = five_wire(1e-3);
        let drive = RfDrive::new(185.0, 1e8).unwrap();
        let opts = SolverOptions {
            max_iterations: 1,
            ..Default::default()
        };
        match find_rf_null(&set, &drive, &Point::new(0.0, 5e-6, 20e-6), &opts) {
            Err(Error::NonConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equilibrium_of_harmonic_well() {
        let w = HarmonicWell::isotropic(Point::new(1e-6, -2e-6, 30e-6), 1e-12);
        let p = find_equilibrium(&w, &Point::new(0.0, 0.0, 20e-6), &SolverOptions::default()).unwrap();
        assert!((p - w.center).norm() < 1e-15);
    }
}
