use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patch::{patch_potential_curvature_xx, patch_potential_difference, ChargePatchState};
use crate::error::{Error, Result};
use crate::numerics::golden_section;
use crate::trap::IonSpecies;
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Single,
    /// Exactly two minima separated by a maximum.
    Bifurcated,
    /// More than two minima: the harmonic-plus-patch model is out of its depth.
    Multiple,
}

/// Patch potential along the axial line through `origin`, per coulomb of
/// patch charge. The potential is linear in the charge, so one profile serves
/// every charge with the same patch shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxialProfile {
    pub origin: Point,
    /// Axial offsets from `origin` (m).
    pub x: Vec<f64>,
    /// `Phi(origin + x) - Phi(origin)` for 1 C (V/C).
    pub dphi_per_coulomb: Vec<f64>,
    pub shape: ChargePatchState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxialMinima {
    /// C
    pub charge: f64,
    /// Refined minimum positions relative to the origin (m), ascending.
    pub minima: Vec<f64>,
    pub classification: Classification,
    pub warnings: Vec<String>,
}

/// Charges bracketing the grid classification change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBracket {
    /// Largest charge found single (C).
    pub below: f64,
    /// Smallest charge found bifurcated (C).
    pub above: f64,
}

impl ThresholdBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.below + self.above)
    }

    pub fn width(&self) -> f64 {
        self.above - self.below
    }
}

fn unit_shape(state: &ChargePatchState) -> Result<ChargePatchState> {
    state.with_charge(1.0)
}

fn energy(species: &IonSpecies, omega_axial: f64, charge: f64, x: f64, dphi_per_c: f64) -> f64 {
    0.5 * species.mass * omega_axial * omega_axial * x * x + species.charge * charge * dphi_per_c
}

impl AxialProfile {
    pub fn compute(state: &ChargePatchState, origin: &Point, x_range: (f64, f64), spacing: f64) -> Result<Self> {
        let (x0, x1) = x_range;
        if !(x1 > x0) || !(spacing > 0.0) {
            return Err(Error::invalid("x_range", "need x_min < x_max and spacing > 0"));
        }
        let n = ((x1 - x0) / spacing).round() as usize + 1;
        if n < 5 {
            return Err(Error::invalid("x_range", "fewer than 5 grid points"));
        }
        let shape = unit_shape(state)?;
        let x: Vec<f64> = (0..n).map(|i| x0 + (x1 - x0) * i as f64 / (n - 1) as f64).collect();
        let dphi_per_coulomb = x
            .par_iter()
            .map(|&dx| patch_potential_difference(&shape, origin, dx))
            .collect::<Result<Vec<_>>>()?;
        Ok(AxialProfile {
            origin: *origin,
            x,
            dphi_per_coulomb,
            shape,
        })
    }

    /// Total axial energy on the grid (J).
    pub fn energies(&self, charge: f64, species: &IonSpecies, omega_axial: f64) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.dphi_per_coulomb)
            .map(|(&x, &p)| energy(species, omega_axial, charge, x, p))
            .collect()
    }

    /// Indices of interior grid minima.
    pub fn grid_minima(&self, charge: f64, species: &IonSpecies, omega_axial: f64) -> Result<Vec<usize>> {
        let u = self.energies(charge, species, omega_axial);
        let n = u.len();
        if u[0] < u[1] || u[n - 1] < u[n - 2] {
            let edge = if u[0] < u[1] { self.x[0] } else { self.x[n - 1] };
            return Err(Error::SearchRegionExhausted { distance: edge.abs() });
        }
        Ok((1..n - 1).filter(|&i| u[i] < u[i - 1] && u[i] <= u[i + 1]).collect())
    }

    pub fn classify(&self, charge: f64, species: &IonSpecies, omega_axial: f64) -> Result<Classification> {
        let idx = self.grid_minima(charge, species, omega_axial)?;
        Ok(classify_indices(&idx, &self.energies(charge, species, omega_axial)))
    }
}

fn classify_indices(idx: &[usize], u: &[f64]) -> Classification {
    match idx.len() {
        0 | 1 => Classification::Single,
        2 => {
            let mid = (idx[0] + idx[1]) / 2;
            let peak = u[idx[0]..=idx[1]].iter().copied().fold(f64::MIN, f64::max);
            if u[mid] > u[idx[0]] && u[mid] > u[idx[1]] && peak > u[idx[0]] {
                Classification::Bifurcated
            } else {
                Classification::Multiple
            }
        }
        _ => Classification::Multiple,
    }
}

/// Grid scan of `U(x) = m omega_axial^2 x^2 / 2 + q Phi_patch(x)` with
/// golden-section refinement of each bracketed minimum.
pub fn minima_on_profile(
    profile: &AxialProfile,
    state: &ChargePatchState,
    species: &IonSpecies,
    omega_axial: f64,
) -> Result<AxialMinima> {
    if !(omega_axial > 0.0) {
        return Err(Error::invalid("omega_axial", format!("must be > 0, got {omega_axial}")));
    }
    let q = state.total_charge;
    let idx = profile.grid_minima(q, species, omega_axial)?;
    let u = profile.energies(q, species, omega_axial);
    let classification = classify_indices(&idx, &u);
    let mut warnings = Vec::new();
    if classification == Classification::Multiple {
        warnings.push(format!(
            "{} axial minima found; the single-patch harmonic model is not valid here",
            idx.len()
        ));
    }
    let shape = profile.shape;
    let minima = idx
        .iter()
        .map(|&i| {
            let f = |x: f64| {
                let d = patch_potential_difference(&shape, &profile.origin, x).unwrap_or(f64::NAN);
                energy(species, omega_axial, q, x, d)
            };
            golden_section(f, profile.x[i - 1], profile.x[i + 1], 1e-12)
        })
        .collect();
    Ok(AxialMinima {
        charge: q,
        minima,
        classification,
        warnings,
    })
}

pub fn axial_potential_minima(
    state: &ChargePatchState,
    species: &IonSpecies,
    omega_axial: f64,
    origin: &Point,
    x_range: (f64, f64),
    spacing: f64,
) -> Result<AxialMinima> {
    let profile = AxialProfile::compute(state, origin, x_range, spacing)?;
    minima_on_profile(&profile, state, species, omega_axial)
}

/// Charge at which the patch curvature cancels the axial confinement,
/// `q Q Phi_xx(0) = -m omega_axial^2`. `None` if the patch curvature is not
/// negative at the origin.
pub fn curvature_threshold(
    state: &ChargePatchState,
    species: &IonSpecies,
    omega_axial: f64,
    origin: &Point,
) -> Result<Option<f64>> {
    let per_c = patch_potential_curvature_xx(&unit_shape(state)?, origin)?;
    let k = species.charge * per_c;
    Ok((k < 0.0).then(|| -species.mass * omega_axial * omega_axial / k))
}

/// Bisection on the grid classification between zero charge and a bifurcated
/// charge, found by doubling from `start`.
///
/// Minima that have left the window count as split, which assumes the
/// uncharged well sits inside it.
pub fn grid_threshold(
    profile: &AxialProfile,
    species: &IonSpecies,
    omega_axial: f64,
    start: f64,
    rel_tol: f64,
) -> Result<ThresholdBracket> {
    let bifurcated = |q: f64| -> Result<bool> {
        match profile.classify(q, species, omega_axial) {
            Ok(c) => Ok(c == Classification::Bifurcated),
            Err(Error::SearchRegionExhausted { .. }) if q > 0.0 => Ok(true),
            Err(e) => Err(e),
        }
    };
    if bifurcated(0.0)? {
        return Err(Error::invalid("bifurcation", "already bifurcated without charge"));
    }
    let mut below = 0.0;
    let mut above = start.max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    while !bifurcated(above)? {
        below = above;
        above *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::NonConvergence {
                what: "bifurcation bracket",
                iterations: doublings,
                residual: above,
            });
        }
    }
    while above - below > rel_tol * above {
        let mid = 0.5 * (below + above);
        if bifurcated(mid)? {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(ThresholdBracket { below, above })
}
