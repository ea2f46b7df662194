use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::landscape::PotentialEnergy;
use crate::error::{Error, Result};
use crate::Point;

/// Secular frequencies (rad/s, ascending) and their principal axes (columns).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapFrequencies {
    pub omega: [f64; 3],
    pub axes: Matrix3<f64>,
}

impl TrapFrequencies {
    /// Frequency of the mode whose axis is closest to lab axis `axis` (0 = x, 1 = y, 2 = z).
    pub fn along(&self, axis: usize) -> f64 {
        let best = (0..3)
            .max_by(|&a, &b| {
                self.axes[(axis, a)]
                    .abs()
                    .total_cmp(&self.axes[(axis, b)].abs())
            })
            .unwrap();
        self.omega[best]
    }
}

fn dominant_axis(v: impl Iterator<Item = f64>) -> usize {
    v.enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Eigen-decomposition of the potential-energy Hessian at `p`:
/// `omega_i = sqrt(lambda_i / m)`.
pub fn trap_frequencies(potential: &dyn PotentialEnergy, mass: f64, p: &Point) -> Result<TrapFrequencies> {
    let h = potential.expand(p)?.hessian;
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut omega = [0.0; 3];
    let mut axes = Matrix3::zeros();
    for (slot, &i) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[i];
        let col = eig.eigenvectors.column(i);
        if !(lambda > 0.0) {
            return Err(Error::NotConfining {
                axis: dominant_axis(col.iter().copied()),
                curvature: lambda,
            });
        }
        omega[slot] = (lambda / mass).sqrt();
        axes.set_column(slot, &col);
    }
    Ok(TrapFrequencies { omega, axes })
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;

    use super::*;
    use crate::trap::landscape::HarmonicWell;

    #[test]
    fn injected_harmonic_potential() {
        let k = 3.7e-11;
        let m = 2.9e-25;
        let w = HarmonicWell::isotropic(Point::new(0.0, 0.0, 5e-5), k);
        let f = trap_frequencies(&w, m, &Point::new(0.0, 0.0, 5e-5)).unwrap();
        for om in f.omega {
            assert!((om - (k / m).sqrt()).abs() < 1e-9 * om);
        }
    }

    #[test]
    fn anti_confining_axis_is_named() {
        let w = HarmonicWell {
            center: Point::new(0.0, 0.0, 1e-5),
            stiffness: Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, -0.5)),
        };
        match trap_frequencies(&w, 1.0, &Point::new(0.0, 0.0, 1e-5)) {
            Err(Error::NotConfining { axis, curvature }) => {
                assert_eq!(axis, 2);
                assert_eq!(curvature, -0.5);
            }
            other => panic!("{other:?}"),
        }
    }
}
