//! Truncated multivariate Taylor expansions in the three spatial coordinates.
//!
//! [`Jet3`] carries value, gradient, Hessian and third-derivative tensor and is
//! used to differentiate the closed-form electrode potentials exactly. [`Taylor2`]
//! keeps value, gradient and Hessian and is what energy landscapes hand to the
//! solvers.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: [f64; 3],
    pub d2: [[f64; 3]; 3],
    pub d3: [[[f64; 3]; 3]; 3],
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 {
        v: 0.0,
        d1: [0.0; 3],
        d2: [[0.0; 3]; 3],
        d3: [[[0.0; 3]; 3]; 3],
    };

    pub fn constant(v: f64) -> Self {
        Jet3 { v, ..Self::ZERO }
    }

    /// Affine function `v + g . (p - p0)`.
    pub fn linear(v: f64, d1: [f64; 3]) -> Self {
        Jet3 {
            v,
            d1,
            ..Self::ZERO
        }
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.v *= s;
        for i in 0..3 {
            self.d1[i] *= s;
            for j in 0..3 {
                self.d2[i][j] *= s;
                for k in 0..3 {
                    self.d3[i][j][k] *= s;
                }
            }
        }
        self
    }

    /// `h(self)` given `h` and its first three derivatives evaluated at `self.v`.
    pub fn compose(&self, h0: f64, h1: f64, h2: f64, h3: f64) -> Self {
        let a = self;
        let mut out = Jet3::constant(h0);
        for i in 0..3 {
            out.d1[i] = h1 * a.d1[i];
            for j in 0..3 {
                out.d2[i][j] = h2 * a.d1[i] * a.d1[j] + h1 * a.d2[i][j];
                for k in 0..3 {
                    out.d3[i][j][k] = h3 * a.d1[i] * a.d1[j] * a.d1[k]
                        + h2 * (a.d2[i][j] * a.d1[k] + a.d2[i][k] * a.d1[j] + a.d2[j][k] * a.d1[i])
                        + h1 * a.d3[i][j][k];
                }
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let x = self.v;
        self.compose(
            s,
            0.5 / s,
            -0.25 / (s * x),
            0.375 / (s * x * x),
        )
    }

    pub fn recip(&self) -> Self {
        let r = 1.0 / self.v;
        self.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }

    pub fn atan(&self) -> Self {
        let x = self.v;
        let q = 1.0 / (1.0 + x * x);
        self.compose(
            x.atan(),
            q,
            -2.0 * x * q * q,
            (6.0 * x * x - 2.0) * q * q * q,
        )
    }

    pub fn gradient(&self) -> Vector3<f64> {
        Vector3::from(self.d1)
    }

    pub fn hessian(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.d2[i][j])
    }

    /// Second-order expansion of the partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> Taylor2 {
        Taylor2 {
            value: self.d1[axis],
            gradient: Vector3::from_fn(|j, _| self.d2[axis][j]),
            hessian: Matrix3::from_fn(|j, k| self.d3[axis][j][k]),
        }
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(mut self, b: Jet3) -> Jet3 {
        self.v += b.v;
        for i in 0..3 {
            self.d1[i] += b.d1[i];
            for j in 0..3 {
                self.d2[i][j] += b.d2[i][j];
                for k in 0..3 {
                    self.d3[i][j][k] += b.d3[i][j][k];
                }
            }
        }
        self
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, b: Jet3) -> Jet3 {
        self + (-b)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, b: Jet3) -> Jet3 {
        let a = &self;
        let mut out = Jet3::constant(a.v * b.v);
        for i in 0..3 {
            out.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
            for j in 0..3 {
                out.d2[i][j] =
                    a.d2[i][j] * b.v + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] + a.v * b.d2[i][j];
                for k in 0..3 {
                    out.d3[i][j][k] = a.d3[i][j][k] * b.v
                        + a.d2[i][j] * b.d1[k]
                        + a.d2[i][k] * b.d1[j]
                        + a.d2[j][k] * b.d1[i]
                        + a.d1[i] * b.d2[j][k]
                        + a.d1[j] * b.d2[i][k]
                        + a.d1[k] * b.d2[i][j]
                        + a.v * b.d3[i][j][k];
                }
            }
        }
        out
    }
}

/// Value, gradient and Hessian of a scalar function of position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor2 {
    pub value: f64,
    pub gradient: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

impl Taylor2 {
    pub fn zero() -> Self {
        Taylor2 {
            value: 0.0,
            gradient: Vector3::zeros(),
            hessian: Matrix3::zeros(),
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Taylor2 {
            value: self.value * s,
            gradient: self.gradient * s,
            hessian: self.hessian * s,
        }
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    fn add(self, b: Taylor2) -> Taylor2 {
        Taylor2 {
            value: self.value + b.value,
            gradient: self.gradient + b.gradient,
            hessian: self.hessian + b.hessian,
        }
    }
}

impl Mul for Taylor2 {
    type Output = Taylor2;
    fn mul(self, b: Taylor2) -> Taylor2 {
        let a = self;
        Taylor2 {
            value: a.value * b.value,
            gradient: a.gradient * b.value + b.gradient * a.value,
            hessian: a.hessian * b.value
                + a.gradient * b.gradient.transpose()
                + b.gradient * a.gradient.transpose()
                + b.hessian * a.value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(p: [f64; 3], axis: usize) -> Jet3 {
        let mut d = [0.0; 3];
        d[axis] = 1.0;
        Jet3::linear(p[axis], d)
    }

    // f(x, y, z) = atan(x y / (z sqrt(x^2 + y^2 + z^2)))
    fn corner(p: [f64; 3]) -> f64 {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        (p[0] * p[1] / (p[2] * r)).atan()
    }

    fn corner_jet(p: [f64; 3]) -> Jet3 {
        let (x, y, z) = (var(p, 0), var(p, 1), var(p, 2));
        let r = (x * x + y * y + z * z).sqrt();
        (x * y * (z * r).recip()).atan()
    }

    #[test]
    fn jet_matches_finite_differences_to_third_order() {
        let p = [0.7, -0.4, 0.9];
        let jet = corner_jet(p);
        assert!((jet.v - corner(p)).abs() < 1e-15);
        let h = 1e-3;
        let shifted = |i: usize, s: f64| {
            let mut q = p;
            q[i] += s;
            q
        };
        for i in 0..3 {
            // third derivative d^3/dx_i^3 by a 5-point stencil
            let f = |s: f64| corner(shifted(i, s));
            let d1 = (f(h) - f(-h)) / (2.0 * h);
            let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            let d3 = (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
            assert!((jet.d1[i] - d1).abs() < 1e-6, "d1[{i}]");
            assert!((jet.d2[i][i] - d2).abs() < 1e-5, "d2[{i}]");
            assert!((jet.d3[i][i][i] - d3).abs() < 1e-4, "d3[{i}]");
        }
        // a mixed third derivative from mixed differences of the jet Hessian
        let dxy_plus = corner_jet(shifted(2, h)).d2[0][1];
        let dxy_minus = corner_jet(shifted(2, -h)).d2[0][1];
        assert!((jet.d3[0][1][2] - (dxy_plus - dxy_minus) / (2.0 * h)).abs() < 1e-6);
    }

    #[test]
    fn taylor_product_rule() {
        let a = Taylor2 {
            value: 2.0,
            gradient: Vector3::new(1.0, 0.0, -1.0),
            hessian: Matrix3::identity(),
        };
        let sq = a * a;
        assert_eq!(sq.value, 4.0);
        assert_eq!(sq.gradient, Vector3::new(4.0, 0.0, -4.0));
        // 2 g g^T + 2 a H
        assert_eq!(sq.hessian[(0, 0)], 2.0 + 4.0);
        assert_eq!(sq.hessian[(0, 2)], -2.0);
    }
}
