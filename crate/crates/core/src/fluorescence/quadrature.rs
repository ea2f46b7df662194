use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Chebyshev settings for averages over the arcsine density
/// `1 / (pi sqrt(a^2 - s^2))` on `(-a, a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChebyshevOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Successive node doublings must agree to this relative tolerance.
    pub rel_tol: f64,
}

impl Default for ChebyshevOptions {
    fn default() -> Self {
        ChebyshevOptions {
            initial_nodes: 64,
            max_nodes: 1 << 16,
            rel_tol: 1e-9,
        }
    }
}

/// Offsets `a cos((2i - 1) pi / 2n)`, i = 1..=n.
pub fn chebyshev_offsets(amplitude: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| amplitude * ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos())
}

/// Average of `f(s)` over the arcsine density with amplitude `a`.
///
/// The weight's endpoint singularities are absorbed by the rule, so the sum is
/// a plain mean over the nodes. The node count is doubled until two
/// successive estimates agree.
pub fn arcsine_average<F: Fn(f64) -> f64>(f: F, amplitude: f64, opts: &ChebyshevOptions) -> Result<(f64, usize)> {
    if amplitude == 0.0 {
        return Ok((f(0.0), 1));
    }
    let mean = |n: usize| chebyshev_offsets(amplitude, n).map(&f).sum::<f64>() / n as f64;
    let mut n = opts.initial_nodes.max(1);
    let mut prev = mean(n);
    loop {
        let next_n = 2 * n;
        if next_n > opts.max_nodes {
            return Err(Error::Quadrature {
                what: "Gauss-Chebyshev",
                residual: f64::NAN,
            });
        }
        let next = mean(next_n);
        let diff = (next - prev).abs();
        if diff <= opts.rel_tol * next.abs() || diff == 0.0 {
            return Ok((next, next_n));
        }
        if 2 * next_n > opts.max_nodes {
            return Err(Error::Quadrature {
                what: "Gauss-Chebyshev",
                residual: diff / next.abs().max(f64::MIN_POSITIVE),
            });
        }
        prev = next;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_moments() {
        // <s^2> = a^2/2, <s^4> = 3a^4/8 for the arcsine law
        let a = 1.7;
        let (m2, _) = arcsine_average(|s| s * s, a, &ChebyshevOptions::default()).unwrap();
        let (m4, _) = arcsine_average(|s| s.powi(4), a, &ChebyshevOptions::default()).unwrap();
        assert!((m2 - a * a / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * a.powi(4) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_is_point_evaluation() {
        let (v, n) = arcsine_average(|s| (s + 2.0).ln(), 0.0, &ChebyshevOptions::default()).unwrap();
        assert_eq!(v, 2f64.ln());
        assert_eq!(n, 1);
    }

    #[test]
    fn node_cap_is_reported() {
        let opts = ChebyshevOptions {
            initial_nodes: 2,
            max_nodes: 4,
            rel_tol: 1e-15,
        };
        assert!(matches!(
            arcsine_average(|s| (40.0 * s).cos(), 1.0, &opts),
            Err(Error::Quadrature { .. })
        ));
    }
}
