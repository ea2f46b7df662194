//! Integer-order Bessel functions of the first kind by Miller's downward
//! recurrence, normalised with `J_0 + 2 sum_k J_2k = 1`.

/// `J_0(x) ..= J_n_max(x)`.
pub fn bessel_j_orders(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (n_max as f64).max(ax);
    let mut start = (top + 30.0 + (160.0 * top).sqrt()).ceil() as usize;
    start += start % 2;

    let mut j_next = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / ax * j - j_next;
        j_next = j;
        j = j_prev;
        let order = k - 1;
        if order <= n_max {
            out[order] = j;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j_orders(x, 0)[0]
}

/// Sideband truncation used throughout: `ceil(|beta|) + 20`.
pub fn default_order(beta: f64) -> usize {
    beta.abs().ceil() as usize + 20
}

/// `J_n(beta)` for `n = -n_max ..= n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselWeights {
    n_max: usize,
    values: Vec<f64>,
}

impl BesselWeights {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `J_n`, zero outside the computed range.
    pub fn get(&self, n: i64) -> f64 {
        if n.unsigned_abs() as usize > self.n_max {
            0.0
        } else {
            self.values[(n + self.n_max as i64) as usize]
        }
    }

    /// `(n, J_n)` pairs from `-n_max` upward.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n_max = self.n_max as i64;
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - n_max, v))
    }

    /// `sum_n J_n^2`; equals 1 up to truncation.
    pub fn power_sum(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Carrier and sideband amplitudes of a phase modulation with index `beta`.
pub fn bessel_weights(beta: f64, n_max: usize) -> BesselWeights {
    let positive = bessel_j_orders(beta, n_max);
    let mut values = Vec::with_capacity(2 * n_max + 1);
    for n in (1..=n_max).rev() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        values.push(sign * positive[n]);
    }
    values.extend_from_slice(&positive);
    BesselWeights { n_max, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    // power series sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!)
    fn series(n: u32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..200 {
            term *= -(x / 2.0).powi(2) / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn beta_zero_is_pure_carrier() {
        let w = bessel_weights(0.0, 5);
        assert_eq!(w.get(0), 1.0);
        assert!(w.iter().filter(|(n, _)| *n != 0).all(|(_, v)| v == 0.0));
    }

    #[test]
    fn j1_of_one_tenth() {
        let w = bessel_weights(0.1, default_order(0.1));
        assert!((w.get(1) - series(1, 0.1)).abs() < 1e-16);
        assert!((w.get(1) - 0.049938).abs() < 5e-7);
    }

    #[test]
    fn agrees_with_power_series() {
        for &x in &[1e-6, 0.3, 1.0, 2.5, 5.0, 9.0] {
            let j = bessel_j_orders(x, 12);
            for n in 0..=12u32 {
                let s = series(n, x);
                // the alternating series itself loses ~e^x / 1e16 to cancellation
                let tol = 1e-15 * x.exp().max(10.0);
                assert!((j[n as usize] - s).abs() < tol, "J_{n}({x}) {} vs {s}", j[n as usize]);
            }
        }
    }

    #[test]
    fn parseval_sum_rule() {
        for &b in &[0.1, 1.0, 5.0, 12.0] {
            let w = bessel_weights(b, default_order(b));
            assert!((w.power_sum() - 1.0).abs() < 1e-10, "beta {b}");
        }
    }

    #[test]
    fn reflection_symmetry() {
        let w = bessel_weights(2.3, 25);
        for n in 1..=25 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(w.get(-n), sign * w.get(n));
        }
        let neg = bessel_weights(-2.3, 25);
        for n in -25..=25i64 {
            assert!((neg.get(n) - w.get(-n)).abs() < 1e-16);
        }
    }
}
