//! Weighted least squares on top of the `levenberg-marquardt` crate.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt, TerminationReason};
use nalgebra::{DMatrix, DVector, Dyn, Owned};

use crate::error::{Error, Result};

/// Weighted residuals and their Jacobian at a parameter vector.
pub(crate) type Evaluation = (DVector<f64>, DMatrix<f64>);

struct Problem<F> {
    eval: F,
    params: DVector<f64>,
    cached: Option<Evaluation>,
}

impl<F> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<F>
where
    F: Fn(&DVector<f64>) -> Option<Evaluation>,
{
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.params = x.clone();
        self.cached = (self.eval)(x);
    }

    fn params(&self) -> DVector<f64> {
        self.params.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        self.cached.as_ref().map(|c| c.0.clone())
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        self.cached.as_ref().map(|c| c.1.clone())
    }
}

pub(crate) struct Solution {
    pub params: DVector<f64>,
    pub chi_square: f64,
    /// `(J^T J)^-1` at the optimum.
    pub covariance: DMatrix<f64>,
    pub evaluations: usize,
}

/// Relative singular-value floor below which the Jacobian counts as rank deficient.
const RANK_TOLERANCE: f64 = 1e-9;

/// Parameter most aligned with the Jacobian's null space, if any.
pub(crate) fn degenerate_parameter(jac: &DMatrix<f64>) -> Option<usize> {
    let mut scaled = jac.clone();
    for (i, mut col) in scaled.column_iter_mut().enumerate() {
        let n = col.norm();
        if n == 0.0 || !n.is_finite() {
            return Some(i);
        }
        col /= n;
    }
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t?;
    let s = &svd.singular_values;
    let (imin, smin) = s.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let smax = s.max();
    if smin > RANK_TOLERANCE * smax {
        return None;
    }
    v_t.row(imin).iter().enumerate().fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
        Some((_, b)) if b >= v.abs() => best,
        _ => Some((i, v.abs())),
    }).map(|(i, _)| i)
}

pub(crate) fn minimize<F>(eval: F, x0: DVector<f64>, names: &[&'static str], patience: usize, what: &'static str) -> Result<Solution>
where
    F: Fn(&DVector<f64>) -> Option<Evaluation>,
{
    let problem = Problem {
        eval,
        params: x0.clone(),
        cached: None,
    };
    let mut problem = problem;
    problem.set_params(&x0);
    match &problem.cached {
        Some((_, jac)) => {
            if let Some(i) = degenerate_parameter(jac) {
                return Err(Error::SingularJacobian { parameter: names[i] });
            }
        }
        None => return Err(Error::invalid("initial guess", "model cannot be evaluated there")),
    }
    let (problem, report) = LevenbergMarquardt::new()
        .with_ftol(1e-12)
        .with_xtol(1e-12)
        .with_gtol(1e-12)
        .with_patience(patience)
        .minimize(problem);
    let Some((r, jac)) = problem.cached else {
        return Err(Error::NonConvergence {
            what,
            iterations: report.number_of_evaluations,
            residual: f64::NAN,
        });
    };
    let chi_square = r.norm_squared();
    let ok = report.termination.was_successful()
        || matches!(report.termination, TerminationReason::NoImprovementPossible(_));
    if !ok {
        if let Some(i) = degenerate_parameter(&jac) {
            return Err(Error::SingularJacobian { parameter: names[i] });
        }
        return Err(Error::NonConvergence {
            what,
            iterations: report.number_of_evaluations,
            residual: chi_square.sqrt(),
        });
    }
    if let Some(i) = degenerate_parameter(&jac) {
        return Err(Error::SingularJacobian { parameter: names[i] });
    }
    let jtj = jac.transpose() * &jac;
    let covariance = jtj.try_inverse().ok_or(Error::SingularJacobian { parameter: names[0] })?;
    Ok(Solution {
        params: problem.params,
        chi_square,
        covariance,
        evaluations: report.number_of_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let eval = |p: &DVector<f64>| {
            let r = DVector::from_iterator(t.len(), t.iter().zip(&y).map(|(t, y)| p[0] * (-p[1] * t).exp() - y));
            let j = DMatrix::from_fn(t.len(), 2, |i, c| {
                let e = (-p[1] * t[i]).exp();
                if c == 0 { e } else { -p[0] * t[i] * e }
            });
            Some((r, j))
        };
        let s = minimize(eval, DVector::from_vec(vec![1.0, 0.3]), &["amp", "rate"], 200, "test").unwrap();
        assert!((s.params[0] - 3.0).abs() < 1e-9 && (s.params[1] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn names_the_redundant_parameter() {
        // model p0 + p1 * 0: p1 is unconstrained
        let eval = |p: &DVector<f64>| Some((DVector::from_element(5, p[0] - 1.0), DMatrix::from_fn(5, 2, |_, c| if c == 0 { 1.0 } else { 0.0 })));
        match minimize(eval, DVector::from_vec(vec![0.0, 0.0]), &["offset", "ghost"], 100, "test") {
            Err(Error::SingularJacobian { parameter }) => assert_eq!(parameter, "ghost"),
            other => panic!("{:?}", other.map(|s| s.params)),
        }
    }
}
