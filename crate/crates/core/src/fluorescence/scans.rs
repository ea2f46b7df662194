use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::{synthesize_counts, MeasurementProtocol};
use super::lsq;
use super::scattering::ScatteringModel;
use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::trap::{find_equilibrium, SolverOptions, TrapModel};
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// Signed tweaker amplitude (V).
    TweakerVoltage,
    /// Probe detuning (rad/s).
    Detuning,
}

/// Count rate against one scanned quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub abscissa_kind: Abscissa,
    pub abscissa: Vec<f64>,
    /// counts/s
    pub rates: Vec<f64>,
    /// Standard error of each rate; zero for noiseless scans.
    pub stderr: Vec<f64>,
    /// Points computed above the low-intensity limit.
    pub saturation_flags: Vec<bool>,
    pub metadata: serde_json::Value,
}

impl ScanResult {
    pub fn new(abscissa_kind: Abscissa, abscissa: Vec<f64>, rates: Vec<f64>, stderr: Vec<f64>) -> Result<Self> {
        let n = abscissa.len();
        if rates.len() != n || stderr.len() != n {
            return Err(Error::invalid(
                "scan",
                format!("column lengths differ: {n}, {}, {}", rates.len(), stderr.len()),
            ));
        }
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0)) {
            return Err(Error::invalid("scan", format!("negative or NaN rate {r}")));
        }
        Ok(ScanResult {
            abscissa_kind,
            abscissa,
            rates,
            stderr,
            saturation_flags: vec![false; n],
            metadata: serde_json::Value::Null,
        })
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }
}

/// Noiseless detected rate or a simulated measurement of it.
fn measure(rate: f64, protocol: Option<&MeasurementProtocol>, index: usize) -> Result<(f64, f64)> {
    match protocol {
        None => Ok((rate, 0.0)),
        Some(p) => {
            let s = synthesize_counts(rate, p, index as u64)?;
            Ok((s.mean_rate, s.stderr_rate))
        }
    }
}

/// Detected rate against probe detuning for an ion `offset` above the
/// standing-wave node with micromotion amplitude `a_z`.
pub fn lineshape_scan(
    model: &ScatteringModel,
    detunings: &[f64],
    a_z: f64,
    offset: f64,
    protocol: Option<&MeasurementProtocol>,
) -> Result<ScanResult> {
    if let Some(p) = protocol {
        p.validate()?;
    }
    let z = model.sw.node_offset + offset;
    let rates = model.lineshape(z, a_z, detunings)?;
    let points = rates
        .par_iter()
        .enumerate()
        .map(|(i, r)| measure(model.detected(r.rate), protocol, i))
        .collect::<Result<Vec<_>>>()?;
    let mut scan = ScanResult::new(
        Abscissa::Detuning,
        detunings.to_vec(),
        points.iter().map(|p| p.0).collect(),
        points.iter().map(|p| p.1).collect(),
    )?;
    scan.saturation_flags = rates.iter().map(|r| r.low_intensity_violated).collect();
    scan.metadata = serde_json::json!({
        "a_z_m": a_z,
        "offset_from_node_m": offset,
        "noisy": protocol.is_some(),
    });
    Ok(scan)
}

/// `c + A cos(2 pi x / P) + B sin(2 pi x / P)` fitted by weighted least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub period: f64,
    pub period_sigma: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub reduced_chi_square: f64,
}

/// Per-point weights `1/sigma`: the given standard errors where positive,
/// else the smallest positive one, else unit weights.
pub(crate) fn inverse_sigmas(stderr: &[f64]) -> (Vec<f64>, bool) {
    let floor = stderr.iter().copied().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return (vec![1.0; stderr.len()], true);
    }
    (stderr.iter().map(|&s| 1.0 / if s > 0.0 { s } else { floor }).collect(), false)
}

fn linear_sinusoid(x: &[f64], y: &[f64], w: &[f64], f: f64) -> (Vector3<f64>, f64) {
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for i in 0..x.len() {
        let ph = 2.0 * PI * f * x[i];
        let basis = Vector3::new(1.0, ph.cos(), ph.sin());
        let w2 = w[i] * w[i];
        a += basis * basis.transpose() * w2;
        b += basis * (y[i] * w2);
    }
    let coef = a.try_inverse().map(|inv| inv * b).unwrap_or_else(Vector3::zeros);
    let chi2 = (0..x.len())
        .map(|i| {
            let ph = 2.0 * PI * f * x[i];
            let m = coef[0] + coef[1] * ph.cos() + coef[2] * ph.sin();
            ((m - y[i]) * w[i]).powi(2)
        })
        .sum();
    (coef, chi2)
}

/// Sinusoid fit: a weighted periodogram picks the starting frequency, then
/// all four parameters are refined together.
pub fn fit_sinusoid(x: &[f64], y: &[f64], stderr: &[f64]) -> Result<SinusoidFit> {
    if x.len() < 5 || y.len() != x.len() || stderr.len() != x.len() {
        return Err(Error::invalid("sinusoid data", "need at least 5 points of equal length"));
    }
    let (w, unit) = inverse_sigmas(stderr);
    let span = x.iter().copied().fold(f64::MIN, f64::max) - x.iter().copied().fold(f64::MAX, f64::min);
    let mut dx: Vec<f64> = x.windows(2).map(|p| (p[1] - p[0]).abs()).filter(|d| *d > 0.0).collect();
    dx.sort_by(f64::total_cmp);
    if !(span > 0.0) || dx.is_empty() {
        return Err(Error::invalid("sinusoid data", "abscissa has no spread"));
    }
    let f_max = 0.5 / dx[dx.len() / 2];
    let f_min = 1.0 / span;
    let n_f = (((f_max - f_min) * span * 10.0).ceil() as usize).max(2);
    let best = (0..=n_f)
        .map(|i| f_min + (f_max - f_min) * i as f64 / n_f as f64)
        .map(|f| (f, linear_sinusoid(x, y, &w, f)))
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty frequency grid");
    let (f0, (c0, _)) = best;

    // parameters: offset, cos and sin amplitudes, frequency in units of 1/span
    let yscale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eval = |p: &DVector<f64>| {
        let f = p[3] / span;
        let r = DVector::from_fn(x.len(), |i, _| {
            let ph = 2.0 * PI * f * x[i];
            ((p[0] + p[1] * ph.cos() + p[2] * ph.sin()) * yscale - y[i]) * w[i]
        });
        let j = DMatrix::from_fn(x.len(), 4, |i, c| {
            let ph = 2.0 * PI * f * x[i];
            let d = match c {
                0 => 1.0,
                1 => ph.cos(),
                2 => ph.sin(),
                _ => (-p[1] * ph.sin() + p[2] * ph.cos()) * 2.0 * PI * x[i] / span,
            };
            d * yscale * w[i]
        });
        Some((r, j))
    };
    let x0 = DVector::from_vec(vec![c0[0] / yscale, c0[1] / yscale, c0[2] / yscale, f0 * span]);
    let sol = lsq::minimize(eval, x0, &["offset", "cos_amplitude", "sin_amplitude", "period"], 200, "sinusoid fit")?;
    let p = &sol.params;
    let dof = (x.len() - 4) as f64;
    let red = sol.chi_square / dof;
    let cov_scale = if unit { red } else { 1.0 };
    let f = p[3] / span;
    let f_sigma = (sol.covariance[(3, 3)] * cov_scale).sqrt() / span;
    Ok(SinusoidFit {
        period: 1.0 / f,
        period_sigma: f_sigma / (f * f),
        offset: p[0] * yscale,
        amplitude: p[1].hypot(p[2]) * yscale,
        phase: p[2].atan2(p[1]),
        reduced_chi_square: red,
    })
}

/// Fringe scan over signed tweaker amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub scan: ScanResult,
    /// RF null height at each voltage (m).
    pub null_heights: Vec<f64>,
    /// Ion equilibrium height at each voltage (m).
    pub ion_heights: Vec<f64>,
    /// Residual vertical micromotion amplitude at the ion (m).
    pub micromotion: Vec<f64>,
    /// d(ion height)/dV from a straight-line fit (m/V).
    pub ion_slope: f64,
    /// `None` when the rates carry no oscillation to fit.
    pub sinusoid: Option<SinusoidFit>,
    /// Voltage period times `|ion_slope|` (m).
    pub spatial_period: Option<f64>,
}

/// Scans the tweaker amplitude with the static confinement held fixed.
///
/// The static null stays at the untweaked RF null, so the ion settles between
/// the displaced RF null and the static minimum and picks up the
/// corresponding micromotion. `guess` seeds the untweaked null search.
pub fn fringe_scan(
    trap: &TrapModel,
    model: &ScatteringModel,
    voltages: &[f64],
    protocol: Option<&MeasurementProtocol>,
    guess: &Point,
    opts: &SolverOptions,
) -> Result<FringeScan> {
    if voltages.len() < 5 {
        return Err(Error::invalid("tweaker voltages", "need at least 5 values"));
    }
    if let Some(p) = protocol {
        p.validate()?;
    }
    let model = ScatteringModel {
        rf_omega: trap.drive.omega,
        ..model.clone()
    };
    let base = trap.drive.with_signed_tweaker(0.0);
    let dc_null = trap.with_drive(base).find_rf_null(guess, opts)?.position;

    let rows = voltages
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let tweaked = trap.with_drive(base.with_signed_tweaker(v));
            let null = tweaked.find_rf_null(&dc_null, opts)?.position;
            let ion = find_equilibrium(&tweaked.total_potential(dc_null), &null, opts)?;
            let a_z = tweaked.micromotion(&ion)?.amplitude;
            let s = model.micromotion(ion.z, a_z)?;
            let (rate, err) = measure(model.detected(s.rate), protocol, i)?;
            Ok((null.z, ion.z, a_z, rate, err, s.low_intensity_violated))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scan = ScanResult::new(
        Abscissa::TweakerVoltage,
        voltages.to_vec(),
        rows.iter().map(|r| r.3).collect(),
        rows.iter().map(|r| r.4).collect(),
    )?;
    scan.saturation_flags = rows.iter().map(|r| r.5).collect();
    let ion_heights: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (ion_slope, _) = linear_fit(voltages, &ion_heights);

    let spread = scan.rates.iter().copied().fold(f64::MIN, f64::max)
        - scan.rates.iter().copied().fold(f64::MAX, f64::min);
    let sinusoid = if spread > 1e-9 * model.sw.background_rate.max(1.0) {
        fit_sinusoid(voltages, &scan.rates, &scan.stderr).ok()
    } else {
        None
    };
    scan.metadata = serde_json::json!({
        "dc_null_m": [dc_null.x, dc_null.y, dc_null.z],
        "noisy": protocol.is_some(),
    });
    Ok(FringeScan {
        spatial_period: sinusoid.map(|s| s.period * ion_slope.abs()),
        sinusoid,
        null_heights: rows.iter().map(|r| r.0).collect(),
        ion_heights,
        micromotion: rows.iter().map(|r| r.2).collect(),
        ion_slope,
        scan,
    })
}
