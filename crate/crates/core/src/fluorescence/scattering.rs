use serde::{Deserialize, Serialize};

use super::bessel::{bessel_weights, default_order};
use super::quadrature::{arcsine_average, chebyshev_offsets, ChebyshevOptions};
use super::standing_wave::{max_sin2_over, standing_wave_intensity, StandingWaveConfig};
use crate::error::{Error, Result};
use crate::trap::IonSpecies;

/// Above this fraction of the saturation intensity the linear scattering
/// model is flagged as unreliable.
pub const LOW_INTENSITY_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringRate {
    /// photons/s
    pub rate: f64,
    /// Intensity seen by the ion, averaged over its motion (W/m^2).
    pub intensity: f64,
    /// Some sampled intensity exceeded `LOW_INTENSITY_LIMIT * i_sat`.
    pub low_intensity_violated: bool,
}

/// Arcsine-weighted average of the standing-wave intensity and its
/// derivatives with respect to ion height and micromotion amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialAverage {
    pub intensity: f64,
    pub d_dz: f64,
    pub d_da: f64,
    pub nodes: usize,
}

/// Scattering of the standing-wave probe by an ion with pure vertical micromotion.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringModel {
    pub species: IonSpecies,
    pub sw: StandingWaveConfig,
    /// RF drive frequency (rad/s), the sideband spacing.
    pub rf_omega: f64,
    pub quadrature: ChebyshevOptions,
}

impl ScatteringModel {
    pub fn new(species: IonSpecies, sw: StandingWaveConfig, rf_omega: f64) -> Result<Self> {
        sw.validate()?;
        if !(rf_omega > 0.0) {
            return Err(Error::invalid("rf_omega", format!("must be > 0, got {rf_omega}")));
        }
        Ok(ScatteringModel {
            species,
            sw,
            rf_omega,
            quadrature: ChebyshevOptions::default(),
        })
    }

    fn lorentzian(&self, detuning: f64, n: i64) -> f64 {
        let x = 2.0 * (detuning + n as f64 * self.rf_omega) / self.species.linewidth;
        1.0 / (1.0 + x * x)
    }

    /// `sum_n J_n(beta)^2 / (1 + (2 (detuning + n Omega) / gamma)^2)`.
    pub fn spectral_factor(&self, detuning: f64, beta: f64) -> f64 {
        bessel_weights(beta, default_order(beta))
            .iter()
            .map(|(n, j)| j * j * self.lorentzian(detuning, n))
            .sum()
    }

    /// Spectral factor and its derivative in `beta`
    /// (`J_n' = (J_{n-1} - J_{n+1}) / 2`).
    pub fn spectral_factor_with_derivative(&self, detuning: f64, beta: f64) -> (f64, f64) {
        let n_max = default_order(beta);
        let w = bessel_weights(beta, n_max + 1);
        let (mut f, mut df) = (0.0, 0.0);
        for n in -(n_max as i64)..=n_max as i64 {
            let j = w.get(n);
            let l = self.lorentzian(detuning, n);
            f += j * j * l;
            df += j * (w.get(n - 1) - w.get(n + 1)) * l;
        }
        (f, df)
    }

    /// `(gamma / 2) / i_sat`: photons/s per W/m^2 on resonance.
    fn rate_per_intensity(&self) -> f64 {
        0.5 * self.species.linewidth / self.species.saturation_intensity()
    }

    fn flag(&self, intensity_max: f64) -> bool {
        intensity_max > LOW_INTENSITY_LIMIT * self.species.saturation_intensity()
    }

    /// Rate for an ion at fixed height `z` with phase-modulation index `beta`.
    pub fn point(&self, z: f64, beta: f64) -> ScatteringRate {
        let intensity = standing_wave_intensity(&self.sw, &self.species, z);
        ScatteringRate {
            rate: self.rate_per_intensity() * intensity * self.spectral_factor(self.sw.detuning, beta),
            intensity,
            low_intensity_violated: self.flag(intensity),
        }
    }

    pub fn spatial_average(&self, z: f64, a_z: f64) -> Result<SpatialAverage> {
        if !(a_z >= 0.0) {
            return Err(Error::invalid("a_z", format!("must be >= 0, got {a_z}")));
        }
        let k = self.species.wavenumber();
        let i4 = 4.0 * self.sw.i_peak;
        let u0 = z - self.sw.node_offset;
        let (intensity, nodes) = arcsine_average(
            |s| {
                let v = (k * (u0 - s)).sin();
                i4 * v * v
            },
            a_z,
            &self.quadrature,
        )?;
        // derivatives reuse the converged node set
        let n = nodes.max(self.quadrature.initial_nodes);
        let (mut d_dz, mut d_da) = (0.0, 0.0);
        for c in chebyshev_offsets(1.0, n) {
            let slope = i4 * k * (2.0 * k * (u0 - a_z * c)).sin();
            d_dz += slope;
            d_da -= c * slope;
        }
        Ok(SpatialAverage {
            intensity,
            d_dz: d_dz / n as f64,
            d_da: d_da / n as f64,
            nodes,
        })
    }

    /// Rate averaged over vertical micromotion of amplitude `a_z` about `z`.
    ///
    /// The modulation index `beta = k a_z` enters the spectral weights while
    /// the same amplitude smears the spatial intensity profile.
    pub fn micromotion(&self, z: f64, a_z: f64) -> Result<ScatteringRate> {
        self.micromotion_at(z, a_z, self.sw.detuning)
    }

    pub fn micromotion_at(&self, z: f64, a_z: f64, detuning: f64) -> Result<ScatteringRate> {
        let avg = self.spatial_average(z, a_z)?;
        let k = self.species.wavenumber();
        let beta = k * a_z;
        let peak = 4.0 * self.sw.i_peak * max_sin2_over(k, z - self.sw.node_offset, a_z);
        Ok(ScatteringRate {
            rate: self.rate_per_intensity() * avg.intensity * self.spectral_factor(detuning, beta),
            intensity: avg.intensity,
            low_intensity_violated: self.flag(peak),
        })
    }

    /// Micromotion-averaged rate across several detunings; the spatial
    /// average is shared.
    pub fn lineshape(&self, z: f64, a_z: f64, detunings: &[f64]) -> Result<Vec<ScatteringRate>> {
        let avg = self.spatial_average(z, a_z)?;
        let k = self.species.wavenumber();
        let beta = k * a_z;
        let peak = 4.0 * self.sw.i_peak * max_sin2_over(k, z - self.sw.node_offset, a_z);
        let flagged = self.flag(peak);
        Ok(detunings
            .iter()
            .map(|&d| ScatteringRate {
                rate: self.rate_per_intensity() * avg.intensity * self.spectral_factor(d, beta),
                intensity: avg.intensity,
                low_intensity_violated: flagged,
            })
            .collect())
    }

    /// Detector count rate for a photon scattering rate.
    pub fn detected(&self, rate: f64) -> f64 {
        self.sw.collection_efficiency * rate + self.sw.background_rate
    }

    /// Rate and its partial derivatives in `(a_z, z)` for each detuning,
    /// used by the lineshape fit.
    pub(crate) fn lineshape_with_gradient(
        &self,
        z: f64,
        a_z: f64,
        detunings: &[f64],
    ) -> Result<Vec<(f64, f64, f64)>> {
        let avg = self.spatial_average(z, a_z)?;
        let k = self.species.wavenumber();
        let c = self.rate_per_intensity();
        Ok(detunings
            .iter()
            .map(|&d| {
                let (f, df) = self.spectral_factor_with_derivative(d, k * a_z);
                (
                    c * avg.intensity * f,
                    c * (avg.d_da * f + avg.intensity * df * k),
                    c * avg.d_dz * f,
                )
            })
            .collect())
    }
}

/// Fringe visibility `(max - min) / (max + min)` of the motion-averaged
/// intensity: `|J_0(2 beta)|`.
pub fn fringe_visibility(beta: f64) -> f64 {
    super::bessel::bessel_j0(2.0 * beta).abs()
}

pub fn scattering_rate_point(species: &IonSpecies, cfg: &StandingWaveConfig, rf_omega: f64, z: f64, beta: f64) -> Result<ScatteringRate> {
    Ok(ScatteringModel::new(species.clone(), cfg.clone(), rf_omega)?.point(z, beta))
}

pub fn scattering_rate_micromotion(
    species: &IonSpecies,
    cfg: &StandingWaveConfig,
    rf_omega: f64,
    z: f64,
    a_z: f64,
) -> Result<ScatteringRate> {
    ScatteringModel::new(species.clone(), cfg.clone(), rf_omega)?.micromotion(z, a_z)
}

/// Half the natural linewidth: the scattering rate of a saturated two-level atom.
pub fn max_scattering_rate(species: &IonSpecies) -> f64 {
    species.linewidth / 2.0
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn model() -> ScatteringModel {
        ScatteringModel::new(
            IonSpecies::ytterbium_174(),
            StandingWaveConfig::default(),
            2.0 * PI * 42.5e6,
        )
        .unwrap()
    }

    // J_0 from its integral representation (1/pi) int_0^pi cos(x sin t) dt
    fn j0_integral(x: f64) -> f64 {
        let n = 4000;
        let h = PI / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * (x * (i as f64 * h).sin()).cos();
        }
        s * h / 3.0 / PI
    }

    #[test]
    fn resonant_saturated_rate_is_half_linewidth() {
        let mut m = model();
        m.sw.detuning = 0.0;
        m.sw.i_peak = m.species.saturation_intensity() / 4.0;
        let z = m.sw.node_offset + m.species.wavelength / 4.0;
        let r = m.point(z, 0.0);
        assert!((r.rate - 6.157e7).abs() < 1e-3 * 6.157e7, "{}", r.rate);
        assert!(r.low_intensity_violated);
        m.sw.detuning = -m.species.linewidth / 2.0;
        assert!((m.point(z, 0.0).rate / r.rate - 0.5).abs() < 1e-14);
    }

    #[test]
    fn node_is_dark() {
        let m = model();
        assert_eq!(m.point(m.sw.node_offset, 0.7).rate, 0.0);
        assert!(!m.point(m.sw.node_offset, 0.7).low_intensity_violated);
    }

    #[test]
    fn vanishing_amplitude_recovers_point_rate() {
        let m = model();
        let z = m.sw.node_offset + 30e-9;
        let p = m.point(z, 0.0).rate;
        let s = m.micromotion(z, 1e-15).unwrap().rate;
        assert!(((s - p) / p).abs() < 1e-6);
    }

    #[test]
    fn convolution_matches_closed_form() {
        let m = model();
        let k = m.species.wavenumber();
        for beta in [0.1, 1.0, 5.0] {
            let a = beta / k;
            for dz in [0.0, 17e-9, 46.1875e-9, 90e-9] {
                let z = m.sw.node_offset + dz;
                let got = m.micromotion(z, a).unwrap().rate;
                let spatial = 0.5 * (1.0 - j0_integral(2.0 * beta) * (2.0 * k * dz).cos());
                let want = m.spectral_factor(m.sw.detuning, beta)
                    * spatial
                    * 0.5 * m.species.linewidth * 4.0 * m.sw.i_peak
                    / m.species.saturation_intensity();
                assert!(((got - want) / want).abs() < 1e-8, "beta {beta} dz {dz}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn spectral_factor_is_even_in_beta() {
        let m = model();
        for d in [-2.0 * PI * 42.5e6, 0.0, 3e7] {
            assert!((m.spectral_factor(d, 0.8) - m.spectral_factor(d, -0.8)).abs() < 1e-16);
        }
    }

    // J_n by its power series, n >= 0
    fn j_series(n: u32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..100 {
            term *= -(x / 2.0).powi(2) / (k as f64 * (k + n) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn sideband_to_carrier_ratio() {
        let mut m = model();
        let beta = 0.3;
        let lor = |d: f64, g: f64| 1.0 / (1.0 + (2.0 * d / g).powi(2));
        let explicit = |d: f64, g: f64, om: f64| {
            (-8i32..=8)
                .map(|n| j_series(n.unsigned_abs(), beta).powi(2) * lor(d + n as f64 * om, g))
                .sum::<f64>()
        };
        let (g, om) = (m.species.linewidth, m.rf_omega);
        let ratio = m.spectral_factor(-om, beta) / m.spectral_factor(0.0, beta);
        let want = explicit(-om, g, om) / explicit(0.0, g, om);
        assert!((ratio - want).abs() < 1e-12 * want, "{ratio} vs {want}");

        // resolved sidebands: the ratio tends to J_1^2 / J_0^2
        m.species.linewidth = 2.0 * PI * 0.2e6;
        let ratio = m.spectral_factor(-om, beta) / m.spectral_factor(0.0, beta);
        let resolved = (j_series(1, beta) / j_series(0, beta)).powi(2);
        assert!((ratio - resolved).abs() < 1e-3 * resolved, "{ratio} vs {resolved}");
    }

    #[test]
    fn visibility_at_rest_is_one() {
        assert_eq!(fringe_visibility(0.0), 1.0);
        let m = model();
        let k = m.species.wavenumber();
        let a = 0.4 / k;
        let hi = m.micromotion(m.sw.node_offset + m.species.wavelength / 4.0, a).unwrap().intensity;
        let lo = m.micromotion(m.sw.node_offset, a).unwrap().intensity;
        assert!(((hi - lo) / (hi + lo) - fringe_visibility(0.4)).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = model();
        let dets = [-m.rf_omega, -1e7, 0.0];
        let z = m.sw.node_offset + 8e-9;
        let a = 20e-9;
        let g = m.lineshape_with_gradient(z, a, &dets).unwrap();
        let h = 1e-13;
        let plus_a = m.lineshape(z, a + h, &dets).unwrap();
        let minus_a = m.lineshape(z, a - h, &dets).unwrap();
        let plus_z = m.lineshape(z + h, a, &dets).unwrap();
        let minus_z = m.lineshape(z - h, a, &dets).unwrap();
        for i in 0..dets.len() {
            let fa = (plus_a[i].rate - minus_a[i].rate) / (2.0 * h);
            let fz = (plus_z[i].rate - minus_z[i].rate) / (2.0 * h);
            assert!((g[i].1 - fa).abs() < 1e-5 * fa.abs(), "d/da {} vs {fa}", g[i].1);
            assert!((g[i].2 - fz).abs() < 1e-5 * fz.abs(), "d/dz {} vs {fz}", g[i].2);
        }
    }
}
