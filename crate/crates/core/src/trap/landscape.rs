use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::{IonSpecies, RfDrive};
use crate::electrostatics::{ElectrodeRole, ElectrodeSet};
use crate::error::Result;
use crate::taylor::{Jet3, Taylor2};
use crate::Point;

/// A potential energy (J) with value, gradient and Hessian available.
pub trait PotentialEnergy: Sync {
    fn expand(&self, p: &Point) -> Result<Taylor2>;

    fn energy(&self, p: &Point) -> Result<f64> {
        Ok(self.expand(p)?.value)
    }
}

/// RF field of the main and tweaker electrodes under a given drive.
///
/// The field is `Re[(E_main + e^{i phi} E_tweak) e^{i Omega t}]`; the complex
/// amplitude per axis is the phasor.
#[derive(Clone, Copy, Debug)]
pub struct RfField<'a> {
    pub set: &'a ElectrodeSet,
    pub drive: RfDrive,
}

impl<'a> RfField<'a> {
    pub fn new(set: &'a ElectrodeSet, drive: RfDrive) -> Self {
        RfField { set, drive }
    }

    fn main_weight(&self) -> impl Fn(ElectrodeRole) -> f64 {
        let v = self.drive.v_main;
        move |role| if role == ElectrodeRole::MainRf { v } else { 0.0 }
    }

    fn tweaker_weight(&self) -> impl Fn(ElectrodeRole) -> f64 {
        let (l, r) = (
            self.drive.tweaker_left_applied(),
            self.drive.tweaker_right_applied(),
        );
        move |role| match role {
            ElectrodeRole::TweakerLeft => l,
            ElectrodeRole::TweakerRight => r,
            _ => 0.0,
        }
    }

    /// Real field amplitudes of the main and tweaker sources.
    pub fn components(&self, p: &Point) -> Result<(Vector3<f64>, Vector3<f64>)> {
        Ok((
            self.set.weighted_field(self.main_weight(), p)?,
            self.set.weighted_field(self.tweaker_weight(), p)?,
        ))
    }

    pub fn phasor(&self, p: &Point) -> Result<Vector3<Complex64>> {
        let (main, tweak) = self.components(p)?;
        let c = self.drive.phase_factor();
        Ok(Vector3::from_fn(|a, _| Complex64::from(main[a]) + c * tweak[a]))
    }

    /// `sum_a |E_a|^2` of the phasor.
    pub fn magnitude_sq(&self, p: &Point) -> Result<f64> {
        Ok(self.phasor(p)?.iter().map(|c| c.norm_sqr()).sum())
    }

    /// `sum_a |E_a|^2` with exact first and second derivatives.
    pub fn magnitude_sq_expansion(&self, p: &Point) -> Result<Taylor2> {
        let c = self.drive.phase_factor();
        let main = self.set.weighted_jet(self.main_weight(), p)?;
        let tweak = self.set.weighted_jet(self.tweaker_weight(), p)?;
        let has_tweak = tweak != Jet3::ZERO;
        let mut out = Taylor2::zero();
        for a in 0..3 {
            // E_a = -d_a phi; the sign drops out of the squares
            let ea = main.partial(a);
            out = out + ea * ea;
            if has_tweak {
                let eb = tweak.partial(a);
                out = out + (ea * eb).scale(2.0 * c.re) + (eb * eb).scale(c.norm_sqr());
            }
        }
        Ok(out)
    }
}

/// Ponderomotive potential `q^2 |E|^2 / (4 m Omega^2)`.
#[derive(Clone, Copy, Debug)]
pub struct Pseudopotential<'a> {
    pub field: RfField<'a>,
    prefactor: f64,
}

impl<'a> Pseudopotential<'a> {
    pub fn new(set: &'a ElectrodeSet, drive: RfDrive, species: &IonSpecies) -> Self {
        let prefactor =
            species.charge * species.charge / (4.0 * species.mass * drive.omega * drive.omega);
        Pseudopotential {
            field: RfField::new(set, drive),
            prefactor,
        }
    }
}

impl PotentialEnergy for Pseudopotential<'_> {
    fn expand(&self, p: &Point) -> Result<Taylor2> {
        Ok(self.field.magnitude_sq_expansion(p)?.scale(self.prefactor))
    }

    fn energy(&self, p: &Point) -> Result<f64> {
        Ok(self.prefactor * self.field.magnitude_sq(p)?)
    }
}

/// Quadratic well `1/2 (p - c)^T K (p - c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicWell {
    pub center: Point,
    pub stiffness: Matrix3<f64>,
}

impl HarmonicWell {
    pub fn isotropic(center: Point, k: f64) -> Self {
        HarmonicWell {
            center,
            stiffness: Matrix3::identity() * k,
        }
    }

    /// Static quadrupole that confines along `x` with frequency `omega_axial`.
    /// To satisfy Laplace's equation the curvature is returned with opposite
    /// sign in the radial plane, a fraction `vertical_fraction` of it along `z`.
    pub fn dc_quadrupole(center: Point, mass: f64, omega_axial: f64, vertical_fraction: f64) -> Self {
        let kx = mass * omega_axial * omega_axial;
        HarmonicWell {
            center,
            stiffness: Matrix3::from_diagonal(&Vector3::new(
                kx,
                -(1.0 - vertical_fraction) * kx,
                -vertical_fraction * kx,
            )),
        }
    }
}

impl PotentialEnergy for HarmonicWell {
    fn expand(&self, p: &Point) -> Result<Taylor2> {
        let d = p - self.center;
        let kd = self.stiffness * d;
        Ok(Taylor2 {
            value: 0.5 * d.dot(&kd),
            gradient: kd,
            hessian: self.stiffness,
        })
    }
}

/// `q * phi` from DC voltages on the electrodes.
#[derive(Clone, Debug)]
pub struct ElectrodeDc<'a> {
    pub set: &'a ElectrodeSet,
    pub voltages: BTreeMap<u32, f64>,
    pub charge: f64,
}

impl PotentialEnergy for ElectrodeDc<'_> {
    fn expand(&self, p: &Point) -> Result<Taylor2> {
        let jet = self.set.weighted_jet(
            |role| match role {
                ElectrodeRole::Dc(i) => self.voltages.get(&i).copied().unwrap_or(0.0),
                _ => 0.0,
            },
            p,
        )?;
        Ok(Taylor2 {
            value: jet.v,
            gradient: jet.gradient(),
            hessian: jet.hessian(),
        }
        .scale(self.charge))
    }
}

/// Sum of several energy terms.
#[derive(Default)]
pub struct CombinedPotential<'a> {
    terms: Vec<Box<dyn PotentialEnergy + 'a>>,
}

impl<'a> CombinedPotential<'a> {
    pub fn new() -> Self {
        CombinedPotential { terms: Vec::new() }
    }

    pub fn with(mut self, term: impl PotentialEnergy + 'a) -> Self {
        self.terms.push(Box::new(term));
        self
    }
}

impl PotentialEnergy for CombinedPotential<'_> {
    fn expand(&self, p: &Point) -> Result<Taylor2> {
        self.terms
            .iter()
            .try_fold(Taylor2::zero(), |acc, t| Ok(acc + t.expand(p)?))
    }

    fn energy(&self, p: &Point) -> Result<f64> {
        self.terms
            .iter()
            .try_fold(0.0, |acc, t| Ok(acc + t.energy(p)?))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::electrostatics::ElectrodePatch;

    fn rails_with_tweakers() -> ElectrodeSet {
        let l = 1e-3;
        let mk = |n: &str, y0: f64, y1: f64, r| ElectrodePatch::new(n, (-l, l), (y0, y1), r).unwrap();
        ElectrodeSet::new(vec![
            mk("rf_l", -87e-6, -30e-6, ElectrodeRole::MainRf),
            mk("rf_r", 30e-6, 87e-6, ElectrodeRole::MainRf),
            mk("tw_l", -112e-6, -92e-6, ElectrodeRole::TweakerLeft),
            mk("tw_r", 92e-6, 112e-6, ElectrodeRole::TweakerRight),
            mk("dc", -l, -200e-6, ElectrodeRole::Dc(0)),
        ])
        .unwrap()
    }

    fn drive() -> RfDrive {
        RfDrive::new(185.0, 2.0 * PI * 42.5e6)
            .unwrap()
            .with_tweakers(6.0, 9.0)
    }

    #[test]
    fn phasor_phase_cases() {
        let set = rails_with_tweakers();
        let p = Point::new(3e-6, 2e-6, 47e-6);
        let off = RfField::new(&set, drive().with_tweakers(0.0, 0.0)).phasor(&p).unwrap();
        let main = set
            .weighted_field(|r| if r == ElectrodeRole::MainRf { 185.0 } else { 0.0 }, &p)
            .unwrap();
        for a in 0..3 {
            assert_eq!(off[a], Complex64::from(main[a]));
        }
        let inphase = RfField::new(&set, drive()).phasor(&p).unwrap();
        assert!(inphase.iter().all(|c| c.im == 0.0));

        // quadrature: cross term vanishes
        let f = RfField::new(&set, drive().with_phase(PI / 2.0));
        let (m, t) = f.components(&p).unwrap();
        let expected = m.norm_squared() + t.norm_squared();
        let got = f.magnitude_sq(&p).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn expansion_matches_finite_differences() {
        let set = rails_with_tweakers();
        let species = IonSpecies::ytterbium_174();
        for phase in [0.0, 0.7, -PI] {
            let pp = Pseudopotential::new(&set, drive().with_phase(phase), &species);
            let p = Point::new(2e-6, -3e-6, 40e-6);
            let t = pp.expand(&p).unwrap();
            assert!((t.value - pp.energy(&p).unwrap()).abs() < 1e-12 * t.value);
            let h = 1e-9;
            for i in 0..3 {
                let e = Vector3::ith(i, h);
                let gp = pp.expand(&(p + e)).unwrap();
                let gm = pp.expand(&(p - e)).unwrap();
                let fd_grad = (gp.value - gm.value) / (2.0 * h);
                assert!((t.gradient[i] - fd_grad).abs() < 1e-6 * t.gradient.norm());
                for j in 0..3 {
                    let fd = (gp.gradient[j] - gm.gradient[j]) / (2.0 * h);
                    let scale = t.hessian.norm();
                    assert!(
                        (t.hessian[(i, j)] - fd).abs() < 1e-5 * scale,
                        "H[{i},{j}] {} vs {fd}",
                        t.hessian[(i, j)]
                    );
                }
            }
            let asym = (t.hessian - t.hessian.transpose()).norm();
            assert!(asym <= 1e-9 * t.hessian.norm());
        }
    }

    #[test]
    fn electrode_dc_energy_matches_superpose() {
        let set = rails_with_tweakers();
        let dc = ElectrodeDc {
            set: &set,
            voltages: BTreeMap::from([(0, 2.5)]),
            charge: 1.6e-19,
        };
        let p = Point::new(0.0, 0.0, 50e-6);
        let v = crate::electrostatics::Voltages::new()
            .with(ElectrodeRole::MainRf, 0.0)
            .with(ElectrodeRole::TweakerLeft, 0.0)
            .with(ElectrodeRole::TweakerRight, 0.0)
            .with(ElectrodeRole::Dc(0), 2.5);
        let (phi, e) = set.superpose(&v, &p).unwrap();
        let t = dc.expand(&p).unwrap();
        assert!((t.value - 1.6e-19 * phi).abs() < 1e-12 * t.value.abs());
        assert!((t.gradient + e * 1.6e-19).norm() < 1e-12 * t.gradient.norm());
    }

    #[test]
    fn quadrupole_is_traceless() {
        let w = HarmonicWell::dc_quadrupole(Point::zeros(), 1.0, 3.0, 0.3);
        assert!(w.stiffness.trace().abs() < 1e-12);
        assert_eq!(w.stiffness[(0, 0)], 9.0);
    }
}
