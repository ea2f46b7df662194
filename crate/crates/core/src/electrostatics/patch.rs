use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taylor::Jet3;
use crate::Point;

/// What an electrode is wired to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElectrodeRole {
    MainRf,
    /// Tweaker electrode on the negative-y side.
    TweakerLeft,
    /// Tweaker electrode on the positive-y side.
    TweakerRight,
    Dc(u32),
    Ground,
}

impl ElectrodeRole {
    pub fn is_rf(self) -> bool {
        matches!(
            self,
            ElectrodeRole::MainRf | ElectrodeRole::TweakerLeft | ElectrodeRole::TweakerRight
        )
    }

    pub fn is_tweaker(self) -> bool {
        matches!(self, ElectrodeRole::TweakerLeft | ElectrodeRole::TweakerRight)
    }
}

impl fmt::Display for ElectrodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElectrodeRole::MainRf => f.write_str("rf"),
            ElectrodeRole::TweakerLeft => f.write_str("tweaker_left"),
            ElectrodeRole::TweakerRight => f.write_str("tweaker_right"),
            ElectrodeRole::Dc(i) => write!(f, "dc:{i}"),
            ElectrodeRole::Ground => f.write_str("ground"),
        }
    }
}

impl std::str::FromStr for ElectrodeRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rf" => Ok(ElectrodeRole::MainRf),
            "tweaker_left" => Ok(ElectrodeRole::TweakerLeft),
            "tweaker_right" => Ok(ElectrodeRole::TweakerRight),
            "ground" => Ok(ElectrodeRole::Ground),
            _ => s
                .strip_prefix("dc:")
                .and_then(|i| i.parse().ok())
                .map(ElectrodeRole::Dc)
                .ok_or_else(|| {
                    format!(
                        "unknown role `{s}` (expected rf, tweaker_left, tweaker_right, ground or dc:<index>)"
                    )
                }),
        }
    }
}

/// Axis-aligned rectangular electrode in the trap plane `z = 0`.
///
/// Everything outside the listed patches is treated as grounded metal, the
/// usual gapless-plane approximation for surface traps.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectrodePatch {
    name: String,
    x: (f64, f64),
    y: (f64, f64),
    role: ElectrodeRole,
}

fn check_above_plane(p: &Point) -> Result<()> {
    if p.z > 0.0 {
        Ok(())
    } else {
        Err(Error::BelowPlane { z: p.z })
    }
}

impl ElectrodePatch {
    /// Corners are in meters.
    pub fn new(
        name: impl Into<String>,
        x: (f64, f64),
        y: (f64, f64),
        role: ElectrodeRole,
    ) -> Result<Self> {
        let name = name.into();
        let finite = [x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite());
        if !finite || x.0 >= x.1 || y.0 >= y.1 {
            return Err(Error::InvalidPatch {
                name,
                reason: format!(
                    "need x_min < x_max and y_min < y_max, got x = {x:?}, y = {y:?}"
                ),
            });
        }
        Ok(ElectrodePatch { name, x, y, role })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> ElectrodeRole {
        self.role
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y
    }

    pub fn area(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0)
    }

    pub fn diagonal(&self) -> f64 {
        (self.x.1 - self.x.0).hypot(self.y.1 - self.y.0)
    }

    /// True when the interiors of the two rectangles intersect. Shared edges
    /// are allowed.
    pub fn overlaps(&self, other: &ElectrodePatch) -> bool {
        let ox = self.x.1.min(other.x.1) - self.x.0.max(other.x.0);
        let oy = self.y.1.min(other.y.1) - self.y.0.max(other.y.0);
        ox > 0.0 && oy > 0.0
    }

    fn corners(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        [(self.x.0, 0), (self.x.1, 1)].into_iter().flat_map(move |(xi, i)| {
            [(self.y.0, 0), (self.y.1, 1)]
                .into_iter()
                .map(move |(yj, j)| (xi, yj, if (i + j) % 2 == 0 { 1.0 } else { -1.0 }))
        })
    }

    /// Potential at `p` with the patch held at `v` volts and the rest of the
    /// plane grounded.
    pub fn potential(&self, v: f64, p: &Point) -> Result<f64> {
        check_above_plane(p)?;
        let z = p.z;
        let sum: f64 = self
            .corners()
            .map(|(xi, yj, sign)| {
                let (dx, dy) = (xi - p.x, yj - p.y);
                let r = (dx * dx + dy * dy + z * z).sqrt();
                sign * (dx * dy).atan2(z * r)
            })
            .sum();
        Ok(v / (2.0 * PI) * sum)
    }

    /// Electric field `-grad(potential)`, from the closed-form derivatives of
    /// the corner arctangents.
    pub fn field(&self, v: f64, p: &Point) -> Result<Vector3<f64>> {
        check_above_plane(p)?;
        let z = p.z;
        let z2 = z * z;
        let mut e = Vector3::zeros();
        for (xi, yj, sign) in self.corners() {
            let (dx, dy) = (xi - p.x, yj - p.y);
            let (ax, ay) = (dx * dx + z2, dy * dy + z2);
            let r = (dx * dx + dy * dy + z2).sqrt();
            // partial derivatives of atan(dx dy / (z r)) w.r.t. dx, dy, z
            let gx = z * dy / (ax * r);
            let gy = z * dx / (ay * r);
            let gz = -dx * dy * (r * r + z2) / (ax * ay * r);
            e += sign * Vector3::new(gx, gy, -gz);
        }
        Ok(e * (v / (2.0 * PI)))
    }

    /// Potential with exact derivatives up to third order.
    pub(crate) fn potential_jet(&self, v: f64, p: &Point) -> Jet3 {
        let z = Jet3::linear(p.z, [0.0, 0.0, 1.0]);
        let z2 = z * z;
        let mut sum = Jet3::ZERO;
        for (xi, yj, sign) in self.corners() {
            let dx = Jet3::linear(xi - p.x, [-1.0, 0.0, 0.0]);
            let dy = Jet3::linear(yj - p.y, [0.0, -1.0, 0.0]);
            let r = (dx * dx + dy * dy + z2).sqrt();
            // z r > 0 above the plane, so atan2 reduces to atan of the ratio
            let g = (dx * dy * (z * r).recip()).atan();
            sum = sum + g.scale(sign);
        }
        sum.scale(v / (2.0 * PI))
    }
}
