use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::patch::{ElectrodePatch, ElectrodeRole};
use crate::error::{Error, Result};
use crate::taylor::Jet3;
use crate::Point;

/// Ordered collection of non-overlapping electrodes.
///
/// Coordinates: `z` is normal to the trap surface, `x` runs along the RF rails
/// (the axial direction) and `y` is the transverse in-plane direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectrodeSet {
    patches: Vec<ElectrodePatch>,
}

/// Voltage assigned to each electrode role. Ground is implicitly 0 V.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Voltages(BTreeMap<ElectrodeRole, f64>);

impl Voltages {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, role: ElectrodeRole, v: f64) -> Self {
        self.0.insert(role, v);
        self
    }

    pub fn set(&mut self, role: ElectrodeRole, v: f64) {
        self.0.insert(role, v);
    }

    pub fn get(&self, role: ElectrodeRole) -> Option<f64> {
        if role == ElectrodeRole::Ground {
            Some(0.0)
        } else {
            self.0.get(&role).copied()
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Voltages(self.0.iter().map(|(r, v)| (*r, v * alpha)).collect())
    }
}

/// Every pair of patches whose interiors intersect, by name.
pub fn overlapping_pairs(patches: &[ElectrodePatch]) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for (i, a) in patches.iter().enumerate() {
        for b in &patches[i + 1..] {
            if a.overlaps(b) {
                pairs.push((a.name().to_owned(), b.name().to_owned()));
            }
        }
    }
    pairs
}

impl ElectrodeSet {
    pub fn new(patches: Vec<ElectrodePatch>) -> Result<Self> {
        if let Some((first, second)) = overlapping_pairs(&patches).into_iter().next() {
            return Err(Error::OverlappingPatches { first, second });
        }
        Ok(ElectrodeSet { patches })
    }

    pub fn patches(&self) -> &[ElectrodePatch] {
        &self.patches
    }

    pub fn has_role(&self, role: ElectrodeRole) -> bool {
        self.patches.iter().any(|p| p.role() == role)
    }

    pub fn count_role(&self, role: ElectrodeRole) -> usize {
        self.patches.iter().filter(|p| p.role() == role).count()
    }

    pub fn dc_indices(&self) -> Vec<u32> {
        let mut idx: Vec<u32> = self
            .patches
            .iter()
            .filter_map(|p| match p.role() {
                ElectrodeRole::Dc(i) => Some(i),
                _ => None,
            })
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Problems that prevent the set from describing a linear RF trap.
    pub fn linear_trap_diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let rails = self.count_role(ElectrodeRole::MainRf);
        if rails < 2 {
            out.push(format!(
                "linear trap needs at least two `rf` patches, found {rails}"
            ));
        }
        out
    }

    /// Sum of potential and field over all patches for the given voltages.
    pub fn superpose(&self, voltages: &Voltages, p: &Point) -> Result<(f64, Vector3<f64>)> {
        let mut phi = 0.0;
        let mut e = Vector3::zeros();
        for patch in &self.patches {
            let v = voltages.get(patch.role()).ok_or_else(|| Error::MissingVoltage {
                role: patch.role().to_string(),
            })?;
            phi += patch.potential(v, p)?;
            e += patch.field(v, p)?;
        }
        Ok((phi, e))
    }

    /// Field from patches weighted by `weight(role)`; zero-weight patches are skipped.
    pub(crate) fn weighted_field(
        &self,
        weight: impl Fn(ElectrodeRole) -> f64,
        p: &Point,
    ) -> Result<Vector3<f64>> {
        let mut e = Vector3::zeros();
        if p.z <= 0.0 {
            return Err(Error::BelowPlane { z: p.z });
        }
        for patch in &self.patches {
            let w = weight(patch.role());
            if w != 0.0 {
                e += patch.field(w, p)?;
            }
        }
        Ok(e)
    }

    pub(crate) fn weighted_jet(
        &self,
        weight: impl Fn(ElectrodeRole) -> f64,
        p: &Point,
    ) -> Result<Jet3> {
        if p.z <= 0.0 {
            return Err(Error::BelowPlane { z: p.z });
        }
        Ok(self
            .patches
            .iter()
            .filter_map(|patch| {
                let w = weight(patch.role());
                (w != 0.0).then(|| patch.potential_jet(w, p))
            })
            .fold(Jet3::ZERO, |acc, j| acc + j))
    }

    /// Loads a geometry file (see [`GeometryFile`]).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file = GeometryFile::parse(&text).map_err(|message| Error::Config {
            path: path.to_owned(),
            message,
        })?;
        file.build().map_err(|e| Error::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }
}

/// On-disk geometry: a list of `[[patch]]` tables with corners in micrometers.
///
/// ```toml
/// [[patch]]
/// name = "rf_left"
/// role = "rf"            # rf | tweaker_left | tweaker_right | ground | dc:<n>
/// x_um = [-3500.0, 3500.0]
/// y_um = [-87.0, -30.0]
/// ```
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    #[serde(default)]
    pub description: Option<String>,
    #[serde(rename = "patch")]
    pub patches: Vec<PatchEntry>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PatchEntry {
    pub name: String,
    pub role: String,
    pub x_um: [f64; 2],
    pub y_um: [f64; 2],
}

impl GeometryFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Every problem with the file, one message each.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut built = Vec::new();
        for entry in &self.patches {
            match entry.to_patch() {
                Ok(p) => built.push(p),
                Err(e) => out.push(e),
            }
        }
        for (a, b) in overlapping_pairs(&built) {
            out.push(format!("patches `{a}` and `{b}` overlap"));
        }
        if out.is_empty() {
            if let Ok(set) = ElectrodeSet::new(built) {
                out.extend(set.linear_trap_diagnostics());
            }
        }
        out
    }

    pub fn build(&self) -> Result<ElectrodeSet> {
        let patches = self
            .patches
            .iter()
            .map(|e| {
                e.to_patch().map_err(|reason| Error::InvalidPatch {
                    name: e.name.clone(),
                    reason,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ElectrodeSet::new(patches)
    }
}

impl PatchEntry {
    fn to_patch(&self) -> Result<ElectrodePatch, String> {
        let role: ElectrodeRole = self
            .role
            .parse()
            .map_err(|e| format!("patch `{}`: {e}", self.name))?;
        ElectrodePatch::new(
            self.name.clone(),
            (self.x_um[0] * 1e-6, self.x_um[1] * 1e-6),
            (self.y_um[0] * 1e-6, self.y_um[1] * 1e-6),
            role,
        )
        .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_wire() -> ElectrodeSet {
        let l = 3.5e-3;
        ElectrodeSet::new(vec![
            ElectrodePatch::new("rf_l", (-l, l), (-87e-6, -30e-6), ElectrodeRole::MainRf).unwrap(),
            ElectrodePatch::new("rf_r", (-l, l), (30e-6, 87e-6), ElectrodeRole::MainRf).unwrap(),
            ElectrodePatch::new("dc", (-l, l), (-30e-6, 30e-6), ElectrodeRole::Dc(0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn linearity_and_zero() {
        let set = five_wire();
        let v = Voltages::new()
            .with(ElectrodeRole::MainRf, 1.3)
            .with(ElectrodeRole::Dc(0), -0.4);
        let p = Point::new(1e-6, 4e-6, 45e-6);
        let (phi, e) = set.superpose(&v, &p).unwrap();
        let (phi2, e2) = set.superpose(&v.scaled(2.0), &p).unwrap();
        assert_eq!(phi2, 2.0 * phi);
        assert_eq!(e2, 2.0 * e);
        let (phi0, e0) = set.superpose(&v.scaled(0.0), &p).unwrap();
        assert_eq!(phi0, 0.0);
        assert_eq!(e0, Vector3::zeros());
    }

    #[test]
    fn missing_role_is_reported() {
        let set = five_wire();
        let v = Voltages::new().with(ElectrodeRole::MainRf, 1.0);
        match set.superpose(&v, &Point::new(0.0, 0.0, 1e-5)) {
            Err(Error::MissingVoltage { role }) => assert_eq!(role, "dc:0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overlap_names_both_patches() {
        let a = ElectrodePatch::new("a", (0.0, 2.0), (0.0, 2.0), ElectrodeRole::Ground).unwrap();
        let b = ElectrodePatch::new("b", (1.0, 3.0), (1.0, 3.0), ElectrodeRole::Ground).unwrap();
        let c = ElectrodePatch::new("c", (2.0, 3.0), (-1.0, 0.5), ElectrodeRole::Ground).unwrap();
        match ElectrodeSet::new(vec![a.clone(), b, c.clone()]) {
            Err(Error::OverlappingPatches { first, second }) => {
                assert_eq!((first.as_str(), second.as_str()), ("a", "b"))
            }
            other => panic!("{other:?}"),
        }
        // touching edges are fine
        assert!(ElectrodeSet::new(vec![a, c]).is_ok());
    }

    #[test]
    fn geometry_file_diagnostics() {
        let text = r#"
            [[patch]]
            name = "rf_a"
            role = "rf"
            x_um = [-100.0, 100.0]
            y_um = [30.0, 87.0]

            [[patch]]
            name = "rf_b"
            role = "rf"
            x_um = [-100.0, 100.0]
            y_um = [80.0, 120.0]
        "#;
        let file = GeometryFile::parse(text).unwrap();
        let diags = file.diagnostics();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("rf_a") && diags[0].contains("rf_b"));
        assert!(file.build().is_err());
    }
}
