//! Physical constants and species data, loaded from the versioned table in
//! `data/constants.toml` which is compiled into the crate.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const TABLE: &str = include_str!("../data/constants.toml");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Physical {
    pub hbar: f64,
    pub speed_of_light: f64,
    pub vacuum_permittivity: f64,
    pub elementary_charge: f64,
    pub atomic_mass_unit: f64,
    pub electron_mass: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SpeciesEntry {
    pub label: String,
    pub atomic_mass_u: f64,
    pub charge_state: i32,
    pub wavelength_nm: f64,
    pub linewidth_mhz: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ConstantsTable {
    pub version: u32,
    pub physical: Physical,
    pub species: std::collections::BTreeMap<String, SpeciesEntry>,
}

/// The compiled-in constants table.
pub fn table() -> &'static ConstantsTable {
    static CELL: OnceLock<ConstantsTable> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str(TABLE).expect("bundled constants table is valid TOML"))
}

pub fn hbar() -> f64 {
    table().physical.hbar
}

pub fn speed_of_light() -> f64 {
    table().physical.speed_of_light
}

pub fn vacuum_permittivity() -> f64 {
    table().physical.vacuum_permittivity
}

pub fn elementary_charge() -> f64 {
    table().physical.elementary_charge
}

/// Coulomb constant 1/(4 pi eps0).
pub fn coulomb_constant() -> f64 {
    1.0 / (4.0 * std::f64::consts::PI * vacuum_permittivity())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parses() {
        let t = table();
        assert_eq!(t.version, 1);
        assert!(t.species.contains_key("yb174_ion"));
        assert_eq!(t.physical.speed_of_light, 299_792_458.0);
    }
}
