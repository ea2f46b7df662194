//! Run configuration: one TOML file whose sections mirror the physics types.
//!
//! Keys carry their unit as a suffix (`_um`, `_nm`, `_mhz`, `_mw_cm2`, `_ms`,
//! `_s`, `_cps`, `_e`, `_v`) and are converted to SI on load. Relative paths
//! are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::charging::{ChargingModelConfig, ExposureSettings};
use crate::constants::elementary_charge;
use crate::electrostatics::{ElectrodeSet, GeometryFile, PatchEntry};
use crate::error::{Error, Result};
use crate::fluorescence::{MeasurementProtocol, StandingWaveConfig};
use crate::trap::{DcConfinement, IonSpecies, RfDrive, SolverOptions};
use crate::Point;

/// Batch commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    NullFind,
    HeightCurve,
    FringeScan,
    LineshapeScan,
    Fit,
    ChargingSim,
    Bifurcation,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::NullFind => "null-find",
            Command::HeightCurve => "height-curve",
            Command::FringeScan => "fringe-scan",
            Command::LineshapeScan => "lineshape-scan",
            Command::Fit => "fit",
            Command::ChargingSim => "charging-sim",
            Command::Bifurcation => "bifurcation",
            Command::Validate => "validate",
        }
    }

    /// Config sections the command reads.
    pub fn required_sections(self) -> &'static [&'static str] {
        match self {
            Command::NullFind => &["geometry", "species", "drive"],
            Command::HeightCurve => &["geometry", "species", "drive", "height_curve"],
            Command::FringeScan => &[
                "geometry",
                "species",
                "drive",
                "dc",
                "standing_wave",
                "protocol",
                "fringe_scan",
            ],
            Command::LineshapeScan => &["species", "drive", "standing_wave", "protocol", "lineshape_scan"],
            Command::Fit => &["species", "drive", "standing_wave", "fit"],
            Command::ChargingSim => &["geometry", "species", "drive", "dc", "standing_wave", "charging"],
            Command::Bifurcation => &[
                "geometry",
                "species",
                "drive",
                "dc",
                "standing_wave",
                "charging",
                "bifurcation",
            ],
            Command::Validate => &[],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub geometry: Option<RawGeometry>,
    pub species: Option<RawSpecies>,
    pub drive: Option<RawDrive>,
    pub dc: Option<RawDc>,
    pub solver: Option<RawSolver>,
    pub height_curve: Option<RawHeightCurve>,
    pub standing_wave: Option<RawStandingWave>,
    pub protocol: Option<RawProtocol>,
    pub fringe_scan: Option<RawFringeScan>,
    pub lineshape_scan: Option<RawLineshapeScan>,
    pub fit: Option<RawFit>,
    pub charging: Option<RawCharging>,
    pub bifurcation: Option<RawBifurcation>,
}

/// Either a separate geometry file or inline `[[geometry.patch]]` tables.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawGeometry {
    pub file: Option<PathBuf>,
    pub patch: Option<Vec<PatchEntry>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpecies {
    /// Key into the bundled constants table.
    pub name: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawDrive {
    pub v_main_v: f64,
    pub frequency_mhz: f64,
    /// Signed amplitude on both tweakers; negative drives them at phase -pi.
    #[serde(default)]
    pub tweaker_v: f64,
    /// Overrides the phase implied by the sign of `tweaker_v`.
    pub tweaker_phase_deg: Option<f64>,
    pub tweaker_scale: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawDc {
    pub axial_frequency_mhz: f64,
    pub vertical_fraction: Option<f64>,
    /// Extra static voltages keyed by DC electrode index.
    #[serde(default)]
    pub electrode_v: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub initial_height_um: Option<f64>,
    pub null_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub max_step_um: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawHeightCurve {
    pub tweaker_v: [f64; 2],
    pub points: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawStandingWave {
    pub intensity_mw_cm2: f64,
    pub detuning_mhz: f64,
    pub waist_um: f64,
    pub background_cps: f64,
    pub node_height_um: f64,
    pub collection_efficiency: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawProtocol {
    pub exposure_ms: f64,
    pub repeats: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawFringeScan {
    pub tweaker_v: [f64; 2],
    pub points: usize,
    #[serde(default)]
    pub noise: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawLineshapeScan {
    pub detuning_mhz: [f64; 2],
    pub points: usize,
    pub a_z_nm: f64,
    #[serde(default)]
    pub offset_nm: f64,
    #[serde(default = "default_true")]
    pub noise: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawFit {
    /// CSV written by `lineshape-scan`; defaults to `lineshape.csv` in the
    /// output directory.
    pub input: Option<PathBuf>,
    pub a_z_guess_nm: Option<f64>,
    pub scale_guess: Option<f64>,
    pub background_guess_cps: Option<f64>,
    #[serde(default)]
    pub offset_nm: f64,
    #[serde(default)]
    pub fit_offset: bool,
    #[serde(default = "default_true")]
    pub fit_scale: bool,
    #[serde(default = "default_true")]
    pub fit_background: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawCharging {
    pub eta_c_per_j: f64,
    pub intensity_exponent: Option<f64>,
    pub reference_intensity_mw_cm2: Option<f64>,
    #[serde(default)]
    pub screening: bool,
    #[serde(default)]
    pub initial_charge_e: f64,
    /// Patch centre relative to the point below the ion.
    #[serde(default)]
    pub patch_center_um: [f64; 2],
    pub duration_s: f64,
    pub timestep_s: f64,
    pub displacement_limit_um: Option<f64>,
    pub max_step_nm: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawBifurcation {
    pub x_range_um: [f64; 2],
    pub spacing_nm: Option<f64>,
    /// Patch charges to classify.
    pub charges_e: Vec<f64>,
    pub bisection_rel_tol: Option<f64>,
}

/// Axial scan and bisection settings in SI units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSettings {
    pub x_range: (f64, f64),
    pub spacing: f64,
    /// C
    pub charges: Vec<f64>,
    pub bisection_rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargingSettings {
    pub model: ChargingModelConfig,
    /// C
    pub initial_charge: f64,
    /// Offset of the patch centre from the point below the ion (m).
    pub patch_center_offset: [f64; 2],
    pub exposure: ExposureSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl ScanRange {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|i| self.start + (self.end - self.start) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineshapeSettings {
    /// rad/s
    pub detunings: ScanRange,
    pub a_z: f64,
    pub offset: f64,
    pub noise: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub input: Option<PathBuf>,
    pub a_z_guess: f64,
    pub scale_guess: Option<f64>,
    pub background_guess: Option<f64>,
    pub offset: f64,
    pub fit_offset: bool,
    pub fit_scale: bool,
    pub fit_background: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeSettings {
    /// V
    pub voltages: ScanRange,
    pub noise: bool,
}

/// Solver settings plus the starting point of the null search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub initial_guess: Point,
    pub max_iterations: usize,
    pub max_step: f64,
    pub null_tolerance: f64,
}

impl SolverSettings {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            max_iterations: self.max_iterations,
            max_step: self.max_step,
            null_tolerance: self.null_tolerance,
            ..Default::default()
        }
    }
}

/// Patch as resolved from the geometry, in meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPatch {
    pub name: String,
    pub role: String,
    pub x_m: [f64; 2],
    pub y_m: [f64; 2],
}

/// Fully resolved configuration in SI units. Sections absent from the file
/// are `None`.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub source: PathBuf,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub geometry_source: Option<PathBuf>,
    pub geometry: Option<Vec<ResolvedPatch>>,
    #[serde(skip)]
    pub electrodes: Option<ElectrodeSet>,
    pub species: Option<IonSpecies>,
    pub drive: Option<RfDrive>,
    pub dc: Option<DcConfinement>,
    pub solver: SolverSettings,
    pub height_curve: Option<ScanRange>,
    pub standing_wave: Option<StandingWaveConfig>,
    pub protocol: Option<MeasurementProtocol>,
    pub fringe_scan: Option<FringeSettings>,
    pub lineshape_scan: Option<LineshapeSettings>,
    pub fit: Option<FitSettings>,
    pub charging: Option<ChargingSettings>,
    pub bifurcation: Option<BifurcationSettings>,
}

/// Collects diagnostics with their key paths.
#[derive(Default)]
struct Checker {
    out: Vec<String>,
}

impl Checker {
    fn push(&mut self, key: &str, msg: impl fmt::Display) {
        self.out.push(format!("{key}: {msg}"));
    }

    fn positive(&mut self, key: &str, v: f64) -> bool {
        let ok = v > 0.0 && v.is_finite();
        if !ok {
            self.push(key, format!("must be > 0 (got {v})"));
        }
        ok
    }

    fn non_negative(&mut self, key: &str, v: f64) -> bool {
        let ok = v >= 0.0 && v.is_finite();
        if !ok {
            self.push(key, format!("must be >= 0 (got {v})"));
        }
        ok
    }

    fn finite(&mut self, key: &str, v: f64) -> bool {
        let ok = v.is_finite();
        if !ok {
            self.push(key, format!("must be finite (got {v})"));
        }
        ok
    }

    fn range(&mut self, key: &str, r: [f64; 2], points: usize, min_points: usize) -> Option<ScanRange> {
        let mut ok = self.finite(&format!("{key}[0]"), r[0]) & self.finite(&format!("{key}[1]"), r[1]);
        if ok && r[0] >= r[1] {
            self.push(key, format!("start must be below end (got [{}, {}])", r[0], r[1]));
            ok = false;
        }
        if points < min_points {
            self.push(&format!("{}.points", key.rsplit_once('.').map_or(key, |p| p.0)), format!("need at least {min_points} (got {points})"));
            ok = false;
        }
        ok.then(|| ScanRange {
            start: r[0],
            end: r[1],
            points,
        })
    }
}

fn mhz(v: f64) -> f64 {
    2.0 * PI * v * 1e6
}

/// Wraps a phase into [-pi, pi).
fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    fn present(&self, section: &str) -> bool {
        match section {
            "geometry" => self.geometry.is_some(),
            "species" => self.species.is_some(),
            "drive" => self.drive.is_some(),
            "dc" => self.dc.is_some(),
            "height_curve" => self.height_curve.is_some(),
            "standing_wave" => self.standing_wave.is_some(),
            "protocol" => self.protocol.is_some(),
            "fringe_scan" => self.fringe_scan.is_some(),
            "lineshape_scan" => self.lineshape_scan.is_some(),
            "fit" => self.fit.is_some(),
            "charging" => self.charging.is_some(),
            "bifurcation" => self.bifurcation.is_some(),
            _ => false,
        }
    }
}

impl RunConfig {
    /// Reads and resolves a config file. Any problem, including every
    /// validation diagnostic, becomes an [`Error::Config`].
    pub fn load(path: &Path, command: Command) -> Result<Self> {
        let (cfg, diags) = Self::load_with_diagnostics(path, command)?;
        match cfg {
            Some(c) if diags.is_empty() => Ok(c),
            _ => Err(Error::Config {
                path: path.to_owned(),
                message: diags.join("; "),
            }),
        }
    }

    /// Resolves what it can and reports every problem found. Parse errors
    /// (with line and column) are returned as errors since nothing can be
    /// resolved from an unreadable file.
    pub fn load_with_diagnostics(path: &Path, command: Command) -> Result<(Option<Self>, Vec<String>)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw = RawConfig::parse(&text).map_err(|message| Error::Config {
            path: path.to_owned(),
            message,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let (cfg, diags) = resolve(&raw, base, path, command);
        Ok((Some(cfg), diags))
    }

    pub fn electrodes(&self) -> Result<&ElectrodeSet> {
        self.electrodes.as_ref().ok_or_else(|| self.missing("geometry"))
    }

    pub fn species(&self) -> Result<&IonSpecies> {
        self.species.as_ref().ok_or_else(|| self.missing("species"))
    }

    pub fn drive(&self) -> Result<&RfDrive> {
        self.drive.as_ref().ok_or_else(|| self.missing("drive"))
    }

    pub fn dc(&self) -> Result<&DcConfinement> {
        self.dc.as_ref().ok_or_else(|| self.missing("dc"))
    }

    pub fn standing_wave(&self) -> Result<&StandingWaveConfig> {
        self.standing_wave.as_ref().ok_or_else(|| self.missing("standing_wave"))
    }

    pub fn protocol(&self) -> Result<&MeasurementProtocol> {
        self.protocol.as_ref().ok_or_else(|| self.missing("protocol"))
    }

    pub fn missing(&self, section: &str) -> Error {
        Error::Config {
            path: self.source.clone(),
            message: format!("missing section [{section}]"),
        }
    }
}

/// Every problem with the file for the given command, without running anything.
pub fn validate(path: &Path, command: Command) -> Result<Vec<String>> {
    Ok(RunConfig::load_with_diagnostics(path, command)?.1)
}

fn resolve(raw: &RawConfig, base: &Path, source: &Path, command: Command) -> (RunConfig, Vec<String>) {
    let mut c = Checker::default();
    for section in command.required_sections() {
        if !raw.present(section) {
            c.push(section, format!("missing section required by `{command}`"));
        }
    }

    let (geometry_source, geometry, electrodes) = match &raw.geometry {
        None => (None, None, None),
        Some(g) => resolve_geometry(g, base, &mut c),
    };

    let species = raw.species.as_ref().and_then(|s| {
        let sp = IonSpecies::from_table(&s.name);
        if sp.is_none() {
            let known: Vec<String> = crate::constants::table().species.keys().cloned().collect();
            c.push("species.name", format!("unknown species `{}` (known: {})", s.name, known.join(", ")));
        }
        sp
    });

    let drive = raw.drive.as_ref().and_then(|d| {
        let ok = c.non_negative("drive.v_main_v", d.v_main_v) & c.positive("drive.frequency_mhz", d.frequency_mhz)
            & c.finite("drive.tweaker_v", d.tweaker_v);
        let scale_ok = d.tweaker_scale.is_none_or(|s| c.non_negative("drive.tweaker_scale", s));
        let phase_ok = d.tweaker_phase_deg.is_none_or(|p| c.finite("drive.tweaker_phase_deg", p));
        if !(ok && scale_ok && phase_ok) {
            return None;
        }
        let mut drive = RfDrive::new(d.v_main_v, mhz(d.frequency_mhz)).ok()?.with_signed_tweaker(d.tweaker_v);
        if let Some(p) = d.tweaker_phase_deg {
            drive = drive.with_phase(wrap_phase(p.to_radians()));
        }
        if let Some(s) = d.tweaker_scale {
            drive.tweaker_scale = s;
        }
        if let Err(e) = drive.validate() {
            c.push("drive", e);
            return None;
        }
        Some(drive)
    });

    let dc = raw.dc.as_ref().and_then(|d| {
        let mut ok = c.positive("dc.axial_frequency_mhz", d.axial_frequency_mhz);
        let frac = d.vertical_fraction.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&frac) {
            c.push("dc.vertical_fraction", format!("must lie in [0, 1] (got {frac})"));
            ok = false;
        }
        let mut voltages = BTreeMap::new();
        for (k, v) in &d.electrode_v {
            match k.parse::<u32>() {
                Ok(i) => {
                    if c.finite(&format!("dc.electrode_v.{k}"), *v) {
                        voltages.insert(i, *v);
                    }
                }
                Err(_) => {
                    c.push(&format!("dc.electrode_v.{k}"), "keys must be DC electrode indices");
                    ok = false;
                }
            }
        }
        if let Some(set) = &electrodes {
            let known = set.dc_indices();
            for i in voltages.keys() {
                if !known.contains(i) {
                    c.push(&format!("dc.electrode_v.{i}"), "no `dc:{i}` patch in the geometry");
                    ok = false;
                }
            }
        }
        ok.then(|| DcConfinement {
            omega_axial: mhz(d.axial_frequency_mhz),
            vertical_fraction: frac,
            electrode_voltages: voltages,
        })
    });

    let s = raw.solver.clone().unwrap_or_default();
    let defaults = SolverOptions::default();
    let height = s.initial_height_um.unwrap_or(50.0);
    c.positive("solver.initial_height_um", height);
    let null_tolerance = s.null_tolerance.unwrap_or(defaults.null_tolerance);
    c.positive("solver.null_tolerance", null_tolerance);
    let max_step = s.max_step_um.map_or(defaults.max_step, |v| v * 1e-6);
    c.positive("solver.max_step_um", max_step);
    let max_iterations = s.max_iterations.unwrap_or(defaults.max_iterations);
    if max_iterations == 0 {
        c.push("solver.max_iterations", "must be >= 1");
    }
    let solver = SolverSettings {
        initial_guess: Point::new(0.0, 0.0, height * 1e-6),
        max_iterations,
        max_step,
        null_tolerance,
    };

    let height_curve = raw
        .height_curve
        .as_ref()
        .and_then(|h| c.range("height_curve.tweaker_v", h.tweaker_v, h.points, 2));

    let standing_wave = raw.standing_wave.as_ref().and_then(|w| {
        let ok = c.non_negative("standing_wave.intensity_mw_cm2", w.intensity_mw_cm2)
            & c.finite("standing_wave.detuning_mhz", w.detuning_mhz)
            & c.positive("standing_wave.waist_um", w.waist_um)
            & c.non_negative("standing_wave.background_cps", w.background_cps)
            & c.finite("standing_wave.node_height_um", w.node_height_um)
            & c.non_negative("standing_wave.collection_efficiency", w.collection_efficiency);
        ok.then(|| StandingWaveConfig {
            // 1 mW/cm^2 = 10 W/m^2
            i_peak: w.intensity_mw_cm2 * 10.0,
            detuning: mhz(w.detuning_mhz),
            waist: w.waist_um * 1e-6,
            background_rate: w.background_cps,
            node_offset: w.node_height_um * 1e-6,
            collection_efficiency: w.collection_efficiency,
        })
    });

    let seed = raw.seed.unwrap_or(0);
    let protocol = raw.protocol.as_ref().and_then(|p| {
        let mut ok = c.positive("protocol.exposure_ms", p.exposure_ms);
        if p.repeats == 0 {
            c.push("protocol.repeats", "must be >= 1");
            ok = false;
        }
        ok.then_some(MeasurementProtocol {
            exposure: p.exposure_ms * 1e-3,
            repeats: p.repeats,
            rng_seed: seed,
        })
    });

    let fringe_scan = raw.fringe_scan.as_ref().and_then(|f| {
        c.range("fringe_scan.tweaker_v", f.tweaker_v, f.points, 5).map(|voltages| FringeSettings {
            voltages,
            noise: f.noise,
        })
    });

    let lineshape_scan = raw.lineshape_scan.as_ref().and_then(|l| {
        let range = c.range("lineshape_scan.detuning_mhz", l.detuning_mhz, l.points, 4);
        let ok = c.non_negative("lineshape_scan.a_z_nm", l.a_z_nm) & c.finite("lineshape_scan.offset_nm", l.offset_nm);
        let r = range?;
        ok.then(|| LineshapeSettings {
            detunings: ScanRange {
                start: mhz(r.start),
                end: mhz(r.end),
                points: r.points,
            },
            a_z: l.a_z_nm * 1e-9,
            offset: l.offset_nm * 1e-9,
            noise: l.noise,
        })
    });

    let fit = raw.fit.as_ref().and_then(|f| {
        let a = f.a_z_guess_nm.unwrap_or(15.0);
        let mut ok = c.finite("fit.a_z_guess_nm", a) & c.finite("fit.offset_nm", f.offset_nm);
        if let Some(s) = f.scale_guess {
            ok &= c.positive("fit.scale_guess", s);
        }
        if let Some(b) = f.background_guess_cps {
            ok &= c.non_negative("fit.background_guess_cps", b);
        }
        let input = f.input.as_ref().map(|p| base.join(p));
        if let (Command::Fit, Some(p)) = (command, &input) {
            if !p.is_file() {
                c.push("fit.input", format!("{} does not exist", p.display()));
                ok = false;
            }
        }
        ok.then_some(FitSettings {
            input,
            a_z_guess: a * 1e-9,
            scale_guess: f.scale_guess,
            background_guess: f.background_guess_cps,
            offset: f.offset_nm * 1e-9,
            fit_offset: f.fit_offset,
            fit_scale: f.fit_scale,
            fit_background: f.fit_background,
        })
    });

    let charging = raw.charging.as_ref().and_then(|ch| {
        let mut ok = c.non_negative("charging.eta_c_per_j", ch.eta_c_per_j)
            & c.non_negative("charging.initial_charge_e", ch.initial_charge_e)
            & c.positive("charging.duration_s", ch.duration_s)
            & c.positive("charging.timestep_s", ch.timestep_s)
            & c.finite("charging.patch_center_um[0]", ch.patch_center_um[0])
            & c.finite("charging.patch_center_um[1]", ch.patch_center_um[1]);
        let exponent = ch.intensity_exponent.unwrap_or(1.0);
        ok &= c.finite("charging.intensity_exponent", exponent);
        let reference = ch.reference_intensity_mw_cm2.unwrap_or(40.0);
        ok &= c.positive("charging.reference_intensity_mw_cm2", reference);
        let limit = ch.displacement_limit_um.unwrap_or(5.0);
        ok &= c.positive("charging.displacement_limit_um", limit);
        let step = ch.max_step_nm.unwrap_or(1.0);
        ok &= c.positive("charging.max_step_nm", step);
        if ch.screening {
            c.push("charging.screening", "electrode screening of the patch is not implemented; set false");
            ok = false;
        }
        ok.then(|| ChargingSettings {
            model: ChargingModelConfig {
                eta: ch.eta_c_per_j,
                intensity_exponent: exponent,
                reference_intensity: reference * 10.0,
                screening: false,
            },
            initial_charge: ch.initial_charge_e * elementary_charge(),
            patch_center_offset: [ch.patch_center_um[0] * 1e-6, ch.patch_center_um[1] * 1e-6],
            exposure: ExposureSettings {
                duration: ch.duration_s,
                timestep: ch.timestep_s,
                displacement_limit: limit * 1e-6,
                max_step_displacement: step * 1e-9,
            },
        })
    });

    let bifurcation = raw.bifurcation.as_ref().and_then(|b| {
        let spacing = b.spacing_nm.unwrap_or(10.0);
        let mut ok = c.positive("bifurcation.spacing_nm", spacing);
        let r = b.x_range_um;
        if !(r[0] < r[1]) {
            c.push("bifurcation.x_range_um", format!("start must be below end (got [{}, {}])", r[0], r[1]));
            ok = false;
        } else if spacing > 0.0 && (r[1] - r[0]) * 1e3 / spacing < 4.0 {
            c.push("bifurcation.spacing_nm", "fewer than 5 grid points across x_range_um");
            ok = false;
        }
        for (i, q) in b.charges_e.iter().enumerate() {
            ok &= c.non_negative(&format!("bifurcation.charges_e[{i}]"), *q);
        }
        let tol = b.bisection_rel_tol.unwrap_or(1e-6);
        if !(tol > 0.0 && tol < 1.0) {
            c.push("bifurcation.bisection_rel_tol", format!("must lie in (0, 1) (got {tol})"));
            ok = false;
        }
        ok.then(|| BifurcationSettings {
            x_range: (r[0] * 1e-6, r[1] * 1e-6),
            spacing: spacing * 1e-9,
            charges: b.charges_e.iter().map(|q| q * elementary_charge()).collect(),
            bisection_rel_tol: tol,
        })
    });

    let cfg = RunConfig {
        source: source.to_owned(),
        seed,
        output_dir: raw.output_dir.as_ref().map(|p| base.join(p)),
        geometry_source,
        geometry,
        electrodes,
        species,
        drive,
        dc,
        solver,
        height_curve,
        standing_wave,
        protocol,
        fringe_scan,
        lineshape_scan,
        fit,
        charging,
        bifurcation,
    };
    (cfg, c.out)
}

type ResolvedGeometry = (Option<PathBuf>, Option<Vec<ResolvedPatch>>, Option<ElectrodeSet>);

fn resolve_geometry(g: &RawGeometry, base: &Path, c: &mut Checker) -> ResolvedGeometry {
    let (source, file) = match (&g.file, &g.patch) {
        (Some(_), Some(_)) => {
            c.push("geometry", "give either `file` or inline `patch` tables, not both");
            return (None, None, None);
        }
        (None, None) => {
            c.push("geometry", "needs `file` or inline `patch` tables");
            return (None, None, None);
        }
        (Some(f), None) => {
            let path = base.join(f);
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    c.push("geometry.file", format!("{}: {e}", path.display()));
                    return (Some(path), None, None);
                }
            };
            match GeometryFile::parse(&text) {
                Ok(file) => (Some(path), file),
                Err(e) => {
                    c.push("geometry.file", format!("{}: {e}", path.display()));
                    return (Some(path), None, None);
                }
            }
        }
        (None, Some(patches)) => (
            None,
            GeometryFile {
                description: None,
                patches: patches.clone(),
            },
        ),
    };
    let diags = file.diagnostics();
    let key = if source.is_some() { "geometry.file" } else { "geometry.patch" };
    for d in &diags {
        c.push(key, d);
    }
    if !diags.is_empty() {
        return (source, None, None);
    }
    let resolved = file
        .patches
        .iter()
        .map(|p| ResolvedPatch {
            name: p.name.clone(),
            role: p.role.clone(),
            x_m: [p.x_um[0] * 1e-6, p.x_um[1] * 1e-6],
            y_m: [p.y_um[0] * 1e-6, p.y_um[1] * 1e-6],
        })
        .collect();
    match file.build() {
        Ok(set) => (source, Some(resolved), Some(set)),
        Err(e) => {
            c.push(key, e);
            (source, None, None)
        }
    }
}
