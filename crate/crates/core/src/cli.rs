//! Batch driver: `mirror-trap <command> --config <path> [--out <dir>] [--seed <int>]`.
//!
//! Exit codes: 0 success, 1 configuration or parameter error, 2 a solver or
//! fit that did not converge, 3 file I/O.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

use crate::charging::{
    curvature_threshold, exposure_simulation, grid_threshold, minima_on_profile, AxialMinima, AxialProfile,
    ChargePatchState, Classification, ThresholdBracket,
};
use crate::config::{Command, RunConfig};
use crate::constants::elementary_charge;
use crate::error::{Error, Result};
use crate::fluorescence::{
    fit_micromotion, fringe_scan, lineshape_scan, FitParameter, LineshapeFitSpec, MicromotionFit, ScatteringModel,
    SinusoidFit,
};
use crate::output::{lineshape_rows, read_lineshape_csv, OutputSet};
use crate::trap::{
    find_equilibrium, phase_mismatch_micromotion, trap_frequencies, tweaker_height_curve, TrapFrequencies, TrapModel,
};
use crate::Point;

#[derive(Debug, Parser)]
#[command(name = "mirror-trap", version, about = "Surface ion trap on a mirror: null tuning, fluorescence and charging")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` in the config (default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed; overrides `seed` in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// With `validate`: also require the sections this command needs.
    #[arg(long = "for", value_enum)]
    pub for_command: Option<Command>,
}

#[derive(Debug)]
pub struct RunOutcome {
    /// One line for standard output.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. }
        | Error::NotConfining { .. }
        | Error::Quadrature { .. }
        | Error::SingularJacobian { .. }
        | Error::SearchRegionExhausted { .. }
        | Error::TrapInstability { .. }
        | Error::StepTooLarge { .. }
        | Error::BelowPlane { .. } => 2,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => 3,
        _ => 1,
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if cli.command == Command::Validate {
        return match validate_report(&cli.config, cli.for_command.unwrap_or(Command::Validate)) {
            Ok(diags) if diags.is_empty() => {
                println!("{}: ok", cli.config.display());
                0
            }
            Ok(diags) => {
                for d in &diags {
                    println!("{}: {d}", cli.config.display());
                }
                1
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        };
    }
    match run(cli.command, &cli.config, cli.out.as_deref(), cli.seed) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Every diagnostic for `config` as used by `command`.
pub fn validate_report(config: &Path, command: Command) -> Result<Vec<String>> {
    crate::config::validate(config, command)
}

/// Loads the config, applies the overrides and runs one command.
pub fn run(command: Command, config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<RunOutcome> {
    let mut cfg = RunConfig::load(config, command)?;
    if let Some(s) = seed {
        cfg.seed = s;
        if let Some(p) = cfg.protocol.as_mut() {
            p.rng_seed = s;
        }
    }
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut files = OutputSet::new(dir);
    let summary = match command {
        Command::NullFind => null_find(&cfg, &mut files)?,
        Command::HeightCurve => height_curve(&cfg, &mut files)?,
        Command::FringeScan => fringe(&cfg, &mut files)?,
        Command::LineshapeScan => lineshape(&cfg, &mut files)?,
        Command::Fit => fit(&cfg, &mut files)?,
        Command::ChargingSim => charging_sim(&cfg, &mut files)?,
        Command::Bifurcation => bifurcation(&cfg, &mut files)?,
        Command::Validate => format!("{}: ok", config.display()),
    };
    Ok(RunOutcome {
        summary,
        files: files.into_files(),
    })
}

fn trap_model(cfg: &RunConfig) -> Result<TrapModel> {
    Ok(TrapModel {
        electrodes: cfg.electrodes()?.clone(),
        drive: *cfg.drive()?,
        species: cfg.species()?.clone(),
        dc: cfg.dc()?.clone(),
    })
}

fn scattering_model(cfg: &RunConfig) -> Result<ScatteringModel> {
    ScatteringModel::new(cfg.species()?.clone(), cfg.standing_wave()?.clone(), cfg.drive()?.omega)
}

fn to_mhz(w: f64) -> f64 {
    w / (2.0 * PI * 1e6)
}

/// Ion equilibrium with the static null at the RF null, and the secular
/// frequencies there.
fn equilibrium(cfg: &RunConfig) -> Result<(TrapModel, Point, TrapFrequencies)> {
    let trap = trap_model(cfg)?;
    let opts = cfg.solver.options();
    let null = trap.find_rf_null(&cfg.solver.initial_guess, &opts)?.position;
    let (ion, freqs) = {
        let total = trap.total_potential(null);
        let ion = find_equilibrium(&total, &null, &opts)?;
        (ion, trap_frequencies(&total, trap.species.mass, &ion)?)
    };
    Ok((trap, ion, freqs))
}

#[derive(Serialize)]
struct NullRow {
    x_m: f64,
    y_m: f64,
    z_m: f64,
    /// |E| per volt of applied amplitude ((V/m)/V).
    residual_per_v: f64,
    micromotion_m: f64,
}

#[derive(Serialize)]
struct NullReport {
    phase_matched: bool,
    position_m: [f64; 3],
    residual_per_v: Option<f64>,
    iterations: Option<usize>,
    field_v_per_m: Option<f64>,
    micromotion_m: f64,
    micromotion_beta: f64,
    secular_frequencies_mhz: Option<[f64; 3]>,
    secular_axes: Option<[[f64; 3]; 3]>,
}

fn null_find(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let set = cfg.electrodes()?;
    let drive = cfg.drive()?;
    let species = cfg.species()?;
    let opts = cfg.solver.options();
    let guess = cfg.solver.initial_guess;

    let (report, summary) = if drive.is_phase_matched() {
        let null = crate::trap::find_rf_null(set, drive, &guess, &opts)?;
        let mm = crate::trap::micromotion_amplitude(set, drive, species, &null.position)?;
        // frequencies need the static confinement; without it only the null is reported
        let freqs = match cfg.dc.as_ref() {
            Some(dc) => {
                let trap = TrapModel {
                    electrodes: set.clone(),
                    drive: *drive,
                    species: species.clone(),
                    dc: dc.clone(),
                };
                let total = trap.total_potential(null.position);
                let ion = find_equilibrium(&total, &null.position, &opts)?;
                Some(trap_frequencies(&total, species.mass, &ion)?)
            }
            None => None,
        };
        let p = null.position;
        let summary = format!(
            "RF null at z = {:.4} um (x = {:.3e} m, y = {:.3e} m), residual {:.2e} (V/m)/V",
            p.z * 1e6,
            p.x,
            p.y,
            null.residual
        );
        (
            NullReport {
                phase_matched: true,
                position_m: [p.x, p.y, p.z],
                residual_per_v: Some(null.residual),
                iterations: Some(null.iterations),
                field_v_per_m: None,
                micromotion_m: mm.amplitude,
                micromotion_beta: mm.beta,
                secular_frequencies_mhz: freqs.map(|f| f.omega.map(to_mhz)),
                secular_axes: freqs.map(|f| {
                    let a = f.axes;
                    [0, 1, 2].map(|c| [a[(0, c)], a[(1, c)], a[(2, c)]])
                }),
            },
            summary,
        )
    } else {
        let mis = phase_mismatch_micromotion(set, drive, species, &guess, 50e-6, &opts)?;
        let p = mis.position;
        let summary = format!(
            "no RF null (tweaker phase {:.4} rad); field minimum {:.3e} V/m at z = {:.4} um, micromotion {:.3} nm",
            drive.phase_tweaker,
            mis.field,
            p.z * 1e6,
            mis.micromotion.amplitude * 1e9
        );
        (
            NullReport {
                phase_matched: false,
                position_m: [p.x, p.y, p.z],
                residual_per_v: None,
                iterations: None,
                field_v_per_m: Some(mis.field),
                micromotion_m: mis.micromotion.amplitude,
                micromotion_beta: mis.micromotion.beta,
                secular_frequencies_mhz: None,
                secular_axes: None,
            },
            summary,
        )
    };
    let row = NullRow {
        x_m: report.position_m[0],
        y_m: report.position_m[1],
        z_m: report.position_m[2],
        residual_per_v: report.residual_per_v.unwrap_or(f64::NAN),
        micromotion_m: report.micromotion_m,
    };
    out.csv("null.csv", &[row])?;
    out.sidecar("null.json", "null-find", cfg, Some("null.csv"), &report)?;
    Ok(summary)
}

#[derive(Serialize)]
struct HeightRow {
    tweaker_v: f64,
    null_x_m: f64,
    null_y_m: f64,
    null_z_m: f64,
}

#[derive(Serialize)]
struct HeightReport {
    slope_nm_per_v: f64,
    intercept_m: f64,
    height_range_m: f64,
    max_residual_m: f64,
    max_residual_fraction_of_range: f64,
}

fn height_curve(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let range = cfg.height_curve.as_ref().ok_or_else(|| cfg.missing("height_curve"))?;
    let curve = tweaker_height_curve(
        cfg.electrodes()?,
        cfg.drive()?,
        &range.values(),
        &cfg.solver.initial_guess,
        &cfg.solver.options(),
    )?;
    let rows: Vec<HeightRow> = curve
        .points
        .iter()
        .map(|p| HeightRow {
            tweaker_v: p.voltage,
            null_x_m: p.position.x,
            null_y_m: p.position.y,
            null_z_m: p.position.z,
        })
        .collect();
    let span = curve.range();
    let report = HeightReport {
        slope_nm_per_v: curve.slope * 1e9,
        intercept_m: curve.intercept,
        height_range_m: span,
        max_residual_m: curve.max_residual,
        max_residual_fraction_of_range: if span > 0.0 { curve.max_residual / span } else { 0.0 },
    };
    out.csv("height_curve.csv", &rows)?;
    out.sidecar("height_curve.json", "height-curve", cfg, Some("height_curve.csv"), &report)?;
    Ok(format!(
        "height slope {:.2} nm/V over [{}, {}] V, max residual {:.2e} of range",
        report.slope_nm_per_v, range.start, range.end, report.max_residual_fraction_of_range
    ))
}

#[derive(Serialize)]
struct FringeRow {
    tweaker_v: f64,
    rate_cps: f64,
    stderr_cps: f64,
    null_z_m: f64,
    ion_z_m: f64,
    micromotion_m: f64,
    saturated: bool,
}

#[derive(Serialize)]
struct FringeReport {
    ion_slope_nm_per_v: f64,
    sinusoid: Option<SinusoidFit>,
    voltage_period_v: Option<f64>,
    spatial_period_m: Option<f64>,
    half_wavelength_m: f64,
    noisy: bool,
    saturated_points: usize,
}

fn fringe(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let settings = cfg.fringe_scan.as_ref().ok_or_else(|| cfg.missing("fringe_scan"))?;
    let trap = trap_model(cfg)?;
    let model = scattering_model(cfg)?;
    let protocol = cfg.protocol()?;
    let voltages = settings.voltages.values();
    let scan = fringe_scan(
        &trap,
        &model,
        &voltages,
        settings.noise.then_some(protocol),
        &cfg.solver.initial_guess,
        &cfg.solver.options(),
    )?;
    let s = &scan.scan;
    let rows: Vec<FringeRow> = (0..s.len())
        .map(|i| FringeRow {
            tweaker_v: s.abscissa[i],
            rate_cps: s.rates[i],
            stderr_cps: s.stderr[i],
            null_z_m: scan.null_heights[i],
            ion_z_m: scan.ion_heights[i],
            micromotion_m: scan.micromotion[i],
            saturated: s.saturation_flags[i],
        })
        .collect();
    let report = FringeReport {
        ion_slope_nm_per_v: scan.ion_slope * 1e9,
        sinusoid: scan.sinusoid,
        voltage_period_v: scan.sinusoid.map(|f| f.period),
        spatial_period_m: scan.spatial_period,
        half_wavelength_m: trap.species.wavelength / 2.0,
        noisy: settings.noise,
        saturated_points: s.saturation_flags.iter().filter(|f| **f).count(),
    };
    out.csv("fringe_scan.csv", &rows)?;
    out.sidecar("fringe_scan.json", "fringe-scan", cfg, Some("fringe_scan.csv"), &report)?;
    Ok(match (scan.sinusoid, scan.spatial_period) {
        (Some(f), Some(p)) => format!(
            "fringe period {:.4} V = {:.2} nm at {:.3} nm/V",
            f.period,
            p * 1e9,
            report.ion_slope_nm_per_v
        ),
        _ => format!(
            "no fringes: rates flat at {:.4} cps over {} points",
            s.rates.first().copied().unwrap_or(0.0),
            s.len()
        ),
    })
}

fn lineshape(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let settings = cfg.lineshape_scan.as_ref().ok_or_else(|| cfg.missing("lineshape_scan"))?;
    let model = scattering_model(cfg)?;
    let protocol = cfg.protocol()?;
    let scan = lineshape_scan(
        &model,
        &settings.detunings.values(),
        settings.a_z,
        settings.offset,
        settings.noise.then_some(protocol),
    )?;
    out.csv("lineshape.csv", &lineshape_rows(&scan))?;
    out.sidecar("lineshape.json", "lineshape-scan", cfg, Some("lineshape.csv"), &scan.metadata)?;
    let peak = scan.rates.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "lineshape: {} detunings, a_z = {} nm, peak {:.2} cps{}",
        scan.len(),
        settings.a_z * 1e9,
        peak,
        if settings.noise { " (Poisson noise)" } else { "" }
    ))
}

#[derive(Serialize)]
struct FitRow {
    detuning_mhz: f64,
    rate_cps: f64,
    stderr_cps: f64,
    model_cps: f64,
}

fn fit(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let settings = cfg.fit.as_ref().ok_or_else(|| cfg.missing("fit"))?;
    let model = scattering_model(cfg)?;
    let input = settings.input.clone().unwrap_or_else(|| out.dir().join("lineshape.csv"));
    let data = read_lineshape_csv(&input)?;
    let mut spec = LineshapeFitSpec::from_model(&model);
    spec.a_z = FitParameter::free(settings.a_z_guess);
    let param = |free: bool, v: f64| if free { FitParameter::free(v) } else { FitParameter::fixed(v) };
    spec.scale = param(settings.fit_scale, settings.scale_guess.unwrap_or(spec.scale.value));
    spec.background = param(settings.fit_background, settings.background_guess.unwrap_or(spec.background.value));
    spec.offset = param(settings.fit_offset, settings.offset);
    let result: MicromotionFit = fit_micromotion(&data, &model, &spec)?;

    let z = model.sw.node_offset + result.offset.value;
    let shape = model.lineshape(z, result.a_z.value.abs(), &data.abscissa)?;
    let rows: Vec<FitRow> = (0..data.len())
        .map(|i| FitRow {
            detuning_mhz: to_mhz(data.abscissa[i]),
            rate_cps: data.rates[i],
            stderr_cps: data.stderr[i],
            model_cps: result.background.value + result.scale.value * shape[i].rate,
        })
        .collect();
    out.csv("fit.csv", &rows)?;
    out.sidecar("fit.json", "fit", cfg, Some("fit.csv"), &result)?;
    let a = result.a_z;
    Ok(match (result.a_z_upper_bound, a.sigma) {
        (Some(b), _) => format!(
            "a_z not resolved: upper bound {:.3} nm (chi2/dof {:.3})",
            b * 1e9,
            result.reduced_chi_square
        ),
        (None, Some(s)) => format!(
            "a_z = {:.3} +/- {:.3} nm (chi2/dof {:.3})",
            a.value.abs() * 1e9,
            s * 1e9,
            result.reduced_chi_square
        ),
        (None, None) => format!("a_z = {:.3} nm (chi2/dof {:.3})", a.value.abs() * 1e9, result.reduced_chi_square),
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    t_s: f64,
    z_displacement_m: f64,
    e_z_v_per_m: f64,
    dez_dt_v_per_m_s: f64,
    charge_c: f64,
}

#[derive(Serialize)]
struct ChargingReport {
    ion_rest_m: [f64; 3],
    omega_z_mhz: f64,
    field_per_displacement_v_per_m2: f64,
    final_displacement_m: f64,
    final_charge_c: f64,
    final_charge_e: f64,
    max_identity_violation: f64,
}

fn charging_sim(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let settings = cfg.charging.as_ref().ok_or_else(|| cfg.missing("charging"))?;
    let sw = cfg.standing_wave()?;
    let (trap, ion, freqs) = equilibrium(cfg)?;
    let omega_z = freqs.along(2);
    let center = [
        ion.x + settings.patch_center_offset[0],
        ion.y + settings.patch_center_offset[1],
    ];
    let initial = ChargePatchState::from_waist(settings.initial_charge, sw.waist, center)?;
    let traj = exposure_simulation(
        &settings.model,
        sw,
        &initial,
        &trap.species,
        &ion,
        omega_z,
        &settings.exposure,
    )?;
    let rows: Vec<TrajectoryRow> = traj
        .points
        .iter()
        .map(|p| TrajectoryRow {
            t_s: p.t,
            z_displacement_m: p.z_displacement,
            e_z_v_per_m: p.e_z,
            dez_dt_v_per_m_s: p.de_z_dt,
            charge_c: p.charge,
        })
        .collect();
    let last = traj.points.last().copied().expect("trajectory has its initial point");
    let report = ChargingReport {
        ion_rest_m: [ion.x, ion.y, ion.z],
        omega_z_mhz: to_mhz(omega_z),
        field_per_displacement_v_per_m2: traj.field_per_displacement,
        final_displacement_m: last.z_displacement,
        final_charge_c: last.charge,
        final_charge_e: last.charge / elementary_charge(),
        max_identity_violation: traj.max_identity_violation,
    };
    out.csv("trajectory.csv", &rows)?;
    out.sidecar("trajectory.json", "charging-sim", cfg, Some("trajectory.csv"), &report)?;
    Ok(format!(
        "ion moved {:.3} nm after {} s ({:.0} e on the patch, omega_z = 2pi x {:.4} MHz)",
        last.z_displacement * 1e9,
        last.t,
        report.final_charge_e,
        report.omega_z_mhz
    ))
}

#[derive(Serialize)]
struct BifurcationRow {
    charge_e: f64,
    classification: String,
    minima_count: usize,
    /// Minimum positions (m) joined with `;`.
    minima_m: String,
}

#[derive(Serialize)]
struct ChargeResult {
    charge_c: f64,
    charge_e: f64,
    /// `None` when the minima left the search window.
    minima: Option<AxialMinima>,
    error: Option<String>,
}

#[derive(Serialize)]
struct BifurcationReport {
    origin_m: [f64; 3],
    omega_axial_mhz: f64,
    curvature_threshold_c: Option<f64>,
    curvature_threshold_e: Option<f64>,
    grid_bracket_c: Option<ThresholdBracket>,
    grid_bracket_e: Option<[f64; 2]>,
    charges: Vec<ChargeResult>,
}

fn bifurcation(cfg: &RunConfig, out: &mut OutputSet) -> Result<String> {
    let settings = cfg.bifurcation.as_ref().ok_or_else(|| cfg.missing("bifurcation"))?;
    let charging = cfg.charging.as_ref().ok_or_else(|| cfg.missing("charging"))?;
    let sw = cfg.standing_wave()?;
    let (trap, ion, freqs) = equilibrium(cfg)?;
    let species = &trap.species;
    let omega_x = freqs.along(0);
    let e = elementary_charge();
    let shape = ChargePatchState::from_waist(
        e,
        sw.waist,
        [
            ion.x + charging.patch_center_offset[0],
            ion.y + charging.patch_center_offset[1],
        ],
    )?;
    let profile = AxialProfile::compute(&shape, &ion, settings.x_range, settings.spacing)?;

    let mut rows = Vec::new();
    let mut charges = Vec::new();
    for &q in &settings.charges {
        let state = shape.with_charge(q)?;
        match minima_on_profile(&profile, &state, species, omega_x) {
            Ok(m) => {
                rows.push(BifurcationRow {
                    charge_e: q / e,
                    classification: classification_name(m.classification).into(),
                    minima_count: m.minima.len(),
                    minima_m: m.minima.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";"),
                });
                charges.push(ChargeResult {
                    charge_c: q,
                    charge_e: q / e,
                    minima: Some(m),
                    error: None,
                });
            }
            Err(err @ Error::SearchRegionExhausted { .. }) => {
                rows.push(BifurcationRow {
                    charge_e: q / e,
                    classification: "window_exhausted".into(),
                    minima_count: 0,
                    minima_m: String::new(),
                });
                charges.push(ChargeResult {
                    charge_c: q,
                    charge_e: q / e,
                    minima: None,
                    error: Some(err.to_string()),
                });
            }
            Err(err) => return Err(err),
        }
    }

    let threshold = curvature_threshold(&shape, species, omega_x, &ion)?;
    let start = threshold.map_or(100.0 * e, |t| 0.25 * t);
    let bracket = grid_threshold(&profile, species, omega_x, start, settings.bisection_rel_tol).ok();
    let report = BifurcationReport {
        origin_m: [ion.x, ion.y, ion.z],
        omega_axial_mhz: to_mhz(omega_x),
        curvature_threshold_c: threshold,
        curvature_threshold_e: threshold.map(|t| t / e),
        grid_bracket_c: bracket,
        grid_bracket_e: bracket.map(|b| [b.below / e, b.above / e]),
        charges,
    };
    out.csv("bifurcation.csv", &rows)?;
    out.sidecar("bifurcation.json", "bifurcation", cfg, Some("bifurcation.csv"), &report)?;
    let curv = threshold.map_or("none".to_string(), |t| format!("{:.1} e", t / e));
    let grid = bracket.map_or("none".to_string(), |b| format!("{:.1} e", b.midpoint() / e));
    Ok(format!(
        "bifurcation charge: curvature criterion {curv}, grid search {grid} ({} charges classified)",
        rows.len()
    ))
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Single => "single",
        Classification::Bifurcated => "bifurcated",
        Classification::Multiple => "multiple",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::invalid("x", "bad")), 1);
        assert_eq!(
            exit_code(&Error::NonConvergence {
                what: "x",
                iterations: 1,
                residual: 1.0
            }),
            2
        );
        assert_eq!(
            exit_code(&Error::io("a", std::io::Error::other("disk"))),
            3
        );
    }

    #[test]
    fn parses_command_line() {
        let cli = Cli::try_parse_from(["mirror-trap", "fringe-scan", "--config", "a.toml", "--seed", "7"]).unwrap();
        assert_eq!(cli.command, Command::FringeScan);
        assert_eq!(cli.seed, Some(7));
        assert!(Cli::try_parse_from(["mirror-trap", "nope", "--config", "a.toml"]).is_err());
    }
}
