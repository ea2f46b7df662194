use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Copy of the default config in a scratch dir, with `edits` applied as plain
/// text substitutions.
fn config_with(edits: &[(&str, &str)]) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let mut text = fs::read_to_string(root().join("config/default.toml")).unwrap();
    let geometry = root().join("config/geometry.toml");
    text = text.replace("file = \"geometry.toml\"", &format!("file = {:?}", geometry));
    for (from, to) in edits {
        assert!(text.contains(from), "default config has no `{from}`");
        text = text.replace(from, to);
    }
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    (dir, path)
}

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirror-trap")).args(args).output().unwrap()
}

fn run_ok(command: &str, config: &Path, out: &Path, extra: &[&str]) -> String {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = tool(&args);
    assert!(o.status.success(), "{command}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn null_find_prints_one_line_and_writes_sidecar() {
    let (dir, cfg) = config_with(&[]);
    let out = dir.path().join("out");
    let stdout = run_ok("null-find", &cfg, &out, &[]);
    assert_eq!(stdout.lines().count(), 1, "{stdout}");
    let json: serde_json::Value = serde_json::from_slice(&fs::read(out.join("null.json")).unwrap()).unwrap();
    assert_eq!(json["command"], "null-find");
    assert_eq!(json["seed"], 1);
    assert!(json["config"]["drive"].is_object());
    let bytes = fs::read(out.join("null.csv")).unwrap();
    assert!(!bytes.contains(&b'\r'));
}

#[test]
fn seed_flag_changes_noisy_output_and_is_reproducible() {
    let (dir, cfg) = config_with(&[]);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    run_ok("lineshape-scan", &cfg, &a, &["--seed", "7"]);
    run_ok("lineshape-scan", &cfg, &b, &["--seed", "7"]);
    run_ok("lineshape-scan", &cfg, &c, &["--seed", "8"]);
    let read = |d: &Path| fs::read(d.join("lineshape.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(a.join("lineshape.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 7);
}

#[test]
fn fit_recovers_amplitude_from_written_scan() {
    let (dir, cfg) = config_with(&[]);
    let out = dir.path().join("out");
    run_ok("lineshape-scan", &cfg, &out, &[]);
    run_ok("fit", &cfg, &out, &[]);
    let json: serde_json::Value = serde_json::from_slice(&fs::read(out.join("fit.json")).unwrap()).unwrap();
    let text = json["results"].to_string();
    let a_z = json["results"]["a_z"]["value"].as_f64().unwrap_or_else(|| panic!("{text}")).abs() * 1e9;
    assert!((a_z - 20.0).abs() < 1.0, "a_z {a_z} nm");
    let (header, rows) = read_rows(&out.join("fit.csv"));
    assert!(header.iter().any(|h| h == "model_cps"), "{header:?}");
    assert_eq!(rows.len(), 161);
}

#[test]
fn dark_fringe_scan_sits_at_background() {
    let (dir, cfg) = config_with(&[("\nintensity_mw_cm2 = 40.0", "\nintensity_mw_cm2 = 0.0")]);
    let out = dir.path().join("out");
    run_ok("fringe-scan", &cfg, &out, &[]);
    let (header, rows) = read_rows(&out.join("fringe_scan.csv"));
    let col = header.iter().position(|h| h == "rate_cps").unwrap();
    assert!(rows.iter().all(|r| r[col] == 10.0), "{:?}", &rows[..3]);
}

#[test]
fn config_errors_exit_with_1() {
    let (dir, cfg) = config_with(&[("repeats = 50", "repeats = 50\nbogus = 1")]);
    let o = tool(&["null-find", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

}

#[test]
fn missing_config_file_is_an_io_failure() {
    let o = tool(&["null-find", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solver_failure_exits_with_2() {
    let (dir, cfg) = config_with(&[
        ("max_iterations = 200", "max_iterations = 1"),
        ("initial_height_um = 50.0", "initial_height_um = 20.0"),
    ]);
    let o = tool(&["null-find", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unwritable_output_exits_with_3() {
    let (dir, cfg) = config_with(&[]);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = tool(&["null-find", "--config", cfg.to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_accepts_default_config() {
    let cfg = root().join("config/default.toml");
    let o = tool(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn validate_names_offending_key() {
    let (_dir, cfg) = config_with(&[("exposure_ms = 120.0", "exposure_ms = -5.0")]);
    let o = tool(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("protocol.exposure_ms"), "{text}");
}

#[test]
fn validate_names_overlapping_patches() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = dir.path().join("geometry.toml");
    fs::write(
        &geometry,
        r#"
[[patch]]
name = "left_rail"
role = "rf"
x_um = [-100.0, 100.0]
y_um = [-80.0, -30.0]

[[patch]]
name = "intruder"
role = "dc:0"
x_um = [-10.0, 10.0]
y_um = [-40.0, 0.0]

[[patch]]
name = "right_rail"
role = "rf"
x_um = [-100.0, 100.0]
y_um = [30.0, 80.0]
"#,
    )
    .unwrap();
    let cfg = dir.path().join("run.toml");
    let text = fs::read_to_string(root().join("config/default.toml")).unwrap();
    fs::write(&cfg, text).unwrap();
    let o = tool(&["validate", "--config", cfg.to_str().unwrap(), "--for", "null-find"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout);
    let line = text.lines().find(|l| l.contains("overlap")).unwrap_or_else(|| panic!("{text}"));
    assert!(line.contains("left_rail") && line.contains("intruder"), "{line}");
}
