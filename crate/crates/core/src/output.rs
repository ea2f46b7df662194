//! Output files: CSV tables and JSON sidecars, written atomically.
//!
//! Each CSV `name.csv` gets a `name.json` next to it holding the command, the
//! seed, the resolved configuration in SI units and the structured results.
//! Nothing time- or host-dependent is written, so identical inputs give
//! identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fluorescence::{Abscissa, ScanResult};

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

/// Serializes rows with a header taken from the row type's field names.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    write_atomic(path, &csv_bytes(rows)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    constants_version: u32,
    command: &'a str,
    seed: u64,
    data_file: Option<String>,
    config: &'a RunConfig,
    results: &'a T,
}

/// Collects the files written by one command.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputSet {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        OutputSet {
            dir: dir.into(),
            files: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.files
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_csv(&path, rows)?;
        self.files.push(path.clone());
        Ok(path)
    }

    /// JSON sidecar with the command, seed, resolved config and results.
    pub fn sidecar<T: Serialize>(
        &mut self,
        name: &str,
        command: &str,
        config: &RunConfig,
        data_file: Option<&str>,
        results: &T,
    ) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let doc = Sidecar {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            constants_version: crate::constants::table().version,
            command,
            seed: config.seed,
            data_file: data_file.map(str::to_owned),
            config,
            results,
        };
        write_json(&path, &doc)?;
        self.files.push(path.clone());
        Ok(path)
    }
}

/// One row of a detuning scan as written to disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineshapeRow {
    pub detuning_mhz: f64,
    pub rate_cps: f64,
    pub stderr_cps: f64,
    pub saturated: bool,
}

fn rad_to_mhz(w: f64) -> f64 {
    w / (2.0 * std::f64::consts::PI * 1e6)
}

fn mhz_to_rad(f: f64) -> f64 {
    f * 2.0 * std::f64::consts::PI * 1e6
}

pub fn lineshape_rows(scan: &ScanResult) -> Vec<LineshapeRow> {
    (0..scan.len())
        .map(|i| LineshapeRow {
            detuning_mhz: rad_to_mhz(scan.abscissa[i]),
            rate_cps: scan.rates[i],
            stderr_cps: scan.stderr[i],
            saturated: scan.saturation_flags[i],
        })
        .collect()
}

/// Reads a detuning scan written by [`lineshape_rows`].
pub fn read_lineshape_csv(path: &Path) -> Result<ScanResult> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let rows = rdr
        .deserialize::<LineshapeRow>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Config {
            path: path.to_owned(),
            message: "no data rows".into(),
        });
    }
    let mut scan = ScanResult::new(
        Abscissa::Detuning,
        rows.iter().map(|r| mhz_to_rad(r.detuning_mhz)).collect(),
        rows.iter().map(|r| r.rate_cps).collect(),
        rows.iter().map(|r| r.stderr_cps).collect(),
    )
    .map_err(|e| Error::Config {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    scan.saturation_flags = rows.iter().map(|r| r.saturated).collect();
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lineshape_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut scan = ScanResult::new(
            Abscissa::Detuning,
            vec![mhz_to_rad(-10.0), mhz_to_rad(0.25)],
            vec![12.5, 3.0],
            vec![0.5, 0.1],
        )
        .unwrap();
        scan.saturation_flags = vec![false, true];
        let path = dir.path().join("sub/lineshape.csv");
        write_csv(&path, &lineshape_rows(&scan)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("detuning_mhz,rate_cps,stderr_cps,saturated\n"));
        assert!(!text.contains('\r'));
        let back = read_lineshape_csv(&path).unwrap();
        assert_eq!(back.rates, scan.rates);
        assert_eq!(back.saturation_flags, scan.saturation_flags);
        for (a, b) in back.abscissa.iter().zip(&scan.abscissa) {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_json(&path, &serde_json::json!({"a": 1})).unwrap();
        write_json(&path, &serde_json::json!({"a": 2})).unwrap();
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        assert!(fs::read_to_string(&path).unwrap().contains("\"a\": 2"));
    }
}
