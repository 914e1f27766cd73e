//! CSV tables with byte-stable float formatting and JSON provenance sidecars.

use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fnv::FnvHasher;
use serde::Serialize;
use serde_json::{json, Value};
use unanimity_core::capprob::ProbEstimate;
use unanimity_core::dynamics::EnsembleStats;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

pub const ENSEMBLE_COLUMNS: [&str; 4] = ["round", "mean_size", "stderr_size", "acceptance_rate"];
pub const CAPPROB_COLUMNS: [&str; 5] = ["cap_param", "method", "value", "stderr", "samples"];
pub const PHI_COLUMNS: [&str; 5] = ["lambda", "phi", "stderr", "pairs", "scaled"];
pub const BOUND_COLUMNS: [&str; 4] = ["t", "value", "stderr", "pairs"];

pub fn ensemble_table(stats: &EnsembleStats) -> Table {
    let mut t = Table::new(&ENSEMBLE_COLUMNS);
    for r in 0..=stats.rounds {
        t.push(vec![
            r.to_string(),
            fmt_f64(stats.mean_size[r]),
            fmt_f64(stats.stderr_size[r]),
            fmt_f64(stats.acceptance_rate[r]),
        ]);
    }
    t
}

pub fn estimate_row(param: String, method: &str, e: &ProbEstimate) -> Vec<String> {
    vec![
        param,
        method.to_string(),
        fmt_f64(e.value),
        fmt_f64(e.stderr),
        e.samples.to_string(),
    ]
}

/// FNV-1a hash of the command name and the JSON form of its configuration.
pub fn config_hash(command: &str, config: &impl Serialize) -> u64 {
    let mut h = FnvHasher::default();
    h.write(command.as_bytes());
    h.write(&[0]);
    h.write(serde_json::to_string(config).unwrap_or_default().as_bytes());
    h.finish()
}

/// `seed` itself, or a seed derived from the configuration when it is 0.
pub fn resolve_seed(seed: u64, command: &str, config: &impl Serialize) -> (u64, bool) {
    if seed != 0 {
        (seed, false)
    } else {
        (config_hash(command, config).max(1), true)
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Provenance record written next to every output file.
pub fn sidecar(
    command: &str,
    config: &impl Serialize,
    seed: u64,
    seed_derived: bool,
    table: &Table,
) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "seed": seed,
        "seed_derived": seed_derived,
        "columns": table.header,
        "rows": table.rows.len(),
    })
}

fn temp_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".partial");
    PathBuf::from(s)
}

/// Writes `bytes` to `path` through a temporary file and a rename, removing
/// the temporary file if anything fails.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = temp_path(path);
    let res = fs::write(&tmp, bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .with_context(|| format!("writing {}", path.display()));
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}

/// Writes the table as CSV plus its JSON sidecar. If the sidecar cannot be
/// written the CSV is removed again.
pub fn write_table(out: &Path, table: &Table, meta: &Value) -> Result<()> {
    write_atomic(out, &table.to_csv()?)?;
    let side = sidecar_path(out);
    if let Err(e) = write_atomic(&side, serde_json::to_string_pretty(meta)?.as_bytes()) {
        let _ = fs::remove_file(out);
        return Err(e);
    }
    Ok(())
}
