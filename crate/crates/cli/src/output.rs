//! Output files: trajectory CSVs and versioned JSON documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use levy_galerkin::{PathSegment, SpectralBasis};

use crate::config::RunConfig;
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Seventeen significant digits; parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows `t, h_norm, v_norm, xi_sq` and, with `per_mode`, `u_0 .. u_{N-1}`.
pub fn trajectory_csv(path: &PathSegment<f64>, basis: &SpectralBasis<f64>, per_mode: bool) -> CliResult<String> {
    let dim = basis.dim();
    let mut out = String::from("t,h_norm,v_norm,xi_sq");
    if per_mode {
        for j in 0..dim {
            out.push_str(&format!(",u_{j}"));
        }
    }
    out.push('\n');
    for (k, state) in path.states().iter().enumerate() {
        let cells = [path.time(k), state.h_norm(), path.v_norm_sq()[k].sqrt(), path.xi_sq_running()[k]];
        let mut row: Vec<String> = cells.iter().map(|&x| num(x)).collect();
        if per_mode {
            row.extend(state.coeffs().iter().map(|&x| num(x)));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Output directory, created on demand.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        fs::write(self.root.join(name), contents)?;
        Ok(())
    }

    pub fn write_json(&self, name: &str, value: &Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        text.push('\n');
        self.write(name, &text)
    }

    /// `summary.json`: resolved config, seed, per-command results.
    pub fn summary(&self, command: &str, config: &RunConfig, pass: bool, results: Value) -> CliResult<()> {
        self.write_json(
            "summary.json",
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "seed": config.ensemble.seed,
                "pass": pass,
                "config": config,
                "results": results,
            }),
        )
    }

    /// `report_<suite>.json`.
    pub fn report<R: Serialize>(&self, suite: &str, pass: bool, report: &R) -> CliResult<()> {
        self.write_json(
            &format!("report_{suite}.json"),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "suite": suite,
                "pass": pass,
                "report": report,
            }),
        )
    }
}
