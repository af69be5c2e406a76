//! Batch experiment harness around `gkdv-core`: flat `key = value`
//! configuration, experiment execution, CSV/JSON emission with checksummed
//! manifests, and concurrent parameter sweeps.

pub mod config;
pub mod format;
pub mod output;
pub mod runner;
pub mod sweep;

use std::path::Path;

pub use config::{parse_config, ConfigError, ExperimentKind, LabCheck, Profile, RunConfig};
pub use output::{read_decay_csv, read_trajectory_csv, verify_manifest, RunManifest, RunStatus};
pub use runner::{run, DecayCheck, PicardSummary, RunError, SolitonSummary};
pub use sweep::{sweep, SweepAxis, SweepPoint};

/// Defaults, then the file at `path`, then `--seed`, then each `--set`.
pub fn load_config(
    path: Option<&Path>,
    kind: Option<ExperimentKind>,
    seed: Option<u64>,
    overrides: &[String],
) -> Result<RunConfig, RunError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError {
            origin: p.display().to_string(),
            message: e.to_string(),
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(k) = kind {
        cfg.kind = k;
    }
    let mut all = Vec::with_capacity(overrides.len() + 1);
    if let Some(s) = seed {
        all.push(format!("seed={s}"));
    }
    all.extend(overrides.iter().cloned());
    Ok(cfg.with_overrides(&all)?)
}
