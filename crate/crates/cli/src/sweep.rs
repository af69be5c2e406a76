//! Grid sweeps over configuration keys, one experiment per worker.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::format::fmt_f64;
use crate::output::{self, OutputDir, RunManifest, RunStatus};
use crate::runner::{self, Log, RunError, VERSION};

/// `key=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let err = |m: &str| ConfigError { origin: format!("--vary {s}"), message: m.into() };
        let (key, values) = s.split_once('=').ok_or_else(|| err("expected key=v1,v2,..."))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if key.trim().is_empty() || values.iter().any(|v| v.is_empty()) {
            return Err(err("empty key or value"));
        }
        Ok(Self { key: key.trim().to_string(), values })
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub dir: String,
    pub overrides: Vec<String>,
    pub exit_code: i32,
    pub p: u32,
    pub t_end: f64,
    /// `NaN` unless the point produced a decay fit.
    pub alpha_fit: f64,
    pub k_fit: f64,
}

/// Cartesian product of the axes, first axis slowest.
pub fn expand(axes: &[SweepAxis]) -> Vec<Vec<String>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(format!("{}={v}", axis.key));
                    p
                })
            })
            .collect();
    }
    points
}

fn dir_name(index: usize, overrides: &[String]) -> String {
    let tag: String = overrides
        .join("__")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '-' })
        .collect();
    if tag.is_empty() {
        format!("point-{index:03}")
    } else {
        format!("point-{index:03}_{tag}")
    }
}

pub fn summary_csv(points: &[SweepPoint]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "t_end", "alpha_fit", "K_fit"]).expect("in-memory write");
    for pt in points {
        w.write_record([pt.p.to_string(), fmt_f64(pt.t_end), fmt_f64(pt.alpha_fit), fmt_f64(pt.k_fit)])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Runs every point under `root/<point dir>` with at most `jobs` workers,
/// then writes `summary.csv`, `points.json` and a manifest in `root`.
/// Every override is validated before anything runs.
pub fn sweep(
    template: &RunConfig,
    axes: &[SweepAxis],
    root: &Path,
    jobs: usize,
    log: Log,
) -> Result<(RunManifest, Vec<SweepPoint>), RunError> {
    let started = output::unix_now();
    let grid = expand(axes);
    let configs = grid
        .iter()
        .map(|ov| template.clone().with_overrides(ov))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = OutputDir::create(root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunError::Io(std::io::Error::other(e)))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        configs
            .par_iter()
            .zip(grid.par_iter())
            .enumerate()
            .map(|(i, (cfg, ov))| {
                let name = dir_name(i, ov);
                let dir: PathBuf = root.join(&name);
                let code = match runner::run(cfg, &dir, log) {
                    Ok(_) => 0,
                    Err(e) => {
                        log(&format!("{name}: {e}"));
                        e.exit_code()
                    }
                };
                let fit = output::read_decay_csv(&dir.join("decay_fit.csv"))
                    .ok()
                    .and_then(|rows| rows.first().copied());
                SweepPoint {
                    dir: name,
                    overrides: ov.clone(),
                    exit_code: code,
                    p: cfg.p,
                    t_end: cfg.t_end,
                    alpha_fit: fit.map_or(f64::NAN, |r| r[2]),
                    k_fit: fit.map_or(f64::NAN, |r| r[1]),
                }
            })
            .collect()
    });
    out.write("summary.csv", &summary_csv(&points))?;
    out.write_json("points.json", &points)?;
    let failed = points.iter().find(|p| p.exit_code != 0);
    let outcome = match failed {
        None => RunStatus::Ok,
        Some(p) => RunStatus::Failed {
            category: "point".into(),
            exit_code: p.exit_code,
            message: format!("{} exited with {}", p.dir, p.exit_code),
        },
    };
    let manifest = out.finish(RunManifest {
        version: VERSION.into(),
        kind: "sweep".into(),
        seed: template.seed,
        config: template.render(),
        started_unix: started,
        finished_unix: output::unix_now(),
        outcome,
        files: Vec::new(),
    })?;
    log(&format!("sweep: {} points, {} failed", points.len(), points.iter().filter(|p| p.exit_code != 0).count()));
    Ok((manifest, points))
}
