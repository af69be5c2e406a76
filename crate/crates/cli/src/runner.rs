//! Executes one configured experiment into an output directory.

use std::path::Path;

use gkdv_core::estimate_lab::{
    check_apriori_ensemble, check_duhamel, check_embedding, check_exponential_lemmas,
    check_linear_free, check_multilinear, check_strichartz, check_time_cutoff, default_lemma_grid,
    random_field, ExponentialLemmaTable,
};
use gkdv_core::evolution::soliton_p1;
use gkdv_core::{
    fit_decay_exponent, picard_solve, simulate, track_radius, CoupledState, DecayFit, Error,
    EstimateId, EstimateReport, Field, NormParams, RunInfo, SolverConfig, SpectralGrid,
    StrichartzVariant, Termination, TrajectoryRecord,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentKind, LabCheck, Profile, RunConfig};
use crate::output::{self, OutputDir, RunManifest, RunStatus};

pub const VERSION: &str = concat!("gkdv ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::InsufficientData(_) => 4,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            Self::Io(_) => "io",
            Self::Config(_) => "config",
            Self::Numerical(_) => "numerical",
            Self::InsufficientData(_) => "insufficient_data",
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientData(m) => Self::InsufficientData(m),
            Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::ThresholdViolation(_) => {
                Self::Config(ConfigError { origin: "config".into(), message: e.to_string() })
            }
            other => Self::Numerical(other.to_string()),
        }
    }
}

/// Milestone sink; the binary prints to stdout, tests collect or drop.
pub type Log<'a> = &'a (dyn Fn(&str) + Sync);

/// Runs the experiment and writes its outputs plus `manifest.json` into
/// `dir`. The manifest is written on failure too, recording the category.
pub fn run(cfg: &RunConfig, dir: &Path, log: Log) -> Result<RunManifest, RunError> {
    cfg.check()
        .map_err(|(k, m)| ConfigError { origin: format!("key {k}"), message: m })?;
    let started = output::unix_now();
    let mut out = OutputDir::create(dir)?;
    out.write("config.cfg", cfg.render().as_bytes())?;
    let result = match cfg.kind {
        ExperimentKind::Simulate => run_simulate(cfg, &mut out, log),
        ExperimentKind::RadiusTrack => run_radius_track(cfg, &mut out, log),
        ExperimentKind::EstimateLab => run_estimate_lab(cfg, &mut out, log),
        ExperimentKind::SolitonTest => run_soliton_test(cfg, &mut out, log),
        ExperimentKind::PicardTest => run_picard_test(cfg, &mut out, log),
    };
    let outcome = match &result {
        Ok(()) => RunStatus::Ok,
        Err(e) => RunStatus::Failed {
            category: e.category().into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        },
    };
    let manifest = out.finish(RunManifest {
        version: VERSION.into(),
        kind: cfg.kind.as_str().into(),
        seed: cfg.seed,
        config: cfg.render(),
        started_unix: started,
        finished_unix: output::unix_now(),
        outcome,
        files: Vec::new(),
    })?;
    log(&format!("{}: wrote {} files to {}", cfg.kind.as_str(), manifest.files.len(), dir.display()));
    result.map(|()| manifest)
}

fn sech_profile(grid: &SpectralGrid, amp: f64, x0: f64, width: f64) -> gkdv_core::Result<Field> {
    Field::from_fn(grid, |x| amp / ((x - x0) / width).cosh())
}

fn scaled_random(grid: &SpectralGrid, cfg: &RunConfig, stream: u64, amp: f64) -> gkdv_core::Result<Field> {
    let f = random_field(grid, &cfg.lab_config().sample_spec(cfg.seed, 1.0), stream);
    let m = f.max_abs();
    let k = if m > 0.0 { amp / m } else { 0.0 };
    Field::new(grid.clone(), f.samples().iter().map(|v| v * k).collect())
}

pub fn initial_state(cfg: &RunConfig) -> gkdv_core::Result<CoupledState> {
    let grid = cfg.grid()?;
    let (u, v) = match cfg.profile {
        Profile::Soliton => {
            let u = soliton_p1(&grid, cfg.c, cfg.x0)?;
            (u.clone(), u)
        }
        Profile::Sech => (
            sech_profile(&grid, cfg.amp_u, cfg.x0, cfg.width)?,
            sech_profile(&grid, cfg.amp_v, cfg.x0, cfg.width)?,
        ),
        Profile::Random => (
            scaled_random(&grid, cfg, 0, cfg.amp_u)?,
            scaled_random(&grid, cfg, 1, cfg.amp_v)?,
        ),
    };
    CoupledState::new(0.0, u, v)
}

fn run_trajectory(cfg: &RunConfig, solver: &SolverConfig, initial: &CoupledState, log: Log) -> Result<TrajectoryRecord, RunError> {
    let mut traj = simulate(initial, solver)?;
    traj.info = RunInfo { config: cfg.render(), seed: cfg.seed, version: VERSION.into() };
    log(&format!(
        "simulated p={} to t={} ({} snapshots, {:?})",
        cfg.p,
        traj.snapshots.last().map_or(0.0, |s| s.t),
        traj.snapshots.len(),
        traj.termination
    ));
    Ok(traj)
}

fn blowup(traj: &TrajectoryRecord) -> Result<(), RunError> {
    match traj.termination {
        Termination::Completed => Ok(()),
        Termination::BlowUp { t } => Err(RunError::Numerical(format!("blow-up detected at t = {t}"))),
    }
}

/// Largest relative drift of each invariant over the recorded snapshots.
fn max_drift(traj: &TrajectoryRecord) -> [f64; 4] {
    let mut out = [0.0f64; 4];
    if let Some(first) = traj.snapshots.first() {
        for s in &traj.snapshots {
            for (o, d) in out.iter_mut().zip(s.invariants.relative_drift(&first.invariants)) {
                *o = o.max(d);
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    p: u32,
    snapshots: usize,
    t_final: f64,
    termination: Termination,
    drift_mass_u: f64,
    drift_mass_v: f64,
    drift_l2: f64,
    drift_hamiltonian: f64,
}

fn simulate_summary(traj: &TrajectoryRecord) -> SimulateSummary {
    let d = max_drift(traj);
    SimulateSummary {
        p: traj.p,
        snapshots: traj.snapshots.len(),
        t_final: traj.snapshots.last().map_or(0.0, |s| s.t),
        termination: traj.termination,
        drift_mass_u: d[0],
        drift_mass_v: d[1],
        drift_l2: d[2],
        drift_hamiltonian: d[3],
    }
}

fn run_simulate(cfg: &RunConfig, out: &mut OutputDir, log: Log) -> Result<(), RunError> {
    let traj = run_trajectory(cfg, &cfg.solver_config(), &initial_state(cfg)?, log)?;
    out.write("trajectory.csv", &output::trajectory_csv(&traj))?;
    out.write_json("summary.json", &simulate_summary(&traj))?;
    blowup(&traj)
}

/// Decay-law consistency of a radius series: the fitted exponent and the
/// largest step-to-step increase of `log ρ̂` measured against the scatter
/// of the log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCheck {
    pub fit_t_min: f64,
    pub points: usize,
    pub k_fit: f64,
    pub alpha_fit: f64,
    pub alpha_stderr: f64,
    pub r_squared: f64,
    pub residual_std: f64,
    /// `max_i (log ρ̂_{i+1} - log ρ̂_i)`, negative for strictly decreasing series.
    pub max_log_increase: f64,
    /// `3 × residual_std`.
    pub increase_tolerance: f64,
    pub non_increasing: bool,
    /// `2p² + 6p + 1 + 0.5`.
    pub alpha_bound: f64,
    pub alpha_within_bound: bool,
}

pub fn decay_check(series: &[(f64, f64)], fit: &DecayFit, p: u32) -> DecayCheck {
    let pts: Vec<f64> = series
        .iter()
        .filter(|(t, _)| *t >= fit.t_min)
        .map(|(_, r)| r.ln())
        .collect();
    let max_log_increase = pts
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let p = p as f64;
    let alpha_bound = 2.0 * p * p + 6.0 * p + 1.0 + 0.5;
    let tol = 3.0 * fit.residual_std;
    DecayCheck {
        fit_t_min: fit.t_min,
        points: fit.points,
        k_fit: fit.k_fit,
        alpha_fit: fit.alpha_fit,
        alpha_stderr: fit.alpha_stderr,
        r_squared: fit.r_squared,
        residual_std: fit.residual_std,
        max_log_increase,
        increase_tolerance: tol,
        non_increasing: max_log_increase <= tol,
        alpha_bound,
        alpha_within_bound: fit.alpha_fit <= alpha_bound,
    }
}

fn run_radius_track(cfg: &RunConfig, out: &mut OutputDir, log: Log) -> Result<(), RunError> {
    let traj = run_trajectory(cfg, &cfg.solver_config(), &initial_state(cfg)?, log)?;
    out.write("trajectory.csv", &output::trajectory_csv(&traj))?;
    blowup(&traj)?;
    let series = track_radius(&traj);
    if let Some((t, _)) = series.iter().find(|(t, r)| *t >= cfg.fit_t_min && !r.is_usable()) {
        out.write("decay_fit.csv", &output::decay_csv(&[]))?;
        return Err(RunError::InsufficientData(format!(
            "radius estimate unusable at t = {t} (spectrum reached the noise floor); refine the grid"
        )));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(t, r)| (*t, r.rho_hat)).collect();
    let fit = match fit_decay_exponent(&pts, cfg.fit_t_min) {
        Ok(f) => f,
        Err(e) => {
            out.write("decay_fit.csv", &output::decay_csv(&[]))?;
            return Err(match e {
                Error::InvalidArgument(m) => RunError::InsufficientData(m),
                other => other.into(),
            });
        }
    };
    out.write("decay_fit.csv", &output::decay_csv(&[fit]))?;
    let check = decay_check(&pts, &fit, cfg.p);
    out.write_json("decay_check.json", &check)?;
    log(&format!(
        "decay fit over t >= {}: K = {:.4}, alpha = {:.4} (bound {}), max log increase {:.3e} vs 3S = {:.3e}",
        fit.t_min, fit.k_fit, fit.alpha_fit, check.alpha_bound, check.max_log_increase, check.increase_tolerance
    ));
    Ok(())
}

/// Periodic representative of `x` in `[-L, L)`.
fn wrap(x: f64, half: f64) -> f64 {
    (x + half).rem_euclid(2.0 * half) - half
}

fn l2_distance(a: &Field, b: &Field) -> f64 {
    let dx = a.grid().dx();
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
        * dx.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonSummary {
    pub c: f64,
    pub t_final: f64,
    /// `‖(u, v)(t) - (φ, φ)(· - ct)‖_{L²}` at the final time.
    pub l2_error: f64,
    pub drift_mass_u: f64,
    pub drift_mass_v: f64,
    pub drift_l2: f64,
    pub drift_hamiltonian: f64,
}

fn run_soliton_test(cfg: &RunConfig, out: &mut OutputDir, log: Log) -> Result<(), RunError> {
    if cfg.p != 1 {
        return Err(ConfigError {
            origin: "key p".into(),
            message: "the closed-form soliton exists for p = 1 only".into(),
        }
        .into());
    }
    let grid = cfg.grid()?;
    let u0 = soliton_p1(&grid, cfg.c, cfg.x0)?;
    let initial = CoupledState::new(0.0, u0.clone(), u0)?;
    let mut solver = cfg.solver_config();
    solver.diagnostics.keep_states = true;
    let traj = run_trajectory(cfg, &solver, &initial, log)?;
    out.write("trajectory.csv", &output::trajectory_csv(&traj))?;
    blowup(&traj)?;
    let last = traj
        .states
        .last()
        .ok_or_else(|| RunError::InsufficientData("no states recorded".into()))?;
    let exact = soliton_p1(&grid, cfg.c, wrap(cfg.x0 + cfg.c * last.t, grid.half_length()))?;
    let d = max_drift(&traj);
    let summary = SolitonSummary {
        c: cfg.c,
        t_final: last.t,
        l2_error: l2_distance(&last.u, &exact).hypot(l2_distance(&last.v, &exact)),
        drift_mass_u: d[0],
        drift_mass_v: d[1],
        drift_l2: d[2],
        drift_hamiltonian: d[3],
    };
    out.write_json("soliton.json", &summary)?;
    log(&format!(
        "soliton c={} at t={}: L2 error {:.3e}, drifts {:.1e} {:.1e} {:.1e} {:.1e}",
        cfg.c, last.t, summary.l2_error, d[0], d[1], d[2], d[3]
    ));
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardSummary {
    pub window: f64,
    pub iterations: usize,
    pub increments: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    /// Largest factor after the first iteration.
    pub max_factor_after_first: f64,
    /// `sup_t ‖(u, v)(t) - reference(t)‖_{L²}` over the nodes, against
    /// IF-RK4 stepped at the node spacing.
    pub sup_l2_error: f64,
}

fn run_picard_test(cfg: &RunConfig, out: &mut OutputDir, log: Log) -> Result<(), RunError> {
    let initial = initial_state(cfg)?;
    let pc = cfg.picard_config();
    let outcome = picard_solve(&initial, &pc, cfg.p)?;
    let mut reference = SolverConfig {
        dt: pc.window / (pc.nodes - 1) as f64,
        t_end: pc.window,
        scheme: gkdv_core::Scheme::IfRk4,
        record_stride: 1,
        ..cfg.solver_config()
    };
    reference.diagnostics.keep_states = true;
    let traj = simulate(&initial, &reference)?;
    blowup(&traj)?;
    if traj.states.len() != outcome.trajectory.len() {
        return Err(RunError::Numerical(format!(
            "reference has {} states for {} Picard nodes",
            traj.states.len(),
            outcome.trajectory.len()
        )));
    }
    let sup = outcome
        .trajectory
        .iter()
        .zip(&traj.states)
        .map(|(a, b)| l2_distance(&a.u, &b.u).hypot(l2_distance(&a.v, &b.v)))
        .fold(0.0, f64::max);
    let summary = PicardSummary {
        window: pc.window,
        iterations: outcome.iterations,
        max_factor_after_first: outcome.contraction_factors.iter().copied().fold(0.0, f64::max),
        increments: outcome.increments,
        contraction_factors: outcome.contraction_factors,
        sup_l2_error: sup,
    };
    out.write_json("picard.json", &summary)?;
    log(&format!(
        "Picard window {}: {} iterations, max factor {:.3}, sup L2 error vs IF-RK4 {:.3e}",
        pc.window, summary.iterations, summary.max_factor_after_first, sup
    ));
    Ok(())
}

fn run_estimate_lab(cfg: &RunConfig, out: &mut OutputDir, log: Log) -> Result<(), RunError> {
    let lab = cfg.lab_config();
    let params = cfg.norm_params();
    let mut reports: Vec<EstimateReport> = Vec::new();
    let mut lemmas: Option<ExponentialLemmaTable> = None;
    for check in &cfg.estimates {
        let id = match check {
            LabCheck::ExponentialLemmas => {
                let table = check_exponential_lemmas(&default_lemma_grid());
                log(&format!(
                    "exponential_lemmas: {} bound and {} splitting checks, {} failures",
                    table.bound_checked,
                    table.split_checked,
                    table.bound_failures.len() + table.split_failures.len()
                ));
                lemmas = Some(table);
                continue;
            }
            LabCheck::Estimate(id) => *id,
        };
        for &t in &cfg.lab_t {
            let report = run_check(cfg, id, &lab, &params, t)?;
            log(&format!(
                "{id} T={t}: n={} max ratio {:.6e} (seed {})",
                report.ensemble_size, report.max_ratio, report.argmax_seed
            ));
            reports.push(report);
        }
    }
    out.write_jsonl("reports.jsonl", &reports)?;
    if let Some(table) = lemmas {
        out.write_json("lemmas.json", &table)?;
        if !table.passed() {
            return Err(RunError::Numerical("exponential inequalities failed on the grid".into()));
        }
    }
    Ok(())
}

fn run_check(
    cfg: &RunConfig,
    id: EstimateId,
    lab: &gkdv_core::LabConfig,
    params: &NormParams,
    t: f64,
) -> Result<EstimateReport, RunError> {
    let strichartz = |v: StrichartzVariant| check_strichartz(lab, v, cfg.kappa, cfg.s, t);
    let report = match id {
        EstimateId::LinearFree => check_linear_free(lab, params, t),
        EstimateId::TimeCutoff => check_time_cutoff(lab, params, t, cfg.support),
        EstimateId::Duhamel => check_duhamel(lab, params, cfg.b_prime, t),
        EstimateId::StrichartzL4L2 => strichartz(StrichartzVariant::L4L2),
        EstimateId::StrichartzLinfL2 => strichartz(StrichartzVariant::LinfL2),
        EstimateId::StrichartzL2Linf => strichartz(StrichartzVariant::L2Linf),
        EstimateId::StrichartzL4Linf => strichartz(StrichartzVariant::L4Linf),
        EstimateId::StrichartzLinfLinf => strichartz(StrichartzVariant::LinfLinf),
        EstimateId::MultilinearU | EstimateId::MultilinearV => {
            check_multilinear(lab, cfg.p, id, params, cfg.b_prime, t)
        }
        EstimateId::Apriori => {
            check_apriori_ensemble(lab, cfg.p, &NormParams { rho: 0.0, ..*params }, t)
        }
        EstimateId::AprioriGevrey => {
            if params.rho == 0.0 {
                return Err(ConfigError {
                    origin: "key rho".into(),
                    message: "apriori_gevrey needs rho > 0".into(),
                }
                .into());
            }
            check_apriori_ensemble(lab, cfg.p, params, t)
        }
        EstimateId::Embedding => check_embedding(lab, params, t),
    }?;
    Ok(report)
}
