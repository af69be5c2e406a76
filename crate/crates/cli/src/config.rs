//! Flat `key = value` run configuration.
//!
//! Sections (`[grid]`, `[solver]`, ...) only group keys; every key name is
//! unique across sections, so `--set p=2` needs no qualifier. A key placed
//! under the wrong section header is rejected.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gkdv_core::estimate_lab::Envelope;
use gkdv_core::{
    DiagnosticsConfig, EstimateId, FitConfig, LabConfig, NormParams, PicardConfig, Scheme,
    SolverConfig, SpectralGrid,
};
use thiserror::Error;

use crate::format::fmt_f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}: {message}")]
pub struct ConfigError {
    /// `line N`, `--set key=value`, or `config` for cross-key constraints.
    pub origin: String,
    pub message: String,
}

impl ConfigError {
    fn at(origin: impl Into<String>, message: impl Into<String>) -> Self {
        Self { origin: origin.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Simulate,
    RadiusTrack,
    EstimateLab,
    SolitonTest,
    PicardTest,
}

impl ExperimentKind {
    pub const ALL: [Self; 5] = [
        Self::Simulate,
        Self::RadiusTrack,
        Self::EstimateLab,
        Self::SolitonTest,
        Self::PicardTest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::RadiusTrack => "radius-track",
            Self::EstimateLab => "estimate-lab",
            Self::SolitonTest => "soliton-test",
            Self::PicardTest => "picard-test",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

/// Initial data for `simulate` and `radius-track`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `u = v = √(2c) sech(√c (x - x0))`.
    Soliton,
    /// `u = amp_u sech((x - x0)/width)`, `v = amp_v sech((x - x0)/width)`.
    Sech,
    /// Random band-limited data drawn like the lab samples, scaled to `amp_u`, `amp_v`.
    Random,
}

impl Profile {
    fn as_str(&self) -> &'static str {
        match self {
            Self::Soliton => "soliton",
            Self::Sech => "sech",
            Self::Random => "random",
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "soliton" => Ok(Self::Soliton),
            "sech" => Ok(Self::Sech),
            "random" => Ok(Self::Random),
            _ => Err(format!("unknown profile {s:?} (expected soliton, sech or random)")),
        }
    }
}

/// One entry of the `estimates` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabCheck {
    Estimate(EstimateId),
    ExponentialLemmas,
}

impl LabCheck {
    pub fn all() -> Vec<Self> {
        use EstimateId::*;
        [
            LinearFree,
            TimeCutoff,
            Duhamel,
            StrichartzL4L2,
            StrichartzLinfL2,
            StrichartzL2Linf,
            StrichartzL4Linf,
            StrichartzLinfLinf,
            MultilinearU,
            MultilinearV,
            Apriori,
            AprioriGevrey,
            Embedding,
        ]
        .into_iter()
        .map(Self::Estimate)
        .chain([Self::ExponentialLemmas])
        .collect()
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Estimate(id) => id.as_str(),
            Self::ExponentialLemmas => "exponential_lemmas",
        }
    }
}

impl FromStr for LabCheck {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::all()
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown estimate {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: Option<PathBuf>,

    pub half_length: f64,
    pub num_points: usize,

    pub p: u32,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// `None` picks the exact dealiasing ratio `p + 1` for the degree
    /// `2p + 1` nonlinearity.
    pub padding: Option<f64>,
    pub record_stride: usize,
    pub blowup_factor: f64,
    pub nonlinear: bool,

    pub rho: f64,
    pub s: f64,
    pub b: f64,
    pub b_prime: f64,

    pub min_points: usize,
    pub monotone_run: usize,
    pub floor_margin: f64,
    pub max_fraction: f64,
    pub fit_t_min: f64,

    pub profile: Profile,
    pub c: f64,
    pub x0: f64,
    pub amp_u: f64,
    pub amp_v: f64,
    pub width: f64,

    pub lab_half_length: f64,
    pub lab_num_points: usize,
    pub tau: f64,
    pub bandwidth: f64,
    pub modulation_band: f64,
    pub envelope: Envelope,
    pub ensemble: usize,
    pub lab_amplitude: f64,
    pub lab_dt: f64,
    pub lab_stride: usize,
    pub lab_t: Vec<f64>,
    pub support: f64,
    pub kappa: f64,
    pub estimates: Vec<LabCheck>,

    pub window: f64,
    pub nodes: usize,
    pub max_iters: usize,
    pub contraction_tol: f64,
    pub picard_s: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lab = LabConfig::default();
        let picard = PicardConfig::default();
        let fit = FitConfig::default();
        Self {
            kind: ExperimentKind::Simulate,
            seed: 0,
            out: None,
            half_length: 20.0 * PI,
            num_points: 1024,
            p: 1,
            dt: 1e-3,
            t_end: 5.0,
            scheme: Scheme::IfRk4,
            padding: None,
            record_stride: 100,
            blowup_factor: 1e6,
            nonlinear: true,
            rho: 0.25,
            s: 2.0,
            b: 0.55,
            b_prime: -0.3,
            min_points: fit.min_points,
            monotone_run: fit.monotone_run,
            floor_margin: fit.floor_margin,
            max_fraction: fit.max_fraction,
            fit_t_min: 1.0,
            profile: Profile::Soliton,
            c: 1.0,
            x0: 0.0,
            amp_u: 2f64.sqrt(),
            amp_v: 2f64.sqrt(),
            width: 1.0,
            lab_half_length: lab.half_length,
            lab_num_points: lab.num_points,
            tau: lab.time_step,
            bandwidth: lab.bandwidth,
            modulation_band: lab.modulation_band,
            envelope: lab.envelope,
            ensemble: lab.ensemble_size,
            lab_amplitude: lab.amplitude,
            lab_dt: lab.solver_dt,
            lab_stride: lab.solver_stride,
            lab_t: vec![1.0],
            support: 1.0,
            kappa: 0.6,
            estimates: LabCheck::all(),
            window: picard.window,
            nodes: picard.nodes,
            max_iters: picard.max_iters,
            contraction_tol: picard.contraction_tol,
            picard_s: picard.s,
        }
    }
}

const SECTIONS: [(&str, &[&str]); 8] = [
    ("run", &["kind", "seed", "out"]),
    ("grid", &["L", "N"]),
    (
        "solver",
        &["p", "dt", "t_end", "scheme", "padding", "record_stride", "blowup_factor", "nonlinear"],
    ),
    ("norms", &["rho", "s", "b", "b_prime"]),
    ("fit", &["min_points", "monotone_run", "floor_margin", "max_fraction", "fit_t_min"]),
    ("data", &["profile", "c", "x0", "amp_u", "amp_v", "width"]),
    (
        "lab",
        &[
            "lab_L",
            "lab_N",
            "tau",
            "bandwidth",
            "modulation_band",
            "envelope",
            "envelope_param",
            "ensemble",
            "lab_amplitude",
            "lab_dt",
            "lab_stride",
            "lab_t",
            "support",
            "kappa",
            "estimates",
        ],
    ),
    ("picard", &["window", "nodes", "max_iters", "contraction_tol", "picard_s"]),
];

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(name, _)| *name)
}

/// Floats accept a trailing `pi` factor (`20pi`, `pi`, `0.5pi`).
fn parse_f64(v: &str) -> Result<f64, String> {
    let v = v.trim();
    if let Some(head) = v.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = if head.is_empty() { 1.0 } else { parse_plain(head)? };
        return Ok(k * PI);
    }
    parse_plain(v)
}

fn parse_plain(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got {v:?}"))
}

fn parse_int<T: FromStr>(v: &str) -> Result<T, String> {
    v.trim()
        .parse::<T>()
        .map_err(|_| format!("expected a non-negative integer, got {v:?}"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

fn parse_list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(',').map(|s| item(s.trim())).collect()
}

fn envelope_param(e: &Envelope) -> f64 {
    match *e {
        Envelope::Flat => 0.0,
        Envelope::Gaussian { width } => width,
        Envelope::Exponential { rho0 } => rho0,
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "kind" => self.kind = v.parse()?,
            "seed" => self.seed = parse_int(v)?,
            "out" => self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "L" => self.half_length = parse_f64(v)?,
            "N" => self.num_points = parse_int(v)?,
            "p" => self.p = parse_int(v)?,
            "dt" => self.dt = parse_f64(v)?,
            "t_end" => self.t_end = parse_f64(v)?,
            "scheme" => self.scheme = v.parse().map_err(|e: gkdv_core::Error| e.to_string())?,
            "padding" => self.padding = if v == "auto" { None } else { Some(parse_f64(v)?) },
            "record_stride" => self.record_stride = parse_int(v)?,
            "blowup_factor" => self.blowup_factor = parse_f64(v)?,
            "nonlinear" => self.nonlinear = parse_bool(v)?,
            "rho" => self.rho = parse_f64(v)?,
            "s" => self.s = parse_f64(v)?,
            "b" => self.b = parse_f64(v)?,
            "b_prime" => self.b_prime = parse_f64(v)?,
            "min_points" => self.min_points = parse_int(v)?,
            "monotone_run" => self.monotone_run = parse_int(v)?,
            "floor_margin" => self.floor_margin = parse_f64(v)?,
            "max_fraction" => self.max_fraction = parse_f64(v)?,
            "fit_t_min" => self.fit_t_min = parse_f64(v)?,
            "profile" => self.profile = v.parse()?,
            "c" => self.c = parse_f64(v)?,
            "x0" => self.x0 = parse_f64(v)?,
            "amp_u" => self.amp_u = parse_f64(v)?,
            "amp_v" => self.amp_v = parse_f64(v)?,
            "width" => self.width = parse_f64(v)?,
            "lab_L" => self.lab_half_length = parse_f64(v)?,
            "lab_N" => self.lab_num_points = parse_int(v)?,
            "tau" => self.tau = parse_f64(v)?,
            "bandwidth" => self.bandwidth = parse_f64(v)?,
            "modulation_band" => self.modulation_band = parse_f64(v)?,
            "envelope" => {
                let param = envelope_param(&self.envelope);
                self.envelope = match v {
                    "flat" => Envelope::Flat,
                    "gaussian" => Envelope::Gaussian { width: if param > 0.0 { param } else { 1.0 } },
                    "exponential" => Envelope::Exponential { rho0: param },
                    other => {
                        return Err(format!(
                            "unknown envelope {other:?} (expected flat, gaussian or exponential)"
                        ))
                    }
                }
            }
            "envelope_param" => {
                let x = parse_f64(v)?;
                match &mut self.envelope {
                    Envelope::Flat => {}
                    Envelope::Gaussian { width } => *width = x,
                    Envelope::Exponential { rho0 } => *rho0 = x,
                }
            }
            "ensemble" => self.ensemble = parse_int(v)?,
            "lab_amplitude" => self.lab_amplitude = parse_f64(v)?,
            "lab_dt" => self.lab_dt = parse_f64(v)?,
            "lab_stride" => self.lab_stride = parse_int(v)?,
            "lab_t" => self.lab_t = parse_list(v, parse_f64)?,
            "support" => self.support = parse_f64(v)?,
            "kappa" => self.kappa = parse_f64(v)?,
            "estimates" => {
                self.estimates = if v == "all" {
                    LabCheck::all()
                } else {
                    parse_list(v, |s| s.parse())?
                }
            }
            "window" => self.window = parse_f64(v)?,
            "nodes" => self.nodes = parse_int(v)?,
            "max_iters" => self.max_iters = parse_int(v)?,
            "contraction_tol" => self.contraction_tol = parse_f64(v)?,
            "picard_s" => self.picard_s = parse_f64(v)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Current value of `key`, formatted as [`RunConfig::render`] writes it.
    pub fn get(&self, key: &str) -> Option<String> {
        let f = |x: f64| fmt_f64(x);
        Some(match key {
            "kind" => self.kind.as_str().into(),
            "seed" => self.seed.to_string(),
            "out" => self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "L" => f(self.half_length),
            "N" => self.num_points.to_string(),
            "p" => self.p.to_string(),
            "dt" => f(self.dt),
            "t_end" => f(self.t_end),
            "scheme" => self.scheme.to_string(),
            "padding" => self.padding.map(f).unwrap_or_else(|| "auto".into()),
            "record_stride" => self.record_stride.to_string(),
            "blowup_factor" => f(self.blowup_factor),
            "nonlinear" => self.nonlinear.to_string(),
            "rho" => f(self.rho),
            "s" => f(self.s),
            "b" => f(self.b),
            "b_prime" => f(self.b_prime),
            "min_points" => self.min_points.to_string(),
            "monotone_run" => self.monotone_run.to_string(),
            "floor_margin" => f(self.floor_margin),
            "max_fraction" => f(self.max_fraction),
            "fit_t_min" => f(self.fit_t_min),
            "profile" => self.profile.as_str().into(),
            "c" => f(self.c),
            "x0" => f(self.x0),
            "amp_u" => f(self.amp_u),
            "amp_v" => f(self.amp_v),
            "width" => f(self.width),
            "lab_L" => f(self.lab_half_length),
            "lab_N" => self.lab_num_points.to_string(),
            "tau" => f(self.tau),
            "bandwidth" => f(self.bandwidth),
            "modulation_band" => f(self.modulation_band),
            "envelope" => match self.envelope {
                Envelope::Flat => "flat",
                Envelope::Gaussian { .. } => "gaussian",
                Envelope::Exponential { .. } => "exponential",
            }
            .into(),
            "envelope_param" => f(envelope_param(&self.envelope)),
            "ensemble" => self.ensemble.to_string(),
            "lab_amplitude" => f(self.lab_amplitude),
            "lab_dt" => f(self.lab_dt),
            "lab_stride" => self.lab_stride.to_string(),
            "lab_t" => self.lab_t.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", "),
            "support" => f(self.support),
            "kappa" => f(self.kappa),
            "estimates" => self.estimates.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "),
            "window" => f(self.window),
            "nodes" => self.nodes.to_string(),
            "max_iters" => self.max_iters.to_string(),
            "contraction_tol" => f(self.contraction_tol),
            "picard_s" => f(self.picard_s),
            _ => return None,
        })
    }

    /// Every key with its current value. Floats use 17 significant digits,
    /// so `parse_config(&c.render()) == c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (section, keys)) in SECTIONS.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{section}]\n"));
            for key in *keys {
                // `envelope_param` has to follow `envelope` so it lands on
                // the right variant when read back.
                let value = self.get(key).expect("every listed key renders");
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
        out
    }

    /// Applies `key=value` overrides (from `--set`) and revalidates.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self, ConfigError> {
        for item in overrides {
            let origin = format!("--set {item}");
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::at(&origin, "expected key=value"))?;
            let key = key.trim();
            let key = key.rsplit('.').next().unwrap_or(key);
            self.set(key, value).map_err(|m| ConfigError::at(&origin, m))?;
            if let Err((k, m)) = self.check() {
                if k == key {
                    return Err(ConfigError::at(&origin, m));
                }
            }
        }
        self.check().map_err(|(k, m)| ConfigError::at(format!("key {k}"), m))?;
        Ok(self)
    }

    /// Constraint check; names the offending key.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        fn need(ok: bool, key: &'static str, msg: impl FnOnce() -> String) -> Result<(), (&'static str, String)> {
            if ok {
                Ok(())
            } else {
                Err((key, msg()))
            }
        }
        let core = |key: &'static str| move |e: gkdv_core::Error| (key, e.to_string());

        SpectralGrid::new(self.half_length, self.num_points).map_err(core("N"))?;
        need(self.half_length.is_finite() && self.half_length > 0.0, "L", || {
            format!("L = {} must be positive", self.half_length)
        })?;
        need(self.p >= 1, "p", || "p must be a positive integer".into())?;
        need(self.dt.is_finite() && self.dt > 0.0, "dt", || format!("dt = {} must be positive", self.dt))?;
        need(self.t_end.is_finite() && self.t_end >= 0.0, "t_end", || {
            format!("t_end = {} must be >= 0", self.t_end)
        })?;
        if let Some(r) = self.padding {
            need(r.is_finite() && r >= 1.5, "padding", || format!("padding = {r} must be >= 1.5"))?;
        }
        need(self.record_stride >= 1, "record_stride", || "record_stride must be >= 1".into())?;
        need(self.blowup_factor > 1.0, "blowup_factor", || "blowup_factor must exceed 1".into())?;
        need(self.rho.is_finite() && self.rho >= 0.0, "rho", || format!("rho = {} violates rho >= 0", self.rho))?;
        need(self.s.is_finite(), "s", || "s must be finite".into())?;
        need((-1.0..=1.0).contains(&self.b), "b", || format!("b = {} violates b ∈ [-1, 1]", self.b))?;
        need((-1.0..=1.0).contains(&self.b_prime), "b_prime", || {
            format!("b_prime = {} violates b' ∈ [-1, 1]", self.b_prime)
        })?;
        need(self.min_points >= 3, "min_points", || "min_points must be >= 3".into())?;
        need(self.monotone_run >= 1, "monotone_run", || "monotone_run must be >= 1".into())?;
        need(self.floor_margin >= 1.0, "floor_margin", || "floor_margin must be >= 1".into())?;
        need(self.max_fraction > 0.0 && self.max_fraction <= 1.0, "max_fraction", || {
            format!("max_fraction = {} must lie in (0, 1]", self.max_fraction)
        })?;
        need(self.fit_t_min >= 1.0, "fit_t_min", || {
            format!("fit_t_min = {} must be >= 1 (large-time regime)", self.fit_t_min)
        })?;
        need(self.c > 0.0 && self.c.is_finite(), "c", || format!("c = {} must be positive", self.c))?;
        need(self.width > 0.0 && self.width.is_finite(), "width", || "width must be positive".into())?;
        need(self.amp_u.is_finite() && self.amp_v.is_finite(), "amp_u", || "amplitudes must be finite".into())?;
        self.lab_config().validate().map_err(core("lab_N"))?;
        need(
            !self.lab_t.is_empty() && self.lab_t.iter().all(|t| t.is_finite() && *t > 0.0),
            "lab_t",
            || "lab_t must list positive windows".into(),
        )?;
        need(self.support > 0.0, "support", || "support must be positive".into())?;
        need(self.kappa > 0.0, "kappa", || "kappa must be positive".into())?;
        need(!self.estimates.is_empty(), "estimates", || "estimates must not be empty".into())?;
        self.picard_config().validate().map_err(core("window"))?;
        need(self.picard_s.is_finite(), "picard_s", || "picard_s must be finite".into())?;
        Ok(())
    }

    pub fn grid(&self) -> gkdv_core::Result<SpectralGrid> {
        SpectralGrid::new(self.half_length, self.num_points)
    }

    pub fn norm_params(&self) -> NormParams {
        NormParams { rho: self.rho, s: self.s, b: self.b }
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            min_points: self.min_points,
            monotone_run: self.monotone_run,
            floor_margin: self.floor_margin,
            max_fraction: self.max_fraction,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            p: self.p,
            dt: self.dt,
            t_end: self.t_end,
            scheme: self.scheme,
            padding_ratio: self.padding.unwrap_or(self.p as f64 + 1.0),
            record_stride: self.record_stride,
            nonlinear: self.nonlinear,
            blowup_factor: self.blowup_factor,
            diagnostics: DiagnosticsConfig {
                norms: self.norm_params(),
                fit: self.fit_config(),
                keep_states: false,
            },
        }
    }

    pub fn lab_config(&self) -> LabConfig {
        LabConfig {
            half_length: self.lab_half_length,
            num_points: self.lab_num_points,
            time_step: self.tau,
            bandwidth: self.bandwidth,
            modulation_band: self.modulation_band,
            envelope: self.envelope,
            ensemble_size: self.ensemble,
            master_seed: self.seed,
            amplitude: self.lab_amplitude,
            solver_dt: self.lab_dt,
            solver_stride: self.lab_stride,
        }
    }

    pub fn picard_config(&self) -> PicardConfig {
        PicardConfig {
            window: self.window,
            nodes: self.nodes,
            max_iters: self.max_iters,
            contraction_tol: self.contraction_tol,
            s: self.picard_s,
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parses `key = value` lines with `#` comments and `[section]` headers,
/// fills defaults and validates.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let origin = format!("line {n}");
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(&origin, format!("malformed section header {line:?}")))?
                .trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::at(&origin, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(&origin, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        let home = section_of(key)
            .ok_or_else(|| ConfigError::at(&origin, format!("unknown key {key:?}")))?;
        if let Some(s) = &section {
            if s != home {
                return Err(ConfigError::at(
                    &origin,
                    format!("key {key:?} belongs to [{home}], not [{s}]"),
                ));
            }
        }
        let key: &'static str = SECTIONS
            .iter()
            .flat_map(|(_, keys)| keys.iter())
            .find(|k| **k == key)
            .expect("section_of found it");
        if let Some(prev) = lines.insert(key, n) {
            return Err(ConfigError::at(&origin, format!("key {key:?} already set on line {prev}")));
        }
        cfg.set(key, value).map_err(|m| ConfigError::at(&origin, m))?;
    }
    cfg.check().map_err(|(key, m)| match lines.get(key) {
        Some(n) => ConfigError::at(format!("line {n}"), m),
        None => ConfigError::at("config", m),
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.p, 1);
        assert_eq!(c.half_length, 20.0 * PI);
        assert_eq!(c.num_points, 1024);
        assert_eq!((c.s, c.b, c.b_prime, c.dt), (2.0, 0.55, -0.3, 1e-3));
    }

    #[test]
    fn overrides_and_sections() {
        let c = parse_config("p=2\n[grid]\nN = 512 # smaller\nL = 10pi\n").unwrap();
        assert_eq!(c.p, 2);
        assert_eq!(c.num_points, 512);
        assert_eq!(c.half_length, 10.0 * PI);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_config("# header\nb=1.5\n").unwrap_err();
        assert_eq!(e.origin, "line 2");
        assert!(e.message.contains("[-1, 1]"), "{e}");
        let e = parse_config("p = 1\nfoo = 3\n").unwrap_err();
        assert_eq!(e.origin, "line 2");
        assert!(e.message.contains("unknown key"));
        let e = parse_config("[grid]\nN = many\n").unwrap_err();
        assert_eq!(e.origin, "line 2");
        let e = parse_config("[grid]\np = 2\n").unwrap_err();
        assert!(e.message.contains("[solver]"));
        let e = parse_config("p = 1\np = 2\n").unwrap_err();
        assert!(e.message.contains("line 1"));
    }

    #[test]
    fn render_round_trips() {
        let c = RunConfig {
            kind: ExperimentKind::EstimateLab,
            amp_u: 1.2 * 2f64.sqrt(),
            lab_t: vec![1.0, 2.0, 4.0],
            estimates: vec![LabCheck::ExponentialLemmas, LabCheck::Estimate(EstimateId::Duhamel)],
            envelope: Envelope::Gaussian { width: 0.7 },
            padding: Some(2.5),
            out: Some(PathBuf::from("runs/x")),
            ..RunConfig::default()
        };
        let text = c.render();
        assert_eq!(parse_config(&text).unwrap(), c);
        let amp = text.lines().find_map(|l| l.strip_prefix("amp_u = ")).unwrap();
        let mantissa = amp.split('e').next().unwrap().replace('.', "");
        assert_eq!(mantissa.len(), 17, "{amp}");
    }

    #[test]
    fn set_overrides() {
        let c = RunConfig::default()
            .with_overrides(&["solver.p=3".into(), "t_end=2".into()])
            .unwrap();
        assert_eq!((c.p, c.t_end), (3, 2.0));
        let e = RunConfig::default().with_overrides(&["b=2".into()]).unwrap_err();
        assert_eq!(e.origin, "--set b=2");
    }
}
