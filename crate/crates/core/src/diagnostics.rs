//! Conserved quantities, analyticity-radius estimation from the Fourier
//! tail, evaluation of the analytic continuation into a strip, and power-law
//! fitting of the radius history.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::CoupledState;
use crate::function_spaces::{gevrey_norm_spectral, NormParams};
use crate::spectral::{
    differentiate_unchecked, forward_unchecked, inverse_complex, padded_len, to_fine,
    Field, SpectralField, SpectralGrid,
};

/// The four conserved integrals of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub mass_u: f64,
    pub mass_v: f64,
    /// `½∫(u² + v²)`
    pub l2: f64,
    /// `½∫(u_x² + v_x² - (2/(p+1)) u^{p+1} v^{p+1})`
    pub hamiltonian: f64,
}

impl InvariantSet {
    /// Componentwise `|self - reference| / |reference|` (absolute when the
    /// reference vanishes).
    pub fn relative_drift(&self, reference: &Self) -> [f64; 4] {
        let rel = |a: f64, b: f64| {
            if b == 0.0 {
                (a - b).abs()
            } else {
                ((a - b) / b).abs()
            }
        };
        [
            rel(self.mass_u, reference.mass_u),
            rel(self.mass_v, reference.mass_v),
            rel(self.l2, reference.l2),
            rel(self.hamiltonian, reference.hamiltonian),
        ]
    }
}

/// `∫ ∏ f_i dx` evaluated on a padded grid so that the mean mode of the
/// product is free of aliasing.
fn integral_of_product(grid: &SpectralGrid, factors: &[(&[Complex64], u32)]) -> f64 {
    let degree: u32 = factors.iter().map(|(_, e)| e).sum();
    let m = padded_len(grid.len(), (degree as f64 + 2.0) / 2.0);
    let mut acc = vec![1.0_f64; m];
    for (coeffs, exp) in factors {
        let amps = grid.coeffs_to_amplitudes(coeffs);
        let fine = to_fine(&amps, m);
        for (a, f) in acc.iter_mut().zip(&fine) {
            *a *= f.re.powi(*exp as i32);
        }
    }
    acc.iter().sum::<f64>() * 2.0 * grid.half_length() / m as f64
}

pub fn invariants(state: &CoupledState, p: u32) -> InvariantSet {
    let grid = state.grid();
    let dx = grid.dx();
    let uh = forward_unchecked(&state.u);
    let vh = forward_unchecked(&state.v);
    let ux = differentiate_unchecked(&uh, 1);
    let vx = differentiate_unchecked(&vh, 1);
    let mass_u = state.u.samples().iter().sum::<f64>() * dx;
    let mass_v = state.v.samples().iter().sum::<f64>() * dx;
    // Parseval: ∫f² = Σ|f̂|² Δζ exactly.
    let energy = |s: &SpectralField| s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dk();
    let l2 = 0.5 * (energy(&uh) + energy(&vh));
    let coupling = integral_of_product(grid, &[(uh.coeffs(), p + 1), (vh.coeffs(), p + 1)]);
    let hamiltonian = 0.5 * (energy(&ux) + energy(&vx) - 2.0 / (p as f64 + 1.0) * coupling);
    InvariantSet {
        mass_u,
        mass_v,
        l2,
        hamiltonian,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Minimum number of tail points for a usable fit.
    pub min_points: usize,
    /// Length of the strictly decreasing run that marks the start of the tail.
    pub monotone_run: usize,
    /// Tail must exceed this multiple of the estimated noise floor.
    pub floor_margin: f64,
    /// Fraction of the Nyquist wavenumber beyond which nothing is fitted.
    pub max_fraction: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            min_points: 8,
            monotone_run: 8,
            floor_margin: 1e3,
            max_fraction: 1.0,
        }
    }
}

/// Exponential decay rate of the Fourier tail, `|f̂(ζ)| ~ e^{-ρ̂|ζ|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `NaN` when `noise_floor_hit`.
    pub rho_hat: f64,
    pub fit_window: (f64, f64),
    pub r_squared: f64,
    /// Standard error of the fitted slope.
    pub slope_stderr: f64,
    pub points: usize,
    pub noise_floor_hit: bool,
}

impl RadiusEstimate {
    fn unusable(points: usize) -> Self {
        Self {
            rho_hat: f64::NAN,
            fit_window: (f64::NAN, f64::NAN),
            r_squared: f64::NAN,
            slope_stderr: f64::NAN,
            points,
            noise_floor_hit: true,
        }
    }

    pub fn is_usable(&self) -> bool {
        !self.noise_floor_hit && self.rho_hat.is_finite()
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, R², se(b), residual std)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let dof = (n - 2.0).max(1.0);
    let resid_std = (sse / dof).sqrt();
    let se = if sxx > 0.0 { resid_std / sxx.sqrt() } else { 0.0 };
    (intercept, slope, r2, se, resid_std)
}

/// One-sided tail magnitudes `max(|f̂(ζ)|, |f̂(-ζ)|)` for `ζ = 0, Δζ, …`,
/// truncated at `max_fraction` of Nyquist.
fn tail_magnitudes(spec: &SpectralField, cfg: &FitConfig) -> Vec<f64> {
    let n = spec.grid().len();
    let c = spec.coeffs();
    let kmax = ((cfg.max_fraction.clamp(0.0, 1.0) * (n / 2 - 1) as f64).floor() as usize).max(1);
    (0..=kmax)
        .map(|k| {
            if k == 0 {
                c[0].norm()
            } else {
                c[k].norm().max(c[n - k].norm())
            }
        })
        .collect()
}

/// Roundoff floor: median of the highest-wavenumber decade of the tail,
/// never below machine epsilon times the peak.
pub fn noise_floor(spec: &SpectralField, cfg: &FitConfig) -> f64 {
    let mags = tail_magnitudes(spec, cfg);
    let peak = mags.iter().fold(0.0_f64, |m, &v| m.max(v));
    let start = (mags.len() * 9) / 10;
    let mut top: Vec<f64> = mags[start..].to_vec();
    top.sort_by(|a, b| a.total_cmp(b));
    let median = if top.is_empty() { 0.0 } else { top[top.len() / 2] };
    median.max(f64::EPSILON * peak)
}

pub fn estimate_radius_spectral(spec: &SpectralField, cfg: &FitConfig) -> RadiusEstimate {
    let mags = tail_magnitudes(spec, cfg);
    let floor = noise_floor(spec, cfg);
    let dk = spec.grid().dk();
    let threshold = cfg.floor_margin * floor;
    let Some(hi) = mags.iter().rposition(|&m| m > threshold && m > 0.0) else {
        return RadiusEstimate::unusable(0);
    };
    let run = cfg.monotone_run.max(2);
    let logs: Vec<f64> = mags.iter().map(|m| m.ln()).collect();
    let lo = (0..=hi.saturating_sub(run - 1)).find(|&k| {
        k + run - 1 <= hi && (k..k + run - 1).all(|i| logs[i] > logs[i + 1])
    });
    let Some(lo) = lo else {
        return RadiusEstimate::unusable(0);
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=hi)
        .filter(|&k| mags[k] > 0.0)
        .map(|k| (k as f64 * dk, -logs[k]))
        .unzip();
    if xs.len() < cfg.min_points {
        return RadiusEstimate::unusable(xs.len());
    }
    let (_, slope, r2, se, _) = linear_fit(&xs, &ys);
    RadiusEstimate {
        rho_hat: slope,
        fit_window: (lo as f64 * dk, hi as f64 * dk),
        r_squared: r2,
        slope_stderr: se,
        points: xs.len(),
        noise_floor_hit: false,
    }
}

/// Least-squares decay rate of `-log|f̂(ζ)|` over the automatically chosen
/// tail window.
pub fn estimate_radius(f: &Field, cfg: &FitConfig) -> RadiusEstimate {
    estimate_radius_spectral(&forward_unchecked(f), cfg)
}

/// Joint radius of the pair: the smaller of the two estimates.
pub fn joint_radius(a: &RadiusEstimate, b: &RadiusEstimate) -> RadiusEstimate {
    match (a.is_usable(), b.is_usable()) {
        (true, true) => {
            if a.rho_hat <= b.rho_hat {
                *a
            } else {
                *b
            }
        }
        (true, false) => *b,
        _ => *a,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticExtension {
    /// `|∂ⁿ_x f(x + iy)|` on the grid points.
    pub magnitudes: Field,
    pub radius: RadiusEstimate,
    /// Set when `|y| >= ρ̂ - σ` or the radius could not be estimated; the
    /// values are then dominated by the truncation scale.
    pub warning: bool,
}

impl AnalyticExtension {
    pub fn max(&self) -> f64 {
        self.magnitudes.max_abs()
    }
}

/// Evaluates `∂ⁿ_x f(x + iy)` through the Fourier series
/// `Σ f̂(ζ)(iζ)ⁿ e^{-ζy} e^{iζx}`. Coefficients at or below the roundoff
/// floor are discarded before the exponential amplification.
pub fn evaluate_analytic_extension(
    f: &Field,
    y: f64,
    n: u32,
    margin: f64,
    cfg: &FitConfig,
) -> AnalyticExtension {
    let spec = forward_unchecked(f);
    let radius = estimate_radius_spectral(&spec, cfg);
    let warning = !radius.is_usable() || y.abs() >= radius.rho_hat - margin;
    let floor = noise_floor(&spec, cfg);
    let mut kept: Vec<Complex64> = spec
        .coeffs()
        .iter()
        .map(|&c| {
            if c.norm() <= EXTENSION_FLOOR_FACTOR * floor {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
        .collect();
    if !warning {
        continue_tail(&mut kept);
    }
    let i = Complex64::new(0.0, 1.0);
    let coeffs: Vec<Complex64> = kept
        .iter()
        .zip(spec.grid().wavenumbers())
        .map(|(c, &k)| c * (i * k).powu(n) * (-k * y).exp())
        .collect();
    let values = inverse_complex(&SpectralField::from_parts_unchecked(spec.grid().clone(), coeffs));
    AnalyticExtension {
        magnitudes: Field::from_parts_unchecked(
            spec.grid().clone(),
            values.iter().map(|c| c.norm()).collect(),
        ),
        radius,
        warning,
    }
}

/// Replaces the discarded part of each half of the spectrum by the
/// geometric continuation of the last reliable coefficients. Inside the
/// strip of analyticity the amplified tail is dominated by the nearest
/// singularity, whose coefficients are geometric in `ζ`; dropping them
/// instead leaves an error of the size of the tail.
fn continue_tail(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    let half = n / 2;
    for side in [1i64, -1] {
        let slot = |k: usize| if side > 0 { k } else { n - k };
        let Some(hi) = (1..half).rev().find(|&k| coeffs[slot(k)].norm() > 0.0) else {
            continue;
        };
        if hi + 1 >= half || hi < TAIL_RUN + 1 {
            continue;
        }
        let window = hi - TAIL_RUN..hi;
        if window.clone().any(|k| coeffs[slot(k)].norm() == 0.0) {
            continue;
        }
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for k in window {
            let a = coeffs[slot(k)];
            num += coeffs[slot(k + 1)] * a.conj();
            den += a.norm_sqr();
        }
        let r = num / den;
        if !(r.norm() < 1.0) {
            continue;
        }
        let mut c = coeffs[slot(hi)];
        for k in hi + 1..half {
            c *= r;
            coeffs[slot(k)] = c;
        }
    }
}

/// Reliable coefficients used to estimate the continuation ratio.
const TAIL_RUN: usize = 8;

const EXTENSION_FLOOR_FACTOR: f64 = 10.0;

/// `sup_x |∂ⁿ_x f(x+iy)| / ‖f‖_{G_{ρ,0}}`: the empirical constant in the
/// strip bound for a strip of half-width `|y|` inside radius `ρ`.
pub fn strip_bound_ratio(f: &Field, y: f64, n: u32, rho: f64, cfg: &FitConfig) -> Result<f64> {
    let ext = evaluate_analytic_extension(f, y, n, 0.0, cfg);
    let g = gevrey_norm_spectral(&forward_unchecked(f), rho, 0.0)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    Ok(ext.max() / g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    pub norms: NormParams,
    pub fit: FitConfig,
    pub keep_states: bool,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            norms: NormParams {
                rho: 0.25,
                s: 2.0,
                b: 0.55,
            },
            fit: FitConfig::default(),
            keep_states: false,
        }
    }
}

/// Diagnostics recorded at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub invariants: InvariantSet,
    pub hs_u: f64,
    pub hs_v: f64,
    /// `G_{ρ,s}` norms at the configured `ρ`; `NaN` on overflow.
    pub gevrey_u: f64,
    pub gevrey_v: f64,
    pub radius_u: RadiusEstimate,
    pub radius_v: RadiusEstimate,
    pub radius_joint: RadiusEstimate,
}

impl Snapshot {
    pub fn of(state: &CoupledState, p: u32, cfg: &DiagnosticsConfig) -> Self {
        let uh = forward_unchecked(&state.u);
        let vh = forward_unchecked(&state.v);
        let s = cfg.norms.s;
        let rho = cfg.norms.rho;
        let radius_u = estimate_radius_spectral(&uh, &cfg.fit);
        let radius_v = estimate_radius_spectral(&vh, &cfg.fit);
        Self {
            t: state.t,
            invariants: invariants(state, p),
            hs_u: gevrey_norm_spectral(&uh, 0.0, s).unwrap_or(f64::NAN),
            hs_v: gevrey_norm_spectral(&vh, 0.0, s).unwrap_or(f64::NAN),
            gevrey_u: gevrey_norm_spectral(&uh, rho, s).unwrap_or(f64::NAN),
            gevrey_v: gevrey_norm_spectral(&vh, rho, s).unwrap_or(f64::NAN),
            radius_u,
            radius_v,
            radius_joint: joint_radius(&radius_u, &radius_v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Sup norm grew beyond the configured factor at time `t`.
    BlowUp { t: f64 },
}

/// Provenance attached to a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub config: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub p: u32,
    pub config: DiagnosticsConfig,
    pub snapshots: Vec<Snapshot>,
    /// Populated only when `config.keep_states` is set.
    pub states: Vec<CoupledState>,
    pub termination: Termination,
    pub info: RunInfo,
}

impl TrajectoryRecord {
    pub fn new(p: u32, config: DiagnosticsConfig) -> Self {
        Self {
            p,
            config,
            snapshots: Vec::new(),
            states: Vec::new(),
            termination: Termination::Completed,
            info: RunInfo::default(),
        }
    }

    pub fn push(&mut self, state: CoupledState) -> Result<()> {
        if let Some(last) = self.snapshots.last() {
            if state.t <= last.t {
                return Err(Error::InvalidArgument(format!(
                    "snapshot times must increase ({} after {})",
                    state.t, last.t
                )));
            }
        }
        self.snapshots.push(Snapshot::of(&state, self.p, &self.config));
        if self.config.keep_states {
            self.states.push(state);
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }
}

/// Joint radius estimate at every recorded instant.
pub fn track_radius(traj: &TrajectoryRecord) -> Vec<(f64, RadiusEstimate)> {
    traj.snapshots
        .iter()
        .map(|s| (s.t, s.radius_joint))
        .collect()
}

/// Power law `ρ̂(t) ≈ K t^{-α}` fitted in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub t_min: f64,
    pub k_fit: f64,
    pub alpha_fit: f64,
    pub r_squared: f64,
    /// Standard error of `α`.
    pub alpha_stderr: f64,
    /// Residual standard deviation of `log ρ̂`.
    pub residual_std: f64,
    pub points: usize,
}

pub fn fit_decay_exponent(series: &[(f64, f64)], t_min: f64) -> Result<DecayFit> {
    if !(t_min >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "decay fits use the large-time regime t_min >= 1, got {t_min}"
        )));
    }
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= t_min).collect();
    if let Some((t, r)) = pts.iter().find(|(_, r)| !(*r > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "non-positive radius {r} at t = {t}"
        )));
    }
    if pts.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "need at least 8 points with t >= {t_min}, have {}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, r)| r.ln()).collect();
    let (a, b, r2, se, resid) = linear_fit(&xs, &ys);
    Ok(DecayFit {
        t_min,
        k_fit: a.exp(),
        alpha_fit: -b,
        r_squared: r2,
        alpha_stderr: se,
        residual_std: resid,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_invariants() {
        let g = SpectralGrid::new(PI, 32).unwrap();
        let inv = invariants(&CoupledState::zeros(&g), 2);
        assert_eq!(inv.mass_u, 0.0);
        assert_eq!(inv.mass_v, 0.0);
        assert_eq!(inv.l2, 0.0);
        assert_eq!(inv.hamiltonian, 0.0);
    }

    #[test]
    fn trig_invariants_exact() {
        // u = v = 1 + cos x, p = 1 on [-π, π):
        // ∫u = 2π, ½∫(u²+v²) = ∫(1+cos)² = 3π,
        // ∫u_x² = π, ∫u⁴ = ∫(1+cos)^4 = 35π/4.
        let g = SpectralGrid::new(PI, 16).unwrap();
        let u = Field::from_fn(&g, |x| 1.0 + x.cos()).unwrap();
        let s = CoupledState::new(0.0, u.clone(), u).unwrap();
        let inv = invariants(&s, 1);
        assert!((inv.mass_u - 2.0 * PI).abs() < 1e-12);
        assert!((inv.l2 - 3.0 * PI).abs() < 1e-12);
        let h = 0.5 * (2.0 * PI - 35.0 * PI / 4.0);
        assert!((inv.hamiltonian - h).abs() < 1e-12, "{} vs {h}", inv.hamiltonian);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (a, b, r2, se, _) = linear_fit(&x, &y);
        assert!((a - 2.0).abs() < 1e-14 && (b + 0.5).abs() < 1e-14);
        assert!(r2 > 0.999_999 && se < 1e-12);
    }

    #[test]
    fn decay_fit_exact_power_law() {
        let series: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 3.0 * (i as f64).powi(-2))).collect();
        let fit = fit_decay_exponent(&series, 1.0).unwrap();
        assert!((fit.k_fit - 3.0).abs() < 1e-10);
        assert!((fit.alpha_fit - 2.0).abs() < 1e-10);
    }

    #[test]
    fn decay_fit_constant_series() {
        let series: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 0.8)).collect();
        let fit = fit_decay_exponent(&series, 1.0).unwrap();
        assert!(fit.alpha_fit.abs() < 1e-14);
        assert!((fit.k_fit - 0.8).abs() < 1e-14);
    }

    #[test]
    fn decay_fit_errors() {
        let mut series: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_decay_exponent(&series, 0.5).is_err());
        assert!(matches!(
            fit_decay_exponent(&series[..5], 1.0),
            Err(Error::InsufficientData(_))
        ));
        series[3].1 = 0.0;
        assert!(matches!(
            fit_decay_exponent(&series, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn radius_flags_band_limited_signal() {
        let g = SpectralGrid::new(PI, 64).unwrap();
        let f = Field::from_fn(&g, |x| x.cos() + 0.5 * (2.0 * x).sin()).unwrap();
        let r = estimate_radius(&f, &FitConfig::default());
        assert!(r.noise_floor_hit);
        assert!(r.rho_hat.is_nan());
    }

    #[test]
    fn joint_takes_minimum() {
        let mk = |rho| RadiusEstimate {
            rho_hat: rho,
            fit_window: (0.0, 1.0),
            r_squared: 1.0,
            slope_stderr: 0.0,
            points: 10,
            noise_floor_hit: false,
        };
        assert_eq!(joint_radius(&mk(0.3), &mk(0.5)).rho_hat, 0.3);
        assert_eq!(joint_radius(&mk(0.9), &mk(0.5)).rho_hat, 0.5);
        let bad = RadiusEstimate::unusable(0);
        assert!(joint_radius(&mk(0.9), &bad).noise_floor_hit);
    }
}
