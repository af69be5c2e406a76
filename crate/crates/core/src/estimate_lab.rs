//! Randomized measurement of the constants in the linear, Strichartz-type,
//! multilinear and a-priori estimates.
//!
//! Every check draws an ensemble of random samples, evaluates the ratio of
//! the left-hand side to the right-hand side with the constant removed, and
//! reports the largest ratio together with the seed that produced it.
//! Space-time samples live on the window `[-2W, 2W)` so that data cut off by
//! `ψ_W` vanish at both ends of the periodic time transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Termination, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::evolution::{propagate_spectral, simulate_symmetric, CoupledState, SolverConfig};
use crate::function_spaces::{
    bourgain_norm, bourgain_norm_unwindowed, fkappa_symbol, gevrey_norm_spectral,
    inverse_space_time_transform, mixed_norm, CutoffProfile, NormParams, SpaceTimeSample,
    SpaceTimeSpectrum,
};
use crate::spectral::{
    dealiased_product_complex, fft_forward, fft_inverse, forward_complex, forward_unchecked,
    inverse_complex, inverse_unchecked, signed_index, Field, SpectralField, SpectralGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateId {
    LinearFree,
    TimeCutoff,
    Duhamel,
    StrichartzL4L2,
    StrichartzLinfL2,
    StrichartzL2Linf,
    StrichartzL4Linf,
    StrichartzLinfLinf,
    /// `∂x(u^p v^{p+1})`.
    MultilinearU,
    /// `∂x(u^{p+1} v^p)`.
    MultilinearV,
    Apriori,
    AprioriGevrey,
    Embedding,
}

impl EstimateId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LinearFree => "linear_free",
            Self::TimeCutoff => "time_cutoff",
            Self::Duhamel => "duhamel",
            Self::StrichartzL4L2 => "strichartz_l4_l2",
            Self::StrichartzLinfL2 => "strichartz_linf_l2",
            Self::StrichartzL2Linf => "strichartz_l2_linf",
            Self::StrichartzL4Linf => "strichartz_l4_linf",
            Self::StrichartzLinfLinf => "strichartz_linf_linf",
            Self::MultilinearU => "multilinear_u",
            Self::MultilinearV => "multilinear_v",
            Self::Apriori => "apriori",
            Self::AprioriGevrey => "apriori_gevrey",
            Self::Embedding => "embedding",
        }
    }
}

impl std::fmt::Display for EstimateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five mixed-norm bounds for `F_κ`, named by the norm on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrichartzVariant {
    /// `‖A^{1/2} F_κ‖_{L⁴_x L²_t}`, needs `κ > 1/4`.
    L4L2,
    /// `‖A F_κ‖_{L^∞_x L²_t}`, needs `κ > 1/4`.
    LinfL2,
    /// `‖A^{-s} F_κ‖_{L²_x L^∞_t}`, needs `κ > 1/2`, `s > 3κ`.
    L2Linf,
    /// `‖A^{-s} F_κ‖_{L⁴_x L^∞_t}`, needs `κ > 1/2`, `s > 1/4`.
    L4Linf,
    /// `‖A^{-s} F_κ‖_{L^∞_x L^∞_t}`, needs `κ > 1/2`, `s > 1/2`.
    LinfLinf,
}

impl StrichartzVariant {
    pub const ALL: [Self; 5] = [Self::L4L2, Self::LinfL2, Self::L2Linf, Self::L4Linf, Self::LinfLinf];

    pub fn id(&self) -> EstimateId {
        match self {
            Self::L4L2 => EstimateId::StrichartzL4L2,
            Self::LinfL2 => EstimateId::StrichartzLinfL2,
            Self::L2Linf => EstimateId::StrichartzL2Linf,
            Self::L4Linf => EstimateId::StrichartzL4Linf,
            Self::LinfLinf => EstimateId::StrichartzLinfLinf,
        }
    }

    /// `(p, q)` of the `L^p_x L^q_t` norm.
    pub fn exponents(&self) -> (f64, f64) {
        let inf = f64::INFINITY;
        match self {
            Self::L4L2 => (4.0, 2.0),
            Self::LinfL2 => (inf, 2.0),
            Self::L2Linf => (2.0, inf),
            Self::L4Linf => (4.0, inf),
            Self::LinfLinf => (inf, inf),
        }
    }

    /// Power of `A` applied before taking the norm.
    pub fn a_power(&self, s: f64) -> f64 {
        match self {
            Self::L4L2 => 0.5,
            Self::LinfL2 => 1.0,
            _ => -s,
        }
    }

    pub fn check_thresholds(&self, kappa: f64, s: f64) -> Result<()> {
        let fail = |what: String| Err(Error::ThresholdViolation(format!("{}: {what}", self.id())));
        match self {
            Self::L4L2 | Self::LinfL2 => {
                if kappa <= 0.25 {
                    return fail(format!("requires kappa > 1/4, got {kappa}"));
                }
            }
            _ => {
                if kappa <= 0.5 {
                    return fail(format!("requires kappa > 1/2, got {kappa}"));
                }
                let (bound, label) = match self {
                    Self::L2Linf => (3.0 * kappa, "3 kappa"),
                    Self::L4Linf => (0.25, "1/4"),
                    _ => (0.5, "1/2"),
                };
                if s <= bound {
                    return fail(format!("requires s > {label}, got s = {s}"));
                }
            }
        }
        Ok(())
    }
}

/// Spectral envelope of the random samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Flat,
    Gaussian { width: f64 },
    Exponential { rho0: f64 },
}

impl Envelope {
    pub fn eval(&self, zeta: f64) -> f64 {
        match *self {
            Self::Flat => 1.0,
            Self::Gaussian { width } => (-0.5 * (zeta / width).powi(2)).exp(),
            Self::Exponential { rho0 } => (-rho0 * zeta.abs()).exp(),
        }
    }
}

/// Everything needed to regenerate one random sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    /// Largest `|ζ|` carrying energy.
    pub bandwidth: f64,
    /// Largest `|η - ζ³|` carrying energy.
    pub modulation_band: f64,
    pub envelope: Envelope,
    /// Scale `T` of the cutoff `ψ_T` applied in time.
    pub support: f64,
}

/// Uniform time grid `t0 + mΔt`, `m = 0..num_times`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLayout {
    pub t0: f64,
    pub dt: f64,
    pub num_times: usize,
}

impl TimeLayout {
    /// The window `[-2w, 2w)` at step `tau`; `4w/tau` must be an integer.
    pub fn symmetric(w: f64, tau: f64) -> Result<Self> {
        if !(w > 0.0 && tau > 0.0 && w.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "window and step must be positive, got {w} and {tau}"
            )));
        }
        let m = (4.0 * w / tau).round();
        if (m * tau - 4.0 * w).abs() > 1e-9 * w || m < 8.0 {
            return Err(Error::InvalidArgument(format!(
                "window 4*{w} is not a multiple of {tau} with at least 8 steps"
            )));
        }
        Ok(Self {
            t0: -2.0 * w,
            dt: tau,
            num_times: m as usize,
        })
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_times).map(|m| self.t0 + m as f64 * self.dt)
    }

    /// Largest `|η|` resolved by the layout.
    pub fn max_frequency(&self) -> f64 {
        PI / self.dt
    }
}

/// Grid, sampling and ensemble settings shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub half_length: f64,
    pub num_points: usize,
    pub time_step: f64,
    pub bandwidth: f64,
    pub modulation_band: f64,
    pub envelope: Envelope,
    pub ensemble_size: usize,
    pub master_seed: u64,
    /// Sup norm of the random initial data used by the a-priori check.
    pub amplitude: f64,
    pub solver_dt: f64,
    pub solver_stride: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            half_length: 2.0 * PI,
            num_points: 64,
            time_step: 1.0 / 64.0,
            bandwidth: 3.0,
            modulation_band: 8.0,
            envelope: Envelope::Exponential { rho0: 0.5 },
            ensemble_size: 200,
            master_seed: 0,
            amplitude: 0.5,
            solver_dt: 1.0 / 256.0,
            solver_stride: 4,
        }
    }
}

impl LabConfig {
    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.half_length, self.num_points)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if !(self.bandwidth > 0.0 && self.bandwidth < 2.0 / 3.0 * grid.max_wavenumber()) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must lie in (0, {}), got {}",
                2.0 / 3.0 * grid.max_wavenumber(),
                self.bandwidth
            )));
        }
        if !(self.modulation_band > 0.0) {
            return Err(Error::InvalidArgument("modulation band must be positive".into()));
        }
        let top = self.bandwidth.powi(3) + self.modulation_band;
        if top >= PI / self.time_step {
            return Err(Error::InvalidArgument(format!(
                "time step {} does not resolve frequencies up to {top}",
                self.time_step
            )));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidArgument("ensemble size must be >= 1".into()));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::InvalidArgument("amplitude must be >= 0".into()));
        }
        if !(self.solver_dt > 0.0) || self.solver_stride == 0 {
            return Err(Error::InvalidArgument("solver step and stride must be positive".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.ensemble_size as u64)
            .map(|i| self.master_seed.wrapping_add(i))
            .collect()
    }

    pub fn sample_spec(&self, seed: u64, support: f64) -> SampleSpec {
        SampleSpec {
            seed,
            bandwidth: self.bandwidth,
            modulation_band: self.modulation_band,
            envelope: self.envelope,
            support,
        }
    }

    pub fn layout(&self, w: f64) -> Result<TimeLayout> {
        TimeLayout::symmetric(w, self.time_step)
    }
}

/// Parameters a report was measured at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabParams {
    pub rho: f64,
    pub s: f64,
    pub b: f64,
    pub b_prime: Option<f64>,
    pub p: Option<u32>,
    pub t: f64,
    pub kappa: Option<f64>,
}

impl LabParams {
    fn of(params: &NormParams, t: f64) -> Self {
        Self {
            rho: params.rho,
            s: params.s,
            b: params.b,
            b_prime: None,
            p: None,
            t,
            kappa: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: EstimateId,
    pub ensemble_size: usize,
    pub params: LabParams,
    /// Largest observed LHS/RHS; infinite if any ratio was not finite.
    pub max_ratio: f64,
    pub argmax_seed: u64,
    pub violation: bool,
}

/// `num / den`, with `0/0 = 0`.
pub fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::ZeroDenominator { numerator: num });
    }
    Ok(num / den)
}

fn run_ensemble(
    lab: &LabConfig,
    estimate: EstimateId,
    params: LabParams,
    eval: impl Fn(u64) -> Result<f64> + Sync,
) -> Result<EstimateReport> {
    lab.validate()?;
    let seeds = lab.seeds();
    let ratios = seeds
        .par_iter()
        .map(|&s| eval(s))
        .collect::<Result<Vec<f64>>>()?;
    Ok(fold_report(estimate, params, &seeds, &ratios))
}

fn fold_report(estimate: EstimateId, params: LabParams, seeds: &[u64], ratios: &[f64]) -> EstimateReport {
    let mut max_ratio = 0.0;
    let mut argmax_seed = seeds[0];
    let mut violation = false;
    for (&seed, &r) in seeds.iter().zip(ratios) {
        if !r.is_finite() {
            if !violation {
                argmax_seed = seed;
            }
            violation = true;
            max_ratio = f64::INFINITY;
        } else if !violation && r > max_ratio {
            max_ratio = r;
            argmax_seed = seed;
        }
    }
    EstimateReport {
        estimate,
        ensemble_size: seeds.len(),
        params,
        max_ratio,
        argmax_seed,
        violation,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random real function of `x` with energy on `|ζ| <= bandwidth`. Factors
/// drawn for one seed use distinct `stream`s.
pub fn random_field(grid: &SpectralGrid, spec: &SampleSpec, stream: u64) -> Field {
    let mut rng = rng_for(spec.seed, stream);
    let n = grid.len();
    let ny = grid.nyquist_index();
    let raw: Vec<Complex64> = grid
        .wavenumbers()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if i == ny || z.abs() > spec.bandwidth {
                Complex64::new(0.0, 0.0)
            } else {
                complex_normal(&mut rng) * spec.envelope.eval(z)
            }
        })
        .collect();
    let sym = (0..n)
        .map(|i| 0.5 * (raw[i] + raw[(n - i) % n].conj()))
        .collect();
    inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), sym))
}

/// Random space-time spectrum supported on `|ζ| <= bandwidth`,
/// `|η - ζ³| <= modulation_band`, Hermitian so that it synthesizes a real
/// function.
pub fn random_spectrum(
    grid: &SpectralGrid,
    layout: &TimeLayout,
    spec: &SampleSpec,
    stream: u64,
) -> Result<SpaceTimeSpectrum> {
    let mut out = SpaceTimeSpectrum::zeros(grid, layout.t0, layout.dt, layout.num_times)?;
    let mut rng = rng_for(spec.seed, stream);
    let n = grid.len();
    let m = layout.num_times;
    let etas = out.etas();
    let zetas = grid.wavenumbers();
    let mut raw = vec![Complex64::new(0.0, 0.0); n * m];
    for (l, &eta) in etas.iter().enumerate() {
        if m.is_multiple_of(2) && l == m / 2 {
            continue;
        }
        for (k, &z) in zetas.iter().enumerate() {
            if k == grid.nyquist_index() || z.abs() > spec.bandwidth {
                continue;
            }
            if (eta - z * z * z).abs() > spec.modulation_band {
                continue;
            }
            raw[l * n + k] = complex_normal(&mut rng) * spec.envelope.eval(z);
        }
    }
    let c = out.coeffs_mut();
    for l in 0..m {
        for k in 0..n {
            let mirror = ((m - l) % m) * n + (n - k) % n;
            c[l * n + k] = 0.5 * (raw[l * n + k] + raw[mirror].conj());
        }
    }
    Ok(out)
}

fn real_part(w: &SpaceTimeSample) -> Result<SpaceTimeSample> {
    SpaceTimeSample::new(
        w.grid().clone(),
        w.t0(),
        w.dt(),
        w.num_times(),
        w.values().iter().map(|c| Complex64::new(c.re, 0.0)).collect(),
    )
}

/// Real random space-time function multiplied by `ψ_{support}`.
pub fn random_sample(
    grid: &SpectralGrid,
    layout: &TimeLayout,
    spec: &SampleSpec,
    stream: u64,
) -> Result<SpaceTimeSample> {
    let f = random_spectrum(grid, layout, spec, stream)?;
    let w = real_part(&inverse_space_time_transform(&f))?;
    Ok(w.windowed(&CutoffProfile::new(spec.support)?))
}

/// `W(t)u₀` sampled on `layout`.
pub fn free_evolution_sample(u0: &Field, layout: &TimeLayout) -> Result<SpaceTimeSample> {
    let spec = forward_unchecked(u0);
    let mut values = Vec::with_capacity(layout.num_times * u0.grid().len());
    for t in layout.times() {
        let row = inverse_complex(&propagate_spectral(&spec, t));
        values.extend(row.into_iter().map(|c| Complex64::new(c.re, 0.0)));
    }
    SpaceTimeSample::new(u0.grid().clone(), layout.t0, layout.dt, layout.num_times, values)
}

fn require_b(params: &NormParams) -> Result<()> {
    if params.b <= 0.5 {
        return Err(Error::ThresholdViolation(format!(
            "requires b > 1/2, got {}",
            params.b
        )));
    }
    Ok(())
}

/// `‖ψ_T W(t)u₀‖_{X_{ρ,s,b}} / (T^{1/2} ‖u₀‖_{G_{ρ,s}})`.
pub fn linear_free_ratio(u0: &Field, params: &NormParams, t: f64, tau: f64) -> Result<f64> {
    let layout = TimeLayout::symmetric(t, tau)?;
    let w = free_evolution_sample(u0, &layout)?;
    let num = bourgain_norm(&w, params, &CutoffProfile::new(t)?)?;
    let den = t.sqrt() * gevrey_norm_spectral(&forward_unchecked(u0), params.rho, params.s)?;
    ratio(num, den)
}

pub fn check_linear_free(lab: &LabConfig, params: &NormParams, t: f64) -> Result<EstimateReport> {
    require_b(params)?;
    let grid = lab.grid()?;
    run_ensemble(lab, EstimateId::LinearFree, LabParams::of(params, t), |seed| {
        let u0 = random_field(&grid, &lab.sample_spec(seed, t), 0);
        linear_free_ratio(&u0, params, t, lab.time_step)
    })
}

/// `‖ψ_T w‖ / ‖w‖` in `X_{ρ,s,b}`; `w` must vanish at the window ends.
pub fn time_cutoff_ratio(w: &SpaceTimeSample, params: &NormParams, t: f64) -> Result<f64> {
    let num = bourgain_norm(w, params, &CutoffProfile::new(t)?)?;
    let den = bourgain_norm_unwindowed(w, params)?;
    ratio(num, den)
}

/// Samples are supported in `|t| <= 2·support`; the cutoff acts at scale `t`.
pub fn check_time_cutoff(
    lab: &LabConfig,
    params: &NormParams,
    t: f64,
    support: f64,
) -> Result<EstimateReport> {
    let grid = lab.grid()?;
    let layout = lab.layout(t.max(support))?;
    run_ensemble(lab, EstimateId::TimeCutoff, LabParams::of(params, t), |seed| {
        let w = random_sample(&grid, &layout, &lab.sample_spec(seed, support), 0)?;
        time_cutoff_ratio(&w, params, t)
    })
}

/// `∫₀ᵗ W(t-s) w(s) ds` at every time of the layout.
///
/// In the interaction picture the integrand `e^{-iζ³s} ŵ(ζ, s)` is smooth
/// and vanishes at the window ends, so it is integrated exactly through its
/// trigonometric interpolant.
pub fn duhamel_integral(w: &SpaceTimeSample) -> Result<SpaceTimeSample> {
    let grid = w.grid();
    let n = grid.len();
    let m = w.num_times();
    let t0 = w.t0();
    let dt = w.dt();
    let ny = grid.nyquist_index();
    let cubes: Vec<f64> = grid
        .wavenumbers()
        .iter()
        .enumerate()
        .map(|(i, &z)| if i == ny { 0.0 } else { z * z * z })
        .collect();
    let mut hat = vec![Complex64::new(0.0, 0.0); n * m];
    for j in 0..m {
        let spec = forward_complex(grid, w.row(j));
        hat[j * n..(j + 1) * n].copy_from_slice(spec.coeffs());
    }
    let deta = 2.0 * PI / (m as f64 * dt);
    let times: Vec<f64> = (0..m).map(|j| t0 + j as f64 * dt).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * m];
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        for j in 0..m {
            col[j] = hat[j * n + k] * Complex64::from_polar(1.0, -cubes[k] * times[j]);
        }
        fft_forward(&mut col);
        let mean = col[0] / m as f64;
        // Coefficients of the periodic part of the antiderivative.
        let mut anti: Vec<Complex64> = col
            .iter()
            .enumerate()
            .map(|(l, c)| {
                let li = signed_index(l, m);
                if li == 0 || (m.is_multiple_of(2) && l == m / 2) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c / (m as f64 * Complex64::new(0.0, li as f64 * deta))
                }
            })
            .collect();
        let at_zero: Complex64 = anti
            .iter()
            .enumerate()
            .map(|(l, c)| c * Complex64::from_polar(1.0, signed_index(l, m) as f64 * deta * -t0))
            .sum();
        fft_inverse(&mut anti);
        for j in 0..m {
            let integral = mean * times[j] + anti[j] - at_zero;
            out[j * n + k] = integral * Complex64::from_polar(1.0, cubes[k] * times[j]);
        }
    }
    let mut values = Vec::with_capacity(n * m);
    for j in 0..m {
        let row = SpectralField::from_parts_unchecked(grid.clone(), out[j * n..(j + 1) * n].to_vec());
        values.extend(inverse_complex(&row));
    }
    SpaceTimeSample::new(grid.clone(), t0, dt, m, values)
}

/// `‖ψ_T ∫₀ᵗ W(t-s)w(s)ds‖_{X_{ρ,s,b}} / (T ‖w‖_{X_{ρ,s,b'}})`.
pub fn duhamel_ratio(w: &SpaceTimeSample, params: &NormParams, b_prime: f64, t: f64) -> Result<f64> {
    let lhs = bourgain_norm(&duhamel_integral(w)?, params, &CutoffProfile::new(t)?)?;
    let rhs = t * bourgain_norm_unwindowed(w, &params.with_b(b_prime))?;
    ratio(lhs, rhs)
}

pub fn check_duhamel(
    lab: &LabConfig,
    params: &NormParams,
    b_prime: f64,
    t: f64,
) -> Result<EstimateReport> {
    require_b(params)?;
    if !(params.b - 1.0 < b_prime && b_prime < 0.0) {
        return Err(Error::ThresholdViolation(format!(
            "requires b - 1 < b' < 0, got b = {}, b' = {b_prime}",
            params.b
        )));
    }
    let grid = lab.grid()?;
    let layout = lab.layout(t)?;
    let mut lp = LabParams::of(params, t);
    lp.b_prime = Some(b_prime);
    run_ensemble(lab, EstimateId::Duhamel, lp, |seed| {
        let w = random_sample(&grid, &layout, &lab.sample_spec(seed, t), 0)?;
        duhamel_ratio(&w, params, b_prime, t)
    })
}

/// Mixed norm of `A^a F_κ` over `‖f‖_{L²_{ζ,η}}`.
pub fn strichartz_ratio(
    f: &SpaceTimeSpectrum,
    variant: StrichartzVariant,
    kappa: f64,
    s: f64,
) -> Result<f64> {
    variant.check_thresholds(kappa, s)?;
    let a = variant.a_power(s);
    let g = f.apply_multiplier(|z, e| (1.0 + z.abs()).powf(a) * fkappa_symbol(z, e, kappa));
    let (p, q) = variant.exponents();
    let num = mixed_norm(&inverse_space_time_transform(&g), p, q)?;
    ratio(num, f.l2_norm())
}

pub fn check_strichartz(
    lab: &LabConfig,
    variant: StrichartzVariant,
    kappa: f64,
    s: f64,
    t: f64,
) -> Result<EstimateReport> {
    variant.check_thresholds(kappa, s)?;
    let grid = lab.grid()?;
    let layout = lab.layout(t)?;
    let params = LabParams {
        rho: 0.0,
        s,
        b: 0.0,
        b_prime: None,
        p: None,
        t,
        kappa: Some(kappa),
    };
    run_ensemble(lab, variant.id(), params, |seed| {
        let f = random_spectrum(&grid, &layout, &lab.sample_spec(seed, t), 0)?;
        strichartz_ratio(&f, variant, kappa, s)
    })
}

/// Pointwise product in time, dealiased in space.
fn product(factors: &[&SpaceTimeSample]) -> Result<SpaceTimeSample> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("no factors".into()))?;
    if factors.iter().any(|f| !f.same_layout(first)) {
        return Err(Error::GridMismatch);
    }
    let ratio = ((factors.len() + 1) as f64 / 2.0).max(1.5);
    let mut values = Vec::with_capacity(first.values().len());
    for j in 0..first.num_times() {
        let rows: Vec<&[Complex64]> = factors.iter().map(|f| f.row(j)).collect();
        values.extend(dealiased_product_complex(first.grid(), &rows, ratio)?);
    }
    SpaceTimeSample::new(first.grid().clone(), first.t0(), first.dt(), first.num_times(), values)
}

fn spatial_derivative(w: &SpaceTimeSample) -> Result<SpaceTimeSample> {
    let grid = w.grid();
    let ny = grid.nyquist_index();
    let mut values = Vec::with_capacity(w.values().len());
    for j in 0..w.num_times() {
        let mut spec = forward_complex(grid, w.row(j));
        for (i, (c, &z)) in spec.coeffs_mut().iter_mut().zip(grid.wavenumbers()).enumerate() {
            *c *= if i == ny { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, z) };
        }
        values.extend(inverse_complex(&spec));
    }
    SpaceTimeSample::new(grid.clone(), w.t0(), w.dt(), w.num_times(), values)
}

/// `‖∂x ∏ factors‖_{X_{ρ,s,b'}} / ∏ ‖factor‖_{X_{ρ,s,b}}`. Factors must
/// already vanish at the window ends.
pub fn multilinear_ratio(
    factors: &[&SpaceTimeSample],
    params: &NormParams,
    b_prime: f64,
) -> Result<f64> {
    let prod = spatial_derivative(&product(factors)?)?;
    let lhs = bourgain_norm_unwindowed(&prod, &params.with_b(b_prime))?;
    let mut rhs = 1.0;
    for f in factors {
        rhs *= bourgain_norm_unwindowed(f, params)?;
    }
    ratio(lhs, rhs)
}

/// `estimate` selects which of the two components carries the extra power.
pub fn check_multilinear(
    lab: &LabConfig,
    p: u32,
    estimate: EstimateId,
    params: &NormParams,
    b_prime: f64,
    t: f64,
) -> Result<EstimateReport> {
    require_b(params)?;
    if !(-1.0..-0.25).contains(&b_prime) {
        return Err(Error::ThresholdViolation(format!(
            "requires -1 <= b' < -1/4, got {b_prime}"
        )));
    }
    let (nu, nv) = match estimate {
        EstimateId::MultilinearU => (p, p + 1),
        EstimateId::MultilinearV => (p + 1, p),
        other => {
            return Err(Error::InvalidArgument(format!("{other} is not a multilinear estimate")))
        }
    };
    if p < 1 {
        return Err(Error::InvalidArgument("p must be >= 1".into()));
    }
    let count = (nu + nv) as f64;
    let top = count * (lab.bandwidth.powi(3) + lab.modulation_band);
    if top >= PI / lab.time_step {
        return Err(Error::InvalidArgument(format!(
            "time step {} cannot resolve the product up to frequency {top}",
            lab.time_step
        )));
    }
    let grid = lab.grid()?;
    let layout = lab.layout(t)?;
    let mut lp = LabParams::of(params, t);
    lp.b_prime = Some(b_prime);
    lp.p = Some(p);
    run_ensemble(lab, estimate, lp, |seed| {
        let spec = lab.sample_spec(seed, t);
        let samples = (0..(nu + nv) as u64)
            .map(|j| random_sample(&grid, &layout, &spec, j))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&SpaceTimeSample> = samples.iter().collect();
        multilinear_ratio(&refs, params, b_prime)
    })
}

/// `sup_t ‖u(t)‖_{G_{ρ,s}} / ‖u‖_{X_{ρ,s,b}}`.
pub fn embedding_ratio(w: &SpaceTimeSample, params: &NormParams) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for j in 0..w.num_times() {
        let spec = forward_complex(w.grid(), w.row(j));
        sup = sup.max(gevrey_norm_spectral(&spec, params.rho, params.s)?);
    }
    ratio(sup, bourgain_norm_unwindowed(w, params)?)
}

pub fn check_embedding(lab: &LabConfig, params: &NormParams, t: f64) -> Result<EstimateReport> {
    require_b(params)?;
    let grid = lab.grid()?;
    let layout = lab.layout(t)?;
    run_ensemble(lab, EstimateId::Embedding, LabParams::of(params, t), |seed| {
        let w = random_sample(&grid, &layout, &lab.sample_spec(seed, t), 0)?;
        embedding_ratio(&w, params)
    })
}

/// Outcome of the scalar exponential inequalities on a parameter grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentialLemmaTable {
    pub bound_checked: usize,
    /// `(ρ, ζ)` where `e^{ρ(1+|ζ|)} <= e + ρ^{1/2} e^{ρ(1+|ζ|)} (1+|ζ|)^{1/2}` failed.
    pub bound_failures: Vec<(f64, f64)>,
    pub split_checked: usize,
    /// `(ρ, ζ, ζ₁, ζ₂)` where the three-factor splitting failed.
    pub split_failures: Vec<(f64, f64, f64, f64)>,
}

impl ExponentialLemmaTable {
    pub fn passed(&self) -> bool {
        self.bound_failures.is_empty() && self.split_failures.is_empty()
    }
}

pub fn exponential_bound_holds(rho: f64, zeta: f64) -> bool {
    let a = 1.0 + zeta.abs();
    let lhs = (rho * a).exp();
    lhs <= std::f64::consts::E + rho.sqrt() * lhs * a.sqrt()
}

/// `e^{ρ(1+|ζ|)} <= e^{ρ(1+|ζ₁|)} e^{ρ(1+|ζ-ζ₂|)} e^{ρ(1+|ζ₂-ζ₁|)}`,
/// compared through the exponents so large arguments do not overflow.
pub fn exponential_split_holds(rho: f64, zeta: f64, z1: f64, z2: f64) -> bool {
    let e = |v: f64| rho * (1.0 + v.abs());
    e(zeta) <= e(z1) + e(zeta - z2) + e(z2 - z1)
}

/// Parameter grids for [`check_exponential_lemmas`]. The splitting is
/// checked on `split_zetas³`, so that grid has to stay coarse.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaGrid {
    pub rhos: Vec<f64>,
    pub bound_zetas: Vec<f64>,
    pub split_zetas: Vec<f64>,
}

/// Checks the bound on `rhos × bound_zetas` and the splitting on
/// `rhos × split_zetas³`.
pub fn check_exponential_lemmas(grid: &LemmaGrid) -> ExponentialLemmaTable {
    let LemmaGrid { rhos, bound_zetas: zetas, split_zetas } = grid;
    let bound_failures: Vec<(f64, f64)> = rhos
        .par_iter()
        .flat_map_iter(|&r| {
            zetas
                .iter()
                .filter(move |&&z| !exponential_bound_holds(r, z))
                .map(move |&z| (r, z))
        })
        .collect();
    let split_failures: Vec<(f64, f64, f64, f64)> = rhos
        .par_iter()
        .flat_map_iter(|&r| {
            let mut bad = Vec::new();
            for &z in split_zetas {
                for &z1 in split_zetas {
                    for &z2 in split_zetas {
                        if !exponential_split_holds(r, z, z1, z2) {
                            bad.push((r, z, z1, z2));
                        }
                    }
                }
            }
            bad
        })
        .collect();
    ExponentialLemmaTable {
        bound_checked: rhos.len() * zetas.len(),
        bound_failures,
        split_checked: rhos.len() * split_zetas.len().pow(3),
        split_failures,
    }
}

/// `ρ ∈ [0, 2]` and `ζ ∈ [-100, 100]`. The bound grid is fine enough to
/// cross the `ρ(1+|ζ|) = 1` transition many times; the splitting grid uses
/// step 2.5 (81³ triples per `ρ`).
pub fn default_lemma_grid() -> LemmaGrid {
    LemmaGrid {
        rhos: (0..=80).map(|i| i as f64 * 0.025).collect(),
        bound_zetas: (-10_000..=10_000).map(|i| i as f64 * 0.01).collect(),
        split_zetas: (-40..=40).map(|i| i as f64 * 2.5).collect(),
    }
}

fn pair_norm(u: &SpectralField, v: &SpectralField, rho: f64, s: f64) -> Result<f64> {
    Ok(gevrey_norm_spectral(u, rho, s)?.hypot(gevrey_norm_spectral(v, rho, s)?))
}

/// `‖(ψ_T u, ψ_T v)‖_{X_{ρ,s,b}} / (T^{1/2} (1 + λ)^{2p+1})` with
/// `λ = sup_t ‖(u, v)‖_{G_{ρ,s+1}}` over the recorded states in
/// `[-2T, 2T]`. `ρ = 0` gives the Sobolev form.
pub fn apriori_ratio(traj: &TrajectoryRecord, params: &NormParams, t: f64) -> Result<f64> {
    let states = &traj.states;
    if states.len() < 2 {
        return Err(Error::InsufficientData("trajectory has no stored states".into()));
    }
    let spacing = states[1].t - states[0].t;
    let tol = 1e-9 * (1.0 + t);
    if states[0].t > -2.0 * t + tol || states[states.len() - 1].t < 2.0 * t - tol {
        return Err(Error::InsufficientData(format!(
            "states cover [{}, {}], need [{}, {}]",
            states[0].t,
            states[states.len() - 1].t,
            -2.0 * t,
            2.0 * t
        )));
    }
    if states
        .windows(2)
        .any(|w| ((w[1].t - w[0].t) - spacing).abs() > 1e-6 * spacing)
    {
        return Err(Error::InsufficientData("states are not uniformly spaced".into()));
    }
    let window: Vec<&CoupledState> = states
        .iter()
        .filter(|s| s.t >= -2.0 * t - tol && s.t < 2.0 * t - tol)
        .collect();
    let mut lambda: f64 = 0.0;
    for s in states.iter().filter(|s| s.t.abs() <= 2.0 * t + tol) {
        let uh = forward_unchecked(&s.u);
        let vh = forward_unchecked(&s.v);
        lambda = lambda.max(pair_norm(&uh, &vh, params.rho, params.s + 1.0)?);
    }
    let t0 = window[0].t;
    let us: Vec<Field> = window.iter().map(|s| s.u.clone()).collect();
    let vs: Vec<Field> = window.iter().map(|s| s.v.clone()).collect();
    let cutoff = CutoffProfile::new(t)?;
    let nu = bourgain_norm(&SpaceTimeSample::from_fields(t0, spacing, &us)?, params, &cutoff)?;
    let nv = bourgain_norm(&SpaceTimeSample::from_fields(t0, spacing, &vs)?, params, &cutoff)?;
    let rhs = t.sqrt() * (1.0 + lambda).powi(2 * traj.p as i32 + 1);
    ratio(nu.hypot(nv), rhs)
}

fn apriori_id(params: &NormParams) -> EstimateId {
    if params.rho == 0.0 {
        EstimateId::Apriori
    } else {
        EstimateId::AprioriGevrey
    }
}

/// Single-trajectory report; the seed is taken from the trajectory's
/// provenance.
pub fn check_apriori(traj: &TrajectoryRecord, params: &NormParams, t: f64) -> Result<EstimateReport> {
    let r = apriori_ratio(traj, params, t)?;
    let mut lp = LabParams::of(params, t);
    lp.p = Some(traj.p);
    Ok(fold_report(apriori_id(params), lp, &[traj.info.seed], &[r]))
}

/// Random initial pair with sup norm `lab.amplitude`.
pub fn random_initial_state(lab: &LabConfig, seed: u64) -> Result<CoupledState> {
    let grid = lab.grid()?;
    let spec = lab.sample_spec(seed, 1.0);
    let scale = |f: Field| -> Result<Field> {
        let m = f.max_abs();
        let a = if m > 0.0 { lab.amplitude / m } else { 0.0 };
        Field::new(grid.clone(), f.samples().iter().map(|v| v * a).collect())
    };
    CoupledState::new(
        0.0,
        scale(random_field(&grid, &spec, 0))?,
        scale(random_field(&grid, &spec, 1))?,
    )
}

/// Trajectory on `[-2T, 2T]` through random data, keeping every state.
pub fn apriori_trajectory(lab: &LabConfig, p: u32, seed: u64, t: f64) -> Result<TrajectoryRecord> {
    let initial = random_initial_state(lab, seed)?;
    let mut cfg = SolverConfig {
        p,
        dt: lab.solver_dt,
        t_end: 2.0 * t,
        record_stride: lab.solver_stride,
        padding_ratio: (p + 1) as f64,
        ..SolverConfig::default()
    };
    cfg.diagnostics.keep_states = true;
    let mut traj = simulate_symmetric(&initial, &cfg)?;
    if let Termination::BlowUp { t } = traj.termination {
        return Err(Error::NonFiniteState { t });
    }
    traj.info.seed = seed;
    Ok(traj)
}

pub fn check_apriori_ensemble(
    lab: &LabConfig,
    p: u32,
    params: &NormParams,
    t: f64,
) -> Result<EstimateReport> {
    let mut lp = LabParams::of(params, t);
    lp.p = Some(p);
    run_ensemble(lab, apriori_id(params), lp, |seed| {
        apriori_ratio(&apriori_trajectory(lab, p, seed, t)?, params, t)
    })
}
