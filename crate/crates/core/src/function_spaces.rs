//! Discrete analytic (Gevrey) norms, Bourgain space-time norms, mixed
//! Lebesgue norms and the diagonal Fourier multipliers `A`, `Λ`, `F_κ`.
//!
//! Space-time data live on a spatial [`SpectralGrid`] times a uniform time
//! grid `t_m = t0 + m Δt`, `m = 0..M`. The time transform treats the window
//! `[t0, t0 + MΔt)` periodically; callers are expected to hand over data
//! that vanish at both ends (usually by multiplying with the cutoff `ψ_T`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    fft_forward, fft_inverse, forward_complex, forward_unchecked, inverse_complex, signed_index,
    Field, SpectralField, SpectralGrid,
};

/// Exponents above this overflow `f64` once squared.
const MAX_EXPONENT: f64 = 350.0;

/// Analyticity radius `rho`, Sobolev index `s` and modulation index `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub rho: f64,
    pub s: f64,
    pub b: f64,
}

impl NormParams {
    pub fn new(rho: f64, s: f64, b: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::InvalidArgument(format!("rho must be finite and >= 0, got {rho}")));
        }
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("s must be finite, got {s}")));
        }
        if !(-1.0..=1.0).contains(&b) {
            return Err(Error::InvalidArgument(format!("b must lie in [-1, 1], got {b}")));
        }
        Ok(Self { rho, s, b })
    }

    pub fn sobolev(s: f64) -> Self {
        Self { rho: 0.0, s, b: 0.0 }
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }
}

/// `e^{ρ(1+|ζ|)} (1+|ζ|)^s`, or an overflow error carrying `ζ`.
pub fn gevrey_weight(zeta: f64, rho: f64, s: f64) -> Result<f64> {
    let a = 1.0 + zeta.abs();
    let exponent = rho * a + s * a.ln();
    if exponent > MAX_EXPONENT {
        return Err(Error::Overflow { zeta });
    }
    Ok(exponent.exp())
}

/// Norm of the weighted spectrum of an already transformed field.
pub fn gevrey_norm_spectral(spec: &SpectralField, rho: f64, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (c, &k) in spec.coeffs().iter().zip(spec.grid().wavenumbers()) {
        let n2 = c.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        let w = gevrey_weight(k, rho, s)?;
        acc += w * w * n2;
    }
    Ok((acc * spec.grid().dk()).sqrt())
}

/// `‖e^{ρ(1+|ζ|)}(1+|ζ|)^s f̂‖_{L²_ζ}`; `params.b` is ignored.
pub fn gevrey_norm(f: &Field, params: &NormParams) -> Result<f64> {
    gevrey_norm_spectral(&forward_unchecked(f), params.rho, params.s)
}

pub fn sobolev_norm(f: &Field, s: f64) -> Result<f64> {
    gevrey_norm_spectral(&forward_unchecked(f), 0.0, s)
}

/// The time cutoff `ψ_T(t) = ψ(t/T)` with the concrete bump
/// `ψ = 1` on `[-1, 1]`, `exp(1 - 1/(1 - (|t|-1)²))` on `1 < |t| < 2`, `0` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    scale: f64,
}

impl CutoffProfile {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("cutoff scale must be positive, got {scale}")));
        }
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn bump(t: f64) -> f64 {
        let a = t.abs();
        if a <= 1.0 {
            1.0
        } else if a >= 2.0 {
            0.0
        } else {
            let r = a - 1.0;
            (1.0 - 1.0 / (1.0 - r * r)).exp()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        Self::bump(t / self.scale)
    }
}

/// Complex samples of `u(x, t)` on a space-time grid, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSample {
    grid: SpectralGrid,
    t0: f64,
    dt: f64,
    num_times: usize,
    values: Vec<Complex64>,
}

fn check_time_grid(dt: f64, num_times: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time spacing must be positive, got {dt}")));
    }
    if num_times < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 time instants, got {num_times}"
        )));
    }
    Ok(())
}

impl SpaceTimeSample {
    pub fn new(
        grid: SpectralGrid,
        t0: f64,
        dt: f64,
        num_times: usize,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        check_time_grid(dt, num_times)?;
        if values.len() != num_times * grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                num_times * grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            grid,
            t0,
            dt,
            num_times,
            values,
        })
    }

    pub fn zeros(grid: &SpectralGrid, t0: f64, dt: f64, num_times: usize) -> Result<Self> {
        check_time_grid(dt, num_times)?;
        Ok(Self {
            grid: grid.clone(),
            t0,
            dt,
            num_times,
            values: vec![Complex64::new(0.0, 0.0); num_times * grid.len()],
        })
    }

    /// One real field per time instant.
    pub fn from_fields(t0: f64, dt: f64, fields: &[Field]) -> Result<Self> {
        let grid = fields
            .first()
            .ok_or_else(|| Error::InvalidArgument("no fields".into()))?
            .grid()
            .clone();
        if fields.iter().any(|f| f.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        let values = fields
            .iter()
            .flat_map(|f| f.samples().iter().map(|&v| Complex64::new(v, 0.0)))
            .collect();
        Self::new(grid, t0, dt, fields.len(), values)
    }

    pub fn from_fn(
        grid: &SpectralGrid,
        t0: f64,
        dt: f64,
        num_times: usize,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let xs = grid.points();
        let values = (0..num_times)
            .flat_map(|m| {
                let t = t0 + m as f64 * dt;
                xs.iter().map(move |&x| (x, t)).collect::<Vec<_>>()
            })
            .map(|(x, t)| f(x, t))
            .collect();
        Self::new(grid.clone(), t0, dt, num_times, values)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn num_times(&self) -> usize {
        self.num_times
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.num_times)
            .map(|m| self.t0 + m as f64 * self.dt)
            .collect()
    }

    /// Length `MΔt` of the periodic time window used by the transform.
    pub fn window_length(&self) -> f64 {
        self.num_times as f64 * self.dt
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn row_mut(&mut self, m: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.values[m * n..(m + 1) * n]
    }

    /// Real part of one time slice.
    pub fn field_at(&self, m: usize) -> Field {
        Field::from_parts_unchecked(self.grid.clone(), self.row(m).iter().map(|c| c.re).collect())
    }

    /// Multiplies every time slice by `g(t)`.
    pub fn scaled_in_time(&self, g: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for m in 0..self.num_times {
            let w = g(self.t0 + m as f64 * self.dt);
            for v in out.row_mut(m) {
                *v *= w;
            }
        }
        out
    }

    pub fn windowed(&self, cutoff: &CutoffProfile) -> Self {
        self.scaled_in_time(|t| cutoff.eval(t))
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= a;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest magnitude on the first and last time slice.
    pub fn edge_magnitude(&self) -> f64 {
        self.row(0)
            .iter()
            .chain(self.row(self.num_times - 1))
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.num_times == other.num_times
            && self.t0 == other.t0
            && self.dt == other.dt
    }
}

/// Two-variable transform `û(ζ, η)` on the `(ζ_k, η_l)` grid, stored with
/// the `η` index major. Both indices are in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSpectrum {
    grid: SpectralGrid,
    t0: f64,
    dt: f64,
    num_times: usize,
    coeffs: Vec<Complex64>,
}

impl SpaceTimeSpectrum {
    pub fn zeros(grid: &SpectralGrid, t0: f64, dt: f64, num_times: usize) -> Result<Self> {
        check_time_grid(dt, num_times)?;
        Ok(Self {
            grid: grid.clone(),
            t0,
            dt,
            num_times,
            coeffs: vec![Complex64::new(0.0, 0.0); num_times * grid.len()],
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn num_times(&self) -> usize {
        self.num_times
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Temporal frequency spacing `2π / (MΔt)`.
    pub fn deta(&self) -> f64 {
        2.0 * PI / (self.num_times as f64 * self.dt)
    }

    pub fn etas(&self) -> Vec<f64> {
        let d = self.deta();
        (0..self.num_times)
            .map(|l| signed_index(l, self.num_times) as f64 * d)
            .collect()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn index(&self, zeta_slot: usize, eta_slot: usize) -> usize {
        eta_slot * self.grid.len() + zeta_slot
    }

    /// Plain `L²_{ζ,η}` norm.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.dk() * self.deta()).sqrt()
    }

    /// Multiplies each coefficient by `m(ζ, η)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> f64) -> Self {
        let etas = self.etas();
        let zetas = self.grid.wavenumbers();
        let n = self.grid.len();
        let mut out = self.clone();
        for (l, &eta) in etas.iter().enumerate() {
            for (k, &zeta) in zetas.iter().enumerate() {
                out.coeffs[l * n + k] *= m(zeta, eta);
            }
        }
        out
    }

    /// `(Σ |w(ζ,η) û|² Δζ Δη)^{1/2}`, stopping at the first weight error.
    pub fn weighted_l2(&self, w: impl Fn(f64, f64) -> Result<f64>) -> Result<f64> {
        let etas = self.etas();
        let zetas = self.grid.wavenumbers();
        let n = self.grid.len();
        let mut acc = 0.0;
        for (l, &eta) in etas.iter().enumerate() {
            for (k, &zeta) in zetas.iter().enumerate() {
                let c2 = self.coeffs[l * n + k].norm_sqr();
                if c2 == 0.0 {
                    continue;
                }
                let wv = w(zeta, eta)?;
                acc += wv * wv * c2;
            }
        }
        Ok((acc * self.grid.dk() * self.deta()).sqrt())
    }
}

fn time_phase(t0: f64, eta: f64) -> Complex64 {
    Complex64::from_polar(1.0, -t0 * eta)
}

/// Two-variable transform `(2π)^{-1} ∫∫ u e^{-ixζ} e^{-itη} dx dt`, discretized.
pub fn space_time_transform(w: &SpaceTimeSample) -> SpaceTimeSpectrum {
    let n = w.grid.len();
    let m = w.num_times;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n * m];
    for t in 0..m {
        let spec = forward_complex(&w.grid, w.row(t));
        coeffs[t * n..(t + 1) * n].copy_from_slice(spec.coeffs());
    }
    let mut spectrum = SpaceTimeSpectrum {
        grid: w.grid.clone(),
        t0: w.t0,
        dt: w.dt,
        num_times: m,
        coeffs,
    };
    let etas = spectrum.etas();
    let scale = w.dt / (2.0 * PI).sqrt();
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        for t in 0..m {
            col[t] = spectrum.coeffs[t * n + k];
        }
        fft_forward(&mut col);
        for (l, c) in col.iter().enumerate() {
            spectrum.coeffs[l * n + k] = c * time_phase(w.t0, etas[l]) * scale;
        }
    }
    spectrum
}

/// Inverse of [`space_time_transform`]; the result is complex-valued.
pub fn inverse_space_time_transform(spec: &SpaceTimeSpectrum) -> SpaceTimeSample {
    let n = spec.grid.len();
    let m = spec.num_times;
    let etas = spec.etas();
    let scale = (2.0 * PI).sqrt() / (spec.dt * m as f64);
    let mut values = vec![Complex64::new(0.0, 0.0); n * m];
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        for l in 0..m {
            col[l] = spec.coeffs[l * n + k] * time_phase(spec.t0, etas[l]).conj() * scale;
        }
        fft_inverse(&mut col);
        for t in 0..m {
            values[t * n + k] = col[t];
        }
    }
    for t in 0..m {
        let row = SpectralField::from_parts_unchecked(
            spec.grid.clone(),
            values[t * n..(t + 1) * n].to_vec(),
        );
        values[t * n..(t + 1) * n].copy_from_slice(&inverse_complex(&row));
    }
    SpaceTimeSample {
        grid: spec.grid.clone(),
        t0: spec.t0,
        dt: spec.dt,
        num_times: m,
        values,
    }
}

/// `e^{ρ(1+|ζ|)}(1+|ζ|)^s(1+|η-ζ³|)^b`.
pub fn bourgain_weight(zeta: f64, eta: f64, params: &NormParams) -> Result<f64> {
    let g = gevrey_weight(zeta, params.rho, params.s)?;
    Ok(g * (1.0 + (eta - zeta * zeta * zeta).abs()).powf(params.b))
}

/// Bourgain norm of data that already vanish at both ends of the window.
pub fn bourgain_norm_unwindowed(w: &SpaceTimeSample, params: &NormParams) -> Result<f64> {
    let scale = w.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let edge = w.edge_magnitude();
    if edge > 1e-8 * scale {
        return Err(Error::SupportViolation { edge });
    }
    bourgain_norm_spectral(&space_time_transform(w), params)
}

pub fn bourgain_norm_spectral(spec: &SpaceTimeSpectrum, params: &NormParams) -> Result<f64> {
    spec.weighted_l2(|zeta, eta| bourgain_weight(zeta, eta, params))
}

/// `‖ψ_T w‖_{X_{ρ,s,b}}` over the sample's time window.
pub fn bourgain_norm(
    w: &SpaceTimeSample,
    params: &NormParams,
    cutoff: &CutoffProfile,
) -> Result<f64> {
    bourgain_norm_unwindowed(&w.windowed(cutoff), params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Exponent {
    Two,
    Four,
    Infinity,
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        if v == 2.0 {
            Ok(Self::Two)
        } else if v == 4.0 {
            Ok(Self::Four)
        } else if v == f64::INFINITY {
            Ok(Self::Infinity)
        } else {
            Err(Error::UnsupportedExponent(v))
        }
    }
}

fn lebesgue(values: impl Iterator<Item = f64>, e: Exponent, measure: f64) -> f64 {
    match e {
        Exponent::Two => (values.map(|v| v * v).sum::<f64>() * measure).sqrt(),
        Exponent::Four => (values.map(|v| v.powi(4)).sum::<f64>() * measure).powf(0.25),
        Exponent::Infinity => values.fold(0.0, f64::max),
    }
}

/// `‖u‖_{L^p_x L^q_t}`: inner norm in `t`, outer norm in `x`; exponents in
/// `{2, 4, ∞}`.
pub fn mixed_norm(w: &SpaceTimeSample, p_exp: f64, q_exp: f64) -> Result<f64> {
    let p = Exponent::try_from(p_exp)?;
    let q = Exponent::try_from(q_exp)?;
    let n = w.grid.len();
    let inner: Vec<f64> = (0..n)
        .map(|j| {
            lebesgue(
                (0..w.num_times).map(|m| w.values[m * n + j].norm()),
                q,
                w.dt,
            )
        })
        .collect();
    Ok(lebesgue(inner.into_iter(), p, w.grid.dx()))
}

/// `Â u = (1+|ζ|)^power û`.
pub fn apply_a(w: &SpaceTimeSample, power: f64) -> SpaceTimeSample {
    let spec = space_time_transform(w).apply_multiplier(|z, _| (1.0 + z.abs()).powf(power));
    inverse_space_time_transform(&spec)
}

/// `Λ̂ u = (1+|η|)^power û`.
pub fn apply_lambda(w: &SpaceTimeSample, power: f64) -> SpaceTimeSample {
    let spec = space_time_transform(w).apply_multiplier(|_, e| (1.0 + e.abs()).powf(power));
    inverse_space_time_transform(&spec)
}

/// Multiplier `(1+|η-ζ³|)^{-κ}`.
pub fn fkappa_symbol(zeta: f64, eta: f64, kappa: f64) -> f64 {
    (1.0 + (eta - zeta * zeta * zeta).abs()).powf(-kappa)
}

pub fn apply_fkappa(w: &SpaceTimeSample, kappa: f64) -> SpaceTimeSample {
    let spec = space_time_transform(w).apply_multiplier(|z, e| fkappa_symbol(z, e, kappa));
    inverse_space_time_transform(&spec)
}
