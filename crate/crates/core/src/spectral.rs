//! Periodic Fourier discretization of the real line.
//!
//! The line is replaced by the interval `[-L, L)` sampled at `N` uniform
//! points. Coefficients are scaled so that they approximate the symmetric
//! continuous transform `û(ζ) = (2π)^{-1/2} ∫ u(x) e^{-ixζ} dx`; with this
//! scaling `Σ |û_k|² Δζ = Σ |u_j|² Δx` holds exactly.
//!
//! Coefficient arrays are stored in FFT order: index `k < N/2` carries
//! wavenumber `k π/L`, index `k ≥ N/2` carries `(k - N) π/L`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized forward DFT in place.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Unnormalized inverse DFT in place.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Signed frequency index of FFT slot `i` for a transform of length `n`.
#[inline]
pub(crate) fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// `(-1)^k` for a signed index.
#[inline]
fn alternating(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone)]
pub struct SpectralGrid {
    half_length: f64,
    num_points: usize,
    wavenumbers: Arc<[f64]>,
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.num_points == other.num_points && self.half_length == other.half_length
    }
}

impl SpectralGrid {
    /// Grid on `[-half_length, half_length)` with `num_points` samples.
    /// `num_points` must be even and at least 8.
    pub fn new(half_length: f64, num_points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }
        if num_points < 8 || !num_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and >= 8, got {num_points}"
            )));
        }
        let dk = PI / half_length;
        let wavenumbers = (0..num_points)
            .map(|i| signed_index(i, num_points) as f64 * dk)
            .collect();
        Ok(Self {
            half_length,
            num_points,
            wavenumbers,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.num_points as f64
    }

    /// Wavenumber spacing `π / L`.
    pub fn dk(&self) -> f64 {
        PI / self.half_length
    }

    /// Wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Storage slot of the single unpaired (Nyquist) mode.
    pub fn nyquist_index(&self) -> usize {
        self.num_points / 2
    }

    /// Largest resolved `|ζ|`, i.e. the Nyquist wavenumber `N π / (2L)`.
    pub fn max_wavenumber(&self) -> f64 {
        self.num_points as f64 / 2.0 * self.dk()
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.num_points)
            .map(|j| -self.half_length + j as f64 * dx)
            .collect()
    }

    /// Storage slot holding wavenumber `k π / L`, if it is on the grid.
    pub fn index_of_mode(&self, k: i64) -> Option<usize> {
        let n = self.num_points as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    /// Converts normalized coefficients into the trigonometric amplitudes
    /// `a_k` for which `u(x) = Σ a_k e^{iζ_k (x + L)}`.
    pub(crate) fn coeffs_to_amplitudes(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let scale = (2.0 * PI).sqrt() / (2.0 * self.half_length);
        let n = self.num_points;
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (scale * alternating(signed_index(i, n))))
            .collect()
    }

    pub(crate) fn amplitudes_to_coeffs(&self, amps: &mut [Complex64]) {
        let scale = 2.0 * self.half_length / (2.0 * PI).sqrt();
        let n = self.num_points;
        for (i, a) in amps.iter_mut().enumerate() {
            *a *= scale * alternating(signed_index(i, n));
        }
    }
}

/// A real function sampled on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    samples: Vec<f64>,
}

impl Field {
    pub fn new(grid: SpectralGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, samples })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.points().into_iter().map(f).collect();
        Self::new(grid.clone(), samples)
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            grid: grid.clone(),
            samples: vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: SpectralGrid, samples: Vec<f64>) -> Self {
        Self { grid, samples }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `L²` norm `(Σ u_j² Δx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }
}

/// Fourier coefficients of a function on a [`SpectralGrid`], FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, coeffs })
    }

    /// Coefficients given as a function of wavenumber.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let coeffs = grid.wavenumbers().iter().map(|&k| f(k)).collect();
        Self::new(grid.clone(), coeffs)
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Self {
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Pointwise multiplication by a real-valued symbol `m(ζ)`.
    pub fn apply_symbol(&self, m: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(c, &k)| c * m(k))
            .collect();
        Self::from_parts_unchecked(self.grid.clone(), coeffs)
    }

    /// Largest relative violation of `c(-ζ) = conj c(ζ)`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.grid.len();
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut dev = self.coeffs[0].im.abs();
        dev = dev.max(self.coeffs[n / 2].im.abs());
        for i in 1..n / 2 {
            dev = dev.max((self.coeffs[i] - self.coeffs[n - i].conj()).norm());
        }
        dev / scale
    }
}

/// Normalized discrete analogue of the symmetric Fourier transform.
pub fn forward_transform(f: &Field) -> Result<SpectralField> {
    if let Some(index) = f.samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(forward_unchecked(f))
}

pub(crate) fn forward_unchecked(f: &Field) -> SpectralField {
    let mut buf: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    let n = f.grid.len() as f64;
    for a in buf.iter_mut() {
        *a /= n;
    }
    f.grid.amplitudes_to_coeffs(&mut buf);
    SpectralField::from_parts_unchecked(f.grid.clone(), buf)
}

/// Inverse of [`forward_transform`]. The spectrum must be Hermitian to 1e-10.
pub fn inverse_transform(spec: &SpectralField) -> Result<Field> {
    let deviation = spec.hermitian_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(inverse_unchecked(spec))
}

pub(crate) fn inverse_unchecked(spec: &SpectralField) -> Field {
    let samples = inverse_complex(spec).into_iter().map(|c| c.re).collect();
    Field::from_parts_unchecked(spec.grid.clone(), samples)
}

/// Complex-valued synthesis of arbitrary (not necessarily Hermitian)
/// coefficients.
pub fn inverse_complex(spec: &SpectralField) -> Vec<Complex64> {
    let mut buf = spec.grid.coeffs_to_amplitudes(&spec.coeffs);
    fft_inverse(&mut buf);
    buf
}

/// Analysis of complex-valued samples; counterpart of [`inverse_complex`].
pub fn forward_complex(grid: &SpectralGrid, samples: &[Complex64]) -> SpectralField {
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let n = grid.len() as f64;
    for a in buf.iter_mut() {
        *a /= n;
    }
    grid.amplitudes_to_coeffs(&mut buf);
    SpectralField::from_parts_unchecked(grid.clone(), buf)
}

/// Multiplies each coefficient by `(iζ)^order`, `order ∈ {1, 2, 3}`.
/// The Nyquist mode is dropped for odd orders since it has no real
/// odd derivative on the grid.
pub fn differentiate(spec: &SpectralField, order: u32) -> Result<SpectralField> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "derivative order must be 1, 2 or 3, got {order}"
        )));
    }
    Ok(differentiate_unchecked(spec, order))
}

pub(crate) fn differentiate_unchecked(spec: &SpectralField, order: u32) -> SpectralField {
    let i = Complex64::new(0.0, 1.0);
    let mut coeffs: Vec<Complex64> = spec
        .coeffs
        .iter()
        .zip(spec.grid.wavenumbers())
        .map(|(c, &k)| c * (i * k).powu(order))
        .collect();
    if order % 2 == 1 {
        coeffs[spec.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    }
    SpectralField::from_parts_unchecked(spec.grid.clone(), coeffs)
}

/// Smooth low-pass multiplier: 1 on `|ζ| ≤ n`, 0 on `|ζ| ≥ 2n` and the
/// cosine ramp `½(1 + cos(π(|ζ| - n)/n))` in between.
pub fn lowpass_symbol(zeta: f64, cutoff: f64) -> f64 {
    let a = zeta.abs();
    if a <= cutoff {
        1.0
    } else if a >= 2.0 * cutoff {
        0.0
    } else {
        0.5 * (1.0 + (PI * (a - cutoff) / cutoff).cos())
    }
}

pub fn project_lowpass(spec: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "low-pass cutoff must be positive, got {cutoff}"
        )));
    }
    Ok(spec.apply_symbol(|k| lowpass_symbol(k, cutoff)))
}

/// Size of the zero-padded grid for a given padding ratio (smallest even
/// integer `>= ratio * N`).
pub fn padded_len(n: usize, padding_ratio: f64) -> usize {
    let m = (padding_ratio * n as f64 - 1e-9).ceil() as usize;
    m + m % 2
}

fn check_padding(padding_ratio: f64) -> Result<()> {
    // Ratios below 3/2 alias even quadratic products.
    if !(padding_ratio.is_finite() && padding_ratio >= 1.5) {
        return Err(Error::InvalidArgument(format!(
            "padding ratio must be >= 3/2, got {padding_ratio}"
        )));
    }
    Ok(())
}

/// Trigonometric amplitudes zero-padded to length `m` and synthesized on the
/// fine grid. The Nyquist amplitude is split evenly between `±N/2`.
pub(crate) fn to_fine(amps: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = amps.len();
    let mut fine = vec![Complex64::new(0.0, 0.0); m];
    if m == n {
        fine.copy_from_slice(amps);
    } else {
        fine[..n / 2].copy_from_slice(&amps[..n / 2]);
        for i in n / 2 + 1..n {
            fine[m - (n - i)] = amps[i];
        }
        let half = amps[n / 2] * 0.5;
        fine[n / 2] = half;
        fine[m - n / 2] = half;
    }
    fft_inverse(&mut fine);
    fine
}

/// Analyses fine-grid samples and truncates back to `n` amplitudes, folding
/// the `±N/2` pair into the Nyquist slot.
pub(crate) fn from_fine(mut fine: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    let m = fine.len();
    fft_forward(&mut fine);
    let scale = 1.0 / m as f64;
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    if m == n {
        for (a, f) in amps.iter_mut().zip(&fine) {
            *a = f * scale;
        }
    } else {
        for i in 0..n / 2 {
            amps[i] = fine[i] * scale;
        }
        for i in n / 2 + 1..n {
            amps[i] = fine[m - (n - i)] * scale;
        }
        amps[n / 2] = (fine[n / 2] + fine[m - n / 2]) * scale;
    }
    amps
}

/// Alias-free product of complex sample rows sharing one grid.
pub fn dealiased_product_complex(
    grid: &SpectralGrid,
    factors: &[&[Complex64]],
    padding_ratio: f64,
) -> Result<Vec<Complex64>> {
    check_padding(padding_ratio)?;
    let n = grid.len();
    if factors.is_empty() {
        return Ok(vec![Complex64::new(1.0, 0.0); n]);
    }
    if factors.iter().any(|f| f.len() != n) {
        return Err(Error::GridMismatch);
    }
    let m = padded_len(n, padding_ratio);
    let mut acc: Option<Vec<Complex64>> = None;
    for f in factors {
        let mut amps = f.to_vec();
        fft_forward(&mut amps);
        for a in amps.iter_mut() {
            *a /= n as f64;
        }
        let fine = to_fine(&amps, m);
        acc = Some(match acc {
            None => fine,
            Some(mut a) => {
                for (x, y) in a.iter_mut().zip(&fine) {
                    *x *= y;
                }
                a
            }
        });
    }
    let mut amps = from_fine(acc.expect("non-empty"), n);
    fft_inverse(&mut amps);
    Ok(amps)
}

/// Pointwise product of real fields computed on a zero-padded grid and
/// truncated back. Exact (no aliasing) for band-limited inputs when
/// `padding_ratio >= (m + 1) / 2` for an `m`-fold product.
pub fn dealiased_product(fields: &[&Field], padding_ratio: f64) -> Result<Field> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
    let grid = first.grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let rows: Vec<Vec<Complex64>> = fields
        .iter()
        .map(|f| f.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect())
        .collect();
    let refs: Vec<&[Complex64]> = rows.iter().map(|r| r.as_slice()).collect();
    let prod = dealiased_product_complex(grid, &refs, padding_ratio)?;
    Ok(Field::from_parts_unchecked(
        grid.clone(),
        prod.into_iter().map(|c| c.re).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(PI, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpectralGrid::new(1.0, 7).is_err());
        assert!(SpectralGrid::new(1.0, 6).is_err());
        assert!(SpectralGrid::new(0.0, 16).is_err());
        assert!(SpectralGrid::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn wavenumbers_symmetric_except_nyquist() {
        let g = SpectralGrid::new(3.0, 16).unwrap();
        let k = g.wavenumbers();
        for i in 1..8 {
            assert_eq!(k[i], -k[16 - i]);
        }
        assert_eq!(k[8], -8.0 * PI / 3.0);
        assert_eq!(k[0], 0.0);
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = grid(32);
        let f = Field::from_fn(&g, |_| 1.0).unwrap();
        let s = forward_transform(&f).unwrap();
        assert!(s.coeffs()[0].norm() > 0.1);
        for c in &s.coeffs()[1..] {
            assert!(c.norm() < 1e-14);
        }
        // ∫_{-π}^{π} 1 dx / √(2π) = √(2π)
        assert!((s.coeffs()[0].re - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cosine_has_two_equal_modes() {
        let g = grid(32);
        let f = Field::from_fn(&g, |x| (3.0 * x).cos()).unwrap();
        let s = forward_transform(&f).unwrap();
        let (p, m) = (g.index_of_mode(3).unwrap(), g.index_of_mode(-3).unwrap());
        assert!((s.coeffs()[p].norm() - s.coeffs()[m].norm()).abs() < 1e-13);
        assert!(s.coeffs()[p].norm() > 0.5);
        for (i, c) in s.coeffs().iter().enumerate() {
            if i != p && i != m {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid(16);
        assert!(matches!(
            Field::new(g.clone(), {
                let mut v = vec![0.0; 16];
                v[3] = f64::NAN;
                v
            }),
            Err(Error::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn zero_and_delta_spectra() {
        let g = grid(16);
        let z = inverse_transform(&SpectralField::zeros(&g)).unwrap();
        assert!(z.samples().iter().all(|&v| v == 0.0));
        let mut d = SpectralField::zeros(&g);
        d.coeffs_mut()[0] = Complex64::new(2.0, 0.0);
        let f = inverse_transform(&d).unwrap();
        let v0 = f.samples()[0];
        assert!(v0 > 0.0);
        assert!(f.samples().iter().all(|&v| (v - v0).abs() < 1e-15));
    }

    #[test]
    fn non_hermitian_rejected() {
        let g = grid(16);
        let mut d = SpectralField::zeros(&g);
        d.coeffs_mut()[2] = Complex64::new(1.0, 0.0);
        assert!(matches!(inverse_transform(&d), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sech_round_trip() {
        let g = SpectralGrid::new(20.0 * PI, 1024).unwrap();
        let f = Field::from_fn(&g, |x| 1.0 / x.cosh()).unwrap();
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let dev = f
            .samples()
            .iter()
            .zip(back.samples())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn differentiate_sine() {
        let g = grid(32);
        let f = Field::from_fn(&g, |x| (2.0 * x).sin()).unwrap();
        let d = inverse_transform(&differentiate(&forward_transform(&f).unwrap(), 1).unwrap())
            .unwrap();
        for (x, v) in g.points().iter().zip(d.samples()) {
            assert!((v - 2.0 * (2.0 * x).cos()).abs() < 1e-12);
        }
        assert!(differentiate(&SpectralField::zeros(&g), 4).is_err());
        assert!(differentiate(&SpectralField::zeros(&g), 0).is_err());
    }

    #[test]
    fn differentiate_constant_is_zero() {
        let g = grid(32);
        let s = forward_transform(&Field::from_fn(&g, |_| 4.0).unwrap()).unwrap();
        for order in 1..=3 {
            let d = differentiate(&s, order).unwrap();
            assert!(d.coeffs().iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn lowpass_ramp_values() {
        assert_eq!(lowpass_symbol(0.5, 1.0), 1.0);
        assert_eq!(lowpass_symbol(-1.0, 1.0), 1.0);
        assert_eq!(lowpass_symbol(2.0, 1.0), 0.0);
        assert_eq!(lowpass_symbol(-3.0, 1.0), 0.0);
        assert!((lowpass_symbol(1.5, 1.0) - 0.5).abs() < 1e-16);
        assert!((lowpass_symbol(-7.5, 5.0) - 0.5).abs() < 1e-16);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = lowpass_symbol(1.0 + i as f64 / 100.0, 1.0);
            assert!(v <= prev);
            prev = v;
        }
        assert!(project_lowpass(&SpectralField::zeros(&grid(8)), 0.0).is_err());
    }

    #[test]
    fn lowpass_support() {
        let g = grid(64);
        let low = Field::from_fn(&g, |x| x.cos() + (3.0 * x).sin()).unwrap();
        let s = forward_transform(&low).unwrap();
        let p = project_lowpass(&s, 3.0).unwrap();
        for (a, b) in p.coeffs().iter().zip(s.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
        for i in 0..=3 {
            assert_eq!(p.coeffs()[i], s.coeffs()[i]);
        }
        let high = Field::from_fn(&g, |x| (8.0 * x).cos()).unwrap();
        let s = forward_transform(&high).unwrap();
        let p = project_lowpass(&s, 4.0).unwrap();
        assert!(p.coeffs().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn product_with_one_is_identity() {
        let g = grid(32);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Field::new(g.clone(), (0..32).map(|_| rng.random::<f64>() - 0.5).collect())
            .unwrap();
        let one = Field::from_fn(&g, |_| 1.0).unwrap();
        let p = dealiased_product(&[&f, &one], 2.0).unwrap();
        for (a, b) in f.samples().iter().zip(p.samples()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn product_to_sum() {
        let g = grid(32);
        let a = Field::from_fn(&g, |x| (3.0 * x).cos()).unwrap();
        let b = Field::from_fn(&g, |x| (5.0 * x).cos()).unwrap();
        let p = dealiased_product(&[&a, &b], 1.5).unwrap();
        let s = forward_transform(&p).unwrap();
        let keep = [2_i64, -2, 8, -8];
        for (i, c) in s.coeffs().iter().enumerate() {
            let k = signed_index(i, 32);
            if keep.contains(&k) {
                // cos3x cos5x = ½cos2x + ½cos8x, each cosine splits over ±k
                assert!((c.norm() - 0.25 * (2.0 * PI).sqrt()).abs() < 1e-12);
            } else {
                assert!(c.norm() < 1e-12);
            }
        }
        for (x, v) in g.points().iter().zip(p.samples()) {
            assert!((v - (3.0 * x).cos() * (5.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn product_rejects_mismatch_and_low_padding() {
        let a = Field::zeros(&grid(16));
        let b = Field::zeros(&grid(32));
        assert_eq!(dealiased_product(&[&a, &b], 2.0), Err(Error::GridMismatch));
        assert!(dealiased_product(&[&a, &a], 1.2).is_err());
    }

    #[test]
    fn padded_len_is_even() {
        assert_eq!(padded_len(32, 1.5), 48);
        assert_eq!(padded_len(32, 2.0), 64);
        assert_eq!(padded_len(10, 1.5), 16);
    }
}
