//! Time integration of the coupled system.
//!
//! The dispersive part `u_t + u_xxx = 0` is solved exactly in Fourier space
//! (`û(t) = e^{iζ³t} û(0)`); the nonlinearity is evaluated pseudospectrally
//! on a zero-padded grid. Two production steppers are provided (Strang
//! splitting and integrating-factor RK4) together with a Picard iteration of
//! the Duhamel map on a short window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsConfig, Termination, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::function_spaces::{gevrey_norm_spectral, CutoffProfile};
use crate::spectral::{
    forward_unchecked, from_fine, inverse_unchecked, padded_len, to_fine, Field, SpectralField,
    SpectralGrid,
};

/// The pair `(u, v)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub t: f64,
    pub u: Field,
    pub v: Field,
}

impl CoupledState {
    pub fn new(t: f64, u: Field, v: Field) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { t, u, v })
    }

    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            t: 0.0,
            u: Field::zeros(grid),
            v: Field::zeros(grid),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.u.grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Strang,
    IfRk4,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Self::Strang),
            "if_rk4" => Ok(Self::IfRk4),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme {other:?} (expected strang or if_rk4)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Strang => "strang",
            Self::IfRk4 => "if_rk4",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Nonlinearity exponent, `p >= 1`.
    pub p: u32,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Zero-padding factor for the nonlinear products; `p + 1` removes all
    /// aliasing of the degree-`2p+1` terms.
    pub padding_ratio: f64,
    pub record_stride: usize,
    /// When false only the dispersive part is integrated.
    pub nonlinear: bool,
    /// Abort when the sup norm exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    pub diagnostics: DiagnosticsConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: 1,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::IfRk4,
            padding_ratio: 2.0,
            record_stride: 100,
            nonlinear: true,
            blowup_factor: 1e6,
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::InvalidArgument("p must be a positive integer".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidArgument("record_stride must be >= 1".into()));
        }
        if !(self.padding_ratio.is_finite() && self.padding_ratio >= 1.5) {
            return Err(Error::InvalidArgument(format!(
                "padding ratio must be >= 3/2, got {}",
                self.padding_ratio
            )));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Dispersion symbol `e^{iζ³h}`. The unpaired Nyquist mode is left in place
/// so that real fields stay real.
fn dispersion_factors(grid: &SpectralGrid, h: f64) -> Vec<Complex64> {
    let ny = grid.nyquist_index();
    grid.wavenumbers()
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            if i == ny {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, k * k * k * h)
            }
        })
        .collect()
}

fn mul_in_place(a: &mut [Complex64], b: &[Complex64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x *= y;
    }
}

/// Spectral form of `W(h)`.
pub fn propagate_spectral(spec: &SpectralField, h: f64) -> SpectralField {
    let mut out = spec.clone();
    mul_in_place(out.coeffs_mut(), &dispersion_factors(spec.grid(), h));
    out
}

/// Exact free evolution by `dt` of both components.
pub fn free_propagate(state: &CoupledState, dt: f64) -> CoupledState {
    let e = dispersion_factors(state.grid(), dt);
    let prop = |f: &Field| {
        let mut s = forward_unchecked(f);
        mul_in_place(s.coeffs_mut(), &e);
        inverse_unchecked(&s)
    };
    CoupledState {
        t: state.t + dt,
        u: prop(&state.u),
        v: prop(&state.v),
    }
}

/// Evaluates `(-∂x(u^p v^{p+1}), -∂x(u^{p+1} v^p))` in normalized Fourier
/// coefficients.
#[derive(Debug, Clone)]
pub(crate) struct NonlinearTerm {
    grid: SpectralGrid,
    p: u32,
    padded: usize,
    minus_i_zeta: Vec<Complex64>,
}

impl NonlinearTerm {
    pub(crate) fn new(grid: &SpectralGrid, p: u32, padding_ratio: f64) -> Self {
        let ny = grid.nyquist_index();
        let minus_i_zeta = grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                if i == ny {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -k)
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            p,
            padded: padded_len(grid.len(), padding_ratio),
            minus_i_zeta,
        }
    }

    fn fine_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let amps = self.grid.coeffs_to_amplitudes(coeffs);
        to_fine(&amps, self.padded).into_iter().map(|c| c.re).collect()
    }

    fn back(&self, fine: Vec<f64>) -> Vec<Complex64> {
        let fine = fine.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut amps = from_fine(fine, self.grid.len());
        self.grid.amplitudes_to_coeffs(&mut amps);
        mul_in_place(&mut amps, &self.minus_i_zeta);
        amps
    }

    pub(crate) fn eval(&self, u: &[Complex64], v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let fu = self.fine_real(u);
        let fv = self.fine_real(v);
        let p = self.p as i32;
        let mut a = Vec::with_capacity(fu.len());
        let mut b = Vec::with_capacity(fu.len());
        for (&x, &y) in fu.iter().zip(&fv) {
            let common = x.powi(p) * y.powi(p);
            a.push(common * y);
            b.push(common * x);
        }
        (self.back(a), self.back(b))
    }
}

/// `(-∂x(u^p v^{p+1}), -∂x(u^{p+1} v^p))` with exact dealiasing.
pub fn nonlinear_rhs(state: &CoupledState, p: u32) -> Result<(Field, Field)> {
    if p < 1 {
        return Err(Error::InvalidArgument("p must be a positive integer".into()));
    }
    let grid = state.grid();
    let term = NonlinearTerm::new(grid, p, (p + 1) as f64);
    let uh = forward_unchecked(&state.u);
    let vh = forward_unchecked(&state.v);
    let (a, b) = term.eval(uh.coeffs(), vh.coeffs());
    Ok((
        inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), a)),
        inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), b)),
    ))
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(p, q)| p + q * a).collect()
}

/// Spectral-space stepper with cached dispersion factors for a fixed step.
pub(crate) struct Stepper {
    scheme: Scheme,
    h: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    term: Option<NonlinearTerm>,
}

impl Stepper {
    pub(crate) fn new(grid: &SpectralGrid, cfg: &SolverConfig, h: f64) -> Self {
        Self {
            scheme: cfg.scheme,
            h,
            full: dispersion_factors(grid, h),
            half: dispersion_factors(grid, 0.5 * h),
            term: cfg
                .nonlinear
                .then(|| NonlinearTerm::new(grid, cfg.p, cfg.padding_ratio)),
        }
    }

    pub(crate) fn advance(&self, u: &mut Vec<Complex64>, v: &mut Vec<Complex64>) {
        let Some(term) = &self.term else {
            mul_in_place(u, &self.full);
            mul_in_place(v, &self.full);
            return;
        };
        let h = self.h;
        match self.scheme {
            Scheme::Strang => {
                mul_in_place(u, &self.half);
                mul_in_place(v, &self.half);
                let (k1u, k1v) = term.eval(u, v);
                let mu = axpy(u, 0.5 * h, &k1u);
                let mv = axpy(v, 0.5 * h, &k1v);
                let (k2u, k2v) = term.eval(&mu, &mv);
                *u = axpy(u, h, &k2u);
                *v = axpy(v, h, &k2v);
                mul_in_place(u, &self.half);
                mul_in_place(v, &self.half);
            }
            Scheme::IfRk4 => {
                // Lawson RK4 in the interaction picture.
                let (k1u, k1v) = term.eval(u, v);
                let mut au = axpy(u, 0.5 * h, &k1u);
                let mut av = axpy(v, 0.5 * h, &k1v);
                mul_in_place(&mut au, &self.half);
                mul_in_place(&mut av, &self.half);
                let (k2u, k2v) = term.eval(&au, &av);
                let mut eu = u.clone();
                let mut ev = v.clone();
                mul_in_place(&mut eu, &self.half);
                mul_in_place(&mut ev, &self.half);
                let bu = axpy(&eu, 0.5 * h, &k2u);
                let bv = axpy(&ev, 0.5 * h, &k2v);
                let (k3u, k3v) = term.eval(&bu, &bv);
                let mut e3u = k3u.clone();
                let mut e3v = k3v.clone();
                mul_in_place(&mut e3u, &self.half);
                mul_in_place(&mut e3v, &self.half);
                let mut fu = u.clone();
                let mut fv = v.clone();
                mul_in_place(&mut fu, &self.full);
                mul_in_place(&mut fv, &self.full);
                let cu = axpy(&fu, h, &e3u);
                let cv = axpy(&fv, h, &e3v);
                let (k4u, k4v) = term.eval(&cu, &cv);
                let combine = |f: &[Complex64],
                               k1: &[Complex64],
                               k2: &[Complex64],
                               k3: &[Complex64],
                               k4: &[Complex64]| {
                    (0..f.len())
                        .map(|i| {
                            f[i] + (self.full[i] * k1[i]
                                + self.half[i] * (k2[i] + k3[i]) * 2.0
                                + k4[i])
                                * (h / 6.0)
                        })
                        .collect::<Vec<_>>()
                };
                *u = combine(&fu, &k1u, &k2u, &k3u, &k4u);
                *v = combine(&fv, &k1v, &k2v, &k3v, &k4v);
            }
        }
    }
}

fn finite_or_err(c: &[Complex64], t: f64) -> Result<()> {
    if c.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

/// Advances the state by one step of `cfg.dt`.
pub fn step(state: &CoupledState, cfg: &SolverConfig) -> Result<CoupledState> {
    cfg.validate()?;
    let grid = state.grid().clone();
    let stepper = Stepper::new(&grid, cfg, cfg.dt);
    let mut u = forward_unchecked(&state.u).into_coeffs();
    let mut v = forward_unchecked(&state.v).into_coeffs();
    stepper.advance(&mut u, &mut v);
    let t = state.t + cfg.dt;
    finite_or_err(&u, t)?;
    finite_or_err(&v, t)?;
    Ok(CoupledState {
        t,
        u: inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), u)),
        v: inverse_unchecked(&SpectralField::from_parts_unchecked(grid, v)),
    })
}

fn run_direction(
    initial: &CoupledState,
    cfg: &SolverConfig,
    h: f64,
    record: &mut dyn FnMut(CoupledState) -> Result<()>,
) -> Result<Termination> {
    let grid = initial.grid().clone();
    let stepper = Stepper::new(&grid, cfg, h);
    let mut u = forward_unchecked(&initial.u).into_coeffs();
    let mut v = forward_unchecked(&initial.v).into_coeffs();
    let sup0 = initial.max_abs();
    let steps = cfg.num_steps();
    let to_state = |u: &[Complex64], v: &[Complex64], t: f64| CoupledState {
        t,
        u: inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), u.to_vec())),
        v: inverse_unchecked(&SpectralField::from_parts_unchecked(grid.clone(), v.to_vec())),
    };
    for n in 1..=steps {
        stepper.advance(&mut u, &mut v);
        let t = initial.t + n as f64 * h;
        finite_or_err(&u, t)?;
        finite_or_err(&v, t)?;
        let at_record = n % cfg.record_stride == 0 || n == steps;
        if at_record || n % 64 == 0 {
            let state = to_state(&u, &v, t);
            if sup0 > 0.0 && state.max_abs() > cfg.blowup_factor * sup0 {
                record(state)?;
                return Ok(Termination::BlowUp { t });
            }
            if at_record {
                record(state)?;
            }
        }
    }
    Ok(Termination::Completed)
}

/// Integrates to `cfg.t_end`, recording diagnostics every `record_stride`
/// steps (and at the final time).
pub fn simulate(initial: &CoupledState, cfg: &SolverConfig) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let mut traj = TrajectoryRecord::new(cfg.p, cfg.diagnostics);
    traj.push(initial.clone())?;
    let termination = run_direction(initial, cfg, cfg.dt, &mut |s| traj.push(s))?;
    traj.termination = termination;
    Ok(traj)
}

/// Integrates backward and forward from `initial`, producing a record over
/// `[t - t_end, t + t_end]` in increasing time order. The system is
/// time-reversible, so the backward branch uses the same stepper with `-dt`.
pub fn simulate_symmetric(initial: &CoupledState, cfg: &SolverConfig) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let mut backward: Vec<CoupledState> = Vec::new();
    let term_back = run_direction(initial, cfg, -cfg.dt, &mut |s| {
        backward.push(s);
        Ok(())
    })?;
    let mut traj = TrajectoryRecord::new(cfg.p, cfg.diagnostics);
    for s in backward.into_iter().rev() {
        traj.push(s)?;
    }
    traj.push(initial.clone())?;
    let term_fwd = run_direction(initial, cfg, cfg.dt, &mut |s| traj.push(s))?;
    traj.termination = match (term_back, term_fwd) {
        (Termination::BlowUp { t }, _) | (_, Termination::BlowUp { t }) => Termination::BlowUp { t },
        _ => Termination::Completed,
    };
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Length `T` of the window `[0, T]`.
    pub window: f64,
    /// Uniform quadrature nodes on the window, endpoints included.
    pub nodes: usize,
    pub max_iters: usize,
    /// Iteration stops once the sup-in-time `H^s` increment is below this.
    pub contraction_tol: f64,
    /// Sobolev index used to measure increments.
    pub s: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            window: 0.05,
            nodes: 201,
            max_iters: 60,
            contraction_tol: 1e-10,
            s: 2.0,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::InvalidArgument("Picard window must be positive".into()));
        }
        if self.nodes < 2 || self.max_iters == 0 || !(self.contraction_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "Picard nodes >= 2, max_iters >= 1 and tolerance > 0 required".into(),
            ));
        }
        Ok(())
    }

    pub fn node_times(&self) -> Vec<f64> {
        let h = self.window / (self.nodes - 1) as f64;
        (0..self.nodes).map(|j| j as f64 * h).collect()
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// Converged iterate at each node.
    pub trajectory: Vec<CoupledState>,
    /// `sup_t` increments `‖Δ_k‖`, one per completed iteration.
    pub increments: Vec<f64>,
    /// `‖Δ_{k+1}‖ / ‖Δ_k‖`.
    pub contraction_factors: Vec<f64>,
    pub iterations: usize,
}

type Iterate = (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>);

/// Free part `ψ(t) W(t) (u0, v0)` at the nodes; the zeroth Picard iterate.
fn free_part(grid: &SpectralGrid, u0: &[Complex64], v0: &[Complex64], times: &[f64]) -> Iterate {
    let mut us = Vec::with_capacity(times.len());
    let mut vs = Vec::with_capacity(times.len());
    for &t in times {
        let e = dispersion_factors(grid, t);
        let psi = CutoffProfile::bump(t);
        us.push(u0.iter().zip(&e).map(|(a, b)| a * b * psi).collect());
        vs.push(v0.iter().zip(&e).map(|(a, b)| a * b * psi).collect());
    }
    (us, vs)
}

/// One application of the cut-off Duhamel map
/// `ψ(t)W(t)u0 - ψ_T(t) ∫_0^t W(t-t') w(t') dt'`. The time integral is
/// accumulated interval by interval with the fourth-order four-point rule
/// (one-sided on the first and last interval); fewer than four nodes fall
/// back to the trapezoid rule. Nodes must be uniform.
pub(crate) fn duhamel_map(
    grid: &SpectralGrid,
    free: &Iterate,
    current: &Iterate,
    times: &[f64],
    term: &NonlinearTerm,
    cutoff: &CutoffProfile,
) -> Iterate {
    let n = grid.len();
    let q = times.len();
    // term.eval returns -w; pull it back to t = 0 with W(-t').
    let (gu, gv): (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) = (0..q)
        .map(|j| {
            let (mut a, mut b) = term.eval(&current.0[j], &current.1[j]);
            let back = dispersion_factors(grid, -times[j]);
            mul_in_place(&mut a, &back);
            mul_in_place(&mut b, &back);
            (a, b)
        })
        .unzip();
    let weights = |j: usize| -> Vec<(usize, f64)> {
        let h = times[j + 1] - times[j];
        if q < 4 {
            vec![(j, 0.5 * h), (j + 1, 0.5 * h)]
        } else if j == 0 {
            let w = h / 24.0;
            vec![(0, 9.0 * w), (1, 19.0 * w), (2, -5.0 * w), (3, w)]
        } else if j + 2 == q {
            let w = h / 24.0;
            vec![(j - 2, w), (j - 1, -5.0 * w), (j, 19.0 * w), (j + 1, 9.0 * w)]
        } else {
            let w = h / 24.0;
            vec![(j - 1, -w), (j, 13.0 * w), (j + 1, 13.0 * w), (j + 2, -w)]
        }
    };
    let mut acc_u = vec![Complex64::new(0.0, 0.0); n];
    let mut acc_v = vec![Complex64::new(0.0, 0.0); n];
    let mut out_u = Vec::with_capacity(q);
    let mut out_v = Vec::with_capacity(q);
    for j in 0..q {
        if j > 0 {
            for (m, w) in weights(j - 1) {
                for i in 0..n {
                    acc_u[i] += gu[m][i] * w;
                    acc_v[i] += gv[m][i] * w;
                }
            }
        }
        let fwd = dispersion_factors(grid, times[j]);
        let c = cutoff.eval(times[j]);
        out_u.push((0..n).map(|i| free.0[j][i] + fwd[i] * acc_u[i] * c).collect());
        out_v.push((0..n).map(|i| free.1[j][i] + fwd[i] * acc_v[i] * c).collect());
    }
    (out_u, out_v)
}

fn sup_increment(grid: &SpectralGrid, a: &Iterate, b: &Iterate, s: f64) -> f64 {
    let norm = |x: &[Complex64], y: &[Complex64]| {
        let d: Vec<Complex64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        gevrey_norm_spectral(&SpectralField::from_parts_unchecked(grid.clone(), d), 0.0, s)
            .unwrap_or(f64::INFINITY)
    };
    let mut m: f64 = 0.0;
    for j in 0..a.0.len() {
        m = m.max(norm(&a.0[j], &b.0[j])).max(norm(&a.1[j], &b.1[j]));
    }
    m
}

/// Picard iteration of the Duhamel map on `[0, cfg.window]`.
///
/// Starts from the free evolution, iterates until the sup-in-time `H^s`
/// increment drops below `cfg.contraction_tol`, and fails with
/// [`Error::NonContraction`] when three consecutive ratios are `>= 1`.
pub fn picard_solve(initial: &CoupledState, cfg: &PicardConfig, p: u32) -> Result<PicardOutcome> {
    cfg.validate()?;
    if p < 1 {
        return Err(Error::InvalidArgument("p must be a positive integer".into()));
    }
    let grid = initial.grid().clone();
    let times = cfg.node_times();
    let u0 = forward_unchecked(&initial.u).into_coeffs();
    let v0 = forward_unchecked(&initial.v).into_coeffs();
    let free = free_part(&grid, &u0, &v0, &times);
    let term = NonlinearTerm::new(&grid, p, (p + 1) as f64);
    let cutoff = CutoffProfile::new(cfg.window)?;

    let mut current = free.clone();
    let mut increments = Vec::new();
    let mut factors = Vec::new();
    let mut streak = 0;
    for k in 1..=cfg.max_iters {
        let next = duhamel_map(&grid, &free, &current, &times, &term, &cutoff);
        let inc = sup_increment(&grid, &next, &current, cfg.s);
        if !inc.is_finite() {
            return Err(Error::NonContraction {
                iteration: k,
                ratio: f64::INFINITY,
            });
        }
        if let Some(&last) = increments.last() {
            let ratio = if last > 0.0 { inc / last } else { 0.0 };
            factors.push(ratio);
            if ratio >= 1.0 {
                streak += 1;
                if streak >= 3 {
                    return Err(Error::NonContraction { iteration: k, ratio });
                }
            } else {
                streak = 0;
            }
        }
        increments.push(inc);
        current = next;
        if inc < cfg.contraction_tol {
            let trajectory = times
                .iter()
                .enumerate()
                .map(|(j, &t)| CoupledState {
                    t: initial.t + t,
                    u: inverse_unchecked(&SpectralField::from_parts_unchecked(
                        grid.clone(),
                        current.0[j].clone(),
                    )),
                    v: inverse_unchecked(&SpectralField::from_parts_unchecked(
                        grid.clone(),
                        current.1[j].clone(),
                    )),
                })
                .collect();
            return Ok(PicardOutcome {
                trajectory,
                increments,
                contraction_factors: factors,
                iterations: k,
            });
        }
    }
    Err(Error::PicardMaxIters(cfg.max_iters))
}

/// Initial data for the traveling wave `√(2c) sech(√c (x - x0))` of the
/// symmetric `p = 1` system.
pub fn soliton_p1(grid: &SpectralGrid, c: f64, x0: f64) -> Result<Field> {
    let a = (2.0 * c).sqrt();
    let k = c.sqrt();
    Field::from_fn(grid, |x| a / (k * (x - x0)).cosh())
}
