use std::f64::consts::PI;

use gkdv_core::diagnostics::{strip_bound_ratio, FitConfig};
use gkdv_core::evolution::soliton_p1;
use gkdv_core::spectral::inverse_complex;
use gkdv_core::*;
use num_complex::Complex64;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

#[test]
fn soliton_invariants_closed_form() {
    // u = v = √(2c) sech(√c x): ∫u = π√2, ½∫(u²+v²) = ∫u² = 4√c,
    // H = ∫u_x² - ½∫u⁴ = (4/3)c^{3/2} - (8/3)c^{3/2}.
    let g = SpectralGrid::new(20.0 * PI, 1024).unwrap();
    for c in [0.5, 1.0, 2.0] {
        let u = soliton_p1(&g, c, 0.0).unwrap();
        let inv = invariants(&CoupledState::new(0.0, u.clone(), u).unwrap(), 1);
        assert!((inv.mass_u - PI * 2f64.sqrt()).abs() < 1e-10);
        assert!((inv.l2 - 4.0 * c.sqrt()).abs() < 1e-10);
        assert!((inv.hamiltonian + 4.0 / 3.0 * c.powf(1.5)).abs() < 1e-10, "{}", inv.hamiltonian);
    }
}

#[test]
fn p2_hamiltonian_by_quadrature() {
    // p = 2: H = ½∫(u_x² + v_x² - (2/3)u³v³); compared against trapezoid
    // sums of the closed-form derivative.
    let g = SpectralGrid::new(20.0, 512).unwrap();
    let u = Field::from_fn(&g, |x| 0.9 * sech(x)).unwrap();
    let v = Field::from_fn(&g, |x| 0.7 * sech(x - 0.5)).unwrap();
    let inv = invariants(&CoupledState::new(0.0, u, v).unwrap(), 2);
    let dx = g.dx();
    let mut h = 0.0;
    for x in g.points() {
        let ux = -0.9 * sech(x) * x.tanh();
        let vx = -0.7 * sech(x - 0.5) * (x - 0.5).tanh();
        let uv = 0.9 * sech(x) * 0.7 * sech(x - 0.5);
        h += 0.5 * (ux * ux + vx * vx - 2.0 / 3.0 * uv.powi(3)) * dx;
    }
    assert!((inv.hamiltonian - h).abs() < 1e-12 * h.abs(), "{} vs {h}", inv.hamiltonian);
}

#[test]
fn radius_of_sech_family() {
    let g = SpectralGrid::new(20.0 * PI, 2048).unwrap();
    for k in [0.5, 1.0, 2.0] {
        let f = Field::from_fn(&g, |x| sech(k * x)).unwrap();
        let r = estimate_radius(&f, &FitConfig::default());
        let target = PI / (2.0 * k);
        assert!(r.is_usable());
        assert!((r.rho_hat - target).abs() < 0.05 * target, "k = {k}: {}", r.rho_hat);
    }
}

#[test]
fn synthetic_exponential_spectrum() {
    let g = SpectralGrid::new(20.0 * PI, 2048).unwrap();
    for rho0 in [0.3, 0.7, 1.5] {
        let s = SpectralField::from_fn(&g, |z| Complex64::new((-rho0 * z.abs()).exp(), 0.0)).unwrap();
        let r = gkdv_core::diagnostics::estimate_radius_spectral(&s, &FitConfig::default());
        assert!((r.rho_hat - rho0).abs() < 1e-6, "{rho0}: {}", r.rho_hat);
        assert!(r.r_squared > 0.9999);
    }
}

#[test]
fn radius_invariant_under_translation_and_free_flow() {
    let g = SpectralGrid::new(20.0 * PI, 1024).unwrap();
    let cfg = FitConfig::default();
    let f = Field::from_fn(&g, |x| sech(x) + 0.5 * sech(2.0 * (x - 3.0))).unwrap();
    let base = estimate_radius(&f, &cfg);
    let moved = Field::from_fn(&g, |x| sech(x - 7.0) + 0.5 * sech(2.0 * (x - 10.0))).unwrap();
    assert!((estimate_radius(&moved, &cfg).rho_hat - base.rho_hat).abs() < 1e-6);
    let state = CoupledState::new(0.0, f.clone(), f).unwrap();
    let free = free_propagate(&state, 3.7);
    assert!((estimate_radius(&free.u, &cfg).rho_hat - base.rho_hat).abs() < 1e-10);
}

#[test]
fn analytic_extension_of_sech() {
    let g = SpectralGrid::new(20.0 * PI, 2048).unwrap();
    let f = Field::from_fn(&g, sech).unwrap();
    let cfg = FitConfig::default();
    let at0 = evaluate_analytic_extension(&f, 0.0, 0, 0.1, &cfg);
    for (a, b) in at0.magnitudes.samples().iter().zip(f.samples()) {
        assert!((a - b).abs() < 1e-12);
    }
    // |sech(x + iy)| peaks at x = 0 with value 1/cos y.
    let ext = evaluate_analytic_extension(&f, 1.0, 0, 0.1, &cfg);
    assert!(!ext.warning);
    let exact = 1.0 / 1f64.cos();
    assert!((ext.max() - exact).abs() < 1e-6 * exact, "{} vs {exact}", ext.max());
    let sups: Vec<f64> = [1.2, 1.4, 1.5]
        .iter()
        .map(|&y| evaluate_analytic_extension(&f, y, 0, 0.0, &cfg).max())
        .collect();
    assert!(sups[0] < sups[1] && sups[1] < sups[2]);
    assert!(evaluate_analytic_extension(&f, 1.6, 0, 0.0, &cfg).warning);
}

#[test]
fn extension_of_derivative_matches_closed_form() {
    // d/dz sech z = -sech z tanh z at z = x + 0.5i.
    let g = SpectralGrid::new(20.0 * PI, 2048).unwrap();
    let f = Field::from_fn(&g, sech).unwrap();
    let y = 0.5;
    let ext = evaluate_analytic_extension(&f, y, 1, 0.1, &FitConfig::default());
    for (i, x) in g.points().into_iter().enumerate().step_by(101) {
        let z = Complex64::new(x, y);
        let d = -(1.0 / z.cosh()) * z.tanh();
        assert!((ext.magnitudes.samples()[i] - d.norm()).abs() < 1e-9);
    }
}

#[test]
fn strip_bound_constants_grow_toward_the_radius() {
    let g = SpectralGrid::new(20.0 * PI, 1024).unwrap();
    let f = Field::from_fn(&g, sech).unwrap();
    let cfg = FitConfig::default();
    let rho = estimate_radius(&f, &cfg).rho_hat;
    let cs: Vec<f64> = [0.2, 0.6, 1.0]
        .iter()
        .map(|&y| strip_bound_ratio(&f, y, 0, rho - 0.1, &cfg).unwrap())
        .collect();
    assert!(cs.iter().all(|c| c.is_finite() && *c > 0.0));
    assert!(cs[0] < cs[1] && cs[1] < cs[2]);
}

#[test]
fn band_limited_data_hit_the_noise_floor() {
    let g = SpectralGrid::new(PI, 128).unwrap();
    let s = SpectralField::from_fn(&g, |z| {
        Complex64::new(if z.abs() <= 3.0 { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    let f = Field::new(g.clone(), inverse_complex(&s).iter().map(|c| c.re).collect()).unwrap();
    let r = estimate_radius(&f, &FitConfig::default());
    assert!(r.noise_floor_hit && r.rho_hat.is_nan());
}

#[test]
fn decay_fit_recovers_power_laws() {
    let series: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 3.0 * (i as f64).powi(-2))).collect();
    let fit = fit_decay_exponent(&series, 1.0).unwrap();
    assert!((fit.k_fit - 3.0).abs() < 1e-10 && (fit.alpha_fit - 2.0).abs() < 1e-10);
    let flat: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 0.4)).collect();
    assert!(fit_decay_exponent(&flat, 1.0).unwrap().alpha_fit.abs() < 1e-12);
    assert!(fit_decay_exponent(&series, 0.5).is_err());
    assert!(fit_decay_exponent(&series[..5], 1.0).is_err());
    let mut bad = series.clone();
    bad[3].1 = 0.0;
    assert!(fit_decay_exponent(&bad, 1.0).is_err());
}

#[test]
fn trajectory_tracks_radius_per_snapshot() {
    let g = SpectralGrid::new(20.0 * PI, 512).unwrap();
    let u = soliton_p1(&g, 1.0, 0.0).unwrap();
    let s = CoupledState::new(0.0, u.clone(), u).unwrap();
    let cfg = SolverConfig { t_end: 0.5, dt: 5e-3, record_stride: 20, ..SolverConfig::default() };
    let traj = simulate(&s, &cfg).unwrap();
    let series = track_radius(&traj);
    assert_eq!(series.len(), 6);
    for (_, r) in &series {
        assert!((r.rho_hat - PI / 2.0).abs() < 0.05 * PI / 2.0);
    }
    assert_eq!(traj.termination, Termination::Completed);
}
