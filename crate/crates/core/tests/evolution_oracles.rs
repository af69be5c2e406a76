use std::f64::consts::PI;

use gkdv_core::diagnostics::DiagnosticsConfig;
use gkdv_core::evolution::soliton_p1;
use gkdv_core::*;

fn keep_states() -> DiagnosticsConfig {
    DiagnosticsConfig {
        keep_states: true,
        ..DiagnosticsConfig::default()
    }
}

fn l2_diff(a: &Field, b: &Field) -> f64 {
    let s: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).powi(2)).sum();
    (s * a.grid().dx()).sqrt()
}

fn final_state(initial: &CoupledState, cfg: &SolverConfig) -> CoupledState {
    let cfg = SolverConfig {
        diagnostics: keep_states(),
        record_stride: usize::MAX,
        ..cfg.clone()
    };
    simulate(initial, &cfg).unwrap().states.pop().unwrap()
}

#[test]
fn soliton_travels_at_speed_c() {
    // √(2c) sech(√c(x - ct)) solves -cφ + φ'' + φ³ = 0 after one integration.
    let g = SpectralGrid::new(20.0 * PI, 512).unwrap();
    for c in [0.5, 1.0] {
        let u = soliton_p1(&g, c, -5.0).unwrap();
        let s = CoupledState::new(0.0, u.clone(), u).unwrap();
        let cfg = SolverConfig { t_end: 2.0, dt: 2e-3, ..SolverConfig::default() };
        let end = final_state(&s, &cfg);
        let exact = soliton_p1(&g, c, -5.0 + 2.0 * c).unwrap();
        assert!(l2_diff(&end.u, &exact) < 1e-6, "c = {c}: {}", l2_diff(&end.u, &exact));
        assert!(l2_diff(&end.v, &exact) < 1e-6);
    }
}

fn smooth_pair(g: &SpectralGrid) -> CoupledState {
    let u = Field::from_fn(g, |x| 0.8 * (-((x - 1.0) / 2.0).powi(2)).exp()).unwrap();
    let v = Field::from_fn(g, |x| 0.6 / ((x + 0.5) / 2.0).cosh()).unwrap();
    CoupledState::new(0.0, u, v).unwrap()
}

fn convergence_ratio(scheme: Scheme, p: u32) -> f64 {
    let g = SpectralGrid::new(30.0, 192).unwrap();
    let s = smooth_pair(&g);
    let run = |dt: f64| {
        let cfg = SolverConfig { t_end: 0.5, dt, scheme, p, padding_ratio: (p + 1) as f64, ..SolverConfig::default() };
        final_state(&s, &cfg)
    };
    let reference = run(1.25e-4);
    let e: Vec<f64> = [4e-3, 2e-3].iter().map(|&dt| l2_diff(&run(dt).u, &reference.u)).collect();
    e[0] / e[1]
}

#[test]
fn if_rk4_is_fourth_order() {
    for p in [1, 2] {
        let r = convergence_ratio(Scheme::IfRk4, p);
        assert!((12.0..20.0).contains(&r), "p = {p}: ratio {r}");
    }
}

#[test]
fn strang_is_second_order() {
    let r = convergence_ratio(Scheme::Strang, 1);
    assert!((3.0..5.0).contains(&r), "ratio {r}");
}

#[test]
fn equal_components_stay_equal() {
    let g = SpectralGrid::new(10.0, 128).unwrap();
    let u = Field::from_fn(&g, |x| 0.7 * (-(x * x)).exp()).unwrap();
    let s = CoupledState::new(0.0, u.clone(), u).unwrap();
    for p in [1, 2] {
        let cfg = SolverConfig { t_end: 0.3, dt: 1e-3, p, ..SolverConfig::default() };
        let end = final_state(&s, &cfg);
        assert_eq!(end.u, end.v);
    }
}

#[test]
fn swapping_components_commutes_with_the_flow() {
    let g = SpectralGrid::new(30.0, 192).unwrap();
    let s = smooth_pair(&g);
    let swapped = CoupledState::new(0.0, s.v.clone(), s.u.clone()).unwrap();
    let cfg = SolverConfig { t_end: 0.2, dt: 1e-3, p: 2, padding_ratio: 3.0, ..SolverConfig::default() };
    let a = final_state(&s, &cfg);
    let b = final_state(&swapped, &cfg);
    assert!(l2_diff(&a.u, &b.v) < 1e-13);
    assert!(l2_diff(&a.v, &b.u) < 1e-13);
}

#[test]
fn time_reversal_returns_to_initial_data() {
    let g = SpectralGrid::new(30.0, 192).unwrap();
    let s = smooth_pair(&g);
    let cfg = SolverConfig { t_end: 0.5, dt: 1e-3, ..SolverConfig::default() };
    let fwd = final_state(&s, &cfg);
    let sym = SolverConfig { diagnostics: keep_states(), record_stride: usize::MAX, ..cfg };
    let traj = gkdv_core::evolution::simulate_symmetric(&fwd, &sym).unwrap();
    let back = &traj.states[0];
    assert!(back.t.abs() < 1e-12);
    assert!(l2_diff(&back.u, &s.u) < 1e-10);
}

#[test]
fn rhs_matches_direct_formula() {
    // -∂x(u v²) for u = cos x, v = sin x is -∂x(cos x sin² x).
    let g = SpectralGrid::new(PI, 32).unwrap();
    let u = Field::from_fn(&g, f64::cos).unwrap();
    let v = Field::from_fn(&g, f64::sin).unwrap();
    let (fu, fv) = nonlinear_rhs(&CoupledState::new(0.0, u, v).unwrap(), 1).unwrap();
    for (i, x) in g.points().into_iter().enumerate() {
        let d_uv2 = -x.sin().powi(3) + 2.0 * x.cos().powi(2) * x.sin();
        let d_u2v = -2.0 * x.cos() * x.sin().powi(2) + x.cos().powi(3);
        assert!((fu.samples()[i] + d_uv2).abs() < 1e-13);
        assert!((fv.samples()[i] + d_u2v).abs() < 1e-13);
    }
}

#[test]
fn picard_matches_runge_kutta_on_a_short_window() {
    let g = SpectralGrid::new(30.0, 192).unwrap();
    let s = smooth_pair(&g);
    let cfg = PicardConfig { window: 0.05, ..PicardConfig::default() };
    let out = picard_solve(&s, &cfg, 1).unwrap();
    assert!(out.contraction_factors.iter().all(|&f| f < 0.5));
    let times = cfg.node_times();
    let scfg = SolverConfig {
        t_end: cfg.window,
        dt: times[1] - times[0],
        record_stride: 1,
        diagnostics: keep_states(),
        ..SolverConfig::default()
    };
    let reference = simulate(&s, &scfg).unwrap();
    let worst = out
        .trajectory
        .iter()
        .zip(&reference.states)
        .map(|(a, b)| l2_diff(&a.u, &b.u).max(l2_diff(&a.v, &b.v)))
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn picard_first_iterate_is_free_evolution_plus_trapezoid() {
    // One iteration with max_iters = 1 fails, but the first increment is
    // the size of the Duhamel term of the free evolution, which for tiny
    // data is quadratically small.
    let g = SpectralGrid::new(10.0, 64).unwrap();
    let u = Field::from_fn(&g, |x| 1e-3 * (-(x * x)).exp()).unwrap();
    let s = CoupledState::new(0.0, u.clone(), u).unwrap();
    let cfg = PicardConfig { window: 0.05, ..PicardConfig::default() };
    let out = picard_solve(&s, &cfg, 1).unwrap();
    // ‖Δ₁‖ ≈ T · ‖∂x(u³)‖_{H²} ~ 0.05 · 1e-9 · O(10).
    assert!(out.increments[0] < 1e-8, "{}", out.increments[0]);
    assert!(out.iterations <= 3);
}

#[test]
fn nonlinearity_off_is_exact_free_flow() {
    let g = SpectralGrid::new(30.0, 192).unwrap();
    let s = smooth_pair(&g);
    let cfg = SolverConfig { t_end: 1.0, dt: 0.01, nonlinear: false, ..SolverConfig::default() };
    let end = final_state(&s, &cfg);
    let exact = free_propagate(&s, 1.0);
    assert!(l2_diff(&end.u, &exact.u) < 1e-12);
}
