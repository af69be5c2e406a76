use std::f64::consts::PI;

use gkdv_core::estimate_lab::*;
use gkdv_core::*;
use num_complex::Complex64;

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Bourgain norm of `c e^{iAx} g(t)` where the spatial coefficient at `A`
/// is `2L/√(2π)` (plane waves are exact grid modes) and the time transform
/// is a direct sum.
fn plane_wave_norm(a: f64, amp: f64, g: impl Fn(f64) -> f64, t0: f64, dt: f64, m: usize, p: &NormParams) -> f64 {
    let half = PI;
    let space = amp * 2.0 * half / (2.0 * PI).sqrt();
    let deta = 2.0 * PI / (m as f64 * dt);
    let weight = (p.rho * (1.0 + a.abs())).exp() * (1.0 + a.abs()).powf(p.s);
    let mut acc = 0.0;
    for l in 0..m {
        let li = if l < m / 2 { l as f64 } else { l as f64 - m as f64 };
        let eta = li * deta;
        let mut time = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let t = t0 + j as f64 * dt;
            time += g(t) * Complex64::from_polar(1.0, -eta * t);
        }
        let time = time * dt / (2.0 * PI).sqrt();
        let w = weight * (1.0 + (eta - a * a * a).abs()).powf(p.b);
        acc += (w * space * time.norm()).powi(2);
    }
    // dζ = π/L = 1 on this grid.
    (acc * deta).sqrt()
}

#[test]
fn multilinear_ratio_of_plane_waves() {
    let grid = SpectralGrid::new(PI, 32).unwrap();
    let (t0, dt, m) = (-2.0, 1.0 / 32.0, 128);
    let modes = [1.0, 2.0, -1.0];
    let samples: Vec<SpaceTimeSample> = modes
        .iter()
        .map(|&a| {
            SpaceTimeSample::from_fn(&grid, t0, dt, m, |x, t| Complex64::from_polar(bump(t), a * x)).unwrap()
        })
        .collect();
    let refs: Vec<&SpaceTimeSample> = samples.iter().collect();
    for params in [NormParams::new(0.0, 1.0, 0.6).unwrap(), NormParams::new(0.3, 2.0, 0.55).unwrap()] {
        let b_prime = -0.3;
        let got = multilinear_ratio(&refs, &params, b_prime).unwrap();
        let total: f64 = modes.iter().sum();
        // ∂x of the product is iA e^{iAx} bump³.
        let lhs = plane_wave_norm(total, total.abs(), |t| bump(t).powi(3), t0, dt, m, &params.with_b(b_prime));
        let rhs: f64 = modes
            .iter()
            .map(|&a| plane_wave_norm(a, 1.0, bump, t0, dt, m, &params))
            .product();
        let want = lhs / rhs;
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }
}

#[test]
fn bourgain_norm_of_plane_wave_matches_direct_sum() {
    let grid = SpectralGrid::new(PI, 16).unwrap();
    let (t0, dt, m) = (-2.0, 1.0 / 32.0, 128);
    let params = NormParams::new(0.5, 1.5, 0.7).unwrap();
    for a in [-3.0, 0.0, 5.0] {
        let w = SpaceTimeSample::from_fn(&grid, t0, dt, m, |x, t| Complex64::from_polar(bump(t), a * x)).unwrap();
        let got = gkdv_core::function_spaces::bourgain_norm_unwindowed(&w, &params).unwrap();
        let want = plane_wave_norm(a, 1.0, bump, t0, dt, m, &params);
        assert!((got - want).abs() < 1e-10 * want, "{a}: {got} vs {want}");
    }
}

#[test]
fn exponential_lemmas_hold_on_the_default_grid() {
    let grid = default_lemma_grid();
    let table = check_exponential_lemmas(&grid);
    assert_eq!(table.bound_checked, 81 * 20_001);
    assert_eq!(table.split_checked, 81 * 81usize.pow(3));
    assert!(table.passed(), "{:?} {:?}", &table.bound_failures[..table.bound_failures.len().min(5)], &table.split_failures[..table.split_failures.len().min(5)]);
}

#[test]
fn bound_lemma_is_tight_near_the_transition() {
    // With ρ(1+|ζ|) = 1 the left side equals e exactly.
    for rho in [0.01, 0.1, 0.5, 1.0] {
        let zeta = 1.0 / rho - 1.0;
        assert!(exponential_bound_holds(rho, zeta));
    }
}

#[test]
fn reports_serialize_and_reproduce() {
    let lab = LabConfig { ensemble_size: 8, num_points: 32, ..LabConfig::default() };
    let params = NormParams::new(0.2, 1.0, 0.6).unwrap();
    let a = check_embedding(&lab, &params, 1.0).unwrap();
    let json = serde_json::to_string(&a).unwrap();
    let back: EstimateReport = serde_json::from_str(&json).unwrap();
    assert_eq!(a, back);
    assert!(json.contains("\"embedding\""));
    let b = check_embedding(&LabConfig { master_seed: 1000, ..lab }, &params, 1.0).unwrap();
    assert_ne!(a.max_ratio, b.max_ratio);
}

#[test]
fn strichartz_below_threshold_is_rejected() {
    let lab = LabConfig { ensemble_size: 2, num_points: 32, ..LabConfig::default() };
    let r = check_strichartz(&lab, StrichartzVariant::L4L2, 0.2, 2.0, 1.0);
    assert!(matches!(r, Err(Error::ThresholdViolation(_))));
}
