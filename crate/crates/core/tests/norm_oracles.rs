use std::f64::consts::PI;

use gkdv_core::evolution::propagate_spectral;
use gkdv_core::function_spaces::{
    apply_fkappa, bourgain_norm_unwindowed, gevrey_weight, space_time_transform,
};
use gkdv_core::spectral::inverse_complex;
use gkdv_core::*;
use num_complex::Complex64;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `Σ w(ζ_k)² |û(ζ_k)|² Δζ` with the closed-form transform of sech.
fn gevrey_closed_form(grid: &SpectralGrid, rho: f64, s: f64) -> f64 {
    grid.wavenumbers()
        .iter()
        .map(|&z| {
            let w = (rho * (1.0 + z.abs())).exp() * (1.0 + z.abs()).powf(s);
            let u = (PI / 2.0).sqrt() * sech(PI * z / 2.0);
            w * w * u * u
        })
        .sum::<f64>()
        .sqrt()
        * grid.dk().sqrt()
}

/// Continuous integral by composite Simpson on `[0, 80]`, doubled.
fn gevrey_integral(rho: f64, s: f64) -> f64 {
    let n = 200_000;
    let h = 80.0 / n as f64;
    let f = |z: f64| {
        let w = (rho * (1.0 + z)).exp() * (1.0 + z).powf(s);
        w * w * (PI / 2.0) * sech(PI * z / 2.0).powi(2)
    };
    let sum: f64 = (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            c * f(i as f64 * h)
        })
        .sum();
    (2.0 * sum * h / 3.0).sqrt()
}

#[test]
fn gevrey_norm_of_sech() {
    let g = SpectralGrid::new(20.0 * PI, 1024).unwrap();
    let f = Field::from_fn(&g, sech).unwrap();
    // At ρ = 1 the weight amplifies coefficient roundoff near ζ = 25 by ~1e14.
    for (rho, s, tol) in [(0.0, 0.0, 1e-12), (0.0, 2.0, 1e-12), (0.5, 1.0, 1e-10), (1.0, 2.0, 1e-5)] {
        let got = gevrey_norm(&f, &NormParams::new(rho, s, 0.0).unwrap()).unwrap();
        let discrete = gevrey_closed_form(&g, rho, s);
        assert!((got - discrete).abs() < tol * discrete, "{rho} {s} {got} {discrete}");
        // The lattice sum approximates the integral up to the kink of |ζ| at 0.
        let cont = gevrey_integral(rho, s);
        assert!((got - cont).abs() < 2e-3 * cont, "{rho} {s}: {got} vs {cont} discrete {discrete}");
    }
    // ρ = s = 0 is the L² norm, ∫sech² = 2.
    let l2 = sobolev_norm(&f, 0.0).unwrap();
    assert!((l2 - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn gevrey_weight_formula() {
    let w = gevrey_weight(-3.0, 0.5, 2.0).unwrap();
    assert!((w - 2f64.exp() * 16.0).abs() < 1e-12);
}

fn layout(t: f64, tau: f64) -> (f64, f64, usize) {
    (-2.0 * t, tau, (4.0 * t / tau).round() as usize)
}

#[test]
fn bourgain_with_b_zero_is_time_integrated_gevrey() {
    let g = SpectralGrid::new(PI, 32).unwrap();
    let (t0, dt, m) = layout(1.0, 1.0 / 64.0);
    let cut = CutoffProfile::new(1.0).unwrap();
    let w = SpaceTimeSample::from_fn(&g, t0, dt, m, |x, t| {
        Complex64::new(cut.eval(t) * ((2.0 * x).cos() + (t * 3.0).sin() * x.sin()), 0.0)
    })
    .unwrap();
    let params = NormParams::new(0.3, 1.5, 0.0).unwrap();
    let got = bourgain_norm_unwindowed(&w, &params).unwrap();
    let mut acc = 0.0;
    for j in 0..m {
        acc += gevrey_norm(&w.field_at(j), &params).unwrap().powi(2) * dt;
    }
    assert!((got - acc.sqrt()).abs() < 1e-12 * got);
}

#[test]
fn bourgain_of_free_solution_factorizes() {
    // ψ_T(t) W(t)u₀ has space-time transform û₀(ζ) ψ̂_T(η - ζ³), so its
    // norm is ‖u₀‖_{G_{ρ,s}} ‖ψ_T‖_{H^b_t}. The time transform is done here
    // by direct summation.
    let g = SpectralGrid::new(2.0 * PI, 32).unwrap();
    let t = 1.0;
    let (t0, dt, m) = layout(t, 1.0 / 64.0);
    let u0 = Field::from_fn(&g, |x| x.cos() + 0.5 * (2.0 * x).sin() - 0.2 * (5.0 * x).cos()).unwrap();
    let spec = forward_transform(&u0).unwrap();
    let cut = CutoffProfile::new(t).unwrap();
    let mut values = Vec::new();
    for j in 0..m {
        let tj = t0 + j as f64 * dt;
        let row = inverse_complex(&propagate_spectral(&spec, tj));
        values.extend(row.into_iter().map(|c| Complex64::new(c.re * cut.eval(tj), 0.0)));
    }
    let w = SpaceTimeSample::new(g.clone(), t0, dt, m, values).unwrap();
    let b = 0.55;
    let params = NormParams::new(0.2, 1.0, b).unwrap();
    let got = bourgain_norm_unwindowed(&w, &params).unwrap();

    let deta = 2.0 * PI / (m as f64 * dt);
    let psi_hat = |omega: f64| -> Complex64 {
        (0..m)
            .map(|j| {
                let tj = t0 + j as f64 * dt;
                cut.eval(tj) * Complex64::from_polar(1.0, -omega * tj)
            })
            .sum::<Complex64>()
            * dt
            / (2.0 * PI).sqrt()
    };
    let mut expect2 = 0.0;
    let ny = g.nyquist_index();
    for (k, (c, &z)) in spec.coeffs().iter().zip(g.wavenumbers()).enumerate() {
        if k == ny {
            continue;
        }
        let gw = gevrey_weight(z, params.rho, params.s).unwrap();
        let mut time_part = 0.0;
        for l in 0..m {
            let li = if l < m / 2 { l as f64 } else { l as f64 - m as f64 };
            let omega = li * deta - z * z * z;
            time_part += (1.0 + omega.abs()).powf(2.0 * b) * psi_hat(omega).norm_sqr() * deta;
        }
        expect2 += gw * gw * c.norm_sqr() * g.dk() * time_part;
    }
    let expect = expect2.sqrt();
    assert!((got - expect).abs() < 1e-10 * expect, "{got} vs {expect}");
}

#[test]
fn fkappa_is_identity_on_the_dispersion_curve_scale() {
    // F_0 is the identity.
    let g = SpectralGrid::new(PI, 16).unwrap();
    let w = SpaceTimeSample::from_fn(&g, 0.0, 0.125, 16, |x, t| {
        Complex64::new(x.sin() * (2.0 * PI * t / 2.0).cos(), 0.0)
    })
    .unwrap();
    let out = apply_fkappa(&w, 0.0);
    for (a, b) in out.values().iter().zip(w.values()) {
        assert!((a - b).norm() < 1e-13);
    }
    let spec = space_time_transform(&w);
    assert!((spec.l2_norm() - mixed_norm(&w, 2.0, 2.0).unwrap()).abs() < 1e-12);
}

#[test]
fn mixed_norm_of_separable_function() {
    // |f(x) g(t)| with f = 1 + cos x, g = 2 + sin(πt): the mixed norm factorizes.
    let g = SpectralGrid::new(PI, 64).unwrap();
    let (t0, dt, m) = (0.0, 1.0 / 32.0, 64);
    let w = SpaceTimeSample::from_fn(&g, t0, dt, m, |x, t| {
        Complex64::new((1.0 + x.cos()) * (2.0 + (PI * t).sin()), 0.0)
    })
    .unwrap();
    let xs = g.points();
    let fx: Vec<f64> = xs.iter().map(|x| 1.0 + x.cos()).collect();
    let gt: Vec<f64> = (0..m).map(|j| 2.0 + (PI * (t0 + j as f64 * dt)).sin()).collect();
    let lp = |v: &[f64], p: f64, h: f64| -> f64 {
        if p.is_infinite() {
            v.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
        } else {
            (v.iter().map(|a| a.abs().powf(p)).sum::<f64>() * h).powf(1.0 / p)
        }
    };
    for (p, q) in [(2.0, 2.0), (4.0, 2.0), (f64::INFINITY, 2.0), (2.0, f64::INFINITY), (4.0, 4.0)] {
        let expect = lp(&fx, p, g.dx()) * lp(&gt, q, dt);
        let got = mixed_norm(&w, p, q).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect, "({p},{q})");
    }
}
