mod common;

use std::f64::consts::PI;

use common::*;
use lln_core::fields::{GridSpec, Spectral};
use lln_core::geometry::{Chart, CoriolisPreset, PotentialData, ScalarPreset, TrigMode};
use lln_core::gravity::*;
use proptest::prelude::*;
use rand::Rng;

fn blob(g: &GridSpec, c: [f64; 3], sigma: f64, mass: f64) -> Vec<f64> {
    let norm = mass / (2.0 * PI * sigma * sigma).powf(1.5);
    g.sample(|x| {
        let r2: f64 = (0..3).map(|a| (x[a] - c[a]).powi(2)).sum();
        norm * (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

fn max_abs_r(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn periodic_solve_inverts_laplacian_on_random_density() {
    let g = grid(16, 6.0);
    let sp = Spectral::get(&g);
    let mut r = rng(5);
    let rho: Vec<f64> = (0..g.len()).map(|_| r.random_range(0.0..2.0)).collect();
    let gn = 0.8;
    let sol = poisson_periodic(&g, &rho, gn).unwrap();
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    assert!((sol.background - mean).abs() < 1e-14);
    let lap = sp.laplacian_real(&sol.u);
    let res = lap.iter().zip(&rho).map(|(l, p)| (l - 4.0 * PI * gn * (p - mean)).abs()).fold(0.0, f64::max);
    assert!(res < 1e-10, "{res:e}");
    assert!(sol.u.iter().sum::<f64>().abs() / (g.len() as f64) < 1e-12);
    assert_eq!(sol.solver, PoissonKind::Periodic);
}

#[test]
fn periodic_solve_of_laplacian_is_identity_on_mean_free_fields() {
    let g = grid(12, 4.0);
    let sp = Spectral::get(&g);
    let mut r = rng(6);
    let mut u: Vec<f64> = (0..g.len()).map(|_| r.random_range(-1.0..1.0)).collect();
    let m = u.iter().sum::<f64>() / u.len() as f64;
    u.iter_mut().for_each(|v| *v -= m);
    let gn = 1.3;
    // ΔU = 4πGρ  ⇒  ρ = ΔU/(4πG)
    let rho: Vec<f64> = sp.laplacian_real(&u).iter().map(|v| v / (4.0 * PI * gn)).collect();
    let back = poisson_periodic(&g, &rho, gn).unwrap().u;
    let err = back.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn isolated_matches_periodic_on_the_support_after_mean_shift() {
    let (sigma, gn) = (0.5, 1.0);
    let g = grid(48, 20.0);
    let rho = blob(&g, [0.0; 3], sigma, 1.0);
    let iso = poisson_isolated(&g, &rho, gn).unwrap().u;
    let per = poisson_periodic(&g, &rho, gn).unwrap().u;
    let inside: Vec<usize> = (0..g.len()).filter(|&i| g.position(i).iter().map(|v| v * v).sum::<f64>() < 9.0 * sigma * sigma).collect();
    let shift = inside.iter().map(|&i| iso[i] - per[i]).sum::<f64>() / inside.len() as f64;
    let err = inside.iter().map(|&i| (iso[i] - per[i] - shift).abs()).fold(0.0, f64::max);
    let scale = max_abs_r(&iso);
    assert!(err < 1e-3 * scale, "{:e}", err / scale);
}

#[test]
fn isolated_two_blob_superposition() {
    let g = grid(24, 12.0);
    let a = blob(&g, [-1.5, 0.3, 0.0], 0.6, 1.0);
    let b = blob(&g, [1.5, -0.2, 0.4], 0.6, 1.0);
    let both: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let (ua, ub, uab) = (
        poisson_isolated(&g, &a, 1.0).unwrap().u,
        poisson_isolated(&g, &b, 1.0).unwrap().u,
        poisson_isolated(&g, &both, 1.0).unwrap().u,
    );
    let scale = max_abs_r(&uab);
    let err = (0..g.len()).map(|i| (uab[i] - ua[i] - ub[i]).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10 * scale, "{err:e}");
    // attractive everywhere
    assert!(uab.iter().all(|v| *v < 0.0));
}

#[test]
fn isolated_far_field_is_point_mass_at_quarter_box() {
    let (l, gn, mass) = (16.0, 1.0, 1.0);
    let g = grid(32, l);
    let rho = blob(&g, [0.0; 3], 0.5, mass);
    let sol = poisson_isolated(&g, &rho, gn).unwrap();
    assert!(!sol.locality_warning);
    assert_eq!(sol.solver, PoissonKind::Isolated);
    let r = l / 4.0;
    // node on the x¹ axis at r = L/4
    let j = g.n / 2 + g.n / 4;
    let i = g.index(j, g.n / 2, g.n / 2);
    assert!((g.position(i)[0] - r).abs() < 1e-12);
    let want = -gn * mass / r;
    assert!(((sol.u[i] - want) / want).abs() < 1e-3);
}

#[test]
fn isolated_zero_density_and_locality_flag() {
    let g = grid(16, 8.0);
    let sol = poisson_isolated(&g, &vec![0.0; g.len()], 1.0).unwrap();
    assert!(sol.u.iter().all(|v| *v == 0.0));
    let wide = blob(&g, [0.0; 3], 2.5, 1.0);
    assert!(poisson_isolated(&g, &wide, 1.0).unwrap().locality_warning);
}

#[test]
fn solver_dispatch_and_grid_mismatch() {
    let g = grid(8, 4.0);
    let rho = blob(&g, [0.0; 3], 0.8, 1.0);
    let s = PoissonSolver { kind: PoissonKind::Periodic, g_newton: 2.0 };
    assert_eq!(s.solve(&g, &rho).unwrap().u, poisson_periodic(&g, &rho, 2.0).unwrap().u);
    assert!(poisson_periodic(&g, &rho[1..], 1.0).is_err());
    assert!(poisson_isolated(&g, &rho[1..], 1.0).is_err());
}

/// Curl of ϖ by fourth-order central differences of point evaluations.
fn fd_curl(p: &PotentialData, x: [f64; 3], h: f64) -> [f64; 3] {
    let d = |comp: usize, axis: usize| {
        let at = |s: f64| {
            let mut y = x;
            y[axis] += s;
            p.point(y, 0.0).unwrap().varpi[comp]
        };
        (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
    };
    [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
}

#[test]
fn uniform_preset_has_constant_curl() {
    let g = grid(8, 4.0);
    let omega0 = 0.7;
    let preset = CoriolisPreset::Uniform { omega0 };
    let s = coriolis_preset(&preset, &g).unwrap();
    assert_eq!(s.masked, 0);
    let c = s.potential.curl_varpi();
    for i in 0..g.len() {
        assert!(c[0][i].abs() < 1e-12 && c[1][i].abs() < 1e-12 && (c[2][i] - omega0).abs() < 1e-12);
        let x = g.position(i);
        assert!((s.potential.varpi[0][i] + 0.5 * omega0 * x[1]).abs() < 1e-14);
        assert!((s.potential.varpi[1][i] - 0.5 * omega0 * x[0]).abs() < 1e-14);
    }
    let p = PotentialData::analytic(ScalarPreset::zero(), preset);
    let fd = fd_curl(&p, [0.3, -0.7, 1.1], 1e-2);
    assert!((fd[2] - omega0).abs() < 1e-12 && fd[0].abs() < 1e-12);
}

#[test]
fn gradient_preset_is_curl_free_spectrally() {
    let g = grid(16, 6.0);
    let k = 2.0 * PI / 6.0;
    let theta = ScalarPreset {
        offset: 0.0,
        gradient: [0.0; 3],
        modes: vec![
            TrigMode { amplitude: 0.4, k: [k, -2.0 * k, 0.0], omega: 0.0, phase: 0.3 },
            TrigMode { amplitude: -0.2, k: [0.0, k, 3.0 * k], omega: 0.0, phase: 1.1 },
        ],
    };
    let s = coriolis_preset(&CoriolisPreset::Gradient { theta }, &g).unwrap();
    let sp = Spectral::get(&g);
    let v = &s.potential.varpi;
    let curl = sp.curl_real([&v[0], &v[1], &v[2]]);
    assert!(curl.iter().flatten().all(|c| c.abs() < 1e-12));
    assert!(s.potential.curl_varpi().iter().flatten().all(|c| c.abs() < 1e-12));
    // ϖ itself is far from trivial
    let div = sp.divergence_real([&v[0], &v[1], &v[2]]);
    assert!(div.iter().any(|d| d.abs() > 1e-3));
}

#[test]
fn taubnut_presets_mask_the_string_and_carry_monopole_curvature() {
    let g = grid(16, 8.0);
    for (chart, sign) in [(Chart::Minus, -1.0), (Chart::Plus, 1.0)] {
        let preset = CoriolisPreset::Taubnut { a: 1.0, chart, r_cut: None };
        let s = coriolis_preset(&preset, &g).unwrap();
        let mask = s.potential.mask.as_ref().unwrap();
        assert_eq!(s.masked, mask.iter().filter(|m| **m).count());
        assert!(s.masked > 0);
        let rc = 2.0 * g.dx();
        for i in 0..g.len() {
            let x = g.position(i);
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let r = (rho * rho + x[2] * x[2]).sqrt();
            let expect = r < rc || (sign * x[2] >= 0.0 && rho < rc);
            assert_eq!(mask[i], expect, "{x:?}");
        }
        // the opposite half-axis is regular: nodes there are kept
        let i = g.index(g.n / 2, g.n / 2, if sign < 0.0 { g.n - 2 } else { 2 });
        assert!(!mask[i]);

        let p = PotentialData::analytic(ScalarPreset::zero(), preset);
        for x in [[1.2, -0.4, 0.9], [-0.7, 1.5, -1.1], [2.0, 0.5, -0.3]] {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let c = fd_curl(&p, x, 1e-3);
            let n2: f64 = c.iter().map(|v| v * v).sum();
            assert!((n2 - 4.0 / (r2 * r2)).abs() < 1e-6, "{x:?}: {n2} vs {}", 4.0 / (r2 * r2));
            // Ω is radial: the curl of the monopole field is zero off the origin
            let om = |y: [f64; 3]| {
                let d = p.point(y, 0.0).unwrap().derivs.unwrap();
                let j = d.jac_varpi;
                [j[1][2] - j[2][1], j[2][0] - j[0][2], j[0][1] - j[1][0]]
            };
            let h = 1e-3;
            let dom = |comp: usize, axis: usize| {
                let (mut a, mut b) = (x, x);
                a[axis] += h;
                b[axis] -= h;
                (om(a)[comp] - om(b)[comp]) / (2.0 * h)
            };
            let curl_om = [dom(2, 1) - dom(1, 2), dom(0, 2) - dom(2, 0), dom(1, 0) - dom(0, 1)];
            assert!(curl_om.iter().all(|v| v.abs() < 1e-6), "{curl_om:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn periodic_single_modes_invert_exactly(m in prop::array::uniform3(-3i64..=3), l in 2.0..12.0f64, gn in 0.1..5.0f64) {
        prop_assume!(m != [0, 0, 0]);
        let g = grid(8, l);
        let k: [f64; 3] = m.map(|v| v as f64 * 2.0 * PI / l);
        let k2: f64 = k.iter().map(|v| v * v).sum();
        let rho: Vec<f64> = g.sample(|x| (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).cos());
        let u = poisson_periodic(&g, &rho, gn).unwrap().u;
        for i in 0..g.len() {
            prop_assert!((u[i] + 4.0 * PI * gn * rho[i] / k2).abs() < 1e-12 * (1.0 + 4.0 * PI * gn / k2));
        }
    }

    #[test]
    fn isolated_solve_is_linear(s1 in 0.3..2.0f64, s2 in -2.0..2.0f64, seed in any::<u64>()) {
        let g = grid(8, 6.0);
        let mut r = rng(seed);
        let a: Vec<f64> = (0..g.len()).map(|_| r.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..g.len()).map(|_| r.random_range(0.0..1.0)).collect();
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| s1 * x + s2 * y).collect();
        let (ua, ub, um) = (
            poisson_isolated(&g, &a, 1.0).unwrap().u,
            poisson_isolated(&g, &b, 1.0).unwrap().u,
            poisson_isolated(&g, &mix, 1.0).unwrap().u,
        );
        let scale = max_abs_r(&um).max(1.0);
        for i in 0..g.len() {
            prop_assert!((um[i] - s1 * ua[i] - s2 * ub[i]).abs() < 1e-10 * scale);
        }
    }
}
