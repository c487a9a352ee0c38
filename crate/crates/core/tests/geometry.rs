mod common;

use std::f64::consts::PI;

use common::*;
use lln_core::evolve::chi_from_phi;
use lln_core::fields::GridSpec;
use lln_core::geometry::pauli::{max_abs4, Mat4};
use lln_core::geometry::*;
use lln_core::gravity::poisson_periodic;
use lln_core::sngroup::LieParams;
use lln_core::C64;
use nalgebra::SMatrix;
use proptest::prelude::*;
use rand::Rng;

fn random_point(r: &mut impl Rng) -> (f64, [f64; 3]) {
    let u = r.random_range(-5.0..5.0);
    let w = [0; 3].map(|_: i32| r.random_range(-2.0..2.0));
    (u, w)
}

#[test]
fn clifford_closure_on_random_samples() {
    let mut r = rng(20240601);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (u, w) = random_point(&mut r);
        let gs = GammaSet::from_potentials(u, w);
        let mb = MetricBlock::from_potentials(u, w);
        worst = worst.max(clifford_residual(&gs, &mb));
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn clifford_residual_oracle_loops_all_pairs() {
    // independent re-evaluation of both index positions
    let (u, w) = (3.5, [0.2, -0.1, 0.7]);
    let gs = GammaSet::from_potentials(u, w);
    let mb = MetricBlock::from_potentials(u, w);
    let mut worst: f64 = 0.0;
    for a in 0..5 {
        for b in 0..5 {
            let up = gs.upper[a] * gs.upper[b] + gs.upper[b] * gs.upper[a] + Mat4::identity() * C64::new(2.0 * mb.ginv[(a, b)], 0.0);
            let lo = gs.lower[a] * gs.lower[b] + gs.lower[b] * gs.lower[a] + Mat4::identity() * C64::new(2.0 * mb.g[(a, b)], 0.0);
            worst = worst.max(max_abs4(&up)).max(max_abs4(&lo));
        }
    }
    assert!(worst < 1e-13);
    assert!((worst - clifford_residual(&gs, &mb)).abs() < 1e-13);
}

#[test]
fn lowered_gammas_agree_with_metric_contraction() {
    let mut r = rng(5);
    for _ in 0..50 {
        let (u, w) = random_point(&mut r);
        let gs = GammaSet::from_potentials(u, w);
        let lo = lower_by_metric(&gs.upper, &MetricBlock::from_potentials(u, w));
        for mu in 0..5 {
            assert!(max_abs4(&(lo[mu] - gs.lower[mu])) < 1e-13);
        }
    }
}

#[test]
fn chirality_is_identity_and_volume_is_one() {
    let mut r = rng(7);
    for _ in 0..200 {
        let (u, w) = random_point(&mut r);
        let gs = GammaSet::from_potentials(u, w);
        let mb = MetricBlock::from_potentials(u, w);
        assert!(max_abs4(&(chirality_matrix(&gs, &mb) - Mat4::identity())) < 1e-12);
        // determinant oracle independent of the stored inverse: LU of the 5×5 block
        let det = SMatrix::<f64, 5, 5>::from_fn(|i, j| mb.g[(i, j)]).lu().determinant();
        assert!((det + 1.0).abs() < 1e-12, "{det}");
        assert!((mb.sqrt_neg_det() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gamma_set_matches_pointwise_construction() {
    let mut r = rng(11);
    let p = random_potential(&mut r, None, true);
    let (x, t) = ([0.3, -0.4, 1.2], 0.7);
    let pt = p.point(x, t).unwrap();
    let a = gamma_set(&p, x, t).unwrap();
    let b = GammaSet::from_potentials(pt.u, pt.varpi);
    for mu in 0..5 {
        assert_eq!(a.upper[mu], b.upper[mu]);
    }
    let mb = brinkmann_metric(&p, x, t).unwrap();
    assert_eq!(mb.g[(IDX_T, IDX_T)], -2.0 * pt.u);
    assert_eq!(mb.g[(IDX_S, IDX_S)], 0.0);
    assert_eq!(mb.signature(), (4, 1));
}

#[test]
fn christoffels_match_fd_oracle_on_trig_potentials() {
    let mut r = rng(13);
    for _ in 0..20 {
        let p = random_potential(&mut r, None, true);
        let x = [0; 3].map(|_: i32| r.random_range(-2.0..2.0));
        let t = r.random_range(-1.0..1.0);
        let c = christoffels(&p, x, t).unwrap();
        let o = christoffels_fd_oracle(&p, x, t, 1e-3).unwrap();
        assert!(c.max_pattern_diff(&o) < 1e-5, "{}", c.max_pattern_diff(&o));
        assert!(o.max_off_pattern() < 1e-8, "{}", o.max_off_pattern());
        assert_eq!(c.max_off_pattern(), 0.0);
        assert!(c.xi_contraction() == 0.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.omega[i][j], -c.omega[j][i]);
            }
        }
    }
}

#[test]
fn ricci_tensor_lives_on_dt_dt_when_coriolis_is_coclosed() {
    let u = ScalarPreset {
        offset: 0.0,
        gradient: [0.1, 0.0, -0.2],
        modes: vec![TrigMode { amplitude: 0.4, k: [0.5, -0.3, 0.2], omega: 0.3, phase: 0.1 }],
    };
    let theta = ScalarPreset { modes: vec![TrigMode { amplitude: 0.3, k: [0.2, 0.4, -0.1], omega: 0.7, phase: 1.0 }], ..Default::default() };
    for varpi in [CoriolisPreset::Zero, CoriolisPreset::Uniform { omega0: 0.8 }, CoriolisPreset::Gradient { theta }] {
        let p = PotentialData::analytic(u.clone(), varpi);
        let (x, t) = ([0.4, -0.3, 0.6], 0.2);
        let ric = ricci_fd(&p, x, t, 1e-3).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                if (a, b) != (IDX_T, IDX_T) {
                    assert!(ric[a][b].abs() < 1e-5, "R[{a}][{b}] = {}", ric[a][b]);
                }
            }
        }
        // the surviving component is the Poisson operator of the constraint
        let pt = p.point(x, t).unwrap();
        let curl = omega_axial(&pt.omega().unwrap());
        let o2: f64 = curl.iter().map(|v| v * v).sum();
        let h = 1e-3;
        let mut lap = 0.0;
        let mut ddiv = 0.0;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let (dp, dm) = (p.point(xp, t).unwrap().derivs.unwrap(), p.point(xm, t).unwrap().derivs.unwrap());
            lap += (dp.grad_u[a] - dm.grad_u[a]) / (2.0 * h);
            ddiv += (dp.dt_varpi[a] - dm.dt_varpi[a]) / (2.0 * h);
        }
        let expect = lap + ddiv + 0.5 * o2;
        assert!((ric[IDX_T][IDX_T] - expect).abs() < 1e-5, "{} vs {expect}", ric[IDX_T][IDX_T]);
    }
}

#[test]
fn periodic_poisson_potential_satisfies_ricci_constraint() {
    let g = grid(16, 6.0);
    let mut r = rng(17);
    let phi = smooth_bispinor(&g, &mut r, 4, 2);
    let rho: Vec<f64> = phi[0].iter().zip(&phi[1]).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    let s = poisson_periodic(&g, &rho, 0.8).unwrap();
    let mut gp = GridPotential::zero(g);
    gp.set_u(s.u, "poisson_periodic");
    gp.background = s.background;
    let res = ricci_constraint_residual(&PotentialData::Grid(gp), &g, &rho, 0.8, 0.0).unwrap();
    assert_eq!(res.r1, 0.0);
    assert!(res.r2 < 1e-10, "{}", res.r2);
}

#[test]
fn taubnut_is_coclosed_with_inverse_quartic_curvature() {
    let g = grid(16, 8.0);
    for chart in [Chart::Minus, Chart::Plus] {
        let a = 0.7;
        let p = PotentialData::analytic(ScalarPreset::zero(), CoriolisPreset::Taubnut { a, chart, r_cut: None });
        let res = ricci_constraint_residual(&p, &g, &vec![0.0; g.len()], 1.0, 0.0).unwrap();
        assert!(res.r1 < 1e-6, "{}", res.r1);
        let mut checked = 0;
        for i in 0..g.len() {
            if res.mask[i] {
                continue;
            }
            let x = g.position(i);
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let expect = 4.0 * a * a / (r2 * r2);
            assert!((res.omega_sq[i] - expect).abs() < 1e-6 * expect.max(1.0));
            checked += 1;
        }
        assert!(checked > g.len() / 2);
    }
}

#[test]
fn schwarzian_is_invariant_under_post_composed_homographies() {
    let phi = |t: f64| t.exp() + 0.3 * t * t;
    let (a, b, c, d) = (2.0, 0.5, 0.1, 1.5);
    let mobius = |y: f64| (a * y + b) / (c * y + d);
    for t in [0.1, 0.4, 0.9] {
        let s1 = schwarzian(phi, t, 2e-3).unwrap();
        let s2 = schwarzian(|u| mobius(phi(u)), t, 2e-3).unwrap();
        assert!((s1 - s2).abs() < 1e-4 * s1.abs().max(1.0), "{s1} {s2}");
    }
}

/// Exact free Gaussian solution `(σ²/α)^{3/2} e^{−|x|²/4α} ξ`, `α = σ² + iħt/2m`.
fn free_gaussian(g: &GridSpec, t: f64, m: f64, hbar: f64, xi: [C64; 2]) -> LiftedSpinor {
    let s2 = 0.7;
    let alpha = C64::new(s2, hbar * t / (2.0 * m));
    let pre = (C64::new(s2, 0.0) / alpha).powf(1.5);
    let (vals, dts): (Vec<C64>, Vec<C64>) = g
        .sample(|x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let v = pre * (-r2 / (alpha * 4.0)).exp();
            let lap = (r2 / (alpha * alpha * 4.0) - 1.5 / alpha) * v;
            (v, C64::new(0.0, hbar / (2.0 * m)) * lap)
        })
        .into_iter()
        .unzip();
    let phi = [vals.iter().map(|v| v * xi[0]).collect(), vals.iter().map(|v| v * xi[1]).collect()];
    let dphi = [dts.iter().map(|v| v * xi[0]).collect(), dts.iter().map(|v| v * xi[1]).collect()];
    let zero = GridPotential::zero(*g);
    let chi = chi_from_phi(&phi, &zero, m, hbar);
    let dchi = chi_from_phi(&dphi, &zero, m, hbar);
    let [a, b] = dphi;
    let [c, d] = dchi;
    LiftedSpinor::new(*g, phi, chi, m, hbar, t).with_dt([a, b, c, d])
}

fn max_norm(s: &Spinor4) -> f64 {
    s.iter().flat_map(|c| c.iter()).map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn dirac_operator_preserved_by_conformal_lie_derivatives() {
    // fine enough that the Gaussian spectrum is below round-off at the Nyquist wavenumber
    let g = grid(40, 20.0);
    let (m, hbar, t) = (1.0, 1.0, 0.3);
    let xi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
    let flat = PotentialData::flat();
    let base = free_gaussian(&g, t, m, hbar, xi);
    let r0 = dirac_residual(&base, &flat).unwrap();
    assert!(r0.max() < 1e-10, "{:e} {:e}", r0.max_line1(), r0.max_line2());
    let gens = [
        LieParams { omega: [0.2, -0.1, 0.3], ..Default::default() },
        LieParams { beta: [0.3, 0.1, -0.2], ..Default::default() },
        LieParams { gamma: [0.1, 0.2, 0.3], epsilon: 0.4, eta: 0.5, ..Default::default() },
        LieParams { delta: 0.2, ..Default::default() },
    ];
    for lp in gens {
        // ∂_t of the derived spinor by a fourth-order stencil in time
        let h = 3e-3;
        let at = |dt: f64| lie_derivative_spinor_density(&lp, &free_gaussian(&g, t + dt, m, hbar, xi), &flat).unwrap();
        let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
        let mut derived = at(0.0);
        let dt: Spinor4 = std::array::from_fn(|c| {
            (0..g.len()).map(|i| (m2.psi[c][i] - p2.psi[c][i] + (p1.psi[c][i] - m1.psi[c][i]) * 8.0) / (12.0 * h)).collect()
        });
        derived.dt = Some(dt);
        let scale = max_norm(&derived.psi);
        let res = dirac_residual(&derived, &flat).unwrap().max();
        assert!(res < 1e-7 * scale, "{lp:?}: {res:e} vs {scale:e}");
    }
}

#[test]
fn fibre_lie_derivative_is_equivariance_phase() {
    let g = grid(8, 4.0);
    let mut r = rng(19);
    let phi = smooth_bispinor(&g, &mut r, 3, 1);
    let chi = smooth_bispinor(&g, &mut r, 3, 1);
    let l = LiftedSpinor::new(g, phi, chi, 1.7, 0.6, 0.0);
    let p = random_potential(&mut r, Some(4.0), false);
    let out = lie_derivative_spinor_density(&Xi, &l, &p).unwrap();
    let f = C64::new(0.0, 1.7 / 0.6);
    for c in 0..4 {
        let want: Vec<C64> = l.psi[c].iter().map(|v| v * f).collect();
        assert!(max_diff(&out.psi[c], &want) < 1e-12);
    }
    assert!(out.fiber_slope.is_none());
}

#[test]
fn translation_lie_derivative_is_directional_derivative() {
    let g = grid(16, 2.0 * PI);
    let mut r = rng(23);
    let phi = smooth_bispinor(&g, &mut r, 3, 2);
    let chi = smooth_bispinor(&g, &mut r, 3, 2);
    let l = LiftedSpinor::new(g, phi, chi, 1.0, 1.0, 0.0);
    let lp = LieParams { gamma: [0.0, 1.0, 0.0], ..Default::default() };
    let out = lie_derivative_spinor_density(&lp, &l, &PotentialData::flat()).unwrap();
    let sp = lln_core::fields::Spectral::get(&g);
    for c in 0..4 {
        assert!(max_diff(&out.psi[c], &sp.derivative(&l.psi[c], 1)) < 1e-11);
    }
}

#[test]
fn covariant_derivative_examples() {
    let g = grid(8, 2.0 * PI);
    let k = 2.0;
    let phi = [g.sample(|x| C64::from_polar(1.0, k * x[0])), vec![C64::new(0.0, 0.0); g.len()]];
    let zeros = [vec![C64::new(0.0, 0.0); g.len()], vec![C64::new(0.0, 0.0); g.len()]];
    let l = LiftedSpinor::new(g, phi.clone(), zeros, 1.3, 0.5, 0.0);
    let d1 = covariant_spinor_derivative(&l, &PotentialData::flat(), 0).unwrap();
    let want: Vec<C64> = phi[0].iter().map(|v| v * C64::new(0.0, k)).collect();
    assert!(max_diff(&d1[0], &want) < 1e-12);
    let ds = covariant_spinor_derivative(&l, &PotentialData::flat(), IDX_S).unwrap();
    let want: Vec<C64> = phi[0].iter().map(|v| v * C64::new(0.0, 1.3 / 0.5)).collect();
    assert!(max_diff(&ds[0], &want) < 1e-12);
}

fn arb_point() -> impl Strategy<Value = (f64, [f64; 3])> {
    (-10.0..10.0f64, prop::array::uniform3(-3.0..3.0f64))
}

proptest! {
    #[test]
    fn clifford_and_chirality_hold(pt in arb_point()) {
        let (u, w) = pt;
        let gs = GammaSet::from_potentials(u, w);
        let mb = MetricBlock::from_potentials(u, w);
        prop_assert!(clifford_residual(&gs, &mb) < 1e-13 * (1.0 + u.abs()));
        prop_assert!(max_abs4(&(chirality_matrix(&gs, &mb) - Mat4::identity())) < 1e-12 * (1.0 + u.abs()));
    }

    #[test]
    fn metric_block_invariants(pt in arb_point()) {
        let (u, w) = pt;
        let mb = MetricBlock::from_potentials(u, w);
        prop_assert!(mb.inverse_residual() < 1e-13 * (1.0 + u.abs()));
        prop_assert_eq!(mb.signature(), (4, 1));
        prop_assert_eq!(mb.g[(IDX_S, IDX_S)], 0.0);
        let w2: f64 = w.iter().map(|v| v * v).sum();
        prop_assert!((mb.ginv[(IDX_S, IDX_S)] - (2.0 * u + w2)).abs() < 1e-13 * (1.0 + w2 + u.abs()));
    }

    #[test]
    fn affine_and_homographic_maps_have_zero_schwarzian(a in 0.5..2.0f64, b in -1.0..1.0f64, c in 0.0..0.3f64, t in 0.0..1.0f64) {
        prop_assert!(schwarzian(|s| a * s + b, t, 1e-2).unwrap().abs() < 1e-8);
        // d chosen so the homography is increasing on [0, 1]
        let d = 1.0 + c;
        prop_assert!(schwarzian(|s| (a * s + b) / (c * s + d), t, 2e-3).unwrap().abs() < 1e-4);
    }
}
