mod common;

use common::*;
use lln_core::evolve::chi_from_phi;
use lln_core::fields::{BispinorField, GridSpec};
use lln_core::geometry::{CoriolisPreset, GridPotential, LiftedSpinor, PotentialData, ScalarPreset};
use lln_core::sngroup::*;
use lln_core::{Physics, C64};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn unit_quaternion(r: &mut ChaCha8Rng) -> [f64; 4] {
    let q = [0; 4].map(|_: i32| r.random_range(-1.0..1.0));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.map(|v| v / n)
}

fn random_element(r: &mut ChaCha8Rng, scale: f64, rotate: bool) -> SnGroupElement {
    let a = if rotate { unit_quaternion(r) } else { [1.0, 0.0, 0.0, 0.0] };
    let v3 = |r: &mut ChaCha8Rng| [0; 3].map(|_: i32| scale * r.random_range(-1.0..1.0));
    let b = v3(r);
    let c = v3(r);
    let nu = 1.0 + 0.2 * scale * r.random_range(-1.0..1.0);
    SnGroupElement::from_parts(a, b, c, nu, scale * r.random_range(-1.0..1.0), scale * r.random_range(-1.0..1.0))
}

fn rot_diff(u: &SnGroupElement, v: &SnGroupElement) -> f64 {
    let (a, b) = (u.rotation(), v.rotation());
    (0..9).map(|k| (a[k / 3][k % 3] - b[k / 3][k % 3]).abs()).fold(0.0, f64::max)
}

/// Recover element parameters from an arbitrary coordinate map, using the
/// action formulas only; the seventh point is a consistency check.
fn fit_element<F: Fn([f64; 3], f64, f64) -> ([f64; 3], f64, f64)>(f: F) -> (SnGroupElement, [[f64; 3]; 3]) {
    let (x0, t0, s0) = f([0.0; 3], 0.0, 0.0);
    let (_, _, s1) = f([0.0; 3], 0.0, 1.0);
    let nu = 1.0 / (s1 - s0);
    let g = nu.powi(3);
    let d = nu.powi(-2);
    let c = x0.map(|v| g * v);
    let e = g * t0;
    let h = nu * s0;
    let (xt, _, _) = f([0.0; 3], 1.0, 0.0);
    let b: [f64; 3] = std::array::from_fn(|i| g * xt[i] - c[i]);
    let mut rot = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut ej = [0.0; 3];
        ej[j] = 1.0;
        let (xj, _, _) = f(ej, 0.0, 0.0);
        for i in 0..3 {
            rot[i][j] = g * xj[i] - c[i];
        }
    }
    let u = SnGroupElement { a: [1.0, 0.0, 0.0, 0.0], b, c, d, e, g, h };
    (u, rot)
}

#[test]
fn composition_matches_fitted_action() {
    let mut r = rng(31);
    for _ in 0..50 {
        let (u1, u2) = (random_element(&mut r, 0.7, true), random_element(&mut r, 0.7, true));
        let comp = u1.compose(&u2);
        let chain = |x: [f64; 3], t: f64, s: f64| {
            let (y, tt, ss) = u2.act(x, t, s);
            u1.act(y, tt, ss)
        };
        let (fit, rot) = fit_element(chain);
        let a = comp.rotation();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - rot[i][j]).abs() < 1e-10);
            }
        }
        let mut tmp = fit;
        tmp.a = comp.a;
        assert!(tmp.max_param_diff(&comp) < 1e-10, "{tmp:?} vs {comp:?}");
        let q = ([0.3, -1.1, 0.4], 0.8, -0.2);
        let (ya, ta, sa) = comp.act(q.0, q.1, q.2);
        let (yb, tb, sb) = chain(q.0, q.1, q.2);
        assert!((0..3).all(|i| (ya[i] - yb[i]).abs() < 1e-10) && (ta - tb).abs() < 1e-10 && (sa - sb).abs() < 1e-10);
    }
}

#[test]
fn two_boosts_compose_to_boost_with_vertical_shift() {
    let (b1, b2) = ([0.3, -0.2, 0.1], [0.5, 0.4, -0.3]);
    let chain = |x: [f64; 3], t: f64, s: f64| {
        let (y, tt, ss) = SnGroupElement::boost(b2).act(x, t, s);
        SnGroupElement::boost(b1).act(y, tt, ss)
    };
    let (fit, rot) = fit_element(chain);
    for (i, row) in rot.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }
    for i in 0..3 {
        assert!((fit.b[i] - b1[i] - b2[i]).abs() < 1e-14);
    }
    assert!(fit.c.iter().all(|v| v.abs() < 1e-14));
    assert!((fit.d - 1.0).abs() < 1e-14 && (fit.g - 1.0).abs() < 1e-14 && fit.e.abs() < 1e-14);
    let h = fit.h;
    let comp = SnGroupElement::boost(b1).compose(&SnGroupElement::boost(b2));
    assert!((comp.h - h).abs() < 1e-14);
    let mut pure = SnGroupElement::boost([b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]]);
    pure.h = h;
    assert!(comp.max_param_diff(&pure) < 1e-14);
}

fn field(g: GridSpec, width: f64, k: [f64; 3]) -> BispinorField {
    BispinorField::gaussian(g, Physics { m: 1.3, hbar: 0.9, g_newton: 1.0 }, [0.2, -0.1, 0.3], width, k, [C64::new(0.6, 0.1), C64::new(-0.3, 0.7)])
}

fn phase_spread(a: &BispinorField, b: &BispinorField) -> f64 {
    let amax = a.density().iter().cloned().fold(0.0, f64::max).sqrt();
    let mut ratios = Vec::new();
    for c in 0..2 {
        for (x, y) in a.phi[c].iter().zip(&b.phi[c]) {
            if x.norm() > 1e-6 * amax {
                ratios.push(x / y);
            }
        }
    }
    let mean: C64 = ratios.iter().map(|z| z / z.norm()).sum::<C64>() / ratios.len() as f64;
    let angles: Vec<f64> = ratios.iter().map(|z| (z / mean).arg()).collect();
    let mu = angles.iter().sum::<f64>() / angles.len() as f64;
    (angles.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / angles.len() as f64).sqrt()
}

#[test]
fn representation_is_projective() {
    // the Gaussian and its edge tail sit below round-off on this grid
    let g = grid(48, 24.0);
    let f = field(g, 1.0, [0.4, 0.0, -0.3]);
    let mut r = rng(37);
    for _ in 0..3 {
        let (u1, u2) = (random_element(&mut r, 0.3, false), random_element(&mut r, 0.3, false));
        let two = represent(&u1, &represent(&u2, &f).unwrap().field).unwrap().field;
        let one = represent(&u1.compose(&u2), &f).unwrap().field;
        assert!((two.time - one.time).abs() < 1e-14);
        assert!((two.physics.m - one.physics.m).abs() < 1e-14);
        let s = phase_spread(&two, &one);
        assert!(s < 1e-8, "{s:e}");
    }
}

#[test]
fn bargmann_elements_preserve_norm_and_mass() {
    let g = grid(36, 22.0);
    let f = field(g, 1.0, [0.3, 0.2, 0.0]);
    let mut r = rng(41);
    let n0 = f.norm_sq();
    for k in 0..4 {
        let mut u = random_element(&mut r, 0.4, false);
        u.d = 1.0;
        u.g = 1.0;
        if k > 0 {
            // a large generic rotation would pull periodic images into the box
            // corners; a lattice quarter turn plus a modest tilt keeps the support inside
            let axis = [0; 3].map(|_: i32| r.random_range(-1.0..1.0));
            let tilt = SnGroupElement::rotation_about(axis, r.random_range(-0.5..0.5));
            let quarter = SnGroupElement::rotation_about([0.0, 0.0, 1.0], k as f64 * std::f64::consts::FRAC_PI_2);
            u = tilt.compose(&quarter).compose(&u);
        }
        let out = represent(&u, &f).unwrap();
        assert!(out.support_ok(1e-12), "{} {}", out.wrapped_fraction, out.escaped_fraction);
        assert!((out.field.norm_sq() - n0).abs() < 1e-12, "{:e}", out.field.norm_sq() - n0);
        assert_eq!(out.field.physics.m, f.physics.m);
    }
}

#[test]
fn dilation_scales_norm_by_first_power_of_nu() {
    // |ν⁵ a φ(ν³x)|² integrates to ν¹⁰·ν⁻⁹ = ν
    // the ν < 1 case widens the packet, so the box must hold its tail
    let g = grid(40, 20.0);
    let f = field(g, 0.9, [0.0; 3]);
    for nu in [0.9, 0.95, 1.05, 1.08] {
        let rep = represent(&SnGroupElement::dilation(nu), &f).unwrap();
        assert!(rep.support_ok(1e-13), "{nu}: {} {}", rep.wrapped_fraction, rep.escaped_fraction);
        let out = rep.field;
        let ratio = out.norm_sq() / f.norm_sq();
        assert!((ratio.ln() / nu.ln() - 1.0).abs() < 1e-10, "{nu}: {ratio}");
        assert!((out.physics.m - nu * f.physics.m).abs() < 1e-15);
    }
}

#[test]
fn pure_dilation_matches_closed_form() {
    let g = grid(40, 20.0);
    let nu: f64 = 1.1;
    let (w, c0) = (0.9, [0.2, -0.1, 0.3]);
    let f = field(g, w, [0.0; 3]);
    let out = represent(&SnGroupElement::dilation(nu), &f).unwrap().field;
    // ν⁶·ν⁻¹·φ(ν³x), with φ's grid normalisation read off at the centre node
    let raw = |x: [f64; 3]| (-(0..3).map(|a| (x[a] - c0[a]).powi(2)).sum::<f64>() / (4.0 * w * w)).exp();
    let i0 = g.index(g.n / 2, g.n / 2, g.n / 2);
    let amp = [f.phi[0][i0] / raw(g.position(i0)), f.phi[1][i0] / raw(g.position(i0))];
    for i in 0..g.len() {
        let x = g.position(i).map(|v| nu.powi(3) * v);
        if !g.contains(x) {
            // wrapped periodic image, flagged by the support metadata instead
            continue;
        }
        let v = raw(x) * nu.powi(5);
        assert!((out.phi[0][i] - amp[0] * v).norm() < 1e-12);
        assert!((out.phi[1][i] - amp[1] * v).norm() < 1e-12);
    }
}

#[test]
fn vertical_translation_is_global_phase() {
    let g = grid(16, 8.0);
    let f = field(g, 0.8, [0.5, 0.0, 0.0]);
    let h = 0.37;
    let out = represent(&SnGroupElement::vertical(h), &f).unwrap().field;
    let ph = C64::from_polar(1.0, -f.physics.m * h / f.physics.hbar);
    for c in 0..2 {
        let want: Vec<C64> = f.phi[c].iter().map(|v| v * ph).collect();
        assert!(max_diff(&out.phi[c], &want) < 1e-13);
    }
}

#[test]
fn lattice_translation_is_exact_shift() {
    let g = grid(16, 8.0);
    let f = field(g, 0.8, [0.5, 0.0, 0.0]);
    let dx = g.dx();
    let out = represent(&SnGroupElement::translation([2.0 * dx, 0.0, -dx]), &f).unwrap().field;
    for i in 0..g.len() {
        let [a, b, c] = g.unravel(i);
        let j = g.index((a + g.n - 2) % g.n, b, (c + 1) % g.n);
        assert!((out.phi[0][i] - f.phi[0][j]).norm() < 1e-13);
    }
}

fn lifted(g: GridSpec, f: &BispinorField) -> LiftedSpinor {
    let chi = chi_from_phi(&f.phi, &GridPotential::zero(g), f.physics.m, f.physics.hbar);
    LiftedSpinor::new(g, f.phi.clone(), chi, f.physics.m, f.physics.hbar, f.time)
}

#[test]
fn one_parameter_flows_match_infinitesimal_action() {
    let g = grid(32, 16.0);
    let f = field(g, 1.0, [0.3, -0.2, 0.1]);
    let l = lifted(g, &f);
    let cases: Vec<(LieParams, Box<dyn Fn(f64) -> SnGroupElement>)> = vec![
        (LieParams { delta: 1.0, ..Default::default() }, Box::new(|tau: f64| SnGroupElement::dilation((-tau).exp()))),
        (LieParams { gamma: [1.0, -0.5, 0.2], ..Default::default() }, Box::new(|tau: f64| SnGroupElement::translation([-tau, 0.5 * tau, -0.2 * tau]))),
        (LieParams { beta: [0.4, 0.2, -0.3], ..Default::default() }, Box::new(|tau: f64| SnGroupElement::boost([-0.4 * tau, -0.2 * tau, 0.3 * tau]))),
        (LieParams { omega: [0.0, 0.0, 1.0], ..Default::default() }, Box::new(|tau: f64| SnGroupElement::rotation_about([0.0, 0.0, 1.0], -tau))),
        (LieParams { eta: 1.0, ..Default::default() }, Box::new(|tau: f64| SnGroupElement::vertical(-tau))),
    ];
    for (lp, flow) in cases {
        let gen = infinitesimal_action(&lp, &l).unwrap();
        // Richardson-extrapolated difference quotient: O(τ²)
        let quotient = |tau: f64| -> [Vec<C64>; 4] {
            let out = represent_lifted(&flow(tau), &l).unwrap();
            std::array::from_fn(|c| out.psi[c].iter().zip(&l.psi[c]).map(|(a, b)| (a - b) / tau).collect())
        };
        let tau = 1e-3;
        let (q1, q2) = (quotient(tau), quotient(tau / 2.0));
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for c in 0..4 {
            for i in 0..g.len() {
                let rich = q2[c][i] * 2.0 - q1[c][i];
                err = err.max((rich - gen.psi[c][i]).norm());
                scale = scale.max(gen.psi[c][i].norm());
            }
        }
        assert!(err < 1e-5 * scale, "{lp:?}: {err:e} / {scale:e}");
    }
}

#[test]
fn transform_potentials_examples() {
    let mut r = rng(43);
    let u = random_scalar(&mut r, 2, 0.5, None, false);
    let p = PotentialData::analytic(u, CoriolisPreset::Zero);
    let x = [0.4, -0.2, 0.9];
    let id = transform_potentials(&SnGroupElement::identity(), &p);
    assert!((id.point(x, 0.3).unwrap().u - p.point(x, 0.3).unwrap().u).abs() < 1e-15);
    let rot = SnGroupElement::rotation_about([0.3, 0.5, -0.2], 0.8);
    let (y, _, _) = rot.act(x, 0.0, 0.0);
    assert!((transform_potentials(&rot, &p).point(y, 0.0).unwrap().u - p.point(x, 0.0).unwrap().u).abs() < 1e-13);
    let nu: f64 = 1.1;
    let dil = SnGroupElement::dilation(nu);
    let (y, s, _) = dil.act(x, 0.2, 0.0);
    let got = transform_potentials(&dil, &p).point(y, s).unwrap().u;
    assert!((got - nu.powi(4) * p.point(x, 0.2).unwrap().u).abs() < 1e-13);
    // boost mixes ϖ·A⁻¹b into U
    let w = PotentialData::analytic(ScalarPreset::constant(0.5), CoriolisPreset::Constant { value: [0.2, -0.4, 0.1] });
    let b = [0.3, 0.1, 0.2];
    let (y, s, _) = SnGroupElement::boost(b).act(x, 0.4, 0.0);
    let got = transform_potentials(&SnGroupElement::boost(b), &w).point(y, s).unwrap();
    assert!((got.u - (0.5 + 0.06 - 0.04 + 0.02)).abs() < 1e-14);
}

/// `L_X g₀` by central differences of the generator, flat metric.
fn lie_of_flat_metric(lp: &LieParams, q: ([f64; 3], f64, f64)) -> [[f64; 5]; 5] {
    let mut g0 = [[0.0; 5]; 5];
    for i in 0..3 {
        g0[i][i] = 1.0;
    }
    g0[3][4] = 1.0;
    g0[4][3] = 1.0;
    let h = 1e-5;
    let mut jac = [[0.0; 5]; 5];
    for (mu, row) in jac.iter_mut().enumerate() {
        let shift = |sgn: f64| {
            let (mut x, mut t, mut s) = q;
            match mu {
                0..=2 => x[mu] += sgn * h,
                3 => t += sgn * h,
                _ => s += sgn * h,
            }
            lie_vector(lp, x, t, s)
        };
        let (p, m) = (shift(1.0), shift(-1.0));
        for nu in 0..5 {
            row[nu] = (p[nu] - m[nu]) / (2.0 * h);
        }
    }
    std::array::from_fn(|a| std::array::from_fn(|b| (0..5).map(|l| g0[l][b] * jac[a][l] + g0[a][l] * jac[b][l]).sum()))
}

fn arb_lie() -> impl Strategy<Value = LieParams> {
    let v3 = || prop::array::uniform3(-1.0..1.0f64);
    (v3(), v3(), v3(), -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(omega, beta, gamma, epsilon, delta, eta)| LieParams { omega, beta, gamma, epsilon, delta, eta })
}

fn arb_element() -> impl Strategy<Value = SnGroupElement> {
    let v3 = || prop::array::uniform3(-1.0..1.0f64);
    (prop::array::uniform4(-1.0..1.0f64), v3(), v3(), 0.7..1.4f64, -1.0..1.0f64, -1.0..1.0f64).prop_filter_map(
        "non-degenerate quaternion",
        |(q, b, c, nu, e, h)| {
            let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            (n > 0.1).then(|| SnGroupElement::from_parts(q.map(|v| v / n), b, c, nu, e, h))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generators_are_conformal_killing(lp in arb_lie(), x in prop::array::uniform3(-2.0..2.0f64), t in -1.0..1.0f64, s in -1.0..1.0f64) {
        let l = lie_of_flat_metric(&lp, (x, t, s));
        // ∇_μX^μ = 3·(3/(n−4))δ + ((n+2)/(n−4))δ − δ = −15δ; factor 2·div/N
        let factor = 2.0 * (-15.0 * lp.delta) / 5.0;
        let mut g0 = [[0.0; 5]; 5];
        for i in 0..3 { g0[i][i] = 1.0; }
        g0[3][4] = 1.0;
        g0[4][3] = 1.0;
        for a in 0..5 {
            for b in 0..5 {
                prop_assert!((l[a][b] - factor * g0[a][b]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn group_axioms(u1 in arb_element(), u2 in arb_element(), u3 in arb_element()) {
        let left = u1.compose(&u2).compose(&u3);
        let right = u1.compose(&u2.compose(&u3));
        prop_assert!(left.max_param_diff(&right) < 1e-10);
        prop_assert!(u1.compose(&SnGroupElement::identity()).max_param_diff(&u1) < 1e-12);
        prop_assert!(SnGroupElement::identity().compose(&u1).max_param_diff(&u1) < 1e-12);
        prop_assert!(u1.compose(&u1.inverse()).max_param_diff(&SnGroupElement::identity()) < 1e-12);
        prop_assert!(u1.inverse().compose(&u1).max_param_diff(&SnGroupElement::identity()) < 1e-12);
        prop_assert!(rot_diff(&left, &right) < 1e-12);
    }

    #[test]
    fn action_is_a_homomorphism(u1 in arb_element(), u2 in arb_element(), x in prop::array::uniform3(-3.0..3.0f64), t in -2.0..2.0f64, s in -2.0..2.0f64) {
        let (ya, ta, sa) = u1.compose(&u2).act(x, t, s);
        let (y2, t2, s2) = u2.act(x, t, s);
        let (yb, tb, sb) = u1.act(y2, t2, s2);
        for i in 0..3 { prop_assert!((ya[i] - yb[i]).abs() < 1e-10); }
        prop_assert!((ta - tb).abs() < 1e-10 && (sa - sb).abs() < 1e-10);
        let (z, tz, sz) = u1.inverse_act(ya, ta, sa);
        let (z2, tz2, sz2) = u1.inverse_act(yb, tb, sb);
        for i in 0..3 { prop_assert!((z[i] - y2[i]).abs() < 1e-10 && (z2[i] - y2[i]).abs() < 1e-10); }
        prop_assert!((tz - t2).abs() < 1e-10 && (sz - s2).abs() < 1e-10 && (tz2 - t2).abs() < 1e-10 && (sz2 - s2).abs() < 1e-10);
    }

    #[test]
    fn dilation_constraints_hold(u in arb_element()) {
        let nu = u.nu();
        prop_assert!((u.d - nu.powi(-2)).abs() < 1e-12 * u.d);
        prop_assert!((u.g - nu.powi(3)).abs() < 1e-12 * u.g);
        prop_assert!((u.d * u.g - nu).abs() < 1e-12);
        prop_assert!((u.lambda().sqrt() * nu.powi(3) - 1.0).abs() < 1e-12);
        prop_assert!(u.validate().is_ok());
    }

    #[test]
    fn su2_double_covers_rotation(u in arb_element(), v in prop::array::uniform3(-1.0..1.0f64)) {
        use lln_core::geometry::pauli::sigma_dot;
        let a = u.su2();
        let lhs = a * sigma_dot(v) * a.adjoint();
        let rv: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| u.rotation()[i][j] * v[j]).sum());
        let rhs = sigma_dot(rv);
        prop_assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
    }
}
