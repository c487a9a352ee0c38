#![allow(dead_code)]

use std::f64::consts::PI;

use lln_core::fields::{Bispinor, BispinorField, GridSpec};
use lln_core::geometry::{CoriolisPreset, PotentialData, ScalarPreset, TrigMode, VecTrigMode};
use lln_core::{Physics, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: usize, l: f64) -> GridSpec {
    GridSpec::new(n, l).unwrap()
}

/// Random periodic bispinor with integer modes `|m_a| ≤ mmax`.
pub fn smooth_bispinor(g: &GridSpec, r: &mut ChaCha8Rng, modes: usize, mmax: i64) -> Bispinor {
    let k0 = 2.0 * PI / g.length;
    let terms: Vec<([f64; 3], [C64; 2])> = (0..modes)
        .map(|_| {
            let m = [0; 3].map(|_: i32| r.random_range(-mmax..=mmax) as f64 * k0);
            let c = [0; 2].map(|_: i32| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
            (m, c)
        })
        .collect();
    let vals: Vec<[C64; 2]> = g.sample(|x| {
        let mut v = [C64::new(0.0, 0.0); 2];
        for (k, c) in &terms {
            let ph = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            v[0] += c[0] * ph;
            v[1] += c[1] * ph;
        }
        v
    });
    [vals.iter().map(|v| v[0]).collect(), vals.iter().map(|v| v[1]).collect()]
}

pub fn field_from(g: GridSpec, phi: Bispinor) -> BispinorField {
    BispinorField { grid: g, phi, physics: Physics::default(), time: 0.0, mass_scale: 1.0 }
}

/// Random trigonometric mode, periodic on a box of edge `l` when `periodic_l` is set.
pub fn trig_mode(r: &mut ChaCha8Rng, periodic_l: Option<f64>, mmax: i64, time_dep: bool) -> ([f64; 3], f64, f64) {
    let k = match periodic_l {
        Some(l) => [0; 3].map(|_: i32| r.random_range(-mmax..=mmax) as f64 * 2.0 * PI / l),
        None => [0; 3].map(|_: i32| r.random_range(-1.0..1.0)),
    };
    let omega = if time_dep { r.random_range(-1.0..1.0) } else { 0.0 };
    let phase = r.random_range(0.0..2.0 * PI);
    (k, omega, phase)
}

pub fn random_scalar(r: &mut ChaCha8Rng, n_modes: usize, amp: f64, periodic_l: Option<f64>, time_dep: bool) -> ScalarPreset {
    let modes = (0..n_modes)
        .map(|_| {
            let (k, omega, phase) = trig_mode(r, periodic_l, 2, time_dep);
            TrigMode { amplitude: amp * r.random_range(-1.0..1.0), k, omega, phase }
        })
        .collect();
    ScalarPreset { modes, ..Default::default() }
}

pub fn random_varpi(r: &mut ChaCha8Rng, n_modes: usize, amp: f64, periodic_l: Option<f64>, time_dep: bool) -> CoriolisPreset {
    let modes = (0..n_modes)
        .map(|_| {
            let (k, omega, phase) = trig_mode(r, periodic_l, 2, time_dep);
            VecTrigMode { amplitude: [0; 3].map(|_: i32| amp * r.random_range(-1.0..1.0)), k, omega, phase }
        })
        .collect();
    CoriolisPreset::Trig { modes }
}

pub fn random_potential(r: &mut ChaCha8Rng, periodic_l: Option<f64>, time_dep: bool) -> PotentialData {
    PotentialData::analytic(random_scalar(r, 3, 0.5, periodic_l, time_dep), random_varpi(r, 3, 0.3, periodic_l, time_dep))
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
