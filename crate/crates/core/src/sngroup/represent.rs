use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::element::exponents;
use super::SnGroupElement;
use crate::fields::{BispinorField, GridSpec, Spectral};
use crate::geometry::pauli::{sigma_dot, Mat2};
use crate::geometry::{LiftedSpinor, PotentialData};
use crate::{Physics, Result};

/// Output of [`represent`]: the transformed field with support diagnostics.
#[derive(Clone, Debug)]
pub struct Represented {
    pub field: BispinorField,
    /// Share of the output norm whose preimage lies outside the box (and was
    /// therefore taken from a periodic image).
    pub wrapped_fraction: f64,
    /// Share of the input norm mapped outside the box.
    pub escaped_fraction: f64,
}

impl Represented {
    pub fn support_ok(&self, tol: f64) -> bool {
        self.wrapped_fraction <= tol && self.escaped_fraction <= tol
    }
}

/// `U, ϖ` seen by the transformed system: `Û = ν⁴(U + ϖ·A⁻¹b)`, `ϖ̂ = ν² ϖ·A⁻¹`
/// at pulled-back arguments.
pub fn transform_potentials(u: &SnGroupElement, p: &PotentialData) -> PotentialData {
    PotentialData::Transformed(Box::new(p.clone()), *u)
}

/// Pull-back geometry shared by the φ-only and lifted versions.
struct Pullback {
    /// Preimage X of every output node.
    points: Vec<[f64; 3]>,
    /// `e^{i m S/ħ}` per output node.
    phase: Vec<C64>,
    t_out: f64,
}

fn pullback(u: &SnGroupElement, grid: &GridSpec, t_in: f64, m: f64, hbar: f64) -> Pullback {
    let t_out = (u.d * t_in + u.e) / u.g;
    let (points, phase): (Vec<[f64; 3]>, Vec<C64>) = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.position(i);
            // the s-component of the inverse action at s = 0 is the phase function S
            let (xp, _, s) = u.inverse_act(x, t_out, 0.0);
            (xp, C64::from_polar(1.0, m * s / hbar))
        })
        .unzip();
    Pullback { points, phase, t_out }
}

fn evaluate(u: &SnGroupElement, grid: &GridSpec, pb: &Pullback, comps: &[&[C64]]) -> Vec<Vec<C64>> {
    let sp = Spectral::get(grid);
    if u.is_pure_rotation_free() {
        // A = ±1: the preimage is separable per axis
        let shift: [f64; 3] = std::array::from_fn(|a| pb.points[0][a] - u.g * grid.coord(0));
        comps.iter().map(|c| sp.resample_separable(c, [u.g; 3], shift)).collect()
    } else {
        let it = sp.interpolant(comps);
        let vals = it.eval_many(&pb.points);
        (0..comps.len()).map(|c| vals.iter().map(|v| v[c]).collect()).collect()
    }
}

fn support(u: &SnGroupElement, grid: &GridSpec, pb: &Pullback, rho_in: &[f64], rho_out: &[f64], t_in: f64) -> (f64, f64) {
    let tot_out: f64 = rho_out.iter().sum();
    let wrapped: f64 = pb.points.iter().zip(rho_out).filter(|(x, _)| !grid.contains(**x)).map(|(_, r)| r).sum();
    let tot_in: f64 = rho_in.iter().sum();
    let escaped: f64 = (0..grid.len())
        .filter(|&i| !grid.contains(u.act(grid.position(i), t_in, 0.0).0))
        .map(|i| rho_in[i])
        .sum();
    let frac = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    (frac(wrapped, tot_out), frac(escaped, tot_in))
}

/// Projective representation on the principal bispinor:
/// `φ'(x) = ν⁶ e^{imS/ħ} ν⁻¹ a φ(X, T)` with `X = A⁻¹[g x − T b − c]`,
/// `T = (g t' − e)/d` the input time stamp and `m` the input mass. The output
/// carries mass `ν m` and time stamp `t' = (d T + e)/g`.
pub fn represent(u: &SnGroupElement, f: &BispinorField) -> Result<Represented> {
    u.validate()?;
    let grid = f.grid;
    let m = f.physics.m;
    let pb = pullback(u, &grid, f.time, m, f.physics.hbar);
    let vals = evaluate(u, &grid, &pb, &[&f.phi[0], &f.phi[1]]);
    let nu = u.nu();
    let pre = nu.powf(exponents::prefactor()) * nu.powf(exponents::spin_block());
    let a = u.su2() * C64::new(pre, 0.0);
    let mut out = BispinorField::zeros(grid, Physics { m: nu * m, ..f.physics });
    for i in 0..grid.len() {
        let (p0, p1) = (vals[0][i], vals[1][i]);
        out.phi[0][i] = pb.phase[i] * (a[(0, 0)] * p0 + a[(0, 1)] * p1);
        out.phi[1][i] = pb.phase[i] * (a[(1, 0)] * p0 + a[(1, 1)] * p1);
    }
    out.time = pb.t_out;
    out.mass_scale = f.mass_scale * nu;
    let (wrapped_fraction, escaped_fraction) = support(u, &grid, &pb, &f.density(), &out.density(), f.time);
    Ok(Represented { field: out, wrapped_fraction, escaped_fraction })
}

/// Representation on the full lifted spinor `(φ, χ)`:
/// the block matrix is `((ν⁻¹a, 0), (−(i/2)σ(νb)a, ν a))`.
pub fn represent_lifted(u: &SnGroupElement, l: &LiftedSpinor) -> Result<LiftedSpinor> {
    u.validate()?;
    let grid = l.grid;
    let pb = pullback(u, &grid, l.time, l.m, l.hbar);
    let comps: Vec<&[C64]> = l.psi.iter().map(|c| c.as_slice()).collect();
    let vals = evaluate(u, &grid, &pb, &comps);
    let nu = u.nu();
    let sb = exponents::spin_block();
    let pre = C64::new(nu.powf(exponents::prefactor()), 0.0);
    let a = u.su2();
    let tl = a * C64::new(nu.powf(sb), 0.0) * pre;
    let br = a * C64::new(nu.powf(-sb), 0.0) * pre;
    let bl: Mat2 = sigma_dot(u.b.map(|v| v * nu)) * a * C64::new(0.0, -0.5) * pre;
    let mut psi: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); grid.len()]);
    for i in 0..grid.len() {
        let ph = [vals[0][i], vals[1][i]];
        let ch = [vals[2][i], vals[3][i]];
        for r in 0..2 {
            psi[r][i] = pb.phase[i] * (tl[(r, 0)] * ph[0] + tl[(r, 1)] * ph[1]);
            psi[2 + r][i] = pb.phase[i]
                * (bl[(r, 0)] * ph[0] + bl[(r, 1)] * ph[1] + br[(r, 0)] * ch[0] + br[(r, 1)] * ch[1]);
        }
    }
    Ok(LiftedSpinor { grid, psi, m: nu * l.m, hbar: l.hbar, time: pb.t_out, dt: None, fiber_slope: None })
}
