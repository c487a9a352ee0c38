use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::fields::{Bispinor, GridSpec, Spectral};
use crate::geometry::pauli::sigma_dot;
use crate::geometry::{spinor4_zeros, GridPotential, LiftedSpinor};

/// `σ(∂)φ = Σ_j σ_j ∂_jφ`, spectrally.
pub fn sigma_grad(grid: &GridSpec, phi: &Bispinor) -> Bispinor {
    let sp = Spectral::get(grid);
    let g0 = sp.gradient(&phi[0]);
    let g1 = sp.gradient(&phi[1]);
    let i = C64::new(0.0, 1.0);
    let n = grid.len();
    let mut out: Bispinor = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for k in 0..n {
        // σx: swap; σy: (-i b, i a); σz: (a, -b)
        out[0][k] = g0[2][k] + g1[0][k] - i * g1[1][k];
        out[1][k] = g0[0][k] + i * g0[1][k] - g1[2][k];
    }
    out
}

fn sigma_apply(v: [f64; 3], a: C64, b: C64) -> (C64, C64) {
    let s = sigma_dot(v);
    (s[(0, 0)] * a + s[(0, 1)] * b, s[(1, 0)] * a + s[(1, 1)] * b)
}

fn varpi_at(p: &GridPotential, k: usize) -> [f64; 3] {
    [p.varpi[0][k], p.varpi[1][k], p.varpi[2][k]]
}

/// `χ = −(ħ/2m)σ(∂)φ + (i/2)σ(ϖ)φ`.
pub fn chi_from_phi(phi: &Bispinor, p: &GridPotential, m: f64, hbar: f64) -> Bispinor {
    let sg = sigma_grad(&p.grid, phi);
    let f = -hbar / (2.0 * m);
    let half_i = C64::new(0.0, 0.5);
    let n = p.grid.len();
    let mut out = sg;
    for k in 0..n {
        let (a, b) = sigma_apply(varpi_at(p, k), phi[0][k], phi[1][k]);
        out[0][k] = out[0][k] * f + half_i * a;
        out[1][k] = out[1][k] * f + half_i * b;
    }
    out
}

/// First line of the Lévy-Leblond system, `ħσ(∂)φ + 2mχ − imσ(ϖ)φ`, per node.
pub fn first_line_residual(phi: &Bispinor, chi: &Bispinor, p: &GridPotential, m: f64, hbar: f64) -> Vec<f64> {
    let sg = sigma_grad(&p.grid, phi);
    let im = C64::new(0.0, m);
    (0..p.grid.len())
        .map(|k| {
            let (a, b) = sigma_apply(varpi_at(p, k), phi[0][k], phi[1][k]);
            let r0 = sg[0][k] * hbar + chi[0][k] * (2.0 * m) - im * a;
            let r1 = sg[1][k] * hbar + chi[1][k] * (2.0 * m) - im * b;
            (r0.norm_sqr() + r1.norm_sqr()).sqrt()
        })
        .collect()
}

/// Symmetric form:
/// `Hφ = −(ħ²/2m)Δφ + (iħ/2)[σ(∂)σ(ϖ) + σ(ϖ)σ(∂)]φ + m(U + ϖ²/2)φ + (ħ/4)σ(∇×ϖ)φ`.
pub fn apply_hamiltonian(phi: &Bispinor, p: &GridPotential, m: f64, hbar: f64) -> Bispinor {
    let grid = &p.grid;
    let sp = Spectral::get(grid);
    let n = grid.len();
    let kin = -hbar * hbar / (2.0 * m);
    let lap = [sp.laplacian(&phi[0]), sp.laplacian(&phi[1])];
    let mut out: Bispinor = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    if !p.has_varpi() {
        for c in 0..2 {
            out[c].par_iter_mut().enumerate().for_each(|(k, o)| *o = lap[c][k] * kin + phi[c][k] * (m * p.u[k]));
        }
        return out;
    }
    let mut sw: Bispinor = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for k in 0..n {
        let (a, b) = sigma_apply(varpi_at(p, k), phi[0][k], phi[1][k]);
        sw[0][k] = a;
        sw[1][k] = b;
    }
    let d_sw = sigma_grad(grid, &sw);
    let sg = sigma_grad(grid, phi);
    let curl = p.curl_varpi();
    let ih2 = C64::new(0.0, 0.5 * hbar);
    for k in 0..n {
        let w = varpi_at(p, k);
        let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        let (a, b) = sigma_apply(w, sg[0][k], sg[1][k]);
        let (sa, sb) = sigma_apply([curl[0][k], curl[1][k], curl[2][k]], phi[0][k], phi[1][k]);
        let pot = m * (p.u[k] + 0.5 * w2);
        out[0][k] = lap[0][k] * kin + ih2 * (d_sw[0][k] + a) + phi[0][k] * pot + sa * (0.25 * hbar);
        out[1][k] = lap[1][k] * kin + ih2 * (d_sw[1][k] + b) + phi[1][k] * pot + sb * (0.25 * hbar);
    }
    out
}

/// Canonical form: `Hφ = (1/2m)(P − mϖ)²φ + mUφ − (ħ/4)σ(∇×ϖ)φ` with `P = −iħ∇`.
pub fn apply_hamiltonian_canonical(phi: &Bispinor, p: &GridPotential, m: f64, hbar: f64) -> Bispinor {
    let grid = &p.grid;
    let sp = Spectral::get(grid);
    let n = grid.len();
    let mih = C64::new(0.0, -hbar);
    let curl = p.curl_varpi();
    let mut out: Bispinor = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for c in 0..2 {
        let g = sp.gradient(&phi[c]);
        for a in 0..3 {
            // π_a φ = (−iħ∂_a − mϖ_a)φ, then π_a again
            let pi: Vec<C64> = (0..n).map(|k| mih * g[a][k] - phi[c][k] * (m * p.varpi[a][k])).collect();
            let dpi = sp.derivative(&pi, a);
            for k in 0..n {
                out[c][k] += (mih * dpi[k] - pi[k] * (m * p.varpi[a][k])) / (2.0 * m);
            }
        }
    }
    for k in 0..n {
        let (sa, sb) = sigma_apply([curl[0][k], curl[1][k], curl[2][k]], phi[0][k], phi[1][k]);
        out[0][k] += phi[0][k] * (m * p.u[k]) - sa * (0.25 * hbar);
        out[1][k] += phi[1][k] * (m * p.u[k]) - sb * (0.25 * hbar);
    }
    out
}

/// Upper bound on the spectral radius of `H` on this grid.
pub fn hamiltonian_norm_estimate(p: &GridPotential, m: f64, hbar: f64) -> f64 {
    let kmax = std::f64::consts::PI / p.grid.dx();
    let kin = hbar * hbar * 3.0 * kmax * kmax / (2.0 * m);
    let curl = p.curl_varpi();
    let mut pot: f64 = 0.0;
    let mut wmax: f64 = 0.0;
    let mut omax: f64 = 0.0;
    for k in 0..p.grid.len() {
        let w = varpi_at(p, k);
        let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        pot = pot.max((m * (p.u[k] + 0.5 * w2)).abs());
        wmax = wmax.max(w2.sqrt());
        omax = omax.max((curl[0][k].powi(2) + curl[1][k].powi(2) + curl[2][k].powi(2)).sqrt());
    }
    kin + pot + hbar * 3f64.sqrt() * kmax * wmax + 0.25 * hbar * omax
}

/// Lift a solution of `iħ∂_tφ = Hφ` to Bargmann space: `χ` from the first-order
/// relation and `∂_tφ = −(i/ħ)Hφ`.
pub fn lift(phi: &Bispinor, p: &GridPotential, m: f64, hbar: f64, time: f64) -> LiftedSpinor {
    let chi = chi_from_phi(phi, p, m, hbar);
    let hphi = apply_hamiltonian(phi, p, m, hbar);
    let f = C64::new(0.0, -1.0 / hbar);
    let mut dt = spinor4_zeros(p.grid.len());
    for c in 0..2 {
        dt[c] = hphi[c].iter().map(|v| v * f).collect();
    }
    LiftedSpinor::new(p.grid, phi.clone(), chi, m, hbar, time).with_dt(dt)
}
