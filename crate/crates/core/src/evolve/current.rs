use num_complex::Complex64 as C64;

use super::hamiltonian::apply_hamiltonian;
use crate::fields::{spin_density, Bispinor, Spectral};
use crate::geometry::pauli::pauli;
use crate::geometry::GridPotential;

#[derive(Clone, Debug)]
pub struct CurrentReport {
    /// `ϱ = φ†φ`.
    pub rho: Vec<f64>,
    /// `J = i(φ†σχ − χ†σφ)`.
    pub j_bispinor: [Vec<f64>; 3],
    /// `J = (ħ/m)Im(φ†∇φ) + (ħ/2m)∇×(φ†σφ) − ϖϱ`.
    pub j_phi: [Vec<f64>; 3],
    /// Schrödinger part `(ħ/m)Im(φ†∇φ)` of `j_phi`.
    pub j_orbital: [Vec<f64>; 3],
    /// Spin-curl part `(ħ/2m)∇×(φ†σφ)` of `j_phi`.
    pub j_spin: [Vec<f64>; 3],
    /// `max |J_bispinor − J_phi|`.
    pub form_mismatch: f64,
    /// `max |∂_tϱ + ∇·J|` with `∂_tϱ = (2/ħ)Im(φ†Hφ)`.
    pub residual: f64,
}

/// Both current expressions and the continuity residual for the Hamiltonian flow.
pub fn current_and_continuity(phi: &Bispinor, chi: &Bispinor, p: &GridPotential, m: f64, hbar: f64) -> CurrentReport {
    let grid = p.grid;
    let n = grid.len();
    let sp = Spectral::get(&grid);
    let rho: Vec<f64> = (0..n).map(|i| phi[0][i].norm_sqr() + phi[1][i].norm_sqr()).collect();
    let sig = [pauli(0), pauli(1), pauli(2)];
    let i = C64::new(0.0, 1.0);
    let j_bispinor: [Vec<f64>; 3] = std::array::from_fn(|a| {
        (0..n)
            .map(|k| {
                let s = &sig[a];
                let sc0 = s[(0, 0)] * chi[0][k] + s[(0, 1)] * chi[1][k];
                let sc1 = s[(1, 0)] * chi[0][k] + s[(1, 1)] * chi[1][k];
                let z = phi[0][k].conj() * sc0 + phi[1][k].conj() * sc1;
                (i * (z - z.conj())).re
            })
            .collect()
    });
    let g = [sp.gradient(&phi[0]), sp.gradient(&phi[1])];
    let j_orbital: [Vec<f64>; 3] = std::array::from_fn(|a| {
        (0..n).map(|k| hbar / m * (phi[0][k].conj() * g[0][a][k] + phi[1][k].conj() * g[1][a][k]).im).collect()
    });
    let s: Vec<[f64; 3]> = (0..n).map(|k| spin_density(phi[0][k], phi[1][k])).collect();
    let sv: [Vec<f64>; 3] = std::array::from_fn(|a| s.iter().map(|v| v[a]).collect());
    let curl = sp.curl_real([&sv[0], &sv[1], &sv[2]]);
    let j_spin: [Vec<f64>; 3] = std::array::from_fn(|a| curl[a].iter().map(|c| hbar / (2.0 * m) * c).collect());
    let j_phi: [Vec<f64>; 3] =
        std::array::from_fn(|a| (0..n).map(|k| j_orbital[a][k] + j_spin[a][k] - p.varpi[a][k] * rho[k]).collect());
    let mut form_mismatch: f64 = 0.0;
    for a in 0..3 {
        for k in 0..n {
            form_mismatch = form_mismatch.max((j_bispinor[a][k] - j_phi[a][k]).abs());
        }
    }
    let hphi = apply_hamiltonian(phi, p, m, hbar);
    let div = sp.divergence_real([&j_phi[0], &j_phi[1], &j_phi[2]]);
    let residual = (0..n)
        .map(|k| {
            let drho = 2.0 / hbar * (phi[0][k].conj() * hphi[0][k] + phi[1][k].conj() * hphi[1][k]).im;
            (drho + div[k]).abs()
        })
        .fold(0.0, f64::max);
    CurrentReport { rho, j_bispinor, j_phi, j_orbital, j_spin, form_mismatch, residual }
}

/// `max |(ϱ₊ − ϱ₋)/(2Δt) + ∇·J|` from densities one step either side of `J`.
pub fn continuity_residual_fd(
    grid: &crate::fields::GridSpec,
    rho_prev: &[f64],
    rho_next: &[f64],
    dt: f64,
    j: &[Vec<f64>; 3],
) -> f64 {
    let div = Spectral::get(grid).divergence_real([&j[0], &j[1], &j[2]]);
    (0..grid.len()).map(|k| ((rho_next[k] - rho_prev[k]) / (2.0 * dt) + div[k]).abs()).fold(0.0, f64::max)
}
