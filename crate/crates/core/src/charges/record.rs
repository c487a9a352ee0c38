use serde::Serialize;

use crate::evolve::{apply_hamiltonian, Evolver};
use crate::fields::{inner, spin_density, BispinorField, Spectral};
use crate::geometry::GridPotential;
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct ChargeRecord {
    pub t: f64,
    /// `Re ∫φ†Hφ`.
    pub e_paper: f64,
    /// `⟨T⟩ + spin term + m∫ϱU_ext + ½m∫ϱU_self`; only for self-sourced runs.
    pub e_sn: Option<f64>,
    pub p: [f64; 3],
    /// Orbital plus spin.
    pub j: [f64; 3],
    pub j_orbital: [f64; 3],
    pub j_spin: [f64; 3],
    pub mass: f64,
    pub g: [f64; 3],
    pub d: f64,
    /// `(1/2m)∫|(P − mϖ)φ|²`.
    pub t_kin: f64,
    /// `m∫ϱU` with the total `U`.
    pub w_pot: f64,
    /// `−(ħ/4)∫φ†σ(∇×ϖ)φ`.
    pub e_spin: f64,
    pub locality_warning: bool,
}

/// Charges of `f` in the total potential `p`; `u_self` is the self-sourced part
/// of `p.u` when there is one.
pub fn compute_charges(f: &BispinorField, p: &GridPotential, u_self: Option<&[f64]>) -> Result<ChargeRecord> {
    let grid = f.grid;
    grid.check_same(&p.grid)?;
    let (m, hbar, t) = (f.physics.m, f.physics.hbar, f.time);
    let n = grid.len();
    let dv = grid.cell_volume();
    let sp = Spectral::get(&grid);
    let phi = &f.phi;
    let rho = f.density();
    let g = [sp.gradient(&phi[0]), sp.gradient(&phi[1])];
    let curl = p.curl_varpi();

    let mut mass = 0.0;
    let mut p_tot = [0.0; 3];
    let mut x_m = [0.0; 3];
    let mut l_orb = [0.0; 3];
    let mut s_tot = [0.0; 3];
    let mut x_dot = 0.0;
    let mut w_pot = 0.0;
    let mut e_spin = 0.0;
    let mut w_ext = 0.0;
    let mut w_self = 0.0;
    for k in 0..n {
        let x = grid.position(k);
        let r = rho[k];
        let dens: [f64; 3] = std::array::from_fn(|a| {
            hbar * (phi[0][k].conj() * g[0][a][k] + phi[1][k].conj() * g[1][a][k]).im - m * p.varpi[a][k] * r
        });
        let s = spin_density(phi[0][k], phi[1][k]);
        mass += r;
        for a in 0..3 {
            p_tot[a] += dens[a];
            x_m[a] += x[a] * r;
            s_tot[a] += s[a];
        }
        l_orb[0] += x[1] * dens[2] - x[2] * dens[1];
        l_orb[1] += x[2] * dens[0] - x[0] * dens[2];
        l_orb[2] += x[0] * dens[1] - x[1] * dens[0];
        x_dot += x[0] * dens[0] + x[1] * dens[1] + x[2] * dens[2];
        w_pot += r * p.u[k];
        e_spin += s[0] * curl[0][k] + s[1] * curl[1][k] + s[2] * curl[2][k];
        if let Some(us) = u_self {
            w_self += r * us[k];
            w_ext += r * (p.u[k] - us[k]);
        }
    }
    let sc = |v: [f64; 3], f: f64| v.map(|c| c * f);
    let mass = m * mass * dv;
    let p_tot = sc(p_tot, dv);
    let x_m = sc(x_m, m * dv);
    let j_orbital = sc(l_orb, dv);
    let j_spin = sc(s_tot, 0.5 * hbar * dv);
    let w_pot = m * w_pot * dv;
    let e_spin = -0.25 * hbar * e_spin * dv;
    let e_paper = inner(&grid, phi, &apply_hamiltonian(phi, p, m, hbar)).re;
    let t_kin = e_paper - w_pot - e_spin;
    let e_sn = u_self.map(|_| t_kin + e_spin + m * dv * (w_ext + 0.5 * w_self));
    let obs = crate::fields::observables(f);
    Ok(ChargeRecord {
        t,
        e_paper,
        e_sn,
        p: p_tot,
        j: std::array::from_fn(|a| j_orbital[a] + j_spin[a]),
        j_orbital,
        j_spin,
        mass,
        g: std::array::from_fn(|a| t * p_tot[a] - x_m[a]),
        d: -5.0 * t * e_paper - 3.0 * x_dot * dv,
        t_kin,
        w_pot,
        e_spin,
        locality_warning: obs.locality_warning,
    })
}

/// Charges of the evolver's current state.
pub fn charges_of(ev: &mut Evolver) -> Result<ChargeRecord> {
    let p = ev.potential()?;
    let us = ev.self_potential()?.map(|s| s.u.clone());
    compute_charges(ev.field(), &p, us.as_deref())
}
