use rayon::prelude::*;

use super::{omega_axial, PotentialData};
use crate::fields::{GridSpec, Spectral};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Residuals of the Ricci constraints, as grid max-norms over unmasked nodes.
#[derive(Clone, Debug)]
pub struct RicciResidual {
    /// `‖δΩ‖ = max |∇×∇×ϖ|`.
    pub r1: f64,
    /// `max |ΔU + ∂_t ∇·ϖ + ½‖Ω‖² − 4πG(ρ − ρ_bg)|`.
    pub r2: f64,
    /// `‖Ω‖² = |∇×ϖ|²` per node.
    pub omega_sq: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Step of the fourth-order stencil used on analytic potentials.
pub const ANALYTIC_FD_STEP: f64 = 5e-4;

fn fd4<const K: usize, F>(f: F, x: [f64; 3], axis: usize, h: f64) -> Result<[f64; K]>
where
    F: Fn([f64; 3]) -> Result<[f64; K]>,
{
    let at = |s: f64| {
        let mut y = x;
        y[axis] += s * h;
        f(y)
    };
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    Ok(std::array::from_fn(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h)))
}

fn curl_of<F>(f: F, x: [f64; 3], h: f64) -> Result<[f64; 3]>
where
    F: Fn([f64; 3]) -> Result<[f64; 3]>,
{
    let d: Vec<[f64; 3]> = (0..3).map(|a| fd4(&f, x, a, h)).collect::<Result<_>>()?;
    // d[a][b] = ∂_a f_b
    Ok([d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]])
}

/// Evaluate both Ricci constraints on the nodes of `grid`.
///
/// Grid potentials use spectral derivatives (and their stored background
/// density); every other provenance is evaluated pointwise with a
/// fourth-order stencil on the exact first derivatives.
pub fn ricci_constraint_residual(
    p: &PotentialData,
    grid: &GridSpec,
    rho: &[f64],
    g_newton: f64,
    t: f64,
) -> Result<RicciResidual> {
    if rho.len() != grid.len() {
        return Err(Error::GridMismatch("density does not match grid".into()));
    }
    let n = grid.len();
    let four_pi_g = 4.0 * PI * g_newton;
    if let PotentialData::Grid(gp) = p {
        gp.grid.check_same(grid)?;
        let sp = Spectral::get(grid);
        let lap = sp.laplacian_real(&gp.u);
        let ddiv = sp.divergence_real([&gp.dt_varpi[0], &gp.dt_varpi[1], &gp.dt_varpi[2]]);
        let curl = gp.curl_varpi();
        let cc = sp.curl_real([&curl[0], &curl[1], &curl[2]]);
        let mask: Vec<bool> = (0..n).map(|i| gp.is_masked(i)).collect();
        let mut out = RicciResidual { r1: 0.0, r2: 0.0, omega_sq: vec![0.0; n], mask };
        for i in 0..n {
            let o2 = curl[0][i].powi(2) + curl[1][i].powi(2) + curl[2][i].powi(2);
            out.omega_sq[i] = o2;
            if out.mask[i] {
                continue;
            }
            let c = (cc[0][i].powi(2) + cc[1][i].powi(2) + cc[2][i].powi(2)).sqrt();
            out.r1 = out.r1.max(c);
            let r = lap[i] + ddiv[i] + 0.5 * o2 - four_pi_g * (rho[i] - gp.background);
            out.r2 = out.r2.max(r.abs());
        }
        return Ok(out);
    }
    let h = ANALYTIC_FD_STEP;
    let dx = grid.dx();
    let rows: Vec<(bool, f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.position(i);
            if p.excluded(x, dx) {
                return Ok((true, 0.0, 0.0, 0.0));
            }
            let pt = p.point(x, t)?;
            let curl = omega_axial(&pt.omega()?);
            let o2 = curl.iter().map(|v| v * v).sum::<f64>();
            let grad = |y| p.point(y, t).map(|q| q.derivs.expect("derivatives").grad_u);
            let dtw = |y| p.point(y, t).map(|q| q.derivs.expect("derivatives").dt_varpi);
            let mut lap = 0.0;
            let mut ddiv = 0.0;
            for a in 0..3 {
                lap += fd4(grad, x, a, h)?[a];
                ddiv += fd4(dtw, x, a, h)?[a];
            }
            let curl_at = |y| Ok::<_, Error>(omega_axial(&p.point(y, t)?.omega()?));
            let cc = curl_of(curl_at, x, h)?;
            let r1 = cc.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r2 = lap + ddiv + 0.5 * o2 - four_pi_g * rho[i];
            Ok((false, o2, r1, r2.abs()))
        })
        .collect::<Result<_>>()?;
    let mut out = RicciResidual { r1: 0.0, r2: 0.0, omega_sq: vec![0.0; n], mask: vec![false; n] };
    for (i, (m, o2, r1, r2)) in rows.into_iter().enumerate() {
        out.mask[i] = m;
        out.omega_sq[i] = o2;
        if !m {
            out.r1 = out.r1.max(r1);
            out.r2 = out.r2.max(r2);
        }
    }
    Ok(out)
}
