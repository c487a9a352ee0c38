use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stepper::normalized_source;
use crate::fields::{BispinorField, Spectral};
use crate::geometry::PotentialData;
use crate::gravity::{PoissonKind, PoissonSolver};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateConfig {
    /// Imaginary time step.
    pub dtau: f64,
    pub max_iter: usize,
    /// Stop once the energy changes by less than this per step.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub poisson: PoissonKind,
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub field: BispinorField,
    /// `⟨T⟩ + m∫ϱU_ext + ½m∫ϱU_self` of the normalized output.
    pub energy: f64,
    pub iterations: usize,
    pub solver: PoissonKind,
}

/// Imaginary-time projection onto the lowest self-consistent state.
///
/// The self potential is refreshed once per step from the normalized field.
pub fn ground_state(cfg: &GroundStateConfig, external: &PotentialData, initial: BispinorField) -> Result<GroundState> {
    if !(cfg.dtau > 0.0 && cfg.dtau.is_finite()) {
        return Err(Error::Config(format!("dtau = {} must be positive", cfg.dtau)));
    }
    if !external.varpi_is_zero() {
        return Err(Error::Precondition("ground_state requires ϖ = 0".into()));
    }
    initial.validate()?;
    let grid = initial.grid;
    let ph = initial.physics;
    let sp = Spectral::get(&grid);
    let ext = external.sample(&grid, initial.time)?;
    if !external.is_static() {
        return Err(Error::Precondition("ground_state requires time-independent external potentials".into()));
    }
    let solver = PoissonSolver { kind: cfg.poisson, g_newton: ph.g_newton };
    let kin: Vec<f64> =
        (0..grid.len()).map(|i| (-ph.hbar * cfg.dtau * sp.ksq(i) / (2.0 * ph.m)).exp()).collect();

    let mut f = initial;
    f.normalize();
    let self_u = |f: &BispinorField| -> Result<Vec<f64>> {
        if ph.g_newton == 0.0 {
            return Ok(vec![0.0; grid.len()]);
        }
        Ok(solver.solve(&grid, &normalized_source(f))?.u)
    };
    let energy = |f: &BispinorField, us: &[f64]| -> f64 {
        let mut t = 0.0;
        for c in 0..2 {
            let h = sp.forward(&f.phi[c]);
            t += h.iter().enumerate().map(|(i, z)| sp.ksq(i) * z.norm_sqr()).sum::<f64>();
        }
        let t = t * ph.hbar * ph.hbar / (2.0 * ph.m) * grid.cell_volume() / grid.len() as f64;
        let rho = f.density();
        let w: f64 = rho.iter().zip(&ext.u).zip(us).map(|((r, ue), us)| r * (ue + 0.5 * us)).sum();
        t + ph.m * w * grid.cell_volume()
    };
    let kick = |f: &mut BispinorField, us: &[f64]| {
        let a = -ph.m * 0.5 * cfg.dtau / ph.hbar;
        for c in 0..2 {
            f.phi[c].par_iter_mut().enumerate().for_each(|(i, z)| *z *= (a * (ext.u[i] + us[i])).exp());
        }
    };

    let mut us = self_u(&f)?;
    let mut e_prev = energy(&f, &us);
    for it in 1..=cfg.max_iter {
        // U is frozen over the step so the fixed point is that of a symmetric splitting
        kick(&mut f, &us);
        for c in 0..2 {
            let mut h = sp.forward(&f.phi[c]);
            h.iter_mut().zip(&kin).for_each(|(z, k)| *z *= k);
            f.phi[c] = sp.inverse(h);
        }
        kick(&mut f, &us);
        f.normalize();
        us = self_u(&f)?;
        let e = energy(&f, &us);
        if (e - e_prev).abs() < cfg.tol {
            return Ok(GroundState { field: f, energy: e, iterations: it, solver: cfg.poisson });
        }
        e_prev = e;
    }
    Err(Error::Convergence(format!(
        "ground state not converged after {} iterations (last energy {e_prev:.12e})",
        cfg.max_iter
    )))
}

