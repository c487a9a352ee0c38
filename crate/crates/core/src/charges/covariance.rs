use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::evolve::{chi_from_phi, Evolver, RunConfig, SourceMode};
use crate::fields::BispinorField;
use crate::geometry::{dirac_residual, spinor4_zeros, LiftedSpinor, PotentialData};
use crate::gravity::PoissonSolver;
use crate::sngroup::{represent, transform_potentials, SnGroupElement};
use crate::{Error, Result};

/// Support fraction above which a transformed run is declared invalid.
const SUPPORT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub field: BispinorField,
    pub external: PotentialData,
    pub run: RunConfig,
    /// Also evaluate the Dirac residual of the transformed solution (costs two
    /// extra representations).
    pub dirac_check: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    /// `‖φ_b − φ_a′‖ / ‖φ_a′‖` at the final step.
    pub discrepancy: f64,
    pub dirac_residual: Option<f64>,
    /// Residual over `max |ħ∂_tφ′|`.
    pub dirac_residual_rel: Option<f64>,
    pub wrapped_fraction: f64,
    pub escaped_fraction: f64,
    pub valid: bool,
    pub steps: usize,
    pub dt: f64,
    pub dt_hat: f64,
    pub t_final: f64,
    pub t_hat_final: f64,
}

/// Compare (a) evolve-then-represent against (b) represent-then-evolve under
/// the transformed potentials, mass `νm` and time step `(d/g)Δt`.
pub fn covariance_test(u: &SnGroupElement, sc: &Scenario) -> Result<CovarianceReport> {
    u.validate()?;
    sc.run.validate()?;
    let k = sc.run.steps;
    if sc.dirac_check && k == 0 {
        return Err(Error::Precondition("the Dirac check needs at least one step".into()));
    }

    // (a)
    let mut ev = Evolver::new(sc.run.clone(), sc.external.clone(), sc.field.clone())?;
    let mut prev = None;
    for step in 0..k {
        if sc.dirac_check && step == k - 1 {
            prev = Some(ev.field().clone());
        }
        ev.step()?;
    }
    let at_k = ev.field().clone();
    let next = if sc.dirac_check {
        ev.step()?;
        Some(ev.field().clone())
    } else {
        None
    };
    let ra = represent(u, &at_k)?;
    let mut wrapped = ra.wrapped_fraction;
    let mut escaped = ra.escaped_fraction;

    // (b)
    let r0 = represent(u, &sc.field)?;
    wrapped = wrapped.max(r0.wrapped_fraction);
    escaped = escaped.max(r0.escaped_fraction);
    let dt_hat = sc.run.dt * u.d / u.g;
    let run_b = RunConfig { dt: dt_hat, ..sc.run.clone() };
    let ext_b = transform_potentials(u, &sc.external);
    let mut ev_b = Evolver::new(run_b.clone(), ext_b.clone(), r0.field)?;
    for _ in 0..k {
        ev_b.step()?;
    }
    let fb = ev_b.field().clone();
    if (fb.time - ra.field.time).abs() > 1e-9 * (1.0 + fb.time.abs()) {
        return Err(Error::Precondition(format!(
            "time grids misaligned: t̂ = {} versus represented {}",
            fb.time, ra.field.time
        )));
    }
    let discrepancy = fb.relative_distance(&ra.field);

    let (mut dres, mut drel) = (None, None);
    if let (Some(prev), Some(next)) = (prev, next) {
        let rp = represent(u, &prev)?;
        let rn = represent(u, &next)?;
        let f = &ra.field;
        let (m, hbar) = (f.physics.m, f.physics.hbar);
        let mut gp = if run_b.source_mode == SourceMode::Free {
            PotentialData::flat().sample(&f.grid, f.time)?
        } else {
            ext_b.sample(&f.grid, f.time)?
        };
        if run_b.source_mode == SourceMode::SelfConsistent {
            let s = PoissonSolver { kind: run_b.poisson, g_newton: f.physics.g_newton }
                .solve(&f.grid, &crate::evolve::normalized_source(f))?;
            gp.add_u(&s.u, s.solver.name());
            gp.background = s.background;
        }
        let chi = chi_from_phi(&f.phi, &gp, m, hbar);
        let mut dt = spinor4_zeros(f.grid.len());
        let mut scale: f64 = 0.0;
        for c in 0..2 {
            dt[c] = rn.field.phi[c]
                .iter()
                .zip(&rp.field.phi[c])
                .map(|(a, b)| (a - b) / C64::new(2.0 * dt_hat, 0.0))
                .collect();
            scale = scale.max(dt[c].iter().fold(0.0, |acc: f64, z| acc.max(hbar * z.norm())));
        }
        let l = LiftedSpinor::new(f.grid, f.phi.clone(), chi, m, hbar, f.time).with_dt(dt);
        let r = dirac_residual(&l, &PotentialData::Grid(gp))?.max();
        dres = Some(r);
        drel = Some(if scale > 0.0 { r / scale } else { r });
    }

    Ok(CovarianceReport {
        discrepancy,
        dirac_residual: dres,
        dirac_residual_rel: drel,
        wrapped_fraction: wrapped,
        escaped_fraction: escaped,
        valid: wrapped <= SUPPORT_TOL && escaped <= SUPPORT_TOL,
        steps: k,
        dt: sc.run.dt,
        dt_hat,
        t_final: at_k.time,
        t_hat_final: fb.time,
    })
}
