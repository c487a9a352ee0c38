use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::config::{EvolverKind, RunConfig, SourceMode};
use super::hamiltonian::{apply_hamiltonian, hamiltonian_norm_estimate};
use crate::fields::{Bispinor, BispinorField, GridSpec, Spectral};
use crate::geometry::{GridPotential, PotentialData};
use crate::gravity::{PoissonSolution, PoissonSolver};
use crate::{Error, Result};

/// RK4 is stable on the imaginary axis up to `|λΔt| = 2√2`; keep a margin.
const RK4_STABILITY_LIMIT: f64 = 2.5;

/// Mass density `m φ†φ / ‖φ‖²` sourcing the self-consistent potential.
pub fn normalized_source(f: &BispinorField) -> Vec<f64> {
    source_of(&f.grid, &f.phi, f.physics.m)
}

fn source_of(grid: &GridSpec, phi: &Bispinor, m: f64) -> Vec<f64> {
    let rho: Vec<f64> = (0..grid.len()).map(|i| phi[0][i].norm_sqr() + phi[1][i].norm_sqr()).collect();
    let norm = grid.integrate(&rho);
    rho.into_iter().map(|r| m * r / norm).collect()
}

pub struct Evolver {
    cfg: RunConfig,
    external: PotentialData,
    ext_cache: Option<GridPotential>,
    field: BispinorField,
    solver: PoissonSolver,
    /// Self-consistent part of `U` for the current field, and its solver metadata.
    u_self: Option<PoissonSolution>,
    kinetic: Option<Vec<C64>>,
    pub warnings: Vec<String>,
    steps_taken: usize,
}

impl Evolver {
    pub fn new(cfg: RunConfig, external: PotentialData, field: BispinorField) -> Result<Self> {
        cfg.validate()?;
        field.validate()?;
        let external = if cfg.source_mode == SourceMode::Free { PotentialData::flat() } else { external };
        if cfg.evolver == EvolverKind::SplitStep && !external.varpi_is_zero() {
            return Err(Error::Precondition(
                "split-step evolution requires ϖ = 0; use the rk4 evolver for Coriolis potentials".into(),
            ));
        }
        let solver = PoissonSolver { kind: cfg.poisson, g_newton: field.physics.g_newton };
        let mut ev = Evolver {
            cfg,
            external,
            ext_cache: None,
            field,
            solver,
            u_self: None,
            kinetic: None,
            warnings: Vec::new(),
            steps_taken: 0,
        };
        if ev.cfg.evolver == EvolverKind::Rk4 {
            let p = ev.potential()?;
            let h = hamiltonian_norm_estimate(&p, ev.field.physics.m, ev.field.physics.hbar);
            let ratio = ev.cfg.dt * h / ev.field.physics.hbar;
            if ratio > RK4_STABILITY_LIMIT {
                return Err(Error::Stability(format!(
                    "rk4: dt·‖H‖/ħ = {ratio:.3} exceeds {RK4_STABILITY_LIMIT} (dt = {}, ‖H‖ ≈ {h:.3e}); \
                     reduce dt below {:.3e}",
                    ev.cfg.dt,
                    RK4_STABILITY_LIMIT * ev.field.physics.hbar / h
                )));
            }
        }
        Ok(ev)
    }

    pub fn field(&self) -> &BispinorField {
        &self.field
    }

    pub fn into_field(self) -> BispinorField {
        self.field
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn external(&self) -> &PotentialData {
        &self.external
    }

    pub fn time(&self) -> f64 {
        self.field.time
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn grid(&self) -> GridSpec {
        self.field.grid
    }

    fn self_consistent(&self) -> bool {
        self.cfg.source_mode == SourceMode::SelfConsistent
    }

    fn external_at(&mut self, t: f64) -> Result<GridPotential> {
        if self.external.is_static() {
            if self.ext_cache.is_none() {
                self.ext_cache = Some(self.external.sample(&self.field.grid, t)?);
            }
            let mut p = self.ext_cache.clone().expect("cached above");
            p.time = t;
            return Ok(p);
        }
        self.external.sample(&self.field.grid, t)
    }

    fn solve_self(&self, phi: &Bispinor) -> Result<PoissonSolution> {
        let grid = self.field.grid;
        self.solver.solve(&grid, &source_of(&grid, phi, self.field.physics.m))
    }

    fn ensure_u_self(&mut self) -> Result<()> {
        if self.self_consistent() && self.u_self.is_none() {
            let s = self.solve_self(&self.field.phi)?;
            if s.locality_warning {
                self.warn("locality: more than 1e-6 of the mass lies in the outer 10% of the box");
            }
            self.u_self = Some(s);
        }
        Ok(())
    }

    fn warn(&mut self, msg: &str) {
        if !self.warnings.iter().any(|w| w == msg) {
            self.warnings.push(msg.to_string());
        }
    }

    /// Self-consistent part of `U` for the current field (None outside that mode).
    pub fn self_potential(&mut self) -> Result<Option<&PoissonSolution>> {
        self.ensure_u_self()?;
        Ok(self.u_self.as_ref())
    }

    /// Total potential at the current time, derivatives included.
    pub fn potential(&mut self) -> Result<GridPotential> {
        self.ensure_u_self()?;
        let mut p = self.external_at(self.field.time)?;
        if let Some(s) = &self.u_self {
            add_self(&mut p, s);
        }
        Ok(p)
    }

    /// Replace the field (e.g. after an external transformation); caches are dropped.
    pub fn set_field(&mut self, field: BispinorField) -> Result<()> {
        self.field.grid.check_same(&field.grid)?;
        self.field = field;
        self.u_self = None;
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        match self.cfg.evolver {
            EvolverKind::SplitStep => self.split_step()?,
            EvolverKind::Rk4 => self.rk4_step()?,
        }
        self.steps_taken += 1;
        let v = self.field.phi.iter().flat_map(|c| c.iter()).all(|z| z.re.is_finite() && z.im.is_finite());
        if !v {
            return Err(Error::Stability(format!("non-finite field after step {}", self.steps_taken)));
        }
        Ok(())
    }

    /// Advance `steps`, invoking `observe` after every step.
    pub fn run<F>(&mut self, steps: usize, mut observe: F) -> Result<()>
    where
        F: FnMut(&mut Evolver) -> Result<()>,
    {
        for _ in 0..steps {
            self.step()?;
            observe(self)?;
        }
        Ok(())
    }

    fn kinetic_phase(&mut self) -> &[C64] {
        if self.kinetic.is_none() {
            let grid = self.field.grid;
            let sp = Spectral::get(&grid);
            let ph = self.field.physics;
            let a = -ph.hbar * self.cfg.dt / (2.0 * ph.m);
            let cut = grid.dealias.then(|| sp.dealias_cutoff());
            let v = (0..grid.len())
                .map(|i| {
                    if let Some(c) = cut {
                        if sp.kvec(i).iter().any(|k| k.abs() > c) {
                            return C64::new(0.0, 0.0);
                        }
                    }
                    C64::from_polar(1.0, a * sp.ksq(i))
                })
                .collect();
            self.kinetic = Some(v);
        }
        self.kinetic.as_deref().expect("set above")
    }

    fn half_kick(&mut self, t: f64) -> Result<()> {
        let ext = self.external_at(t)?;
        self.ensure_u_self()?;
        let m = self.field.physics.m;
        let f = -m * 0.5 * self.cfg.dt / self.field.physics.hbar;
        let u_self = self.u_self.as_ref().map(|s| &s.u);
        let u: Vec<f64> = match u_self {
            Some(us) => ext.u.iter().zip(us).map(|(a, b)| a + b).collect(),
            None => ext.u,
        };
        for c in 0..2 {
            self.field.phi[c].par_iter_mut().zip(u.par_iter()).for_each(|(z, &uk)| *z *= C64::from_polar(1.0, f * uk));
        }
        Ok(())
    }

    fn split_step(&mut self) -> Result<()> {
        let t0 = self.field.time;
        let dt = self.cfg.dt;
        self.half_kick(t0)?;
        let grid = self.field.grid;
        let sp = Spectral::get(&grid);
        let phase = self.kinetic_phase().to_vec();
        for c in 0..2 {
            let mut h = sp.forward(&self.field.phi[c]);
            h.par_iter_mut().zip(phase.par_iter()).for_each(|(z, p)| *z *= p);
            self.field.phi[c] = sp.inverse(h);
        }
        self.field.time = t0 + dt;
        // the density changed; the refreshed U is reused by the next step's first kick
        self.u_self = None;
        self.half_kick(t0 + dt)?;
        Ok(())
    }

    fn rhs(&mut self, phi: &Bispinor, t: f64) -> Result<Bispinor> {
        let mut p = self.external_at(t)?;
        if self.self_consistent() {
            let s = self.solve_self(phi)?;
            add_self(&mut p, &s);
        }
        let ph = self.field.physics;
        let mut h = apply_hamiltonian(phi, &p, ph.m, ph.hbar);
        let f = C64::new(0.0, -1.0 / ph.hbar);
        for c in h.iter_mut() {
            c.par_iter_mut().for_each(|z| *z *= f);
        }
        Ok(h)
    }

    fn rk4_step(&mut self) -> Result<()> {
        let t0 = self.field.time;
        let dt = self.cfg.dt;
        let y0 = self.field.phi.clone();
        let axpy = |y: &Bispinor, k: &Bispinor, a: f64| -> Bispinor {
            std::array::from_fn(|c| y[c].iter().zip(&k[c]).map(|(u, v)| u + v * a).collect())
        };
        let k1 = self.rhs(&y0, t0)?;
        let k2 = self.rhs(&axpy(&y0, &k1, 0.5 * dt), t0 + 0.5 * dt)?;
        let k3 = self.rhs(&axpy(&y0, &k2, 0.5 * dt), t0 + 0.5 * dt)?;
        let k4 = self.rhs(&axpy(&y0, &k3, dt), t0 + dt)?;
        for c in 0..2 {
            self.field.phi[c].par_iter_mut().enumerate().for_each(|(i, z)| {
                *z += (k1[c][i] + k2[c][i] * 2.0 + k3[c][i] * 2.0 + k4[c][i]) * (dt / 6.0);
            });
        }
        if self.field.grid.dealias {
            let sp = Spectral::get(&self.field.grid);
            let cut = sp.dealias_cutoff();
            for c in 0..2 {
                self.field.phi[c] =
                    sp.apply_multiplier(&self.field.phi[c], |i| {
                        if sp.kvec(i).iter().any(|k| k.abs() > cut) { C64::new(0.0, 0.0) } else { C64::new(1.0, 0.0) }
                    });
            }
        }
        self.field.time = t0 + dt;
        self.u_self = None;
        Ok(())
    }
}

fn add_self(p: &mut GridPotential, s: &PoissonSolution) {
    let provenance = format!("{}+{}", p.provenance, s.solver.name());
    p.add_u(&s.u, &provenance);
    p.background = s.background;
}
