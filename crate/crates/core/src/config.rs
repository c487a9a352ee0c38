//! Run configuration documents.
//!
//! One JSON document with the sections `grid`, `physics`, `potentials`,
//! `initial`, `evolver`, `outputs` and `checks`. Unknown keys are rejected so a
//! misspelt tolerance cannot silently fall back to its default.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::evolve::{EvolverKind, GroundStateConfig, RunConfig, SourceMode};
use crate::fields::{snapshot, BispinorField, GridSpec};
use crate::geometry::{CoriolisPreset, GridPotential, PotentialData, ScalarPreset};
use crate::gravity::PoissonKind;
use crate::sngroup::SnGroupRecord;
use crate::{Error, Physics, Result};

pub const CONFIG_VERSION: u32 = 1;

fn version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "version")]
    pub version: u32,
    pub grid: GridSpec,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub potentials: PotentialsSection,
    #[serde(default)]
    pub initial: Option<InitialCondition>,
    #[serde(default)]
    pub evolver: Option<EvolverSection>,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default)]
    pub checks: ChecksSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialsSection {
    Preset {
        #[serde(default)]
        u: ScalarPreset,
        #[serde(default)]
        varpi: CoriolisPreset,
    },
    Snapshot {
        path: PathBuf,
    },
}

impl Default for PotentialsSection {
    fn default() -> Self {
        PotentialsSection::Preset { u: ScalarPreset::default(), varpi: CoriolisPreset::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Normalized Gaussian packet `exp(−|x−c|²/4σ²) e^{ik·x} ξ`.
    Gaussian {
        #[serde(default)]
        center: [f64; 3],
        width: f64,
        /// Wavevector `k`; the momentum is `ħk`.
        #[serde(default)]
        momentum: [f64; 3],
        /// Spinor direction as `[[re, im], [re, im]]`.
        #[serde(default = "spin_up")]
        spinor: [[f64; 2]; 2],
    },
    Snapshot {
        path: PathBuf,
    },
}

fn spin_up() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 0.0]]
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverSection {
    #[serde(default)]
    pub source_mode: SourceMode,
    #[serde(default)]
    pub kind: EvolverKind,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub poisson: PoissonKind,
    #[serde(default = "one_usize")]
    pub output_every: usize,
    /// Prepare the initial state by imaginary-time projection first.
    #[serde(default)]
    pub ground_state: Option<GroundStateConfig>,
}

impl EvolverSection {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            source_mode: self.source_mode,
            evolver: self.kind,
            dt: self.dt,
            steps: self.steps,
            poisson: self.poisson,
            output_every: self.output_every,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Output directory; relative paths resolve against the working directory.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Write a field snapshot every this many output ticks (0 = final only).
    #[serde(default)]
    pub snapshot_every: usize,
    /// Data-parallel worker threads (0 = library default).
    #[serde(default)]
    pub threads: usize,
}

fn tol_13() -> f64 {
    1e-13
}
fn tol_12() -> f64 {
    1e-12
}
fn tol_10() -> f64 {
    1e-10
}
fn tol_8() -> f64 {
    1e-8
}
fn tol_6() -> f64 {
    1e-6
}
fn tol_5() -> f64 {
    1e-5
}
fn tol_4() -> f64 {
    1e-4
}
fn tol_3() -> f64 {
    1e-3
}
fn samples() -> usize {
    1000
}
fn seed() -> u64 {
    20_240_601
}

/// Tolerances and check parameters; defaults are the acceptance values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default = "tol_13")]
    pub clifford: f64,
    #[serde(default = "tol_12")]
    pub chirality: f64,
    #[serde(default = "tol_12")]
    pub metric_inverse: f64,
    #[serde(default = "tol_5")]
    pub christoffel: f64,
    #[serde(default = "tol_8")]
    pub christoffel_pattern: f64,
    #[serde(default = "tol_10")]
    pub ricci: f64,
    #[serde(default = "tol_6")]
    pub taubnut: f64,
    #[serde(default = "tol_10")]
    pub first_line: f64,
    #[serde(default = "tol_8")]
    pub dirac: f64,
    #[serde(default = "tol_10")]
    pub mass_drift: f64,
    #[serde(default = "tol_4")]
    pub energy_drift: f64,
    #[serde(default = "tol_3")]
    pub symmetry: f64,
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default = "seed")]
    pub seed: u64,
    /// Group element for `symmetry-check`.
    #[serde(default)]
    pub element: Option<SnGroupRecord>,
    /// Also report the Dirac residual of the transformed solution.
    #[serde(default)]
    pub symmetry_dirac: bool,
}

impl Default for ChecksSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all check fields have defaults")
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut c = Self::from_json(&text)?;
        c.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(c)
    }

    /// Make snapshot paths relative to the config file's directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let PotentialsSection::Snapshot { path } = &mut self.potentials {
            fix(path);
        }
        if let Some(InitialCondition::Snapshot { path }) = &mut self.initial {
            fix(path);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {}", self.version)));
        }
        self.grid.validate().map_err(|e| Error::Config(e.to_string()))?;
        let p = self.physics;
        if !(p.m > 0.0 && p.hbar > 0.0 && p.g_newton >= 0.0) {
            return Err(Error::Config("physics requires m > 0, hbar > 0, G >= 0".into()));
        }
        if let Some(InitialCondition::Gaussian { width, .. }) = &self.initial {
            if !(*width > 0.0) {
                return Err(Error::Config("gaussian width must be positive".into()));
            }
        }
        if let Some(e) = &self.evolver {
            e.run_config().validate()?;
        }
        Ok(())
    }

    /// External potentials (analytic presets or a grid snapshot).
    pub fn potential_data(&self) -> Result<PotentialData> {
        match &self.potentials {
            PotentialsSection::Preset { u, varpi } => Ok(PotentialData::analytic(u.clone(), varpi.clone())),
            PotentialsSection::Snapshot { path } => {
                let g = GridPotential::read_snapshot(path)?;
                g.grid.check_same(&self.grid)?;
                Ok(PotentialData::Grid(g))
            }
        }
    }

    pub fn initial_field(&self) -> Result<BispinorField> {
        match &self.initial {
            None => Err(Error::Config("an `initial` section is required".into())),
            Some(InitialCondition::Gaussian { center, width, momentum, spinor }) => {
                let sp = [C64::new(spinor[0][0], spinor[0][1]), C64::new(spinor[1][0], spinor[1][1])];
                if sp[0].norm_sqr() + sp[1].norm_sqr() == 0.0 {
                    return Err(Error::Config("spinor direction must be nonzero".into()));
                }
                Ok(BispinorField::gaussian(self.grid, self.physics, *center, *width, *momentum, sp))
            }
            Some(InitialCondition::Snapshot { path }) => {
                let f = snapshot::read_field(path)?;
                f.grid.check_same(&self.grid)?;
                Ok(f)
            }
        }
    }
}
