use serde::{Deserialize, Serialize};

use crate::gravity::PoissonKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    /// `U = ϖ = 0`.
    Free,
    /// Prescribed `U` and `ϖ`.
    #[default]
    External,
    /// `U` sourced by the density at every kick (plus any prescribed part).
    SelfConsistent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolverKind {
    /// Strang splitting; requires `ϖ = 0`.
    #[default]
    SplitStep,
    /// Classical RK4 on the full Hamiltonian.
    Rk4,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub source_mode: SourceMode,
    #[serde(default)]
    pub evolver: EvolverKind,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub poisson: PoissonKind,
    /// Record charges (and snapshots) every this many steps.
    #[serde(default = "one")]
    pub output_every: usize,
}

impl RunConfig {
    pub fn new(source_mode: SourceMode, evolver: EvolverKind, dt: f64, steps: usize) -> Self {
        RunConfig { source_mode, evolver, dt, steps, poisson: PoissonKind::Isolated, output_every: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if self.output_every == 0 {
            return Err(Error::Config("output_every must be >= 1".into()));
        }
        Ok(())
    }
}
