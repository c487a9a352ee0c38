//! Numerical workbench for the Lévy-Leblond–Newton system.
//!
//! The crate is organised around the data flow of a run:
//! potentials ([`geometry::PotentialData`]) feed the Bargmann geometry and the
//! Hamiltonian, [`evolve`] advances the principal bispinor, [`charges`]
//! monitors conserved quantities and [`sngroup`] implements the
//! Schrödinger–Newton group acting on all of the above.
//!
//! Coordinates are ordered `(x¹, x², x³, t, s)` everywhere; see [`geometry::IDX_T`]
//! and [`geometry::IDX_S`].

pub mod charges;
pub mod config;
pub mod error;
pub mod evolve;
pub mod fields;
pub mod geometry;
pub mod gravity;
pub mod sngroup;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Physical constants shared by a run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one", rename = "G")]
    pub g_newton: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Physics {
    fn default() -> Self {
        Physics { m: 1.0, hbar: 1.0, g_newton: 1.0 }
    }
}
