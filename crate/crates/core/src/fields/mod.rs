//! Periodic grids, spectral calculus, bispinor fields and their moments.

mod bispinor;
mod grid;
mod observables;
pub mod snapshot;
mod spectral;
pub(crate) use spectral::to_complex;

pub use bispinor::{inner, spin_density, Bispinor, BispinorField};
pub use grid::GridSpec;
pub use observables::{observables, Observables};
pub use spectral::{map_lines, Fft3, Interpolant, Spectral};
