//! Newton potential from the mass density, and Coriolis presets.

mod poisson;
mod presets;

pub use poisson::{
    poisson_isolated, poisson_isolated_with, poisson_periodic, FreeSpaceKernel, PoissonKind, PoissonSolution, PoissonSolver,
    CELL_AVERAGE_INV_R,
};
pub use presets::{coriolis_preset, PresetSample};
