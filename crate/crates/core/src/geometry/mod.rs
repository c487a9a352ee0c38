//! Bargmann geometry of Brinkmann metrics: metric, gamma matrices,
//! Christoffel symbols, Ricci constraints, chirality and spinor calculus.

mod christoffel;
mod gamma;
mod metric;
pub mod pauli;
mod potential;
mod ricci;
mod schwarzian;
mod spinor;

/// Index of `t` in `(x¹, x², x³, t, s)`.
pub const IDX_T: usize = 3;
/// Index of the fibre coordinate `s`.
pub const IDX_S: usize = 4;

pub use christoffel::{christoffels, christoffels_fd_oracle, christoffels_from_point, ricci_fd, ChristoffelTable};
pub use gamma::{chirality_matrix, clifford_residual, gamma_set, lower_by_metric, lower_gammas, GammaSet};
pub use metric::{brinkmann_metric, Mat5, MetricBlock};
pub use potential::{
    omega_axial, AnalyticPotential, Chart, CoriolisPreset, GridPotential, PotentialData, PotentialDerivs,
    PotentialPoint, Provenance, ScalarJet, ScalarPreset, TrigMode, VecTrigMode,
};
pub use ricci::{ricci_constraint_residual, RicciResidual, ANALYTIC_FD_STEP};
pub use schwarzian::{schwarzian, schwarzian_from_derivatives};
pub use spinor::{
    connection_commutators, covariant_spinor_derivative, dirac_residual, lie_derivative_spinor_density,
    spin_connection, spin_connection_contraction, spinor4_zeros, DiracResidual, LiftedSpinor, Spinor4,
    VectorField, Xi, DENSITY_WEIGHT,
};
