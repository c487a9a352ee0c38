//! Time evolution of the principal bispinor under the generalised
//! Lévy-Leblond–Newton Hamiltonian, plus the structural checks built on it.

mod config;
mod current;
mod gauge;
mod ground;
mod hamiltonian;
mod spin;
mod stepper;

pub use config::{EvolverKind, RunConfig, SourceMode};
pub use current::{continuity_residual_fd, current_and_continuity, CurrentReport};
pub use gauge::gauge_transform;
pub use ground::{ground_state, GroundState, GroundStateConfig};
pub use hamiltonian::{
    apply_hamiltonian, apply_hamiltonian_canonical, chi_from_phi, first_line_residual, hamiltonian_norm_estimate,
    lift, sigma_grad,
};
pub use spin::{spin_commutator_residual, spin_commutator_residual_for};
pub use stepper::{normalized_source, Evolver};
