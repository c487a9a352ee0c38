//! The Schrödinger–Newton group: elements, coordinate action, Lie algebra,
//! potential transformation law and the projective representation on fields.

mod algebra;
mod element;
mod represent;

pub use algebra::{infinitesimal_action, lie_vector, LieParams};
pub use element::{exponents, quaternion_mul, SnGroupElement, SnGroupRecord, N_SPACE};
pub use represent::{represent, represent_lifted, transform_potentials, Represented};
