//! Two-mode dynamics of a binary Bose–Einstein condensate mixture in a
//! double-well trap.
//!
//! The crate integrates the four-variable two-mode equations, finds and
//! classifies their equilibria, labels trajectories with their dynamical
//! regime (Josephson, pi-mode, self-trapping, swapping) and derives the
//! model constants from gridded spatial modes.

pub mod classifier;
pub mod cli;
pub mod equilibria;
pub mod integrator;
pub mod model;
pub mod modeparams;

pub use integrator::{integrate, reference_integrate, IntegrateError, IntegratorConfig, Trajectory};
pub use model::{
    dressed_coefficients, eval_rhs, hamiltonian, spin_hamiltonian, spin_map, DressedCoefficients, ModelError,
    ModelParams, Species, Spin, SpinPair, State, StateDerivative, TunnelingVariant,
};
