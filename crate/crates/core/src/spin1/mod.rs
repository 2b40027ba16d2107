//! Split spin-1 condensate: three-mode Fock space, spin-mixing dynamics, beamsplitting and
//! number-conserving measurements.

pub mod dynamics;
pub mod evaluate;
pub mod fock;
pub mod rotation;
pub mod split;

pub use dynamics::{
    evolve, fidelity, pair_ground_state, spin_mixing_hamiltonian, spin_operator, squeezed_reference,
    SqueezingEvolution,
};
pub use evaluate::{
    evaluate_pair, ground_state_sweep, optimize_phases, PhaseObjective, PhaseOptimum, SpinBounds, SpinPoint,
};
pub use fock::{fock_dim, ladder_quadratic, FockBasis, Occupation};
pub use rotation::{fourier3, represent, SpinRotation};
pub use split::{beamsplit, bipartite_distribution, SectorBlockedState};
