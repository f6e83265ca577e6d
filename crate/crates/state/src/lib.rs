//! Post-interaction detector states.
//!
//! # Conventions
//!
//! Each detector qubit is written in the basis {|+1⟩, |−1⟩}, |±1⟩ = (|g⟩ ± e^{iΩt}|e⟩)/√2, with
//! index 0 ↔ |+1⟩. Multi-qubit indices are big-endian in the order of the label list, so for a pair
//! (A, B) the basis is {++, +−, −+, −−}. The detector operators are S₁ = σx, S₂ = σy, S₃ = σz in
//! this order. The field enters through T_0ν = −iξ₀ν/4.
//!
//! The energy basis is {gg, ge, eg, ee} with the free phase e^{iΩt} absorbed into |e⟩; the applied
//! phases are carried as metadata so that lab-frame matrices can be recovered.

mod basis;
mod linalg;
mod multi;
mod pair;
mod scenario;

pub use basis::{pauli, to_energy_basis, Basis, TwoQubitState};
pub use linalg::{hermitian_eigenvalues, partial_trace, C64};
pub use multi::{
    build_full_state, coupling_order, pair_state_closed, partial_state, reduce_to_pair, Labelled, MultiQubitState,
};
pub use pair::{build_pair_state, swarm_attenuation, PairParams};
pub use scenario::{pair_params, Participant, Role, Scenario, SelectedPair};

pub use udw_kernel::KernelError;

use thiserror::Error;

/// Largest supported number of detectors in a dense joint state.
pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StateError {
    #[error("parameters are not realisable: minimum eigenvalue {min_eigenvalue:e}")]
    InconsistentParameters { min_eigenvalue: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("{n} detectors exceed the dense capacity of {MAX_QUBITS}")]
    Capacity { n: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("partial trace needs a non-empty set of kept qubits")]
    EmptyKeep,
    #[error("expected a state in the {expected:?} basis")]
    WrongBasis { expected: Basis },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
