//! Correlation measures of the Alice–Bob detector state.
//!
//! Entropies are in bits. Closed forms follow the identical-detector, vacuum-field setting; every
//! closed form has a numerical counterpart computed directly from the density matrix.

mod correlators;
mod discord;
mod entropy;
mod report;

pub use correlators::{
    direct_correlator, energy_correlator, observable_correlator, pauli_correlator, pauli_table, ObservableCoeffs,
};
pub use discord::{
    discord_oracle, discord_validity, henderson_vedral_c, henderson_vedral_c_closed, quantum_discord, DiscordValidity,
    MeasuredSide, OracleOutcome, HvOutcome,
};
pub use entropy::{binary_entropy, entropy, mutual_information, mutual_information_closed, mutual_information_of};
pub use report::{correlation_report, CMethod, CorrelationReport};

use thiserror::Error;
use udw_state::StateError;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("invalid state: eigenvalue {eigenvalue:e} below tolerance")]
    NegativeEigenvalue { eigenvalue: f64 },
    #[error("closed form needs {0}")]
    ClosedFormUnavailable(&'static str),
    #[error("state is not an X-state (largest outer entry {deviation:e})")]
    NotXState { deviation: f64 },
    #[error("oracle resolution must be at least 16, got {0}")]
    Resolution(usize),
    #[error(transparent)]
    State(#[from] StateError),
}
