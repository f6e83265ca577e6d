//! Sabotage of correlation harvesting.
//!
//! An interloper I with ξ_IB an odd multiple of π/2 makes the Alice–Bob state an exact product
//! ρ_A ⊗ 𝟙/2. This crate finds the couplings and placements that achieve it and checks the
//! cancellation through the full pipeline.

mod locus;
mod maximum;
mod verify;

pub use locus::{annotate_locus, default_locus, sabotage_locus, AliceContact, LocusAnnotation, LocusGrid, SabotageLocus};
pub use maximum::{max_xi, max_xi_on_null_line, threshold_coupling, XiMaximum};
pub use udw_state::swarm_attenuation;
pub use verify::{verify_sabotage, SabotageCheck};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SabotageError {
    #[error("coupling must be positive and finite, got {0}")]
    Coupling(f64),
    #[error("scenario has no interloper")]
    NoInterloper,
    #[error("grid needs at least 2 points per axis and a positive extent")]
    Grid,
    #[error(transparent)]
    State(#[from] udw_state::StateError),
    #[error(transparent)]
    Measure(#[from] udw_measures::MeasureError),
    #[error(transparent)]
    Kernel(#[from] udw_kernel::KernelError),
}
