//! Overlap parameters of delta-coupled detectors in 3+1 dimensions.
//!
//! For each ordered pair of detectors the field displacement amplitudes have an inner product
//! T_ij = (ζ_ij + iξ_ij)/4. This crate evaluates ζ and ξ for hard-sphere and Gaussian smearing
//! in closed form, and independently by brute-force quadrature ([`oracle`]).
//!
//! Units: c = 1, lengths and times share one unit, the effective coupling λ̃ carries length.

pub mod oracle;
pub mod overlap;
pub mod quad;
pub mod smearing;

pub use oracle::{default_regulators, overlap_oracle, OracleReport};
pub use overlap::{
    xi_geometric, xi_overlap, zeta_geometric, zeta_overlap, zeta_overlap_with, zeta_self, DetectorSpec, OverlapSet,
};
pub use quad::{QuadConfig, QuadError};
pub use smearing::{convolved_profile, ShapeKind, SmearingShape};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("smearing width must be positive and finite, got {sigma}")]
    InvalidShape { sigma: f64 },
    #[error("detector `{label}`: {reason}")]
    InvalidDetector { label: String, reason: String },
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("detectors `{a}` and `{b}` use different smearing; closed forms need one shape")]
    MixedShapes { a: String, b: String },
    #[error("{context} quadrature failed: {source}")]
    Quadrature { context: &'static str, source: QuadError },
    #[error("oracle failure: {diagnostics}")]
    OracleFailure { diagnostics: String },
    #[error("unknown detector label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate detector label `{0}`")]
    DuplicateLabel(String),
}
