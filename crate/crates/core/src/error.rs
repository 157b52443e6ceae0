//! Error type shared by all simulator modules.

use thiserror::Error;

/// Errors raised by state construction, evolution, measurement, and
/// schedule search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state or parameter contained a non-finite number.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A basis of zero size was requested.
    #[error("basis dimension must be at least 1")]
    EmptyBasis,

    /// The requested post-selection branch carries (numerically) no
    /// probability, so the conditioned state does not exist.
    #[error("empty post-selection branch (probability {prob:.3e})")]
    EmptyBranch { prob: f64 },

    /// A number-state index fell outside the truncated basis.
    #[error("index {index} outside truncated basis of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// Too much probability sits at the truncation edge for the propagator
    /// to be trustworthy.
    #[error("truncation leak: {mass:.3e} in the top levels exceeds {limit:.3e}")]
    TruncationLeak { mass: f64, limit: f64 },

    /// Coupling strengths must be positive.
    #[error("coupling must be positive, got {0}")]
    NonPositiveCoupling(f64),

    /// Durations must be non-negative (schedule steps strictly positive).
    #[error("invalid duration {0}")]
    InvalidDuration(f64),

    /// Truncation tolerances must lie in (0, 1e-6].
    #[error("tail tolerance {0} outside (0, 1e-6]")]
    InvalidTailTol(f64),

    /// Hole targets must be distinct.
    #[error("duplicate hole target {0}")]
    DuplicateTarget(usize),

    /// A schedule mixed detection outcomes; each protocol kind uses one.
    #[error("schedule mixes detection outcomes")]
    MixedOutcomes,

    /// A schedule with no steps was given where at least one is required.
    #[error("schedule has no steps")]
    EmptySchedule,

    /// The target Fock index is unsupported by the chosen strategy.
    #[error("target Fock index {0} unsupported: {1}")]
    UnsupportedTarget(usize, &'static str),

    /// The schedule search could not reach the required fidelity.
    #[error("best fidelity {achieved:.6} below required {required}; increase search depth or lower alpha")]
    FidelityShortfall { achieved: f64, required: f64 },

    /// The equilibrium flux does not sit at the working point.
    #[error("working point violated: |cos(pi*phi_b/phi0)| = {0:.3e} exceeds 1e-6")]
    WorkingPoint(f64),

    /// A device parameter violated its sign constraint.
    #[error("device parameter {0} must be positive")]
    NonPositiveDeviceParam(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
