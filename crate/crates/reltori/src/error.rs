//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; the variants are stable and
//! carry a machine-readable code so front ends can map them to exit codes
//! and structured diagnostics.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A quadratic value turned out to be rational where an irrational was required.
    #[error("value is rational; an irrational number is required")]
    RationalInput,

    /// A depth/length parameter must be at least 1.
    #[error("depth must be at least 1")]
    DepthZero,

    /// A finite quotient list ended before the requested index.
    #[error("continued-fraction stream ended before index {needed}")]
    DepthExceeded { needed: usize },

    /// An interval enclosure was too wide to decide a comparison. Rebuild the
    /// input with a deeper enclosure instead of guessing.
    #[error("interval enclosure too wide to decide a comparison")]
    PrecisionExhausted,

    /// Arithmetic attempted between elements of Q(sqrt(d)) for two different d > 0.
    #[error("cannot mix values from Q(sqrt({left})) and Q(sqrt({right}))")]
    MixedFields { left: u64, right: u64 },

    /// The radicand of a quadratic scalar must be square-free.
    #[error("{0} is not square-free")]
    NotSquareFree(u64),

    /// Exact division by zero (or by an interval containing zero).
    #[error("division by zero")]
    DivisionByZero,

    /// A generic precondition violation (documented per operation).
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    /// Rel time would collapse the slit onto a point.
    #[error("rel time collapses the slit")]
    SingularityCollision,

    /// The matrix passed to the linear action does not have determinant one.
    #[error("matrix determinant is not 1")]
    NonUnimodular,

    /// The two slits do not represent the same relative homology class mod 2.
    #[error("slits are not homologous mod 2")]
    NotHomologous,

    /// The arrangement produced a degenerate (zero-area) decomposition.
    #[error("degenerate cell in checkerboard decomposition")]
    DegenerateCell,

    /// A segment endpoint sits on a crossing line outside the documented convention.
    #[error("segment endpoint on a crossing line outside the documented convention")]
    DegenerateSegment,

    /// No corner candidate matches both intersection parities (internal bug).
    #[error("no candidate slit matches both parities")]
    NoCandidate,

    /// Several corner candidates match both parities (internal bug).
    #[error("multiple candidate slits match both parities")]
    MultipleCandidates,

    /// The tremor shears are equal, so the orbit question degenerates to the
    /// horocycle case, which this crate does not treat.
    #[error("tremor shears are equal; the horocycle case is out of scope")]
    HypothesisViolated,

    /// An empty record list cannot be classified.
    #[error("no records to classify")]
    EmptyRecords,

    /// The Monte-Carlo oracle needs a minimum sample count to be meaningful.
    #[error("at least {min} samples required, got {got}")]
    InsufficientSamples { min: u64, got: u64 },

    /// Text could not be parsed as a scalar, real spec, or JSON document.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code for structured error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RationalInput => "RATIONAL_INPUT",
            Error::DepthZero => "DEPTH_ZERO",
            Error::DepthExceeded { .. } => "DEPTH_EXCEEDED",
            Error::PrecisionExhausted => "PRECISION_EXHAUSTED",
            Error::MixedFields { .. } => "MIXED_FIELDS",
            Error::NotSquareFree(_) => "NOT_SQUARE_FREE",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::SingularityCollision => "SINGULARITY_COLLISION",
            Error::NonUnimodular => "NON_UNIMODULAR",
            Error::NotHomologous => "NOT_HOMOLOGOUS",
            Error::DegenerateCell => "DEGENERATE_CELL",
            Error::DegenerateSegment => "DEGENERATE_SEGMENT",
            Error::NoCandidate => "NO_CANDIDATE",
            Error::MultipleCandidates => "MULTIPLE_CANDIDATES",
            Error::HypothesisViolated => "HYPOTHESIS_VIOLATED",
            Error::EmptyRecords => "EMPTY_RECORDS",
            Error::InsufficientSamples { .. } => "INSUFFICIENT_SAMPLES",
            Error::Parse(_) => "PARSE",
        }
    }

    /// The module a variant originates from, for diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::RationalInput
            | Error::DepthZero
            | Error::DepthExceeded { .. }
            | Error::PrecisionExhausted
            | Error::MixedFields { .. }
            | Error::NotSquareFree(_)
            | Error::DivisionByZero
            | Error::Parse(_) => "exact",
            Error::InvalidInput(_) => "core",
            Error::DegenerateSegment
            | Error::NoCandidate
            | Error::MultipleCandidates => "torus",
            Error::NotHomologous | Error::DegenerateCell | Error::InsufficientSamples { .. } => {
                "checkerboard"
            }
            Error::SingularityCollision | Error::NonUnimodular => "surface",
            Error::HypothesisViolated | Error::EmptyRecords => "experiments",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
