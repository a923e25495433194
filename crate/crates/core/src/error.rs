use num_bigint::BigInt;
use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Degenerate inputs (ties, exact rational relations) are reported rather than
/// resolved by an arbitrary tie-break: every predicate in this crate is defined
/// by strict inequalities.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("value {value} is exactly a half-integer; nearest integer is ambiguous")]
    HalfIntegerTie { value: String },

    #[error("two distinct integer points attain the optimum ({context})")]
    TieAtOptimum { context: String },

    #[error("certified comparison undecided at the precision cap ({context})")]
    PrecisionExhausted { context: String },

    #[error("target is rationally dependent: witness {witness:?}")]
    RationalDependence { witness: Vec<BigInt> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("window [{start}, {end}) out of range for sequence of length {len}")]
    WindowOutOfRange { start: usize, end: usize, len: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("psi decreases too slowly for the schedule at level {level}: {detail}")]
    AdmissibilityFailure { level: usize, detail: String },

    #[error("denominator size cap exceeded at level {level} ({bits} bits)")]
    DepthOverflow { level: usize, bits: u64 },

    #[error("horizon insufficient: {0}")]
    HorizonInsufficient(String),

    #[error("search exhausted after {steps_done} successful steps")]
    SearchExhausted { steps_done: usize },

    #[error("illumination condition violated at step {step}")]
    IlluminationViolated { step: usize },

    #[error("zero comparison slack: the enumeration of the base point contains a tie")]
    ZeroSlack,

    #[error("interval too wide: {0}")]
    IntervalTooWide(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Exit-code class used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Precondition(_) | Error::DimensionMismatch { .. } | Error::InvalidNorm(_) | Error::Io(_) => 1,
            Error::HalfIntegerTie { .. }
            | Error::TieAtOptimum { .. }
            | Error::RationalDependence { .. }
            | Error::ZeroSlack
            | Error::IlluminationViolated { .. }
            | Error::AdmissibilityFailure { .. }
            | Error::WindowOutOfRange { .. }
            | Error::HorizonInsufficient(_) => 2,
            Error::PrecisionExhausted { .. } | Error::IntervalTooWide(_) | Error::DepthOverflow { .. } => 3,
            Error::SearchExhausted { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
