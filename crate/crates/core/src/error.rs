use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {found}: must be at least {min}")]
    InvalidDimension { found: usize, min: usize },

    #[error("{name} = {value} is outside its domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("column offset {offset} out of range 1..={max}")]
    OffsetOutOfRange { offset: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Kraus operators are not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("Kraus set is generator-only and cannot define a finite-period channel")]
    GeneratorOnly,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unsupported regime: {0}")]
    Unsupported(&'static str),

    #[error("invalid window: j_th = {j_th} exceeds j_h = {j_h}")]
    InvalidWindow { j_th: u64, j_h: u64 },

    #[error("step {0} is not sampled by the series")]
    MissingStep(u64),

    #[error("insufficient data: need at least {needed}, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("eigensolver did not converge ({0})")]
    Eigensolver(String),

    #[error("series length mismatch: {0}")]
    SeriesMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    ok: bool,
    domain: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
