use thiserror::Error;

/// Errors produced anywhere in the factorization and lattice pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The leading minor of `J - C I` of the given order vanishes numerically.
    #[error("leading minor of order {minor} is numerically singular (|pivot| = {modulus:e})")]
    SingularLeadingMinor { minor: usize, modulus: f64 },

    #[error("parameter sampling failed at stage {stage} after {attempts} attempts (tightest relative margin {tightest_margin:e})")]
    SamplingFailed {
        stage: usize,
        attempts: usize,
        tightest_margin: f64,
    },

    /// A deep-band entry of the narrowed factor vanished while peeling.
    #[error("peel breakdown at stage {stage}, row {row} (|delta| = {modulus:e})")]
    PeelBreakdown {
        stage: usize,
        row: usize,
        modulus: f64,
    },

    #[error("table breakdown at diagonal i = {i}, k = {k} (|delta| = {modulus:e})")]
    TableBreakdown { i: usize, k: isize, modulus: f64 },

    /// A gamma index past the end of the table was requested.
    #[error("gamma index {n} is outside the table (length {len})")]
    Index { n: i64, len: usize },

    #[error("integration blew up; last finite state at t = {t}")]
    BlowUp { t: f64 },

    #[error("need at least 3 samples for central differences, found {found}")]
    InsufficientSamples { found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps the error with a pipeline stage label.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag for the innermost error.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Size(_) => "size",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonFinite { .. } => "non_finite",
            Error::SingularLeadingMinor { .. } => "singular_leading_minor",
            Error::SamplingFailed { .. } => "sampling_failed",
            Error::PeelBreakdown { .. } => "peel_breakdown",
            Error::TableBreakdown { .. } => "table_breakdown",
            Error::Index { .. } => "index",
            Error::BlowUp { .. } => "blow_up",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::Parse(_) => "parse",
            Error::Stage { source, .. } => source.kind(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
