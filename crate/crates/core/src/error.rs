use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate hypothesis label `{0}`")]
    DuplicateLabel(String),
    #[error("frame needs at least one hypothesis")]
    EmptyFrame,
    #[error("hypothesis labels must be nonempty")]
    EmptyLabel,
    #[error("frame of {0} hypotheses exceeds the supported maximum of {max}", max = crate::frame::MAX_FRAME_SIZE)]
    FrameTooLarge(usize),
    #[error("operands are bound to different frames")]
    FrameMismatch,
    #[error("unknown hypothesis label `{0}`")]
    UnknownLabel(String),
    #[error("malformed subset notation `{0}`")]
    BadSubset(String),

    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("negative or non-finite mass {mass} on {subset}")]
    NegativeMass { subset: String, mass: f64 },
    #[error("the named focal set must not be empty")]
    EmptyFocal,
    #[error("alpha {0} outside its admissible range")]
    AlphaOutOfRange(f64),
    #[error("sources are in total conflict")]
    TotalConflict,

    #[error("no sources to combine")]
    EmptySourceList,
    #[error("unknown rule identifier `{0}`")]
    UnknownRule(String),

    #[error("negative radicand {0} in distance computation")]
    NumericalError(f64),

    #[error("loss matrix does not cover every hypothesis: {0}")]
    IncompleteLossMatrix(String),
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid generator settings: {0}")]
    SpecInvalid(String),

    #[error("class `{0}` has no training instances")]
    EmptyClass(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("dataset file is empty")]
    EmptyFile,
    #[error("invalid split size: {0}")]
    SizeInvalid(String),
    #[error("i/o error: {0}")]
    Io(String),

    #[error("reproduction failed: {}", .0.join("; "))]
    ReproFailure(Vec<String>),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
