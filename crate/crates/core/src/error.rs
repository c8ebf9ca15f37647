use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point is outside the open positive orthant at index {index} (value {value})")]
    DomainViolation { index: usize, value: f64 },
    #[error("non-finite value returned by `{0}`")]
    EvaluationFailure(&'static str),
    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),
    #[error("non-finite entry in KKT matrix at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("iterative refinement failed: residual {residual:e} exceeds {bound:e}")]
    RefinementFailure { residual: f64, bound: f64 },
    #[error("inertia correction failed: sigma exceeded {0:e}")]
    InertiaCorrectionFailure(f64),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("solver `{0}` missing from results")]
    MissingSolver(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
