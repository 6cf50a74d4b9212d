use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants split into input validation problems and numerical failures;
/// [`Error::is_numerical`] tells them apart so the CLI can pick an exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("matrix is not positive definite (eigenvalue {value:e} at or below floor {floor:e})")]
    NotPositiveDefinite { value: f64, floor: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("requested rank {requested} exceeds the available {available}")]
    RankTooHigh { requested: usize, available: usize },
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("all pairwise distances are zero")]
    DegenerateData,
    #[error("row {0} of the affinity matrix sums to zero")]
    ZeroRowSum(usize),
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("grid needs at least {needed} points, got {got}")]
    GridTooCoarse { needed: usize, got: usize },
    #[error("flow diagram holds no eigenvectors")]
    VectorsMissing,
    #[error("beam search lost every state at grid point {0}")]
    BeamExhausted(usize),
    #[error("product of path factors underflowed")]
    NumericalUnderflow,
    #[error("every component is common; the ratio is undefined")]
    AllCommon,
    #[error("no component is common")]
    AllNonCommon,
    #[error("common set is empty")]
    EmptyCommonSet,
    #[error("all kernel distances are equal; polynomial fit is degenerate")]
    DegenerateDesign,
    #[error("query vector has zero norm")]
    ZeroVector,
    #[error("value {0} is outside the square-root domain")]
    DomainError(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("row count mismatch: {0} vs {1}")]
    RowCountMismatch(usize, usize),
    #[error("parse error in {file} at row {row}, column {col}: {msg}")]
    Parse {
        file: String,
        row: usize,
        col: usize,
        msg: String,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite(_)
            | Error::NoConvergence
            | Error::NotPositiveDefinite { .. }
            | Error::BeamExhausted(_)
            | Error::NumericalUnderflow
            | Error::AllCommon
            | Error::AllNonCommon
            | Error::DegenerateDesign => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
