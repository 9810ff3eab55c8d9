use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("total count is zero")]
    ZeroTotalCount,
    #[error("tuple {tuple:?} is outside the arities {arities:?}")]
    TupleOutOfRange {
        tuple: Vec<usize>,
        arities: Vec<usize>,
    },
    #[error("tuple has {got} symbols but the table has {expected} axes")]
    TupleLength { expected: usize, got: usize },
    #[error("axis set is empty")]
    EmptyAxisSet,
    #[error("axis position {position} out of range for a table with {n_axes} axes")]
    AxisOutOfRange { position: usize, n_axes: usize },
    #[error("axis sets overlap")]
    OverlappingAxisSets,
    #[error("at least two parts are required, got {0}")]
    TooFewParts(usize),
    #[error("q is zero where p is positive")]
    AbsoluteContinuityViolation,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("tuple space of {0} cells exceeds the supported limit")]
    SystemTooLarge(u128),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("source and target must differ (got {0})")]
    SelfPair(usize),
    #[error("series too short: {0}")]
    SeriesTooShort(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trajectory diverged at t = {0}")]
    DivergedTrajectory(f64),
    #[error("value {0} outside the tent map domain [0, 1]")]
    OutOfDomain(f64),
    #[error("topology enumeration supports 2..=5 variables, got {0}")]
    NTooLarge(usize),
    #[error("null model has no fitted gamma parameters")]
    UnfittedNull,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
