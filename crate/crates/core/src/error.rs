use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("`{func}` expects {expected} argument(s), found {found}")]
    Arity {
        func: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown symbol `{name}` at position {pos}")]
    UnknownSymbol { name: String, pos: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("component ({row}, {col}): {source}")]
    Component {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),

    #[error("metric component ({row}, {col}) differs from its transpose")]
    AsymmetricMetric { row: usize, col: usize },

    #[error("jet order {requested} requested but only {available} available")]
    OrderExceeded { requested: u8, available: u8 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),

    #[error("rho(xi) is not positive definite at xi = {0:?}")]
    NotPositiveDefinite(Vec<f64>),

    #[error("rho basis is linearly dependent")]
    SingularRho,

    #[error("no point of the box yields a positive definite rho")]
    EmptyDomain,

    #[error("lambda = {0} makes the deformed metric degenerate")]
    DegenerateLambda(f64),

    #[error("chart singularity: {0}")]
    ChartSingularity(String),

    #[error("lifted vector is null")]
    NullVector,

    #[error("invalid sample specification: {0}")]
    InvalidSamples(String),

    #[error("at sample point {point:?}: {source}")]
    AtSample {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_sample(self, point: &[f64]) -> Error {
        match self {
            e @ Error::AtSample { .. } => e,
            other => Error::AtSample {
                point: point.to_vec(),
                source: Box::new(other),
            },
        }
    }
}
