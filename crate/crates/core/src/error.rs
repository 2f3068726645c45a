use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is constant")]
    DegreeZero,
    #[error("root finder did not converge after {iterations} iterations (max residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("euclidean derivative requested at a pole or at infinity")]
    PoleDerivative,
    #[error("rational map is constant")]
    ConstantMap,
    #[error("multi-map needs at least two generators, got {0}")]
    TooFewGenerators(usize),
    #[error("symbol {symbol} out of range for {generators} generators")]
    SymbolOutOfRange { symbol: usize, generators: usize },
    #[error("word is empty")]
    EmptyWord,
    #[error("node budget exceeded: {needed} nodes requested, budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("no generator has a repelling fixed point")]
    NoRepellingFixedPoint,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pressure estimates do not change sign on [0, 2]: {0}")]
    NoBracket(String),
    #[error("no t in the grid gives geometrically decaying Poincaré terms")]
    Inconclusive,
    #[error("every candidate base point lies within {tol:e} of the sampled postcritical set")]
    AllCandidatesRejected { tol: f64 },
    #[error("level masses do not decay (ratio {ratio}); choose s above the pressure")]
    SeriesNotDecaying { ratio: f64 },
    #[error("(d1, d) = (2, 2) is excluded")]
    ForbiddenPair,
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),
    #[error("unknown example {0:?}")]
    UnknownName(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<image::ImageError> for Error {
    fn from(e: image::ImageError) -> Self {
        Error::Io(e.to_string())
    }
}
