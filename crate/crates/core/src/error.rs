use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MipError {
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

impl MipError {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        MipError::MalformedModel(msg.into())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

impl ModelError {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        ModelError::DimensionMismatch(msg.into())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported format header `{0}`")]
    UnsupportedVersion(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReductionError {
    #[error("empty scenario set")]
    EmptyScenarioSet,
    #[error("invalid target size {target} for {available} scenarios")]
    InvalidTargetSize { target: usize, available: usize },
    #[error("invalid reduction input: {0}")]
    InvalidInput(String),
    #[error("LP proxy for scenario {scenario} ended {status}")]
    ProxyNotOptimal { scenario: usize, status: String },
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DualError {
    #[error("subgradient is zero")]
    ZeroSubgradient,
    #[error("no primal bound available for the Polyak step")]
    MissingPrimalBound,
    #[error("primal heuristic found no incumbent")]
    NoIncumbent,
    #[error("scenario {0} has no representative")]
    UnmappedScenario(usize),
    #[error("scenario {scenario} subproblem is {status}; relatively complete recourse violated")]
    SubproblemInfeasible { scenario: usize, status: String },
    #[error("master problem is {0}")]
    MasterInfeasible(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}
