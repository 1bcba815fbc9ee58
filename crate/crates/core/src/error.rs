use thiserror::Error;

use crate::network::ValidationReport;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("duplicate link id `{0}`")]
    DuplicateLink(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("origin and destination coincide")]
    OriginIsDestination,
    #[error("inadmissible topology: {0}")]
    Invalid(ValidationReport),
    #[error("path enumeration exceeded cap of {0} paths")]
    TooManyPaths(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("capacity must be positive, got {0}")]
    BadCapacity(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum CellError {
    #[error("flow {flow} is at or above capacity {capacity}")]
    AtCapacity { flow: f64, capacity: f64 },
    #[error("custom toll returned negative value {value} at flow {flow}")]
    NegativeToll { flow: f64, value: f64 },
    #[error("toll policy is not monotone on link {link} near flow {flow}")]
    NotMonotone { link: usize, flow: f64 },
    #[error("toll policy has {got} entries, network has {expected} links")]
    TollDimension { expected: usize, got: usize },
    #[error("invalid capacity {0}")]
    BadCapacity(f64),
}

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error("path preference does not lie on the simplex: {0}")]
    OffSimplex(String),
    #[error("non-finite cost on path {path}")]
    NonFiniteCost { path: usize },
    #[error("inverse noise level must be positive, got {0}")]
    BadBeta(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("throughput {lambda} is not below min-cut capacity {min_cut}: case λ ≥ C^min-cut is not covered by the stability guarantee")]
    Infeasible { lambda: f64, min_cut: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("non-finite state at t = {t}: {detail}")]
    NonFinite { t: f64, detail: String },
    #[error("flow on link {link} reached capacity at t = {t}")]
    CapacityReached { link: usize, t: f64 },
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error("throughput {lambda} is not below min-cut capacity {min_cut}")]
    Infeasible { lambda: f64, min_cut: f64 },
    #[error("solver stopped after {iterations} iterations with certificate {achieved:e}")]
    NotConverged { iterations: usize, achieved: f64 },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Top-level error for scenario handling and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

impl Error {
    /// Process exit code: 2 infeasible, 3 solver failure, 4 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Sim(SimError::Infeasible { .. })
            | Error::Equilibrium(EquilibriumError::Infeasible { .. }) => 2,
            Error::Equilibrium(EquilibriumError::NotConverged { .. })
            | Error::Sim(SimError::NonFinite { .. })
            | Error::Sim(SimError::CapacityReached { .. }) => 3,
            _ => 4,
        }
    }
}
