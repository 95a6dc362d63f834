use thiserror::Error;

/// Errors raised by every layer of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("code distance must be odd and at least 3, got {0}")]
    Distance(usize),
    #[error("unsupported logical gate: {0}")]
    Unsupported(String),
    #[error("probability {0} outside (0, 0.5)")]
    Probability(f64),
    #[error("realization does not fix measurement m{0}")]
    Realization(u32),
    #[error("malformed tableau program: {0}")]
    Program(String),
    #[error("hyperedge {hyperedge} projects to {endpoints} endpoints in the decoding subgraph")]
    NotAGraph { hyperedge: usize, endpoints: usize },
    #[error("vertex {0} is not in the matching graph")]
    UnknownVertex(u32),
    #[error("no perfect matching exists for the given defects")]
    Infeasible,
    #[error("search needs {required} combinations, budget is {budget}")]
    Budget { required: u128, budget: u128 },
    #[error("window plan rejected: {0}")]
    Window(String),
    #[error("dem parse error at line {line}: {msg}")]
    Dem { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
