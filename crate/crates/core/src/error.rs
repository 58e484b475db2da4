use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite and nonnegative, got {value}")]
    InvalidRate { what: &'static str, value: f64 },
    #[error("source self-update rate must be positive, got {0}")]
    NonPositiveSourceRate(f64),
    #[error("network needs at least one node")]
    EmptyNetwork,
    #[error("node {node} out of range for a network of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("node set must be nonempty")]
    EmptySet,
    #[error("node {0} is a member of the set")]
    NodeInSet(usize),
    #[error("node sets hold at most {capacity} nodes, network has {n}")]
    SetCapacityExceeded { n: usize, capacity: usize },
    #[error("exact solver is capped at {cap} nodes, network has {n}")]
    TooManyNodes { n: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("cluster size {k} does not divide {n} nodes")]
    ClusterSizeMismatch { n: usize, k: usize },
    #[error("total event rate is zero")]
    ZeroEventRate,
}
