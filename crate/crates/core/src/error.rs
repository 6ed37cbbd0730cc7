use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the geometric kernel, the peeler and the simulator.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("inconsistent dimensions: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("halfspace system is unbounded")]
    Unbounded,
    #[error("halfspace system is empty (infeasible or no constraints)")]
    EmptySystem,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sphere net could not certify covering angle {theta}")]
    NetFailure { theta: f64 },
    #[error("peel exceeded {max_stages} stages (gamma = {gamma}, R = {radius})")]
    TooManyStages {
        max_stages: usize,
        gamma: f64,
        radius: f64,
    },
    #[error("piece {index} has enclosing radius {radius} above bound {bound}")]
    PieceRadius {
        index: usize,
        radius: f64,
        bound: f64,
    },
    #[error("decomposition does not belong to the given polytope: {0}")]
    Mismatch(String),
    #[error("rewrite at {at:?} needs depth {needed} but tag has {available}")]
    DepthShortfall {
        at: Vec<u64>,
        needed: u64,
        available: u64,
    },
    #[error("cannot move exponent: coordinate {index} is zero")]
    ZeroExponent { index: usize },
    #[error("degree mismatch: {from} vs {to}")]
    DegreeMismatch { from: u64, to: u64 },
    #[error("lattice point not covered by any piece")]
    Unassigned,
    #[error("expansion would exceed {cap} terms")]
    TooLarge { cap: usize },
    #[error("loop guard tripped after {0} iterations")]
    LoopGuard(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
