use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside the supported range 0..=64")]
    GroundTooLarge(usize),
    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("ground sets differ: {0} vs {1}")]
    GroundMismatch(usize, usize),
    #[error("integer set bound mismatch: expected n={expected}, got n={got}")]
    IntSetBoundMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("set has {size} elements, limit is {limit}")]
    LimitExceeded { size: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("pair is not M-intersecting: |{a:?} ∩ {b:?}| = {size} is not allowed")]
    NotIntersecting { a: Vec<usize>, b: Vec<usize>, size: usize },
    #[error("vertex budget exceeded: {vertices} vertices, budget {budget}")]
    BudgetExceeded { vertices: usize, budget: usize },
    #[error("not a stop state: vertex {0} admits a procedure step")]
    NotStopState(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
