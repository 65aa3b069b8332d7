use thiserror::Error;

/// Errors produced by graph construction, enumeration kernels and checkers.
///
/// Variants split into two families: invalid input (rejected up front) and
/// exhausted budgets (the computation was cut off, nothing partial is
/// returned as truth). The CLI maps the former to exit code 1 and the
/// latter to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: loop edge at vertex {v} (loops are not allowed)")]
    LoopEdge { line: usize, v: usize },

    #[error("line {line}: vertex {v} out of range (n = {n})")]
    VertexOutOfRange { line: usize, v: usize, n: usize },

    #[error("invalid generator spec: {0}")]
    InvalidGenerator(String),

    #[error("vertex {vertex} has odd degree {degree}")]
    OddDegree { vertex: usize, degree: usize },

    #[error("graph is not regular: vertex {vertex} has degree {got}, expected {expected}")]
    NotRegular {
        vertex: usize,
        got: usize,
        expected: usize,
    },

    #[error("graph has parallel edges; this operation requires a simple graph")]
    NotSimple,

    #[error("{0}")]
    InvalidParam(String),

    #[error("edge count {m} exceeds the backtracking cap {cap}")]
    EdgeCapExceeded { m: usize, cap: usize },

    #[error("partition enumeration needs {required} partitions, cap is {cap}")]
    EnumerationCapExceeded { required: String, cap: u64 },

    #[error("search budget exhausted after {visited} states (budget {budget})")]
    BudgetExceeded { visited: u64, budget: u64 },

    #[error("random regular sampler gave up after {attempts} attempts; retry with a new seed")]
    RejectionBudgetExhausted { attempts: u64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid switching choice: {0}")]
    InvalidChoice(String),

    #[error("trail is not induced by the partition")]
    TrailNotInduced,

    #[error("switching bound condition 2 violated at class {profile}: {reason}")]
    ConditionViolation { profile: String, reason: String },
}

impl Error {
    /// True for budget/cap exhaustion (CLI exit code 2), false for
    /// validation errors (exit code 1).
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::EdgeCapExceeded { .. }
                | Error::EnumerationCapExceeded { .. }
                | Error::BudgetExceeded { .. }
                | Error::RejectionBudgetExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
