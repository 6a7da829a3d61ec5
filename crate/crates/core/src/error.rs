use thiserror::Error;

/// Errors shared by every solver and oracle in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Exact expectation or brute-force enumeration was asked for more
    /// scenarios or elements than the exponential-time cap allows.
    #[error("instance too large for exact enumeration: {size} exceeds cap {cap}")]
    EnumerationCap { size: usize, cap: usize },

    /// The truncation argument needs total scenario mass at least one.
    #[error("distribution mass below 1; pad with dummy scenarios (mass {mass})")]
    MassBelowOne { mass: f64 },

    /// Index-aligned inputs disagree on length.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// A probability, cost, or parameter is outside its allowed range.
    #[error("invalid value: {0}")]
    InvalidValue(String),

    /// Structural problem with an instance (bad vertex id, asymmetric
    /// metric, terminal equal to root, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A solution cannot serve scenario `scenario`.
    #[error("solution infeasible in scenario {scenario}: {reason}")]
    InfeasibleScenario { scenario: usize, reason: String },

    /// The simplex iteration limit was hit without reaching optimality.
    #[error("solver stalled")]
    SolverStalled,

    /// Separation kept producing violated rows past the round limit.
    #[error("cut generation did not converge after {rounds} rounds")]
    CutsDidNotConverge { rounds: usize },

    /// The geometric threshold search walked past the metric's diameter.
    #[error("search overflow: threshold grid exceeded the metric range")]
    SearchOverflow,
}

pub type Result<T> = std::result::Result<T, Error>;
