use thiserror::Error;

/// Errors produced by the laboratory operations.
///
/// The variants mirror the failure classes surfaced by the CLI: domain and
/// precondition failures exit with code 2, invariant failures with code 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (bad horizon, empty set, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An orbit left the declared domain of a planar map.
    #[error("orbit escaped the declared domain at iterate {iterate} (x={x}, y={y})")]
    Escape { iterate: usize, x: f64, y: f64 },

    /// A construction was refused because no admissible parameter exists.
    #[error("construction refused: {0}")]
    Refused(String),

    /// A guaranteed invariant failed; this indicates a bug, not bad input.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
