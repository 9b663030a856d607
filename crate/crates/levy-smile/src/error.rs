use thiserror::Error;

/// Crate-wide error type.
///
/// The CLI maps these onto stable exit codes: configuration and domain
/// problems exit 2, numeric failures exit 3, capability refusals exit 4.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (e.g. `x = 0` for a Levy
    /// density, an at-the-money strike, a point outside the analytic strip).
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violate a range or integrability condition. Each
    /// entry names one failing condition.
    #[error("invalid model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),

    /// The operation is not supported for this model (e.g. exact Monte-Carlo
    /// increment sampling for CGMY).
    #[error("capability error: {0}")]
    Capability(String),

    /// A structural hypothesis needed by the operation does not hold (e.g. a
    /// zero slope where a positive one is required).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A numerical routine produced a non-finite value or failed to converge.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Adaptive integration hit the subdivision cap; carries the partial
    /// estimate and its error bound.
    #[error("integration failure: {message} (partial={partial}, err={err})")]
    IntegrationFailure {
        partial: f64,
        err: f64,
        message: String,
    },

    /// Input call price below intrinsic value.
    #[error("arbitrage violation: price {price} below intrinsic {intrinsic}")]
    ArbitrageViolation { price: f64, intrinsic: f64 },

    /// Input call price at or above the spot; maps to the `Sigma = infinity`
    /// boundary, which valid martingale models never produce.
    #[error("upper bound violation: price {price} >= spot {spot}")]
    UpperBoundViolation { price: f64, spot: f64 },

    /// Configuration file or flag problem.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
