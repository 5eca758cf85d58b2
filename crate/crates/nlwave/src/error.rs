use thiserror::Error;

/// Errors produced by grid construction, operator application and runs.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("multiplier parity mismatch at xi = {xi}: {detail}")]
    ParityMismatch { xi: f64, detail: String },

    #[error(
        "kernel '{name}' is not elliptic on this grid: beta_hat({xi}) = {value} is below {floor}; \
         supply the initial velocity v0 directly instead of a potential w0"
    )]
    NonElliptic {
        name: String,
        xi: f64,
        value: f64,
        floor: f64,
    },

    #[error("kernel '{name}' rejected: beta_hat({xi}) = {value} is negative")]
    NegativeSymbol { name: String, xi: f64, value: f64 },

    #[error("blow-up detected at t = {t}: state contains non-finite samples")]
    BlowupDetected { t: f64 },

    #[error(
        "energy lost positive definiteness: Es^2 = {es_squared} < 0 \
         (epsilon = {epsilon} too large for this reference field)"
    )]
    HyperbolicityLost { es_squared: f64, epsilon: f64 },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time {t} outside the sampled range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
