use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A table or precomputed range does not cover the requested argument.
    #[error("range error: {0}")]
    Range(String),

    /// An enumeration, factorization or sampling size guard refused the request.
    #[error("guard refused {what}: estimated cost {estimated} exceeds limit {limit}{hint}")]
    Guard {
        what: String,
        estimated: u128,
        limit: u128,
        hint: &'static str,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Range(_) | Error::Parse(_) => 2,
            Error::Guard { .. } => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Environment variable multiplying every size guard (expert use).
pub const GUARD_OVERRIDE_VAR: &str = "PD_LIMITS_GUARD_OVERRIDE";

pub(crate) const GUARD_HINT: &str = "; set PD_LIMITS_GUARD_OVERRIDE=<factor> to raise the limit";

/// Multiplier applied to guard limits, read from [`GUARD_OVERRIDE_VAR`].
pub fn guard_multiplier() -> u128 {
    std::env::var(GUARD_OVERRIDE_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&m| m >= 1)
        .unwrap_or(1)
}

/// Fails with [`Error::Guard`] when `estimated` exceeds `limit` scaled by the override.
pub(crate) fn check_guard(what: impl Into<String>, estimated: u128, limit: u128) -> Result<()> {
    let limit = limit.saturating_mul(guard_multiplier());
    if estimated > limit {
        return Err(Error::Guard { what: what.into(), estimated, limit, hint: GUARD_HINT });
    }
    Ok(())
}
