use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value {value} for `{name}`: {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid probability vector: {0}")]
    InvalidPmf(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(&'static str),
    #[error("intermediate law X(n, λ/n) does not exist for λ = {lambda} >= n = {n}")]
    InvalidIntermediate { n: u64, lambda: f64 },
    #[error("no admissible critical value (smallest achievable Poisson level: {best_level:?})")]
    Infeasible { best_level: Option<f64> },
    #[error("no violation found for n up to {n_cap}")]
    NotFound { n_cap: u64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            expected,
        }
    }
}
