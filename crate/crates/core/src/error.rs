use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration or model parameter failed validation. `key` is the
    /// dotted path of the offending value (e.g. `antenna.theta_b_deg`).
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive integration exhausted its budget before reaching the
    /// requested tolerance. The best estimate is carried along.
    #[error(
        "numerical non-convergence in {context}: estimate {value:e} with error {error:e} \
         after {subdivisions} subdivisions"
    )]
    NonConvergence {
        context: String,
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
