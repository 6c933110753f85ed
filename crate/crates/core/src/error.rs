use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input is outside the domain of the operation (empty sets,
    /// unknown names, partial assignments where total ones are required).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is structurally malformed or violates a type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested enumeration is larger than the configured cap.
    /// `predicted` is `None` when the count itself does not fit in 128 bits.
    #[error("refused: {what} needs {} evaluations, cap is {cap}", fmt_count(.predicted))]
    CapExceeded {
        what: String,
        predicted: Option<u128>,
        cap: u128,
    },

    /// A closed-form count does not fit in 64 bits.
    #[error("count overflow: {0}")]
    Overflow(String),

    /// Conditioning on evidence that has probability zero.
    #[error("evidence has probability zero")]
    ZeroEvidence,

    /// A result failed its own post-condition check.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, predicted: Option<u128>, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            predicted,
            cap,
        }
    }

    pub fn is_cap_refusal(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

fn fmt_count(count: &Option<u128>) -> String {
    match count {
        Some(c) => c.to_string(),
        None => "more than 2^128".to_string(),
    }
}
