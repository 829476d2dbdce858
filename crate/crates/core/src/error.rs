use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the operation's mathematical domain.
    #[error("{op}: domain error, requires {requirement}")]
    Domain {
        op: &'static str,
        requirement: &'static str,
    },
    #[error("{op}: unsupported, {reason}")]
    Unsupported { op: &'static str, reason: String },
    /// Size guard against factorial or combinatorial blow-up.
    #[error("{op}: {got} exceeds the limit {limit}")]
    Guard {
        op: &'static str,
        limit: usize,
        got: usize,
    },
    /// A characteristic-polynomial evaluation landed on an eigenphase.
    #[error("evaluation point within {distance:e} of eigenphase {index}")]
    NearSingular { index: usize, distance: f64 },
    #[error("contract violation: {0}")]
    Contract(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

impl Error {
    pub(crate) fn domain(op: &'static str, requirement: &'static str) -> Self {
        Error::Domain { op, requirement }
    }

    /// True for errors caused by the caller's parameters rather than by the
    /// numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Unsupported { .. } | Error::Guard { .. } | Error::Contract(_)
        )
    }
}
