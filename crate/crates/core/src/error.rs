use thiserror::Error;

/// Errors raised by the library. Resource problems (caps, budgets) are kept
/// apart from mathematical failures so callers can map them to exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cap exceeded: {what} = {requested} > {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("classification undetermined for {vertex} at probe depth {depth}")]
    Undetermined { vertex: String, depth: u32 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("search exhausted at frontier {frontier}: {reason}")]
    SearchExhausted { frontier: u32, reason: String },

    #[error("structural assertion failed: {0}")]
    StructuralAssertFailed(String),

    #[error("function vanishes on the base configuration")]
    ZeroBase,

    #[error("countable sum needs a tail bound")]
    MissingTailBound,

    #[error("property self-test failed: {0}")]
    PropertySelfTestFailed(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that mean "ran out of room" rather than "the math said no".
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. }
                | Error::ResourceLimit(_)
                | Error::Undetermined { .. }
                | Error::SearchExhausted { .. }
        )
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
