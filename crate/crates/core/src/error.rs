use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The CLI maps every variant except [`Error::Mismatch`] to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("{0}")]
    Domain(String),

    #[error("cannot split morphism string at letter {position}: {message}")]
    Split { position: usize, message: String },

    #[error("diagram has {crossings} crossings, above the oracle bound of {bound}")]
    CrossingBound { crossings: usize, bound: usize },

    #[error("no consistent orientation: {0}")]
    Orientation(String),

    #[error("typing violation: {0}")]
    Typing(String),

    #[error("verification mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
