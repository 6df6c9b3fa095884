use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violated an operation's precondition (non-Hermitian generator, bad range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error(
        "channel is not trace preserving: completeness residual {residual:.3e} exceeds {tol:.1e}"
    )]
    IncompleteChannel { residual: f64, tol: f64 },

    #[error("operator is not unitary: residual {residual:.3e} exceeds {tol:.1e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("band {band} does not fit the window around cut {cut}: {detail}")]
    BandTooWide {
        band: usize,
        cut: i64,
        detail: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
