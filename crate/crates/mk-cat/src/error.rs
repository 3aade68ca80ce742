use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count must be at least 2, got {0}")]
    ModeCount(usize),

    #[error("mode count {got} exceeds the enumeration cap of {cap}")]
    ModeCountCap { got: usize, cap: usize },

    #[error("expected {expected} per-mode entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "truncation dim {dim} inadequate for amplitude {amplitude:.4}; need at least {required}"
    )]
    TruncationInadequate {
        dim: usize,
        amplitude: f64,
        required: usize,
    },

    #[error("operator is not Hermitian (max residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("coherent amplitude must be nonzero here")]
    ZeroAlpha,

    #[error("alpha grid must be nonnegative and strictly increasing")]
    InvalidGrid,

    #[error("no sign change on [{lo}, {hi}]: f(lo)={flo:.6e}, f(hi)={fhi:.6e}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("objective not finite at {params:?}")]
    NonFiniteObjective { params: Vec<f64> },

    #[error("engines disagree at alpha={alpha}: closed={closed:.12}, oracle={oracle:.12}")]
    EngineMismatch { alpha: f64, closed: f64, oracle: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Stable machine-readable tag, used for the CLI's JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ModeCount(_) => "mode_count",
            Error::ModeCountCap { .. } => "mode_count_cap",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::TruncationInadequate { .. } => "truncation_inadequate",
            Error::NonHermitian { .. } => "non_hermitian",
            Error::ZeroAlpha => "zero_alpha",
            Error::InvalidGrid => "invalid_grid",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::NonFiniteObjective { .. } => "non_finite_objective",
            Error::EngineMismatch { .. } => "engine_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
