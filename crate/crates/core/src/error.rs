use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no non-Markovian reservoir configured")]
    NoReservoir,

    #[error("band-edge divergence at s = {re} + {im}i")]
    BandEdgeDivergence { re: f64, im: f64 },

    #[error("invalid {name}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: String,
    },

    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error("dark-line contract violated: {0}")]
    DarkLineContract(String),

    #[error("transparency contract violated: {0}")]
    TransparencyContract(String),

    #[error("trajectory tail |b2| = {tail:.3e} exceeds {limit:.1e}; increase t_max")]
    TailNotDecayed { tail: f64, limit: f64 },

    #[error("solver step control failed at dt = {dt:.3e}; retry with dt <= {suggested_dt:.3e}")]
    NonConvergent { dt: f64, suggested_dt: f64 },

    #[error("cross-check deviation {deviation:.4e} exceeds tolerance {tolerance:.1e}")]
    CrossCheck { deviation: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            constraint: constraint.into(),
        }
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable category used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::NoReservoir => "config",
            Error::Io(_) | Error::Json(_) => "io",
            _ => "numerical",
        }
    }

    /// Process exit status: 2 for configuration errors, 3 for numerical
    /// contract failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 2,
            "numerical" => 3,
            _ => 1,
        }
    }
}
