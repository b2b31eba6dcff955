use std::path::PathBuf;

/// Errors produced by the clustering, simulation and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke an operation's preconditions (shapes, ranges, sizes).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A method could not run on the given data (e.g. IOD parameters too
    /// large for the remaining points at every recursion branch).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Malformed input file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown reference cell: {0}")]
    UnknownCell(String),

    #[error("unknown table `{0}` (expected one of: nu, sigma, dim, letters)")]
    UnknownTable(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 2 usage, 3 malformed input, 4 contract
    /// violation, 5 infeasible method, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownTable(_) | Error::UnknownCell(_) | Error::Config(_) => 2,
            Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => 3,
            Error::Contract(_) => 4,
            Error::Infeasible(_) => 5,
            Error::Io { .. } => 1,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err($crate::error::Error::Contract(format!($($arg)+)));
        }
    }};
}
pub(crate) use ensure;
