use thiserror::Error;

/// Errors raised by the library and surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Fisher information formula is singular at alpha = {point} (got alpha = {alpha})")]
    Singularity { point: f64, alpha: f64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("posterior is not guaranteed proper: {}", .reasons.join("; "))]
    Improper { reasons: Vec<String> },

    #[error("log-density is -inf at every scan point on [{lo}, {hi}]")]
    EmptySupport { lo: f64, hi: f64 },

    #[error("optimum at bracket endpoint {at} of [{lo}, {hi}]; widen the bracket")]
    BracketTooSmall { lo: f64, hi: f64, at: f64 },

    #[error("acceptance rate {rate:.2e} after {proposals} proposals; try a different r")]
    LowAcceptance { rate: f64, proposals: u64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Improper { .. } => 2,
            Error::NoConvergence(_)
            | Error::BracketTooSmall { .. }
            | Error::EmptySupport { .. }
            | Error::LowAcceptance { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
