use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel has no positive weight")]
    AllZero,
    #[error("kernel support has gcd {gcd} > 1, the walk is not irreducible on Z")]
    NonIrreducible { gcd: usize },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("truncation window too small: doubling M changed the result by {change:e} (tolerance {tolerance:e})")]
    WindowTooSmall { change: f64, tolerance: f64 },
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },
    #[error("rejection sampler stalled: acceptance rate {rate:e}")]
    RejectionStall { rate: f64 },
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("tolerance error: {0}")]
    Tolerance(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Csv(_) => 2,
            Error::Tolerance(_)
            | Error::WindowTooSmall { .. }
            | Error::QuadratureNotConverged { .. }
            | Error::RejectionStall { .. } => 3,
            _ => 1,
        }
    }
}
