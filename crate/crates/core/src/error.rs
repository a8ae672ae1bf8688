use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The kernel length is not an integer number of cells.
    #[error("kernel.eta / grid.h = {ratio} is not an integer (eta = {eta}, h = {h})")]
    NonDivisibleEta { eta: f64, h: f64, ratio: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("density {rho} outside [0, {rho_max}]")]
    OutOfRange { rho: f64, rho_max: f64 },

    /// The CFL denominator vanishes, so no step size can be derived from it.
    #[error("degenerate model: CFL bound is unbounded, no time step can be derived")]
    DegenerateModel,

    #[error("kernel was built for h = {kernel_h}, grid has h = {grid_h}")]
    KernelGridMismatch { kernel_h: f64, grid_h: f64 },

    #[error("CFL violation: lambda = {lambda} exceeds bound {bound}")]
    CflViolation { lambda: f64, bound: f64 },

    #[error("flux g*v is not unimodal on the density interval ({0} monotonicity changes)")]
    NonUnimodalFlux(usize),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
