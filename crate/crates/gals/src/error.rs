use thiserror::Error;

#[derive(Debug, Error)]
pub enum GalsError {
    #[error("point outside domain on axis {axis}: coordinate {coord} not in [{lower}, {upper}]")]
    OutOfDomain {
        axis: usize,
        coord: f64,
        lower: f64,
        upper: f64,
    },
    #[error("foot point of node {node:?} left the domain through a face with no boundary condition")]
    MissingBoundaryCondition { node: Vec<usize> },
    #[error("Dirichlet inflow is degenerate at {point:?}: normal velocity is zero")]
    DegenerateInflow { point: Vec<f64> },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} grid levels for a convergence fit, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("CFL fraction xi = {0} outside (0, 1]")]
    XiOutOfRange(f64),
    #[error("gradient magnitude below threshold at {point:?}")]
    VanishingGradient { point: Vec<f64> },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, GalsError>;
