use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One row of a nonlinear iteration history.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// L1 residual per equation.
    pub residual: Vec<f64>,
    pub cfl: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate mesh: cell {cell} has volume {volume:e}")]
    DegenerateMesh { cell: usize, volume: f64 },

    #[error("singular least-squares stencil at cell {cell}")]
    SingularStencil { cell: usize },

    #[error("degenerate face geometry: {0}")]
    DegenerateGeometry(String),

    #[error("nonpositive face temperature {value:e}")]
    NonpositiveTemperature { value: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("no convergence after {iterations} iterations (residual drop {drop:e})")]
    NonConvergence {
        iterations: usize,
        drop: f64,
        history: Vec<IterationRecord>,
    },

    #[error("linear relaxation diverged at nonlinear iteration {iteration}")]
    SolverDivergence { iteration: usize },

    #[error("zero error on row {row}; observed order undefined")]
    DegenerateOrder { row: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
