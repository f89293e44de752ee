use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("solver failed: {0}")]
    Solver(#[from] game_solvers::SolverError),

    #[error("model failed: {0}")]
    Model(#[from] shs_core::ShsError),

    #[error("simulation failed: {0}")]
    Simulation(queue_sim::SimError),

    #[error("{0} point(s) did not converge")]
    NotConverged(usize),

    #[error("malformed result table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<queue_sim::SimError> for CliError {
    fn from(e: queue_sim::SimError) -> Self {
        match e {
            queue_sim::SimError::InvalidParameter { .. } => CliError::Config(e.to_string()),
            queue_sim::SimError::Degenerate { .. } => CliError::Simulation(e),
        }
    }
}

impl CliError {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::Solver(game_solvers::SolverError::InvalidParameter { .. }) => 2,
            CliError::Model(shs_core::ShsError::InvalidParameter { .. })
            | CliError::Solver(game_solvers::SolverError::Aoi(
                shs_core::ShsError::InvalidParameter { .. },
            )) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Simulation(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
