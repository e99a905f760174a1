use thiserror::Error;

use crate::lp_solver::{LpError, LpStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeaError {
    #[error("invalid panel: {0}")]
    InvalidPanel(String),
    #[error("DMU index {index} out of range for a panel of {n_dmus}")]
    IndexOutOfRange { index: usize, n_dmus: usize },
    #[error("DMU {index} has no strictly positive input or no strictly positive output")]
    DegenerateDmu { index: usize },
    #[error("evaluated point has no strictly positive input or no strictly positive output")]
    DegeneratePoint,
    #[error("no observed DMU dominates the evaluated point")]
    NoDominator,
    #[error("invalid fixed-proportion structure: {0}")]
    InvalidStructure(String),
    #[error("no weight-support branch leaves a nonzero input and output weight")]
    NoFeasibleBranch,
    #[error("efficiency program ended {0}")]
    UnexpectedStatus(LpStatus),
    #[error(transparent)]
    Solver(#[from] LpError),
}
