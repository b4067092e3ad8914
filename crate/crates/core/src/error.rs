//! Error type shared by all modules.

use crate::dynamics::PreimageTree;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate basis: |det| = {det:e}")]
    DegenerateBasis { det: f64 },

    #[error("point not in domain")]
    PointOutsideDomain,

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector is not a lattice element usable as a slab direction")]
    InvalidSlabDirection,

    #[error("node budget {budget} exceeded at level {level}")]
    TreeBudgetExceeded {
        budget: usize,
        level: usize,
        partial: Box<PreimageTree>,
    },

    #[error("operator budget exceeded: {0}")]
    OperatorBudgetExceeded(String),

    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        last_iterate: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
