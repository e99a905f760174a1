//! Production-frontier estimation and radial (Farrell) input efficiency under
//! the classical DEA axioms, with support for fixed-proportion technologies
//! where declared input pairs are non-substitutable or output pairs are
//! non-transformable.
//!
//! - [`lp_solver`]: two-phase simplex used by every estimator.
//! - [`dea_models`]: observed data, CCR multiplier and envelopment scoring,
//!   BCC, FDH, and the equal-weight baseline.
//! - [`fp_dea`]: CCR with either/or weight restrictions, solved by
//!   enumerating weight-support branches.
//! - [`simulation`]: Leontief data generation and the Monte Carlo grid.
//! - [`isoquant`]: unit-output input isoquants and SVG rendering.
//!
//! ```
//! use fpdea::{score_ccr_multiplier, score_fp, DmuPanel, FpStructure};
//!
//! let panel = DmuPanel::from_rows(
//!     vec![vec![1.0, 1.0], vec![1.0, 2.0]],
//!     vec![vec![1.0], vec![1.0]],
//! )?;
//! let fp = FpStructure::new(vec![(0, 1)], vec![])?;
//! let result = score_fp(&panel, 1, &fp)?;
//! assert!((result.theta - 1.0).abs() < 1e-12);
//! assert!(result.theta <= score_ccr_multiplier(&panel, 1)?.theta + 1e-12);
//! # Ok::<(), fpdea::DeaError>(())
//! ```

pub mod dea_models;
mod error;
pub mod fp_dea;
pub mod isoquant;
pub mod lp_solver;
pub mod simulation;

pub use dea_models::{
    score_barnum, score_ccr_multiplier, score_envelopment, score_envelopment_point, DmuPanel,
    EfficiencyResult, Orientation, ReturnsToScale, Technology,
};
pub use error::DeaError;
pub use fp_dea::{enumerate_branches, score_fp, FpStructure, SupportBranch};
pub use lp_solver::{solve, LinearProgram, LpError, LpSolution, LpStatus};
