//! Certified convex optimization over affine Hermitian maps.

mod affine;
mod projection;
mod sdp;
mod trace_norm;

pub use affine::{AffineHermitian, HermitianBasis, HermitianParams, LinearEquality, Term};
pub use projection::{project_channel_class, project_psd, MAX_PROJECTION_ITERATIONS};
pub use sdp::{solve_lmi, IterationRecord, LmiProblem, SdpSettings, SdpSolution};
pub use trace_norm::{minimize_trace_norm, write_log_csv, CertifiedSolution, ConvexProblem};
pub(crate) use trace_norm::check_certificate;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::objects::ObjectError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvexError {
    #[error("problem is infeasible: {0}")]
    Infeasible(String),
    /// Iteration budget exhausted without a certified gap; carries the best
    /// iterate's value and lower bound.
    #[error("no certificate within tolerance (value {value}, lower bound {dual_bound})")]
    MaxIterations { value: f64, dual_bound: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("tolerance {0:e} is below the supported minimum 1e-8")]
    InvalidTolerance(f64),
    #[error("malformed problem: {0}")]
    Dimension(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Object(#[from] ObjectError),
}

/// Solves an LMI problem and applies the same acceptance rule as
/// [`minimize_trace_norm`].
pub fn solve_certified(p: &LmiProblem, tol: f64) -> Result<SdpSolution, ConvexError> {
    if !(tol >= 1e-8) {
        return Err(ConvexError::InvalidTolerance(tol));
    }
    let sol = solve_lmi(p, &SdpSettings::default())?;
    let feasible = sol.min_block_eigenvalue >= -1e-8 && sol.max_equality_residual <= 1e-8;
    check_certificate(feasible, sol.converged, sol.value, sol.dual_bound, tol)?;
    Ok(sol)
}
