//! ADMM solvers for low-rank plus sparse tensor decomposition.
//!
//! [`fttnn_solve`] minimizes the TT nuclear norm of a small Tucker core
//! (plus `τ‖S‖₁`), which keeps every SVD at the size of the core.
//! [`ttnn_solve`] is the uncompressed baseline that thresholds unfoldings of
//! the full tensor.

mod config;
mod fttnn;
mod ttnn;

pub use config::{
    default_tau, Init, SolverConfig, DEFAULT_MAX_ITERS, DEFAULT_MU0, DEFAULT_MU_MAX, DEFAULT_RHO,
    DEFAULT_TOL,
};
pub use fttnn::{fttnn_solve, FttnnSolver, FttnnState};
pub use ttnn::{ttnn_solve, TtnnSolver, TtnnState};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Convergence record of one solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iters: usize,
    pub converged: bool,
    /// `‖X_{t+1} − X_t‖_F / ‖X_t‖_F` per iteration.
    pub rel_change_x: Vec<f64>,
    /// `‖S_{t+1} − S_t‖_F / ‖S_t‖_F` per iteration.
    pub rel_change_s: Vec<f64>,
    /// Largest constraint violation relative to `‖Y‖_F` per iteration.
    pub residual: Vec<f64>,
    /// Seconds spent inside the solve call.
    pub wall_time: f64,
}

/// Low-rank estimate, sparse estimate and the convergence report.
#[derive(Debug, Clone)]
pub struct DecomposeResult {
    pub x: DenseTensor,
    pub s: DenseTensor,
    pub report: SolveReport,
}

/// Progress measures of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub rel_change_x: f64,
    pub rel_change_s: f64,
    /// Largest constraint violation (`‖Y − X − S‖_F`, and for the
    /// compressed solver `‖X − X̃ ×₁ U₁ ⋯ ×_K U_K‖_F`) over `‖Y‖_F`.
    pub residual: f64,
}

impl StepInfo {
    /// Small relative changes alone also occur at a stalled, infeasible
    /// iterate while `μ` is tiny, so feasibility is required as well.
    pub fn converged(&self, tol: f64) -> bool {
        self.rel_change_x.max(self.rel_change_s).max(self.residual) <= tol
    }
}

/// `‖new − old‖ / ‖old‖`, falling back to the absolute change when `old`
/// is zero.
pub(crate) fn relative_change(new: &DenseTensor, old: &DenseTensor) -> f64 {
    let diff = new.distance(old);
    let base = old.frobenius_norm();
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

/// `√sum_sq / scale`, or the absolute norm when `scale` is zero.
pub(crate) fn scaled_norm(sum_sq: f64, scale: f64) -> f64 {
    let d = sum_sq.sqrt();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

pub(crate) fn check_input(y: &DenseTensor) -> Result<()> {
    if !y.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Drives a stepper to convergence or `max_iters`, filling a report.
pub(crate) fn drive(
    max_iters: usize,
    tol: f64,
    mut step: impl FnMut() -> Result<StepInfo>,
) -> Result<SolveReport> {
    let mut report = SolveReport::default();
    for _ in 0..max_iters {
        let info = step()?;
        report.iters += 1;
        report.rel_change_x.push(info.rel_change_x);
        report.rel_change_s.push(info.rel_change_s);
        report.residual.push(info.residual);
        if info.converged(tol) {
            report.converged = true;
            break;
        }
    }
    Ok(report)
}
