use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{AmplitudeTrajectory, SolverGrid};
use crate::error::{Error, Result};

/// Minimum observed order for a refinement study to pass.
pub const MIN_ORDER: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub final_values: Vec<Complex64>,
    /// Observed order from each consecutive triple of refinements.
    pub orders: Vec<f64>,
    pub observed_order: f64,
    /// Richardson extrapolation of the final value using `observed_order`.
    pub extrapolated: Complex64,
    /// Successive differences fell to rounding level; the scheme is exact here.
    pub exact: bool,
    pub passed: bool,
}

/// Runs `solve` at `base`, then with the step halved `levels` times, and
/// estimates the convergence order of the final amplitude.
pub fn convergence_check<F>(solve: F, base: SolverGrid, levels: usize) -> Result<ConvergenceReport>
where
    F: Fn(&SolverGrid) -> Result<AmplitudeTrajectory> + Sync,
{
    if levels < 2 {
        return Err(Error::invalid("levels", "need at least 2 refinements"));
    }
    base.validate()?;
    let grids: Vec<SolverGrid> = (0..=levels).map(|k| base.refined(1 << k)).collect();
    let finals = grids
        .par_iter()
        .map(|g| solve(g).map(|t| t.final_value()))
        .collect::<Result<Vec<_>>>()?;

    let scale = finals
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let diffs: Vec<f64> = finals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let rounding = 1e-13 * scale;
    let exact = diffs.iter().all(|&d| d <= rounding);

    let orders: Vec<f64> = diffs
        .windows(2)
        .map(|d| {
            if d[1] <= rounding {
                f64::INFINITY
            } else {
                (d[0] / d[1]).log2()
            }
        })
        .collect();
    let observed_order = *orders.last().expect("levels >= 2 gives one order");

    let last = finals[levels];
    let prev = finals[levels - 1];
    let extrapolated = if exact || !observed_order.is_finite() {
        last
    } else {
        last + (last - prev) / (2f64.powf(observed_order) - 1.0)
    };

    Ok(ConvergenceReport {
        dts: grids.iter().map(SolverGrid::dt).collect(),
        final_values: finals,
        orders,
        observed_order,
        extrapolated,
        exact,
        passed: exact || observed_order >= MIN_ORDER,
    })
}
