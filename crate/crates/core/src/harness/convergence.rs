//! Convergence sweeps over `Δt = T/2^i` and log-log slope fits.

use rayon::prelude::*;

use super::config::{Duration, ExperimentConfig, StepSpec};
use super::{run_scheme, Problem};
use crate::error::{Result, SavError};
use crate::record::RecordOptions;

/// Points whose error is within this factor of the round-off floor are left
/// out of the slope fit.
pub const FLOOR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub exp: u32,
    pub dt: f64,
    pub steps: usize,
    /// `‖u^{N_t} − u⁰‖_∞ / ‖u⁰‖_∞` after whole periods.
    pub solution_error: f64,
    /// `max_n |Eⁿ − E⁰| / |E⁰|` of the original energy.
    pub energy_error: f64,
    /// `max_n |Ẽⁿ − Ẽ⁰| / |Ẽ⁰|`
    pub modified_energy_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// Least-squares slope of `log err` against `log Δt`; NaN with fewer
    /// than two usable points.
    pub slope: f64,
    /// Which points entered the fit.
    pub used: Vec<bool>,
    /// Detected round-off floor, if the sweep levels off.
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub solution_fit: SlopeFit,
    pub energy_fit: SlopeFit,
}

impl ConvergenceTable {
    /// Local slopes between consecutive rows for the given error column.
    pub fn local_slopes(&self, err: impl Fn(&ConvergenceRow) -> f64) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (err(&w[0]) / err(&w[1])).ln() / (w[0].dt / w[1].dt).ln())
            .collect()
    }
}

/// Least-squares log-log slope with round-off floor exclusion.
///
/// The sweep is taken to have hit a floor when its finest point no longer
/// improves on its neighbour by at least first order. The floor is then
/// estimated as the smallest error in the sweep, and the fit uses only the
/// points before the first one within [`FLOOR_FACTOR`] of it. Non-positive or
/// non-finite errors are always excluded.
pub fn fit_slope(dts: &[f64], errs: &[f64]) -> SlopeFit {
    assert_eq!(dts.len(), errs.len());
    let n = errs.len();
    let valid: Vec<bool> = errs.iter().map(|e| e.is_finite() && *e > 0.0).collect();
    let floored = n >= 2 && valid[n - 1] && valid[n - 2] && {
        let order = (errs[n - 2] / errs[n - 1]).ln() / (dts[n - 2] / dts[n - 1]).ln();
        order < 1.0
    };
    let floor = floored.then(|| {
        errs.iter()
            .zip(&valid)
            .filter(|(_, v)| **v)
            .map(|(e, _)| *e)
            .fold(f64::INFINITY, f64::min)
    });
    // Everything from the first point near the floor on is excluded, so
    // round-off growth past the floor cannot re-enter the fit.
    let cut = floor
        .and_then(|f| errs.iter().position(|e| *e <= FLOOR_FACTOR * f))
        .unwrap_or(n);
    let used: Vec<bool> = valid.iter().enumerate().map(|(i, v)| *v && i < cut).collect();

    let pts: Vec<(f64, f64)> = dts
        .iter()
        .zip(errs)
        .zip(&used)
        .filter(|(_, u)| **u)
        .map(|((d, e), _)| (d.ln(), e.ln()))
        .collect();
    let slope = if pts.len() < 2 {
        f64::NAN
    } else {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
            (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
        });
        sxy / sxx
    };
    SlopeFit { slope, used, floor }
}

/// Runs `T/2^i`, `i ∈ lo..=hi`, for the configured number of periods
/// (default one). Sweep points run in parallel; results do not depend on
/// the thread count.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let StepSpec::Sweep { lo, hi } = cfg.step else {
        return Err(SavError::Config("converge needs exp_range lo:hi".into()));
    };
    let periods = match cfg.duration {
        Duration::Periods(p) => p,
        Duration::Steps(_) => return Err(SavError::Config("a dt sweep runs whole periods".into())),
    };
    let problem = Problem::build(cfg)?;
    let period = problem.period();
    let opts = RecordOptions {
        stride: usize::MAX,
        snapshots: false,
    };
    let rows = (lo..=hi)
        .into_par_iter()
        .map(|i| {
            let per = 1usize << i;
            let dt = period / per as f64;
            let steps = per * periods;
            let rec = run_scheme(&problem, cfg.scheme, dt, steps, opts)?;
            Ok(ConvergenceRow {
                exp: i,
                dt,
                steps,
                solution_error: rec.closure_error(),
                energy_error: rec.max_rel_err_original,
                modified_energy_error: rec.max_rel_err_modified,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dts: Vec<f64> = rows.iter().map(|r| r.dt).collect();
    let sol: Vec<f64> = rows.iter().map(|r| r.solution_error).collect();
    let en: Vec<f64> = rows.iter().map(|r| r.energy_error).collect();
    Ok(ConvergenceTable {
        solution_fit: fit_slope(&dts, &sol),
        energy_fit: fit_slope(&dts, &en),
        rows,
    })
}
