//! Experiment harness: builds a problem and scheme from an
//! [`ExperimentConfig`], runs it, and writes CSV tables.
//!
//! Every CSV starts with `# key=value` lines (build id, configuration, and
//! `result.*` summaries) followed by a header row. Output is deterministic:
//! no timestamps, and floats are printed in shortest round-trip form.

mod config;
mod convergence;
mod output;

use std::path::PathBuf;

pub use config::{parse_exp_range, Duration, ExperimentConfig, ProblemKind, SchemeKind, StepSpec};
pub use convergence::{fit_slope, run_convergence, ConvergenceRow, ConvergenceTable, SlopeFit, FLOOR_FACTOR};
pub use output::{write_convergence_csv, write_orbit_csv, write_run_csv};

use crate::cn::{cn_run, Predictor};
use crate::error::{Result, SavError};
use crate::problems::kdv::{CnoidalParams, KdvGrid, KdvSystem};
use crate::problems::kepler::{KeplerSystem, INITIAL_STATE, PERIOD};
use crate::record::{RecordOptions, RunRecord};
use crate::rk::{rk4_run, StagePredictor};
use crate::sav::{init_augmented, GradientSystem};

/// Build identifier written into every CSV.
pub const BUILD_ID: &str = concat!("savflow ", env!("CARGO_PKG_VERSION"));

/// A benchmark problem with its periodic initial state.
#[derive(Debug, Clone)]
pub enum Problem {
    Kepler(KeplerSystem),
    /// The cnoidal wave on one spatial period.
    Kdv(KdvSystem, CnoidalParams),
}

impl Problem {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        match cfg.problem {
            ProblemKind::Kepler => {
                // r_L = √a_L is constant. a_U may be negative as long as
                // 1/r + a_U stays positive; violations surface while stepping.
                if !(cfg.a_lower > 0.0) {
                    return Err(SavError::Config("kepler needs a_lower > 0".into()));
                }
                Ok(Problem::Kepler(KeplerSystem::new(cfg.a_lower, cfg.a_upper)))
            }
            ProblemKind::Kdv => {
                let wave = CnoidalParams::default();
                let grid = KdvGrid::new(cfg.points, wave.spatial_period())?;
                let sys = KdvSystem::new(grid, cfg.a_lower, cfg.a_upper)
                    .map_err(|e| SavError::Config(format!("kdv shifts: {e}")))?;
                Ok(Problem::Kdv(sys, wave))
            }
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Problem::Kepler(_) => PERIOD,
            Problem::Kdv(_, wave) => wave.temporal_period(),
        }
    }

    pub fn initial_state(&self) -> Result<Vec<f64>> {
        match self {
            Problem::Kepler(_) => Ok(INITIAL_STATE.to_vec()),
            Problem::Kdv(sys, wave) => wave.sample(sys.grid(), 0.0),
        }
    }

    pub fn system(&self) -> &dyn GradientSystem {
        match self {
            Problem::Kepler(sys) => sys,
            Problem::Kdv(sys, _) => sys,
        }
    }

    /// Names of the per-row state columns.
    pub fn state_columns(&self) -> Vec<String> {
        match self {
            Problem::Kepler(_) => ["x", "y", "u", "v"].map(String::from).to_vec(),
            Problem::Kdv(sys, _) => (0..sys.grid().points()).map(|j| format!("u_{j}")).collect(),
        }
    }
}

/// Run `scheme` on `problem` for `steps` steps of size `dt`.
pub fn run_scheme(
    problem: &Problem,
    scheme: SchemeKind,
    dt: f64,
    steps: usize,
    opts: RecordOptions,
) -> Result<RunRecord> {
    let sys = problem.system();
    let z0 = init_augmented(sys, &problem.initial_state()?)?;
    let kdv = matches!(problem, Problem::Kdv(..));
    match scheme {
        SchemeKind::CnExtrapolation => cn_run(sys, &z0, dt, steps, Predictor::Extrapolation, opts),
        SchemeKind::CnEuler => {
            let pred = if kdv {
                Predictor::HalfStepExponentialEuler
            } else {
                Predictor::HalfStepExplicitEuler
            };
            cn_run(sys, &z0, dt, steps, pred, opts)
        }
        SchemeKind::Rk4 => {
            let pred = if kdv {
                StagePredictor::ExponentialRk
            } else {
                StagePredictor::ExplicitFiveStage
            };
            rk4_run(sys, &z0, dt, steps, pred, opts)
        }
    }
}

/// `dt` and step count of a single-run configuration, plus steps per period
/// when the step divides the period.
pub fn resolve_steps(cfg: &ExperimentConfig, period: f64) -> Result<(f64, usize, Option<usize>)> {
    let (dt, per_period) = match cfg.step {
        StepSpec::Dt(dt) => {
            let ratio = period / dt;
            let n = ratio.round();
            let per = ((ratio - n).abs() <= 1e-9 * ratio && n >= 1.0).then_some(n as usize);
            (dt, per)
        }
        StepSpec::DtExp(e) => (period / 2f64.powi(e as i32), Some(1usize << e)),
        StepSpec::Sweep { .. } => return Err(SavError::Config("a dt sweep is run with `converge`, not `run`".into())),
    };
    let steps = match cfg.duration {
        Duration::Steps(n) => n,
        Duration::Periods(p) => match per_period {
            Some(per) => per * p,
            None => {
                return Err(SavError::Config(format!(
                    "dt = {dt} does not divide the period {period}; give steps instead of periods"
                )))
            }
        },
    };
    Ok((dt, steps, per_period))
}

/// A finished single run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub problem: Problem,
    pub record: RunRecord,
    pub period: f64,
    pub steps_per_period: Option<usize>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let problem = Problem::build(cfg)?;
    let period = problem.period();
    let (dt, steps, per_period) = resolve_steps(cfg, period)?;
    if let (Problem::Kepler(_), Some(per)) = (&problem, per_period) {
        // Orbit output marks every period, so those steps must be recorded.
        if per % cfg.stride != 0 {
            return Err(SavError::Config(format!(
                "stride {} does not divide the {per} steps per period",
                cfg.stride
            )));
        }
    }
    let opts = RecordOptions {
        stride: cfg.stride,
        snapshots: true,
    };
    let record = run_scheme(&problem, cfg.scheme, dt, steps, opts)?;
    Ok(Experiment {
        config: cfg.clone(),
        problem,
        record,
        period,
        steps_per_period: per_period,
    })
}

fn file_stem(cfg: &ExperimentConfig) -> String {
    let step = match cfg.step {
        StepSpec::Dt(dt) => format!("dt{dt}"),
        StepSpec::DtExp(e) => format!("dtexp{e}"),
        StepSpec::Sweep { lo, hi } => format!("exp{lo}-{hi}"),
    };
    format!("{}_{}_{}", cfg.problem, cfg.scheme, step)
}

fn create_out_dir(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| SavError::Io(format!("{}: {e}", cfg.out.display())))
}

/// Runs and writes `<problem>_<scheme>_<step>.csv` into `cfg.out`; for Kepler
/// also `..._orbit.csv`. Returns the paths written.
pub fn run_to_dir(cfg: &ExperimentConfig) -> Result<(Experiment, Vec<PathBuf>)> {
    let exp = run_experiment(cfg)?;
    create_out_dir(cfg)?;
    let stem = file_stem(cfg);
    let mut paths = Vec::new();
    let path = cfg.out.join(format!("{stem}.csv"));
    write_run_csv(&mut std::fs::File::create(&path)?, &exp)?;
    paths.push(path);
    if matches!(exp.problem, Problem::Kepler(_)) {
        let path = cfg.out.join(format!("{stem}_orbit.csv"));
        write_orbit_csv(&mut std::fs::File::create(&path)?, &exp)?;
        paths.push(path);
    }
    Ok((exp, paths))
}

/// Runs the sweep and writes `<problem>_<scheme>_exp<lo>-<hi>.csv` into `cfg.out`.
pub fn converge_to_dir(cfg: &ExperimentConfig) -> Result<(ConvergenceTable, PathBuf)> {
    let table = run_convergence(cfg)?;
    create_out_dir(cfg)?;
    let path = cfg.out.join(format!("{}.csv", file_stem(cfg)));
    write_convergence_csv(&mut std::fs::File::create(&path)?, cfg, &table)?;
    Ok((table, path))
}
