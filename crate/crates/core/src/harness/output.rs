//! CSV writers. Data columns use `{:e}` (shortest round-trip scientific),
//! metadata values use the same text the config parser accepts.

use std::io::Write;

use super::config::ExperimentConfig;
use super::convergence::ConvergenceTable;
use super::{Experiment, BUILD_ID};
use crate::error::{Result, SavError};

fn rel(value: f64, base: f64) -> f64 {
    if base == 0.0 {
        (value - base).abs()
    } else {
        ((value - base) / base).abs()
    }
}

fn header<W: Write>(w: &mut W, cfg: &ExperimentConfig, results: &[(&str, String)]) -> Result<()> {
    writeln!(w, "# build={BUILD_ID}")?;
    for (k, v) in cfg.metadata() {
        writeln!(w, "# {k}={v}")?;
    }
    for (k, v) in results {
        writeln!(w, "# result.{k}={v}")?;
    }
    Ok(())
}

/// `step,t,E_mod,E_orig,relerr_E_mod,relerr_E_orig,<state columns>`
pub fn write_run_csv<W: Write>(w: &mut W, exp: &Experiment) -> Result<()> {
    let rec = &exp.record;
    header(
        w,
        &exp.config,
        &[
            ("dt", format!("{:e}", rec.dt)),
            ("steps", rec.steps.to_string()),
            ("E_mod0", format!("{:e}", rec.modified_energy0())),
            ("E_orig0", format!("{:e}", rec.original_energy0())),
            ("max_relerr_E_mod", format!("{:e}", rec.max_rel_err_modified)),
            ("max_relerr_E_orig", format!("{:e}", rec.max_rel_err_original)),
            ("closure_error", format!("{:e}", rec.closure_error())),
        ],
    )?;
    let mut cols = vec!["step", "t", "E_mod", "E_orig", "relerr_E_mod", "relerr_E_orig"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend(exp.problem.state_columns());
    writeln!(w, "{}", cols.join(","))?;
    let (m0, o0) = (rec.modified_energy0(), rec.original_energy0());
    for row in &rec.rows {
        write!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e}",
            row.step,
            row.t,
            row.modified_energy,
            row.original_energy,
            rel(row.modified_energy, m0),
            rel(row.original_energy, o0)
        )?;
        for x in row.state.as_deref().unwrap_or(&[]) {
            write!(w, ",{x:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `step,t,x,y,period_marker`; the marker is 1 at `t = kT`, so a run of `p`
/// whole periods has `p + 1` marked rows.
pub fn write_orbit_csv<W: Write>(w: &mut W, exp: &Experiment) -> Result<()> {
    let per = exp
        .steps_per_period
        .ok_or_else(|| SavError::Config("orbit markers need a step that divides the period".into()))?;
    if per % exp.config.stride.max(1) != 0 {
        return Err(SavError::Config(format!(
            "stride {} does not divide the {per} steps per period",
            exp.config.stride
        )));
    }
    let rec = &exp.record;
    let markers = rec.rows.iter().filter(|r| r.step % per == 0).count();
    header(
        w,
        &exp.config,
        &[("steps_per_period", per.to_string()), ("markers", markers.to_string())],
    )?;
    writeln!(w, "step,t,x,y,period_marker")?;
    for row in &rec.rows {
        let s = row
            .state
            .as_deref()
            .ok_or_else(|| SavError::Config("orbit output needs state snapshots".into()))?;
        writeln!(
            w,
            "{},{:e},{:e},{:e},{}",
            row.step,
            row.t,
            s[0],
            s[1],
            u8::from(row.step % per == 0)
        )?;
    }
    Ok(())
}

/// `exp,dt,steps,solution_error,energy_error,modified_energy_error,
/// local_slope_solution,local_slope_energy`; the first row's local slopes
/// are empty. Fitted slopes go into the header.
pub fn write_convergence_csv<W: Write>(w: &mut W, cfg: &ExperimentConfig, table: &ConvergenceTable) -> Result<()> {
    let used = |u: &[bool]| {
        table
            .rows
            .iter()
            .zip(u)
            .filter(|(_, u)| **u)
            .map(|(r, _)| r.exp.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let floor = |f: Option<f64>| f.map_or("none".to_string(), |x| format!("{x:e}"));
    header(
        w,
        cfg,
        &[
            ("fitted_slope_solution", format!("{:e}", table.solution_fit.slope)),
            ("fit_points_solution", used(&table.solution_fit.used)),
            ("floor_solution", floor(table.solution_fit.floor)),
            ("fitted_slope_energy", format!("{:e}", table.energy_fit.slope)),
            ("fit_points_energy", used(&table.energy_fit.used)),
            ("floor_energy", floor(table.energy_fit.floor)),
        ],
    )?;
    writeln!(
        w,
        "exp,dt,steps,solution_error,energy_error,modified_energy_error,local_slope_solution,local_slope_energy"
    )?;
    let ls = table.local_slopes(|r| r.solution_error);
    let le = table.local_slopes(|r| r.energy_error);
    for (k, r) in table.rows.iter().enumerate() {
        let (a, b) = if k == 0 {
            (String::new(), String::new())
        } else {
            (format!("{:e}", ls[k - 1]), format!("{:e}", le[k - 1]))
        };
        writeln!(
            w,
            "{},{:e},{},{:e},{:e},{:e},{a},{b}",
            r.exp, r.dt, r.steps, r.solution_error, r.energy_error, r.modified_energy_error
        )?;
    }
    Ok(())
}
