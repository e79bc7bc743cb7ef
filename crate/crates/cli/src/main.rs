//! `savflow` — run SAV experiments and convergence sweeps, writing CSV.
//!
//! Exit codes: 0 success, 1 runtime error, 2 configuration error. Errors are
//! reported on stderr as `error: kind=<kind> step=<n|-> message="..."`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use savflow::harness::{converge_to_dir, run_to_dir, ExperimentConfig};
use savflow::SavError;

#[derive(Parser, Debug)]
#[command(
    name = "savflow",
    version,
    about = "Energy-preserving SAV integrators: experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run: energy trace (and orbit for kepler).
    Run(Common),
    /// Convergence sweep over dt = T/2^i.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Exponent range lo:hi.
        #[arg(long)]
        exp_range: Option<String>,
    },
}

/// Flags override values from `--config`.
#[derive(Args, Debug)]
struct Common {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Absolute time step.
    #[arg(long, conflicts_with = "dt_exp")]
    dt: Option<String>,
    /// Time step T/2^k.
    #[arg(long)]
    dt_exp: Option<String>,
    #[arg(long, conflicts_with = "periods")]
    steps: Option<String>,
    #[arg(long)]
    periods: Option<String>,
    /// Grid points (kdv).
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    a_lower: Option<String>,
    #[arg(long)]
    a_upper: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Record every n-th step.
    #[arg(long)]
    stride: Option<String>,
}

impl Common {
    fn resolve(&self, extra: &[(&str, &Option<String>)]) -> Result<ExperimentConfig, SavError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("problem", &self.problem),
            ("scheme", &self.scheme),
            ("dt", &self.dt),
            ("dt_exp", &self.dt_exp),
            ("steps", &self.steps),
            ("periods", &self.periods),
            ("points", &self.points),
            ("a_lower", &self.a_lower),
            ("a_upper", &self.a_upper),
            ("out", &self.out),
            ("stride", &self.stride),
        ];
        for (key, value) in flags.iter().chain(extra) {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<(), SavError> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.resolve(&[])?;
            let (exp, paths) = run_to_dir(&cfg)?;
            let rec = &exp.record;
            println!(
                "{} {}: {} steps, dt={:e}, max relerr E_mod={:e}, E_orig={:e}",
                cfg.problem, cfg.scheme, rec.steps, rec.dt, rec.max_rel_err_modified, rec.max_rel_err_original
            );
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Command::Converge { common, exp_range } => {
            let cfg = common.resolve(&[("exp_range", &exp_range)])?;
            if !matches!(cfg.step, savflow::harness::StepSpec::Sweep { .. }) {
                return Err(SavError::Config("converge needs --exp-range lo:hi".into()));
            }
            let (table, path) = converge_to_dir(&cfg)?;
            println!("{:>4} {:>12} {:>12} {:>12}", "exp", "dt", "sol_err", "energy_err");
            for r in &table.rows {
                println!(
                    "{:>4} {:>12.4e} {:>12.4e} {:>12.4e}",
                    r.exp, r.dt, r.solution_error, r.energy_error
                );
            }
            println!(
                "fitted slope: solution {:.3}, energy {:.3}",
                table.solution_fit.slope, table.energy_fit.slope
            );
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let step = e.step().map_or("-".to_string(), |s| s.to_string());
            let msg = e.to_string().replace('"', "'");
            eprintln!("error: kind={} step={step} message=\"{msg}\"", e.kind());
            if e.kind() == "config" {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
