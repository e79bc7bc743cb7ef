//! Experiment configuration: `key=value` files, CSV metadata round trip.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Result, SavError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Kepler,
    Kdv,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Kepler => "kepler",
            ProblemKind::Kdv => "kdv",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = SavError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kepler" => Ok(ProblemKind::Kepler),
            "kdv" => Ok(ProblemKind::Kdv),
            other => Err(SavError::Config(format!(
                "unknown problem '{other}' (expected kepler or kdv)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sav-cn-euler` and `sav-rk4` pick their predictor per problem: explicit
/// for Kepler, exponential (using the KdV splitting) for KdV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    CnExtrapolation,
    CnEuler,
    Rk4,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::CnExtrapolation, SchemeKind::CnEuler, SchemeKind::Rk4];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::CnExtrapolation => "sav-cn-ext",
            SchemeKind::CnEuler => "sav-cn-euler",
            SchemeKind::Rk4 => "sav-rk4",
        }
    }
}

impl FromStr for SchemeKind {
    type Err = SavError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sav-cn-ext" => Ok(SchemeKind::CnExtrapolation),
            "sav-cn-euler" => Ok(SchemeKind::CnEuler),
            "sav-rk4" => Ok(SchemeKind::Rk4),
            other => Err(SavError::Config(format!(
                "unknown scheme '{other}' (expected sav-cn-ext, sav-cn-euler or sav-rk4)"
            ))),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Time step: absolute, `T/2^exp` with `T` the problem's period, or a sweep
/// over `exp ∈ lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSpec {
    Dt(f64),
    DtExp(u32),
    Sweep { lo: u32, hi: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Duration {
    Steps(usize),
    Periods(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub scheme: SchemeKind,
    pub step: StepSpec,
    pub duration: Duration,
    /// Grid size, KdV only.
    pub points: usize,
    pub a_lower: f64,
    pub a_upper: f64,
    pub out: PathBuf,
    pub stride: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Kepler,
            scheme: SchemeKind::CnEuler,
            step: StepSpec::DtExp(10),
            duration: Duration::Periods(1),
            points: 16,
            a_lower: 1.0,
            a_upper: 1.0,
            out: PathBuf::from("."),
            stride: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| SavError::Config(format!("invalid value for {key}: '{value}'")))
}

/// `"3:20"` → `(3, 20)`
pub fn parse_exp_range(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| SavError::Config(format!("exp_range must be lo:hi, got '{s}'")))?;
    Ok((parse("exp_range", lo)?, parse("exp_range", hi)?))
}

impl ExperimentConfig {
    /// Applies one `key=value` assignment. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "problem" => self.problem = value.parse()?,
            "scheme" => self.scheme = value.parse()?,
            "dt" => self.step = StepSpec::Dt(parse(key, value)?),
            "dt_exp" => self.step = StepSpec::DtExp(parse(key, value)?),
            "exp_range" => {
                let (lo, hi) = parse_exp_range(value)?;
                self.step = StepSpec::Sweep { lo, hi };
            }
            "steps" => self.duration = Duration::Steps(parse(key, value)?),
            "periods" => self.duration = Duration::Periods(parse(key, value)?),
            "points" => self.points = parse(key, value)?,
            "a_lower" => self.a_lower = parse(key, value)?,
            "a_upper" => self.a_upper = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "stride" => self.stride = parse(key, value)?,
            other => return Err(SavError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SavError::Config(format!("line {}: expected key=value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SavError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_str(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SavError::Config(m));
        match self.step {
            StepSpec::Dt(dt) if !(dt.is_finite() && dt > 0.0) => return bad(format!("dt must be positive, got {dt}")),
            StepSpec::DtExp(e) if e > 40 => return bad(format!("dt_exp {e} is too large")),
            StepSpec::Sweep { lo, hi } if lo > hi || hi > 40 => {
                return bad(format!("exp_range {lo}:{hi} must satisfy lo <= hi <= 40"))
            }
            _ => {}
        }
        match self.duration {
            Duration::Steps(0) => return bad("steps must be at least 1".into()),
            Duration::Periods(0) => return bad("periods must be at least 1".into()),
            Duration::Steps(_) if matches!(self.step, StepSpec::Sweep { .. }) => {
                return bad("a dt sweep runs whole periods; use periods, not steps".into())
            }
            _ => {}
        }
        if self.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        if self.problem == ProblemKind::Kdv && (self.points < 2 || !self.points.is_power_of_two()) {
            return bad(format!("points must be a power of two >= 2, got {}", self.points));
        }
        if !(self.a_lower.is_finite() && self.a_upper.is_finite()) {
            return bad("a_lower and a_upper must be finite".into());
        }
        Ok(())
    }

    /// `key=value` pairs describing the run (without `out`), in a fixed order.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let mut m = vec![
            ("problem", self.problem.to_string()),
            ("scheme", self.scheme.to_string()),
        ];
        match self.step {
            StepSpec::Dt(dt) => m.push(("dt", dt.to_string())),
            StepSpec::DtExp(e) => m.push(("dt_exp", e.to_string())),
            StepSpec::Sweep { lo, hi } => m.push(("exp_range", format!("{lo}:{hi}"))),
        }
        match self.duration {
            Duration::Steps(n) => m.push(("steps", n.to_string())),
            Duration::Periods(n) => m.push(("periods", n.to_string())),
        }
        if self.problem == ProblemKind::Kdv {
            m.push(("points", self.points.to_string()));
        }
        m.push(("a_lower", self.a_lower.to_string()));
        m.push(("a_upper", self.a_upper.to_string()));
        m.push(("stride", self.stride.to_string()));
        m
    }

    /// Reconstructs a configuration from the `# key=value` header of a CSV
    /// written by this crate. Header keys that are not configuration keys
    /// (build id, results) are ignored; `out` is left at its default.
    pub fn from_csv_header(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for line in text.lines() {
            let Some(rest) = line.strip_prefix("# ") else { break };
            if let Some((k, v)) = rest.split_once('=') {
                if k.contains('.') || k == "build" {
                    continue;
                }
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }
}
