//! Run configuration: a `key = value` file overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use horizon_spin::geometry::HORIZON_GUARD;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Read { path: String, message: String },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for {key}: {message}")]
    Value {
        key: String,
        value: String,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Trajectory,
    Sweep,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha0,
    RStart,
    Mass,
    NSteps,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "alpha0" => Ok(SweepAxis::Alpha0),
            "r_start" | "r-start" => Ok(SweepAxis::RStart),
            "mass" | "M" => Ok(SweepAxis::Mass),
            "n_steps" | "steps" => Ok(SweepAxis::NSteps),
            other => Err(format!("unknown sweep axis `{other}` (alpha0, r_start, mass, n_steps)")),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Alpha0 => "alpha0",
            SweepAxis::RStart => "r_start",
            SweepAxis::Mass => "mass",
            SweepAxis::NSteps => "n_steps",
        })
    }
}

/// Command-line flags. Every flag overrides the config-file key of the same name.
#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "horizon-spin",
    version,
    about = "Spin Wigner rotation of radial infall into a Schwarzschild black hole"
)]
pub struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Black-hole mass M.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Initial rapidity α₀.
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Start radius in units of M.
    #[arg(long = "r-start", allow_negative_numbers = true)]
    pub r_start: Option<f64>,
    /// End radius in units of M.
    #[arg(long = "r-end", allow_negative_numbers = true)]
    pub r_end: Option<f64>,
    /// Number of integration segments.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "sweep-axis")]
    pub sweep_axis: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long = "sweep-values")]
    pub sweep_values: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub mass: f64,
    pub alpha0: f64,
    /// In units of M.
    pub r_start: f64,
    /// In units of M.
    pub r_end: f64,
    pub n_steps: usize,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Vec<f64>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Trajectory,
            mass: 1.0,
            alpha0: 1.0,
            r_start: 6.0,
            r_end: 2.2,
            n_steps: 1000,
            sweep_axis: None,
            sweep_values: Vec::new(),
            output: None,
            format: Format::Csv,
            workers: 1,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: k + 1,
                text: raw.to_string(),
            });
        };
        out.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        message: e.to_string(),
    })
}

fn parse_enum<T: clap::ValueEnum>(key: &str, value: &str) -> Result<T, ConfigError> {
    T::from_str(value, true).map_err(|message| ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        message,
    })
}

pub fn parse_sweep_values(text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse::<f64>("sweep_values", s))
        .collect()
}

impl RunConfig {
    fn apply_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "mode" => self.mode = parse_enum(key, value)?,
            "mass" | "M" => self.mass = parse(key, value)?,
            "alpha0" => self.alpha0 = parse(key, value)?,
            "r_start" => self.r_start = parse(key, value)?,
            "r_end" => self.r_end = parse(key, value)?,
            "steps" | "n_steps" => self.n_steps = parse(key, value)?,
            "sweep_axis" => self.sweep_axis = Some(parse(key, value)?),
            "sweep_values" => self.sweep_values = parse_sweep_values(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = parse_enum(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(cli: &Cli) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            for (key, value) in parse_config_text(&text)? {
                cfg.apply_key(&key, &value)?;
            }
        }
        if let Some(v) = cli.mode {
            cfg.mode = v;
        }
        if let Some(v) = cli.mass {
            cfg.mass = v;
        }
        if let Some(v) = cli.alpha0 {
            cfg.alpha0 = v;
        }
        if let Some(v) = cli.r_start {
            cfg.r_start = v;
        }
        if let Some(v) = cli.r_end {
            cfg.r_end = v;
        }
        if let Some(v) = cli.steps {
            cfg.n_steps = v;
        }
        if let Some(v) = &cli.sweep_axis {
            cfg.sweep_axis = Some(parse("sweep_axis", v)?);
        }
        if let Some(v) = &cli.sweep_values {
            cfg.sweep_values = parse_sweep_values(v)?;
        }
        if let Some(v) = &cli.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = cli.format {
            cfg.format = v;
        }
        if let Some(v) = cli.workers {
            cfg.workers = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if self.mode == Mode::Verify {
            return Ok(());
        }
        self.validate_trajectory()?;
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.mode == Mode::Sweep {
            let Some(axis) = self.sweep_axis else {
                return bad("sweep mode needs sweep_axis".into());
            };
            if self.sweep_values.is_empty() {
                return bad("sweep mode needs at least one sweep value".into());
            }
            for &v in &self.sweep_values {
                self.with_axis(axis, v)?.validate_trajectory()?;
            }
        }
        Ok(())
    }

    fn validate_trajectory(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            return bad(format!("alpha0 must be positive, got {}", self.alpha0));
        }
        let floor = 2.0 * (1.0 + HORIZON_GUARD);
        if !(self.r_end > floor && self.r_end.is_finite()) {
            return bad(format!("r_end must exceed 2(1+ε) in units of M, got {}", self.r_end));
        }
        if !(self.r_start > self.r_end && self.r_start.is_finite()) {
            return bad(format!(
                "r_start must exceed r_end, got r_start = {}, r_end = {}",
                self.r_start, self.r_end
            ));
        }
        if self.n_steps < 2 {
            return bad(format!("steps must be at least 2, got {}", self.n_steps));
        }
        Ok(())
    }

    /// The configuration with one sweep axis set to `value`.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<Self, ConfigError> {
        let mut c = self.clone();
        match axis {
            SweepAxis::Alpha0 => c.alpha0 = value,
            SweepAxis::RStart => c.r_start = value,
            SweepAxis::Mass => c.mass = value,
            SweepAxis::NSteps => {
                if !(value >= 2.0 && value.fract() == 0.0 && value <= usize::MAX as f64) {
                    return Err(ConfigError::Invalid(format!(
                        "n_steps sweep value must be an integer ≥ 2, got {value}"
                    )));
                }
                c.n_steps = value as usize;
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let map = parse_config_text("# run\nmass = 2\nalpha0=0.5 # slow\nr-start = 8\n\n").unwrap();
        assert_eq!(map["mass"], "2");
        assert_eq!(map["r_start"], "8");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "mass = 2\nalpha0 = 0.5\nsteps = 10\n").unwrap();
        let cli = Cli {
            config: Some(path),
            alpha0: Some(0.7),
            ..Cli::default()
        };
        let cfg = RunConfig::resolve(&cli).unwrap();
        assert_eq!((cfg.mass, cfg.alpha0, cfg.n_steps), (2.0, 0.7, 10));
    }

    #[test]
    fn invalid_configs() {
        let run = |cli: Cli| RunConfig::resolve(&cli);
        assert!(matches!(
            run(Cli {
                r_start: Some(4.0),
                r_end: Some(4.0),
                ..Cli::default()
            }),
            Err(ConfigError::Invalid(_))
        ));
        assert!(run(Cli {
            r_end: Some(2.0),
            ..Cli::default()
        })
        .is_err());
        assert!(run(Cli {
            alpha0: Some(0.0),
            ..Cli::default()
        })
        .is_err());
        assert!(run(Cli {
            steps: Some(1),
            ..Cli::default()
        })
        .is_err());
        assert!(run(Cli {
            mode: Some(Mode::Sweep),
            ..Cli::default()
        })
        .is_err());
        assert!(parse_config_text("mass 2").is_err());
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_key("colour", "red"), Err(ConfigError::UnknownKey(_))));
        assert!(c.apply_key("mass", "heavy").is_err());
    }

    #[test]
    fn sweep_axes() {
        assert_eq!("r-start".parse::<SweepAxis>().unwrap(), SweepAxis::RStart);
        assert!("theta".parse::<SweepAxis>().is_err());
        let c = RunConfig::default();
        assert_eq!(c.with_axis(SweepAxis::NSteps, 64.0).unwrap().n_steps, 64);
        assert!(c.with_axis(SweepAxis::NSteps, 6.5).is_err());
        assert_eq!(parse_sweep_values("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
    }
}
