//! Flat `key = value` scenario files.
//!
//! ```text
//! # Fig. 2(a), full curve
//! task = emission
//! model = double
//! dg1 = -1
//! dg2 = 0
//! gamma = 1
//! ```
//!
//! Blank lines and `#` comments are ignored. Command-line flags arrive as
//! overrides and replace file values key by key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::SolverGrid;
use crate::error::{Error, Result};
use crate::grid::DetuningGrid;
use crate::reservoir::ReservoirModel;

pub const KEYS: &[&str] = &[
    "task",
    "model",
    "beta",
    "dg1",
    "dg2",
    "dg",
    "gamma",
    "chi0",
    "amplitude",
    "omega",
    "delta",
    "grid_min",
    "grid_max",
    "grid_points",
    "t_max",
    "steps",
    "output_path",
    "output_format",
];

pub const DEFAULT_BETA: f64 = 1.0;
pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_CHI0: f64 = 1.0;
/// Default horizon in units of `1/gamma`.
pub const DEFAULT_T_MAX_GAMMA: f64 = 40.0;
pub const DEFAULT_STEPS: usize = 20_000;
/// Cross-checks integrate long enough for the `t^{-3/2}` band-edge tail of
/// `b2` to fall below the spectrum tail limit.
pub const CROSSCHECK_T_MAX_GAMMA: f64 = 120.0;
pub const CROSSCHECK_STEPS: usize = 24_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Emission,
    Susceptibility,
    Dynamics,
    Crosscheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplitude {
    B2,
    C2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty, $key:literal, { $($text:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($variant),)+
                    other => Err(Error::config(
                        $key,
                        format!("unrecognised value '{other}' (expected one of: {})", [$($text),+].join(", ")),
                    )),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let text = match self {
                    $(v if *v == $variant => $text,)+
                    _ => unreachable!(),
                };
                f.write_str(text)
            }
        }
    };
}

keyword_enum!(Task, "task", {
    "emission" => Task::Emission,
    "susceptibility" => Task::Susceptibility,
    "dynamics" => Task::Dynamics,
    "crosscheck" => Task::Crosscheck,
});

keyword_enum!(Amplitude, "amplitude", {
    "b2" => Amplitude::B2,
    "c2" => Amplitude::C2,
});

keyword_enum!(OutputFormat, "output_format", {
    "csv" => OutputFormat::Csv,
    "json" => OutputFormat::Json,
});

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub task: Task,
    pub model: ReservoirModel,
    pub gamma: f64,
    pub chi0: f64,
    pub amplitude: Amplitude,
    pub omega_rabi: Option<f64>,
    pub delta: Option<f64>,
    pub grid: DetuningGrid,
    pub solver: SolverGrid,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

/// Raw key/value pairs before validation.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    "expected 'key = value'",
                ));
            };
            let key = key.trim();
            if raw.entries.contains_key(key) {
                return Err(Error::config(key, "duplicate key"));
            }
            raw.set(key, value.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if value.is_empty() {
            return Err(Error::config(key, "empty value"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::config(key, format!("'{v}' is not a number")))?;
                if !x.is_finite() {
                    return Err(Error::config(key, "must be finite"));
                }
                Ok(x)
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::config(key, format!("'{v}' is not a non-negative integer")))
            })
            .transpose()
    }

    fn reject(&self, key: &str, context: &str) -> Result<()> {
        if self.entries.contains_key(key) {
            return Err(Error::config(key, format!("does not apply to {context}")));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let task: Task = self
            .get("task")
            .ok_or_else(|| Error::config("task", "task required"))?
            .parse()?;

        let beta = self.number("beta")?.unwrap_or(DEFAULT_BETA);
        if beta < 0.0 {
            return Err(Error::config("beta", "must be >= 0"));
        }
        let model = match self
            .get("model")
            .ok_or_else(|| Error::config("model", "model required (none, single or double)"))?
        {
            "none" => {
                for key in ["dg", "dg1", "dg2"] {
                    self.reject(key, "model = none")?;
                }
                ReservoirModel::None
            }
            "single" => {
                self.reject("dg1", "model = single (use dg)")?;
                self.reject("dg2", "model = single (use dg)")?;
                let edge = self
                    .number("dg")?
                    .ok_or_else(|| Error::config("dg", "required for model = single"))?;
                ReservoirModel::SingleBand { beta, edge }
            }
            "double" => {
                self.reject("dg", "model = double (use dg1 and dg2)")?;
                let lower_edge = self
                    .number("dg1")?
                    .ok_or_else(|| Error::config("dg1", "required for model = double"))?;
                let upper_edge = self
                    .number("dg2")?
                    .ok_or_else(|| Error::config("dg2", "required for model = double"))?;
                if lower_edge >= upper_edge {
                    return Err(Error::config(
                        "dg1/dg2",
                        "gap width must be positive (dg1 < dg2)",
                    ));
                }
                ReservoirModel::DoubleBand {
                    beta,
                    lower_edge,
                    upper_edge,
                }
            }
            other => {
                return Err(Error::config(
                    "model",
                    format!("unrecognised value '{other}' (expected one of: none, single, double)"),
                ))
            }
        };

        let gamma = self.number("gamma")?.unwrap_or(DEFAULT_GAMMA);
        if task == Task::Dynamics {
            if gamma < 0.0 {
                return Err(Error::config("gamma", "must be >= 0"));
            }
        } else if gamma <= 0.0 {
            return Err(Error::config("gamma", "must be > 0"));
        }

        let chi0 = self.number("chi0")?.unwrap_or(DEFAULT_CHI0);
        if chi0 <= 0.0 {
            return Err(Error::config("chi0", "must be > 0"));
        }

        let amplitude: Amplitude = match self.get("amplitude") {
            Some(v) => v.parse()?,
            None => Amplitude::B2,
        };
        let omega_rabi = self.number("omega")?;
        let delta = self.number("delta")?;
        if let Some(omega) = omega_rabi {
            if omega <= 0.0 {
                return Err(Error::config("omega", "must be > 0"));
            }
        }
        if task == Task::Dynamics && amplitude == Amplitude::C2 {
            if omega_rabi.is_none() {
                return Err(Error::config("omega", "required for amplitude = c2"));
            }
            if delta.is_none() {
                return Err(Error::config("delta", "required for amplitude = c2"));
            }
        }

        let defaults = DetuningGrid::default();
        let grid = DetuningGrid {
            min: self.number("grid_min")?.unwrap_or(defaults.min),
            max: self.number("grid_max")?.unwrap_or(defaults.max),
            points: self.count("grid_points")?.unwrap_or(defaults.points),
        };
        if grid.points < 2 {
            return Err(Error::config("grid_points", "must be >= 2"));
        }
        if grid.min >= grid.max {
            return Err(Error::config(
                "grid_min/grid_max",
                "grid_min must be < grid_max",
            ));
        }

        let (horizon, default_steps) = match task {
            Task::Crosscheck => (CROSSCHECK_T_MAX_GAMMA, CROSSCHECK_STEPS),
            _ => (DEFAULT_T_MAX_GAMMA, DEFAULT_STEPS),
        };
        let t_max = match self.number("t_max")? {
            Some(t) => t,
            None if gamma > 0.0 => horizon / gamma,
            None => return Err(Error::config("t_max", "required when gamma = 0")),
        };
        if t_max <= 0.0 {
            return Err(Error::config("t_max", "must be > 0"));
        }
        let steps = self.count("steps")?.unwrap_or(default_steps);
        if steps < 2 {
            return Err(Error::config("steps", "must be >= 2"));
        }

        let output_format = match self.get("output_format") {
            Some(v) => v.parse()?,
            None => OutputFormat::Csv,
        };

        Ok(ScenarioConfig {
            task,
            model,
            gamma,
            chi0,
            amplitude,
            omega_rabi,
            delta,
            grid,
            solver: SolverGrid { t_max, steps },
            output_path: self.get("output_path").map(PathBuf::from),
            output_format,
        })
    }
}

/// Parses scenario text, applies `overrides` (flag values) on top, and
/// validates the result.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let mut raw = RawConfig::from_text(text)?;
    for (key, value) in overrides {
        raw.set(key, value)?;
    }
    raw.resolve()
}

impl ScenarioConfig {
    /// Canonical text form with every default spelled out.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("task = {}", self.task)];
        match self.model {
            ReservoirModel::None => lines.push("model = none".into()),
            ReservoirModel::SingleBand { beta, edge } => {
                lines.push("model = single".into());
                lines.push(format!("beta = {beta}"));
                lines.push(format!("dg = {edge}"));
            }
            ReservoirModel::DoubleBand {
                beta,
                lower_edge,
                upper_edge,
            } => {
                lines.push("model = double".into());
                lines.push(format!("beta = {beta}"));
                lines.push(format!("dg1 = {lower_edge}"));
                lines.push(format!("dg2 = {upper_edge}"));
            }
        }
        lines.push(format!("gamma = {}", self.gamma));
        lines.push(format!("chi0 = {}", self.chi0));
        lines.push(format!("amplitude = {}", self.amplitude));
        if let Some(omega) = self.omega_rabi {
            lines.push(format!("omega = {omega}"));
        }
        if let Some(delta) = self.delta {
            lines.push(format!("delta = {delta}"));
        }
        lines.push(format!("grid_min = {}", self.grid.min));
        lines.push(format!("grid_max = {}", self.grid.max));
        lines.push(format!("grid_points = {}", self.grid.points));
        lines.push(format!("t_max = {}", self.solver.t_max));
        lines.push(format!("steps = {}", self.solver.steps));
        if let Some(path) = &self.output_path {
            lines.push(format!("output_path = {}", path.display()));
        }
        lines.push(format!("output_format = {}", self.output_format));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }
}
