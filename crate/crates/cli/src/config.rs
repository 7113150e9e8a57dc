//! Run configuration: a `key=value` file plus command-line overrides.

use std::path::Path;
use std::str::FromStr;

use smartgame_core::{ModelParams, ParamName, Scenario};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected key=value")]
    Syntax { path: String, line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}`: cannot parse `{value}` as a number")]
    NotANumber { key: String, value: String },
    #[error("unknown method `{0}` (expected closed, oracle or both)")]
    Method(String),
    #[error("bad sweep axis `{0}` (expected name=start:stop:count)")]
    Axis(String),
    #[error("sweep count must be at least 2 (got {0})")]
    AxisCount(usize),
    #[error(transparent)]
    Scenario(#[from] smartgame_core::params::UnknownScenario),
    #[error(transparent)]
    Params(#[from] smartgame_core::ParamViolation),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Closed,
    Oracle,
    Both,
}

impl FromStr for MethodChoice {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "closed" => Ok(MethodChoice::Closed),
            "oracle" => Ok(MethodChoice::Oracle),
            "both" => Ok(MethodChoice::Both),
            other => Err(ConfigError::Method(other.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub name: ParamName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

impl FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Axis(s.into());
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let name: ParamName = name.trim().parse().map_err(|_| ConfigError::UnknownKey(name.trim().into()))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad());
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if count < 2 {
            return Err(ConfigError::AxisCount(count));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(SweepAxis {
            name,
            start,
            stop,
            count,
        })
    }
}

/// Everything a solve or sweep needs. Later assignments win.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenarios: Vec<Scenario>,
    pub assignments: Vec<(ParamName, f64)>,
    pub axis: Option<SweepAxis>,
    pub method: MethodChoice,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenarios: vec![Scenario::UN],
            assignments: Vec::new(),
            axis: None,
            method: MethodChoice::Closed,
        }
    }
}

pub fn parse_assignment(s: &str) -> Result<(ParamName, f64), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::UnknownKey(s.into()))?;
    let name: ParamName = k.trim().parse().map_err(|_| ConfigError::UnknownKey(k.trim().into()))?;
    let value: f64 = v.trim().parse().map_err(|_| ConfigError::NotANumber {
        key: k.trim().into(),
        value: v.trim().into(),
    })?;
    Ok((name, value))
}

fn parse_scenarios(s: &str) -> Result<Vec<Scenario>, ConfigError> {
    s.split(',').map(|t| Ok(t.trim().parse::<Scenario>()?)).collect()
}

impl RunConfig {
    /// Applies one `key=value` line. Keys are parameter names plus
    /// `scenario`, `method` and `vary`.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.trim() {
            "scenario" => self.scenarios = parse_scenarios(value)?,
            "method" => self.method = value.parse()?,
            "vary" => self.axis = Some(value.parse()?),
            k => {
                let line = format!("{k}={value}");
                self.assignments.push(parse_assignment(&line)?);
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax {
                path: origin.into(),
                line: i + 1,
            })?;
            cfg.apply(k, v)?;
        }
        Ok(cfg)
    }

    /// Defaults are the text's benchmark (α=1, q=0.5, k=0.5, θ=0.4, λ=0.5,
    /// μ=1, ε′=1, r=0.3) with the assignments applied in order.
    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        let mut p = ModelParams::text_benchmark();
        for (name, v) in &self.assignments {
            p = p.with(*name, *v);
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::parse("# run\nscenario = un,rn\nq=2\nmethod=both\n", "t").unwrap();
        c.apply("q", "3").unwrap();
        assert_eq!(c.scenarios, vec![Scenario::UN, Scenario::RN]);
        assert_eq!(c.method, MethodChoice::Both);
        assert_eq!(c.params().unwrap().q, 3.0);
    }

    #[test]
    fn axis() {
        let a: SweepAxis = "lambda=0:1:5".parse().unwrap();
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(matches!("lambda=0:1:1".parse::<SweepAxis>(), Err(ConfigError::AxisCount(1))));
        assert!("nope=0:1:3".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn bad_theta_names_the_bound() {
        let mut c = RunConfig::default();
        c.apply("theta", "0.6").unwrap();
        let e = c.params().unwrap_err().to_string();
        assert!(e.contains("θ ≤ μ/2"), "{e}");
    }
}
