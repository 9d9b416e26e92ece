//! Experiment configuration files.
//!
//! A config is one TOML document with three optional tables. Unknown keys
//! anywhere are errors.
//!
//! ```toml
//! experiment = "mipt-scan"        # must match the subcommand if present
//!
//! [engine]
//! sizes = [64, 128, 256]          # system sizes L
//! p = [0.13, 0.15, 0.17]          # measurement rates (or p_Z)
//! depth = 64                      # layers; or depth_factor = 2.0 (× L)
//! q = 2                           # local dimension
//! ensemble = "haar"               # haar | clifford | u1 | dual-unitary
//! boundary = "periodic"           # open | periodic
//! times = [64.0, 128.0]           # durations or polymer heights
//! velocities = [0.0, 0.5]         # cut slopes
//! width = 2048                    # lattice width for polymers
//! region = 8                      # interval length ℓ
//!
//! [sampling]
//! seed = 1
//! realizations = 100
//! checkpoints = [1.5, 2.0]        # recording times; units depend on the experiment
//!
//! [output]
//! dir = "results"
//! formats = ["csv", "json", "svg"]
//! ```

use std::path::PathBuf;

use circuitlab_core::circuit::{Boundary, GateEnsemble};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleName {
    Haar,
    Clifford,
    U1,
    DualUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryName {
    Open,
    Periodic,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::Open => Boundary::Open,
            BoundaryName::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
    pub depth: Option<usize>,
    pub depth_factor: Option<f64>,
    pub q: Option<usize>,
    pub ensemble: Option<EnsembleName>,
    pub boundary: Option<BoundaryName>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub velocities: Vec<f64>,
    pub width: Option<usize>,
    pub region: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default)]
    pub checkpoints: Vec<f64>,
}

fn one() -> usize {
    1
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { seed: 0, realizations: 1, checkpoints: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Svg]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, formats: default_formats() }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn as_f64(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&t| t as f64).collect()
}

fn increasing(name: &str, given: &[f64], default: &[f64]) -> Result<Vec<f64>, CliError> {
    let t = if given.is_empty() { default.to_vec() } else { given.to_vec() };
    if t.is_empty() || t.iter().any(|v| !(*v > 0.0 && v.is_finite())) || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad(format!("{name} must be positive and increasing, got {t:?}")));
    }
    Ok(t)
}

fn integers(name: &str, t: &[f64]) -> Result<Vec<usize>, CliError> {
    if let Some(v) = t.iter().find(|v| v.fract() != 0.0) {
        return Err(bad(format!("{name} entry {v} must be an integer")));
    }
    Ok(t.iter().map(|&v| v as usize).collect())
}

impl SamplingConfig {
    pub fn realizations(&self, min: usize) -> Result<usize, CliError> {
        if self.realizations < min {
            return Err(bad(format!("need at least {min} realizations, got {}", self.realizations)));
        }
        Ok(self.realizations)
    }

    /// Recording times in units of `L`, converted to layers (at least 1).
    pub fn checkpoints_scaled(&self, l: usize, default: &[f64]) -> Result<Vec<usize>, CliError> {
        let c = increasing("checkpoints", &self.checkpoints, default)?;
        let mut t: Vec<usize> = c.iter().map(|f| ((f * l as f64).round() as usize).max(1)).collect();
        t.dedup();
        Ok(t)
    }

    /// Recording times in layers.
    pub fn checkpoints(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        integers("checkpoints", &increasing("checkpoints", &self.checkpoints, &as_f64(default))?)
    }
}

/// Accessors that validate on the way out, so experiments reject bad
/// parameters before any compute.
impl EngineConfig {
    pub fn sizes(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let s = if self.sizes.is_empty() { default.to_vec() } else { self.sizes.clone() };
        if s.is_empty() || s.iter().any(|&l| l < 2) {
            return Err(bad(format!("sizes must be at least 2, got {s:?}")));
        }
        Ok(s)
    }

    pub fn rates(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let p = if self.p.is_empty() { default.to_vec() } else { self.p.clone() };
        if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(bad(format!("probability {v} outside [0, 1]")));
        }
        Ok(p)
    }

    /// `depth`, else `depth_factor · L`, else `default_factor · L`.
    pub fn depth_for(&self, l: usize, default_factor: f64) -> Result<usize, CliError> {
        if self.depth.is_some() && self.depth_factor.is_some() {
            return Err(bad("give depth or depth_factor, not both"));
        }
        let d = match (self.depth, self.depth_factor) {
            (Some(d), _) => d,
            (None, Some(f)) if f > 0.0 && f.is_finite() => (f * l as f64).round() as usize,
            (None, Some(f)) => return Err(bad(format!("depth_factor must be positive, got {f}"))),
            (None, None) => (default_factor * l as f64).round() as usize,
        };
        if d == 0 {
            return Err(bad("depth must be positive"));
        }
        Ok(d)
    }

    /// `depth`, else `depth_factor · L`, else `default` layers.
    pub fn depth_or(&self, l: usize, default: usize) -> Result<usize, CliError> {
        if self.depth.is_none() && self.depth_factor.is_none() {
            return if default > 0 { Ok(default) } else { Err(bad("depth must be positive")) };
        }
        self.depth_for(l, 0.0)
    }

    pub fn q(&self) -> Result<usize, CliError> {
        match self.q.unwrap_or(2) {
            q if q >= 2 => Ok(q),
            q => Err(bad(format!("local dimension must be at least 2, got {q}"))),
        }
    }

    pub fn ensemble(&self, default: EnsembleName) -> Result<GateEnsemble, CliError> {
        let q = self.q()?;
        let e = self.ensemble.unwrap_or(default);
        if e != EnsembleName::Haar && q != 2 {
            return Err(bad(format!("{e:?} gates are qubit gates, but q = {q}")));
        }
        Ok(match e {
            EnsembleName::Haar => GateEnsemble::Haar { q },
            EnsembleName::Clifford => GateEnsemble::Clifford,
            EnsembleName::U1 => GateEnsemble::U1,
            EnsembleName::DualUnitary => GateEnsemble::DualUnitary,
        })
    }

    pub fn boundary(&self, default: Boundary) -> Boundary {
        self.boundary.map_or(default, Boundary::from)
    }

    pub fn times(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        increasing("times", &self.times, default)
    }

    pub fn int_times(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        integers("times", &self.times(&as_f64(default))?)
    }

    pub fn velocities(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = if self.velocities.is_empty() { default.to_vec() } else { self.velocities.clone() };
        if let Some(x) = v.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(bad(format!("velocity {x} outside [-1, 1]")));
        }
        Ok(v)
    }
}
