//! Estimators and fits shared by the experiments. Everything here is a
//! deterministic function of its input.

mod collapse;
mod crossing;
mod fit;
mod kernel;

pub use collapse::{collapse_grid_search, collapse_quality, CollapseFit};
pub use crossing::{crossing_finder, Crossing};
pub use fit::{linear_least_squares, powerlaw_fit, LinearFit, PowerLawFit};
pub use kernel::{gaussian_kernel_fit, KernelFit};

use crate::error::{Error, Result};

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    pub stderr: f64,
    pub std: f64,
    pub n: usize,
}

impl SampleStats {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, std: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr: std / (n as f64).sqrt(), std, n }
    }
}

/// Metadata carried with a series.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesMeta {
    pub l: Option<usize>,
    pub p: Option<f64>,
    /// Inclusive range of realization seeds.
    pub seeds: Option<(u64, u64)>,
}

/// `y(x)` with standard errors and sample counts.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Series {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub yerr: Vec<f64>,
    pub n_samples: Vec<usize>,
    pub meta: SeriesMeta,
}

impl Series {
    pub fn new(x: Vec<f64>, y: Vec<f64>, yerr: Vec<f64>, n_samples: Vec<usize>, meta: SeriesMeta) -> Result<Self> {
        let n = x.len();
        if y.len() != n || yerr.len() != n || n_samples.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len().max(yerr.len()).max(n_samples.len()) });
        }
        if let Some(e) = yerr.iter().find(|e| !(**e >= 0.0)) {
            return Err(Error::Fit(format!("standard error {e} is negative or NaN")));
        }
        Ok(Self { x, y, yerr, n_samples, meta })
    }

    /// A series without error bars.
    pub fn exact(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        Self::new(x, y, vec![0.0; n], vec![1; n], SeriesMeta::default())
    }

    pub fn with_size(mut self, l: usize) -> Self {
        self.meta.l = Some(l);
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Linear interpolation of `y` at `x`, `None` outside the sampled range.
    /// Assumes `x` ascending.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let i = self.x.partition_point(|&v| v < x);
        if i < self.x.len() && self.x[i] == x {
            return Some(self.y[i]);
        }
        if i == 0 || i == self.x.len() {
            return None;
        }
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let w = (x - x0) / (x1 - x0);
        Some(self.y[i - 1] + w * (self.y[i] - self.y[i - 1]))
    }
}
