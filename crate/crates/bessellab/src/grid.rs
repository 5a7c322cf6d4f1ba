//! Evaluation grids for sweeps and estimate verification.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One grid axis, log- or linearly spaced, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridAxis {
    pub fn log(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min <= 0.0 || max <= min || count < 2 {
            return Err(Error::input(format!(
                "log axis requires 0 < min < max and count >= 2, got [{min}, {max}] x {count}"
            )));
        }
        Ok(GridAxis { min, max, count, log: true })
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min || count < 2 {
            return Err(Error::input(format!(
                "linear axis requires min < max and count >= 2, got [{min}, {max}] x {count}"
            )));
        }
        Ok(GridAxis { min, max, count, log: false })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                if self.log {
                    self.min * (self.max / self.min).powf(s)
                } else {
                    self.min + s * (self.max - self.min)
                }
            })
            .collect()
    }

    /// Same span, twice the resolution.
    pub fn refined(&self) -> GridAxis {
        GridAxis {
            count: self.count * 2,
            ..*self
        }
    }
}

/// A (t, x, y) product grid for kernel estimate sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t: GridAxis,
    pub x: GridAxis,
    pub y: GridAxis,
}

impl GridSpec {
    pub fn describe(&self) -> String {
        fn axis(a: &GridAxis) -> String {
            format!(
                "[{:.4e}, {:.4e}] x {} ({})",
                a.min,
                a.max,
                a.count,
                if a.log { "log" } else { "linear" }
            )
        }
        format!("t {} | x {} | y {}", axis(&self.t), axis(&self.x), axis(&self.y))
    }

    pub fn refined(&self) -> GridSpec {
        GridSpec {
            t: self.t.refined(),
            x: self.x.refined(),
            y: self.y.refined(),
        }
    }

    /// All (t, x, y) triples, t-major.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let ts = self.t.points();
        let xs = self.x.points();
        let ys = self.y.points();
        let mut out = Vec::with_capacity(ts.len() * xs.len() * ys.len());
        for &t in &ts {
            for &x in &xs {
                for &y in &ys {
                    out.push((t, x, y));
                }
            }
        }
        out
    }
}
