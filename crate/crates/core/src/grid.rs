use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform detuning grid `[min, max]` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for DetuningGrid {
    fn default() -> Self {
        DetuningGrid {
            min: -5.0,
            max: 5.0,
            points: 2001,
        }
    }
}

impl DetuningGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let grid = DetuningGrid { min, max, points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid("grid", "bounds must be finite"));
        }
        if self.min >= self.max {
            return Err(Error::invalid("grid", "grid_min must be < grid_max"));
        }
        if self.points < 2 {
            return Err(Error::invalid("grid", "grid_points must be >= 2"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    /// Sample points. Built around the midpoint so a grid symmetric about zero
    /// is exactly mirror-symmetric in floating point.
    pub fn samples(&self) -> Vec<f64> {
        let centre = 0.5 * (self.min + self.max);
        let half = 0.5 * (self.max - self.min);
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i + 1 == self.points {
                    self.max
                } else {
                    centre + half * ((2 * i) as f64 - last) / last
                }
            })
            .collect()
    }

    /// Samples with each band edge moved onto its nearest grid point when it
    /// lies within half a step, so exact zeros show up in exported series.
    pub fn samples_snapped(&self, edges: &[f64]) -> Vec<f64> {
        let mut samples = self.samples();
        snap_edges(&mut samples, edges);
        samples
    }
}

/// Moves each edge onto the nearest sample closer than half the local spacing.
/// Ordering is preserved; an edge that would collide with a sample already
/// snapped to another edge is skipped.
pub fn snap_edges(samples: &mut [f64], edges: &[f64]) {
    let n = samples.len();
    if n < 2 {
        return;
    }
    let mut taken = vec![false; n];
    for &edge in edges {
        let idx = match samples.binary_search_by(|x| x.total_cmp(&edge)) {
            Ok(i) => {
                taken[i] = true;
                continue;
            }
            Err(i) => i,
        };
        let candidates = [idx.checked_sub(1), (idx < n).then_some(idx)];
        let nearest = candidates.into_iter().flatten().min_by(|&a, &b| {
            (samples[a] - edge)
                .abs()
                .total_cmp(&(samples[b] - edge).abs())
        });
        let Some(i) = nearest else { continue };
        if taken[i] {
            continue;
        }
        let left = if i > 0 {
            samples[i] - samples[i - 1]
        } else {
            f64::INFINITY
        };
        let right = if i + 1 < n {
            samples[i + 1] - samples[i]
        } else {
            f64::INFINITY
        };
        let half = 0.5 * left.min(right);
        if (samples[i] - edge).abs() <= half {
            samples[i] = edge;
            taken[i] = true;
        }
    }
}

pub(crate) fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid", "values must be finite"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid", "must be strictly increasing"));
    }
    Ok(())
}
