use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid spacing `δ`, stored as the integer `1/δ` so that 0 and 1 are always
/// on-grid and points can be keyed by integer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpacing {
    steps_per_unit: u32,
}

impl GridSpacing {
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidDelta(delta));
        }
        let inv = 1.0 / delta;
        let steps = inv.round();
        if steps < 1.0 || steps > u32::MAX as f64 || (inv - steps).abs() > 1e-9 * steps {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(Self {
            steps_per_unit: steps as u32,
        })
    }

    pub fn from_steps(steps_per_unit: u32) -> Result<Self> {
        if steps_per_unit == 0 {
            return Err(Error::InvalidDelta(f64::INFINITY));
        }
        Ok(Self { steps_per_unit })
    }

    pub fn delta(self) -> f64 {
        1.0 / self.steps_per_unit as f64
    }

    pub fn steps_per_unit(self) -> u32 {
        self.steps_per_unit
    }

    pub fn value(self, index: i64) -> f64 {
        index as f64 / self.steps_per_unit as f64
    }
}

impl Default for GridSpacing {
    /// `δ = 0.25`.
    fn default() -> Self {
        Self { steps_per_unit: 4 }
    }
}

/// A weight vector on the `δ`-grid, identified by its integer indices
/// (`weight_k = coords[k] · δ`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint {
    coords: Vec<i64>,
}

impl GridPoint {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    /// Snaps real weights to the grid; fails when a weight is not a multiple of `δ`.
    pub fn from_weights(weights: &[f64], spacing: GridSpacing) -> Result<Self> {
        let steps = spacing.steps_per_unit() as f64;
        weights
            .iter()
            .map(|&w| {
                let idx = (w * steps).round();
                if (w * steps - idx).abs() > 1e-9 {
                    Err(Error::Config(format!(
                        "weight {w} is not on the grid with spacing {}",
                        spacing.delta()
                    )))
                } else {
                    Ok(idx as i64)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Unit vector `e_k` of dimension `dim`.
    pub fn unit(dim: usize, k: usize, spacing: GridSpacing) -> Self {
        let mut coords = vec![0; dim];
        coords[k] = spacing.steps_per_unit() as i64;
        Self { coords }
    }

    /// The all-ones vector of dimension `dim`.
    pub fn ones(dim: usize, spacing: GridSpacing) -> Self {
        Self {
            coords: vec![spacing.steps_per_unit() as i64; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn weights(&self, spacing: GridSpacing) -> Vec<f64> {
        self.coords.iter().map(|&c| spacing.value(c)).collect()
    }

    /// Copy with coordinate `dim` moved by `steps` grid lines.
    pub fn shifted(&self, dim: usize, steps: i64) -> Self {
        let mut coords = self.coords.clone();
        coords[dim] += steps;
        Self { coords }
    }

    /// Formats the point as real weights, e.g. `(1.25, 0)`.
    pub fn display(&self, spacing: GridSpacing) -> String {
        let parts: Vec<String> = self.weights(spacing).iter().map(|w| w.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}
