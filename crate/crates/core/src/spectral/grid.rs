//! Graded radial grids `r_j = r_min + (R_max − r_min)(j/N)^γ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;

/// Radial grid with Dirichlet ends at `r_0 = r_min` and `r_N = R_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Number of intervals; the operator has `N − 1` unknowns.
    pub points: usize,
    pub gamma: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, points: usize, gamma: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::domain(format!(
                "grid needs 0 < r_min < R_max, got [{r_min}, {r_max}]"
            )));
        }
        if points < 3 {
            return Err(Error::domain(format!(
                "grid needs at least 3 intervals, got {points}"
            )));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!(
                "grading exponent must be >= 1, got {gamma}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            points,
            gamma,
        })
    }

    /// All `N + 1` nodes including both Dirichlet ends.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.points as f64;
        let span = self.r_max - self.r_min;
        (0..=self.points)
            .map(|j| {
                if j == self.points {
                    self.r_max
                } else {
                    self.r_min + span * (j as f64 / n).powf(self.gamma)
                }
            })
            .collect()
    }

    pub fn unknowns(&self) -> usize {
        self.points - 1
    }

    /// Same radii scaled by `factor` (used to check exact scaling laws).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            r_min: self.r_min * factor,
            r_max: self.r_max * factor,
            ..*self
        }
    }
}

/// How the outer radius of an automatic grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OuterRadius {
    /// `margin ×` the support radius of `[V]_-`, or of `{V ≤ −threshold}`
    /// when `[V]_-` does not have compact support.
    Auto {
        margin: f64,
        threshold: f64,
        cap: f64,
    },
    /// A multiple of the quantum length `(h²/C₀)^{1/(2−s)}`.
    QuantumLengths {
        multiple: f64,
    },
    Fixed {
        radius: f64,
    },
}

/// Recipe for building a [`RadialGrid`] for a given potential and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridPolicy {
    pub points: usize,
    pub gamma: f64,
    /// `r_min` in units of the quantum length.
    pub r_min_factor: f64,
    pub outer: OuterRadius,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            points: 4000,
            gamma: 2.0,
            r_min_factor: 1e-5,
            outer: OuterRadius::Auto {
                margin: 2.0,
                threshold: 1e-6,
                cap: 1e4,
            },
        }
    }
}

/// Quantum length `(h²/C₀)^{1/(2−s)}`: the radius at which kinetic and
/// core potential energy balance.
pub fn quantum_length(h: f64, c0: f64, s: f64) -> f64 {
    (h * h / c0).powf(1.0 / (2.0 - s))
}

impl GridPolicy {
    /// Grid for one potential.
    pub fn grid_for(&self, potential: &PotentialSpec, h: f64) -> Result<RadialGrid> {
        self.grid_for_all(&[potential], h)
    }

    /// Common grid for several potentials (the union of their scales), so
    /// that pair members can be differenced channel by channel.
    pub fn grid_for_all(&self, potentials: &[&PotentialSpec], h: f64) -> Result<RadialGrid> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!("h must be positive, got {h}")));
        }
        let lq = potentials
            .iter()
            .map(|v| quantum_length(h, v.core_strength().max(f64::MIN_POSITIVE), v.s))
            .fold(f64::INFINITY, f64::min);
        let r_min = self.r_min_factor * lq;
        let r_max = match self.outer {
            OuterRadius::Auto {
                margin,
                threshold,
                cap,
            } => {
                let support = potentials
                    .iter()
                    .map(|v| v.effective_radius(threshold, cap))
                    .fold(0.0, f64::max);
                (margin * support).min(cap)
            }
            OuterRadius::QuantumLengths { multiple } => multiple * lq,
            OuterRadius::Fixed { radius } => radius,
        };
        if !(r_max > r_min) {
            return Err(Error::Numeric(format!(
                "potential has no attractive region resolvable on [{r_min:e}, {r_max:e}]"
            )));
        }
        RadialGrid::new(r_min, r_max, self.points, self.gamma)
    }
}
