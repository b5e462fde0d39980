//! Compactly supported mollifier `g` and convolution with `g_τ²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Dimension};
use crate::quadrature::{gauss_legendre, integrate_adaptive};

/// Unnormalised profile `exp(−1/(1 − t²))` on `t < 1`.
fn raw_profile(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn raw_profile_derivative(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        let w = 1.0 - t * t;
        -2.0 * t / (w * w) * raw_profile(t)
    }
}

/// `g_τ(x) = τ^{−d/2} g(x/τ)` with `g = c·exp(−1/(1 − |x|²))` and `‖g‖₂ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierKernel {
    pub dimension: Dimension,
    pub tau: f64,
    /// Normalisation constant `c`.
    pub norm_constant: f64,
    /// `‖∇g‖₂²` of the unit-scale kernel.
    pub gradient_norm_sq: f64,
    /// `∫|y|² g(y)² dy` of the unit-scale kernel.
    pub second_moment: f64,
}

impl MollifierKernel {
    pub fn new(dimension: Dimension, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::domain(format!(
                "kernel scale tau = {tau} must be positive"
            )));
        }
        let df = dimension.as_f64();
        let area = dimension.sphere_area();
        let radial = |f: &dyn Fn(f64) -> f64| {
            let res = integrate_adaptive(|t| f(t) * t.powf(df - 1.0), 0.0, 1.0, 0.0, 1e-14, 2000);
            area * res.value
        };
        let mass = radial(&|t| raw_profile(t).powi(2));
        let c2 = 1.0 / mass;
        let gradient_norm_sq = c2 * radial(&|t| raw_profile_derivative(t).powi(2));
        let second_moment = c2 * radial(&|t| t * t * raw_profile(t).powi(2));
        Ok(Self {
            dimension,
            tau,
            norm_constant: c2.sqrt(),
            gradient_norm_sq,
            second_moment,
        })
    }

    /// Same profile at another scale.
    pub fn rescaled(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::domain(format!(
                "kernel scale tau = {tau} must be positive"
            )));
        }
        Ok(Self { tau, ..*self })
    }

    /// Unit-scale `g(t)` at radius `t`.
    pub fn profile(&self, t: f64) -> f64 {
        self.norm_constant * raw_profile(t)
    }

    /// `g_τ(ρ)`.
    pub fn value(&self, rho: f64) -> f64 {
        self.tau.powf(-self.dimension.as_f64() / 2.0) * self.profile(rho / self.tau)
    }

    /// `‖∇g_τ‖₂² = τ^{−2}‖∇g‖₂²`.
    pub fn scaled_gradient_norm_sq(&self) -> f64 {
        self.gradient_norm_sq / (self.tau * self.tau)
    }
}

/// A function on `ℝ^d` to be mollified.
pub trait Field: Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// Radius of the ball around the origin on which the field is defined;
    /// `None` means everywhere.
    fn domain_radius(&self) -> Option<f64> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for F {
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Radial field `f(|x|)`, optionally restricted to a ball.
pub struct RadialField<F> {
    pub profile: F,
    pub radius: Option<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> Field for RadialField<F> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.profile)(x.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    fn domain_radius(&self) -> Option<f64> {
        self.radius
    }
}

/// Tensor quadrature for `∫_{B_τ} F(y) g_τ(y)² dy`: composite Gauss–Legendre
/// in the radius, Gauss–Legendre in `cos ϑ` and trapezoid in the azimuth.
#[derive(Debug, Clone)]
pub struct ConvolutionRule {
    /// Unit-ball nodes `y/τ`.
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
    dimension: Dimension,
}

/// Radial panels and points per panel of the default rule.
const RADIAL_PANELS: usize = 8;
const RADIAL_ORDER: usize = 12;
const POLAR_ORDER: usize = 16;
const AZIMUTH_POINTS: usize = 32;

impl ConvolutionRule {
    pub fn new(kernel: &MollifierKernel) -> Self {
        let d = kernel.dimension;
        let df = d.as_f64();
        let (rx, rw) = gauss_legendre(RADIAL_ORDER);
        let mut radial = Vec::new();
        // Geometric-ish panels so the flat edge near t = 1 is resolved.
        let edges: Vec<f64> = (0..=RADIAL_PANELS)
            .map(|i| i as f64 / RADIAL_PANELS as f64)
            .collect();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (x, wt) in rx.iter().zip(&rw) {
                let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let weight = 0.5 * (b - a) * wt * t.powf(df - 1.0) * kernel.profile(t).powi(2);
                if weight > 0.0 {
                    radial.push((t, weight));
                }
            }
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match d {
            Dimension::Two => {
                for &(t, w) in &radial {
                    for k in 0..AZIMUTH_POINTS {
                        let phi = 2.0 * PI * (k as f64 + 0.5) / AZIMUTH_POINTS as f64;
                        nodes.push([t * phi.cos(), t * phi.sin(), 0.0]);
                        weights.push(w * 2.0 * PI / AZIMUTH_POINTS as f64);
                    }
                }
            }
            Dimension::Three => {
                let (ux, uw) = gauss_legendre(POLAR_ORDER);
                for &(t, w) in &radial {
                    for (u, wu) in ux.iter().zip(&uw) {
                        let sin = (1.0 - u * u).sqrt();
                        for k in 0..AZIMUTH_POINTS {
                            let phi = 2.0 * PI * (k as f64 + 0.5) / AZIMUTH_POINTS as f64;
                            nodes.push([t * sin * phi.cos(), t * sin * phi.sin(), t * u]);
                            weights.push(w * wu * 2.0 * PI / AZIMUTH_POINTS as f64);
                        }
                    }
                }
            }
        }
        Self {
            nodes,
            weights,
            dimension: d,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(f ⋆ g_τ²)(x)`, normalised by the discrete kernel mass so constants
    /// are reproduced exactly.
    pub fn convolve(&self, f: &dyn Field, tau: f64, x: &[f64]) -> Result<f64> {
        let d = self.dimension.as_u32() as usize;
        if x.len() != d {
            return Err(Error::domain(format!(
                "point has {} coordinates, expected {d}",
                x.len()
            )));
        }
        if let Some(radius) = f.domain_radius() {
            let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm + tau > radius {
                return Err(Error::domain(format!(
                    "ball of radius {tau:e} around |x| = {norm:e} leaves the field domain of radius {radius:e}"
                )));
            }
        }
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        let mut y = vec![0.0; d];
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            for k in 0..d {
                y[k] = x[k] - tau * node[k];
            }
            num.add(w * f.value(&y));
            den.add(*w);
        }
        Ok(num.total() / den.total())
    }
}

/// `(f ⋆ g_τ²)(x)` with the default rule.
pub fn convolve(f: &dyn Field, kernel: &MollifierKernel, x: &[f64]) -> Result<f64> {
    ConvolutionRule::new(kernel).convolve(f, kernel.tau, x)
}
