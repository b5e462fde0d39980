//! Log-log least-squares fits of convergence rates.
//!
//! Given pairs `(h, residual)` the fit regresses `log|residual|` on `log h`.
//! Residuals below [`ZERO_THRESHOLD`] are treated as numerically zero and
//! excluded; if every residual is zero the outcome is reported as exact
//! agreement instead of a slope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residuals with absolute value below this are excluded from the fit.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// Minimum number of usable points for a fit.
pub const MIN_POINTS: usize = 4;

/// Ordinary least-squares fit of `log|residual| = intercept + slope·log h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    /// `(log h, log|residual|)` pairs that entered the regression.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    /// Natural-log intercept; the prefactor is `exp(intercept)`.
    pub intercept: f64,
    /// Standard error of the slope (zero when the fit is exact or has
    /// exactly two degrees of freedom removed).
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// Abscissae `h` whose residuals were dropped as numerically zero.
    pub excluded: Vec<f64>,
    /// Theoretical slope to compare against, if one was supplied.
    pub predicted_slope: Option<f64>,
}

impl ConvergenceFit {
    /// Prefactor `c` in `|residual| ≈ c·h^slope`.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }

    pub fn with_prediction(mut self, predicted: f64) -> Self {
        self.predicted_slope = Some(predicted);
        self
    }
}

/// Result of [`fit_rate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(ConvergenceFit),
    /// All residuals were numerically zero.
    ExactAgreement {
        points: usize,
    },
}

impl FitOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            FitOutcome::Fitted(fit) => Some(fit.slope),
            FitOutcome::ExactAgreement { .. } => None,
        }
    }

    pub fn fitted(&self) -> Option<&ConvergenceFit> {
        match self {
            FitOutcome::Fitted(fit) => Some(fit),
            FitOutcome::ExactAgreement { .. } => None,
        }
    }
}

/// Fits the decay rate of `|residual|` against `h`.
///
/// # Errors
///
/// [`Error::Fit`] if an abscissa is not positive and finite, if abscissae
/// repeat, if a residual is not finite, or if fewer than [`MIN_POINTS`]
/// nonzero residuals remain while some are nonzero.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<FitOutcome> {
    let mut used = Vec::with_capacity(points.len());
    let mut excluded = Vec::new();
    for &(h, y) in points {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Fit(format!(
                "abscissa must be positive and finite, got {h}"
            )));
        }
        if !y.is_finite() {
            return Err(Error::Fit(format!("non-finite residual {y} at h = {h}")));
        }
        if y.abs() < ZERO_THRESHOLD {
            excluded.push(h);
        } else {
            used.push((h.ln(), y.abs().ln()));
        }
    }
    if used.is_empty() && !points.is_empty() {
        return Ok(FitOutcome::ExactAgreement {
            points: points.len(),
        });
    }
    if used.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} usable points, at least {MIN_POINTS} required",
            used.len()
        )));
    }
    let mut xs: Vec<f64> = used.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("repeated abscissa".into()));
    }

    let n = used.len() as f64;
    let mean_x = used.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = used
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = (sse / (n - 2.0) / sxx).sqrt();
    if !slope.is_finite() {
        return Err(Error::Fit("degenerate regression".into()));
    }
    Ok(FitOutcome::Fitted(ConvergenceFit {
        points: used,
        slope,
        intercept,
        slope_stderr,
        r_squared,
        excluded,
        predicted_slope: None,
    }))
}
