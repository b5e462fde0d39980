//! Convergence of `f ⋆ g_τ²` to `f` as `τ → 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_rate, FitOutcome};
use crate::numeric::{log_spaced, Dimension};
use crate::theory::{beta_optimal, ZoneKind};

use super::kernel::{ConvolutionRule, Field, MollifierKernel, RadialField};

/// Minimum span `τ_max/τ_min` of a ladder.
pub const MIN_LADDER_SPAN: f64 = 100.0;

/// Sup-error of `f ⋆ g_τ² − f` over a point set for each `τ`, and its fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionSlopeReport {
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    pub fit: FitOutcome,
}

impl ConvolutionSlopeReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.slope()
    }
}

/// Geometric τ ladder from `tau_max` down to `tau_min`.
pub fn tau_ladder(tau_min: f64, tau_max: f64, count: usize) -> Vec<f64> {
    let mut taus = log_spaced(tau_min, tau_max, count);
    taus.reverse();
    taus
}

fn sup_error(rule: &ConvolutionRule, f: &dyn Field, tau: f64, region: &[Vec<f64>]) -> Result<f64> {
    let mut sup = 0.0f64;
    for x in region {
        let err = (rule.convolve(f, tau, x)? - f.value(x)).abs();
        if !err.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite convolution error at tau = {tau:e}"
            )));
        }
        sup = sup.max(err);
    }
    Ok(sup)
}

/// Fits `log sup_region |f ⋆ g_τ² − f|` against `log τ`.
///
/// # Errors
///
/// [`Error::Fit`] for an empty region or a ladder spanning fewer than two
/// decades; convolution domain errors propagate.
pub fn convolution_error_slope(
    f: &dyn Field,
    dimension: Dimension,
    taus: &[f64],
    region: &[Vec<f64>],
) -> Result<ConvolutionSlopeReport> {
    if region.is_empty() {
        return Err(Error::Fit("empty evaluation region".into()));
    }
    let (lo, hi) = taus.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| {
        (lo.min(t), hi.max(t))
    });
    if taus.is_empty() || !(hi / lo >= MIN_LADDER_SPAN * (1.0 - 1e-12)) {
        return Err(Error::Fit(format!(
            "tau ladder spans {:.3} decades, at least 2 required",
            (hi / lo).log10()
        )));
    }
    let rule = ConvolutionRule::new(&MollifierKernel::new(dimension, 1.0)?);
    let errors = taus
        .par_iter()
        .map(|&tau| sup_error(&rule, f, tau, region))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = taus.iter().copied().zip(errors.iter().copied()).collect();
    let fit = fit_rate(&points)?;
    Ok(ConvolutionSlopeReport {
        taus: taus.to_vec(),
        errors,
        fit,
    })
}

/// Points `(t, 0, …)` for `t` evenly spaced in `[0, radius]`.
pub fn ray_region(dimension: Dimension, radius: f64, count: usize) -> Vec<Vec<f64>> {
    let d = dimension.as_u32() as usize;
    (0..count)
        .map(|i| {
            let mut x = vec![0.0; d];
            x[0] = if count > 1 {
                radius * i as f64 / (count - 1) as f64
            } else {
                0.0
            };
            x
        })
        .collect()
}

/// `exp(−|x|²)`, a smooth test function.
pub fn gaussian_field() -> RadialField<fn(f64) -> f64> {
    RadialField {
        profile: |r| (-r * r).exp(),
        radius: None,
    }
}

/// `[|x| − 1]_- = (1 − |x|)_+`, the negative part of a tent profile.
pub fn tent_negative_part_field() -> RadialField<fn(f64) -> f64> {
    RadialField {
        profile: |r| (1.0 - r).max(0.0),
        radius: None,
    }
}

/// Measured decay of the convolution error of `[V]_- = |x|^{−s}` over one
/// semiclassical shell, against the exponents of the C¹ and C² estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeScalingReport {
    pub s: f64,
    pub theta: f64,
    pub beta: f64,
    pub zone: ZoneKind,
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    pub fit: FitOutcome,
    /// `β − θ(1 + s)`, the exponent of the gradient bound.
    pub c1_exponent: f64,
    /// `2β − θ(2 + s)`, the exponent of the Hessian bound.
    pub c2_exponent: f64,
}

/// Sup-error of `|x|^{−s} ⋆ g_τ² − |x|^{−s}` on the shell
/// `h^θ ≤ |x| ≤ 2h^θ` with `τ = h^{β}` and `β` chosen per zone.
pub fn cone_scaling(
    dimension: Dimension,
    s: f64,
    theta: f64,
    hs: &[f64],
    radial_points: usize,
) -> Result<ConeScalingReport> {
    if !(theta > 0.0) {
        return Err(Error::domain(format!(
            "theta = {theta} must be positive for an inner shell"
        )));
    }
    let zone = if dimension == Dimension::Three && theta >= 2.0 / (8.0 - s) {
        ZoneKind::DeepInner
    } else {
        ZoneKind::Inner
    };
    let beta = beta_optimal(dimension, theta, zone, s)?;
    let field = RadialField {
        profile: move |r: f64| r.powf(-s),
        radius: None,
    };
    let rule = ConvolutionRule::new(&MollifierKernel::new(dimension, 1.0)?);
    let mut errors = Vec::with_capacity(hs.len());
    for &h in hs {
        let inner = h.powf(theta);
        let tau = h.powf(beta);
        if tau >= inner {
            return Err(Error::domain(format!(
                "tau = {tau:e} reaches the singularity from |x| = {inner:e}"
            )));
        }
        let region: Vec<Vec<f64>> = ray_region(dimension, inner, radial_points)
            .into_iter()
            .map(|mut x| {
                x[0] += inner;
                x
            })
            .collect();
        errors.push(sup_error(&rule, &field, tau, &region)?);
    }
    let points: Vec<(f64, f64)> = hs.iter().copied().zip(errors.iter().copied()).collect();
    let fit = fit_rate(&points)?;
    Ok(ConeScalingReport {
        s,
        theta,
        beta,
        zone,
        hs: hs.to_vec(),
        errors,
        fit,
        c1_exponent: beta - theta * (1.0 + s),
        c2_exponent: 2.0 * beta - theta * (2.0 + s),
    })
}
