//! Semiclassical constants and classical phase-space integrals.
//!
//! The classical approximation to `tr[−h²Δ + V]_-` is
//! `L^cl_d h^{-d} ∫[V]_-^{1+d/2} dx`. For radial `V` the integral reduces to
//! `|S^{d−1}| ∫ r^{d−1}[V(r)]_-^{1+d/2} dr`, evaluated after substitutions
//! that flatten the power-law behaviour at the origin and at infinity.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::numeric::{negative_part, pow_difference, Dimension};
use crate::potentials::{PairSpec, PotentialSpec};
use crate::quadrature::{integrate_adaptive, CompositeRule, QuadResult};

/// Volume of the unit ball and the phase-space constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalConstants {
    pub dimension: Dimension,
    /// `ω_d = π^{d/2}/Γ(1 + d/2)`.
    pub omega_d: f64,
    /// `ω_d/(2π)^d`.
    pub l_pot: f64,
    /// `L_pot·d/(d + 2)`.
    pub l_kin: f64,
    /// `L_pot − L_kin = 2^{-d}π^{-d/2}/Γ(2 + d/2)`.
    pub l_cl: f64,
}

impl SemiclassicalConstants {
    pub fn new(dimension: Dimension) -> Self {
        let d = dimension.as_f64();
        let pi = std::f64::consts::PI;
        let omega_d = pi.powf(d / 2.0) / gamma(1.0 + d / 2.0);
        let l_pot = omega_d / (2.0 * pi).powf(d);
        let l_kin = l_pot * d / (d + 2.0);
        Self {
            dimension,
            omega_d,
            l_pot,
            l_kin,
            l_cl: l_pot - l_kin,
        }
    }
}

/// Constants for `d ∈ {2, 3}`.
pub fn constants(d: u32) -> Result<SemiclassicalConstants> {
    Ok(SemiclassicalConstants::new(Dimension::try_from(d)?))
}

/// Classical constant for Riesz means of order `β`:
/// `Γ(β + 1)/((4π)^{d/2}Γ(β + 1 + d/2))`. Equals `L^cl_d` at `β = 1`.
pub fn riesz_classical_constant(dimension: Dimension, beta: f64) -> f64 {
    let d = dimension.as_f64();
    gamma(beta + 1.0) / ((4.0 * std::f64::consts::PI).powf(d / 2.0) * gamma(beta + 1.0 + d / 2.0))
}

/// Quadrature rule for the radial integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum QuadratureSpec {
    /// Globally adaptive Gauss–Kronrod (7/15).
    Adaptive {
        rel_tol: f64,
        abs_tol: f64,
        max_intervals: usize,
    },
    /// Fixed composite Gauss–Legendre on each mapped piece.
    Composite { panels: usize, order: usize },
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::Adaptive {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 2000,
        }
    }
}

impl QuadratureSpec {
    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> QuadResult {
        match *self {
            QuadratureSpec::Adaptive {
                rel_tol,
                abs_tol,
                max_intervals,
            } => integrate_adaptive(f, a, b, abs_tol, rel_tol, max_intervals),
            QuadratureSpec::Composite { panels, order } => {
                let rule = CompositeRule::new(panels, order);
                let value = rule.integrate(&f, a, b);
                // Error estimated against the rule with twice the panels.
                let fine = CompositeRule::new(2 * panels, order).integrate(&f, a, b);
                QuadResult {
                    value: fine,
                    error: (fine - value).abs(),
                    intervals: 2 * panels,
                    converged: true,
                }
            }
        }
    }

    /// Same rule with doubled resolution.
    pub fn refined(&self) -> Self {
        match *self {
            QuadratureSpec::Adaptive {
                rel_tol,
                abs_tol,
                max_intervals,
            } => QuadratureSpec::Adaptive {
                rel_tol: rel_tol / 4.0,
                abs_tol: abs_tol / 4.0,
                max_intervals: 2 * max_intervals,
            },
            QuadratureSpec::Composite { panels, order } => QuadratureSpec::Composite {
                panels: 2 * panels,
                order,
            },
        }
    }
}

/// Value of a radial integral `∫₀^∞ f(r) dr` together with its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Shape information for [`radial_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialShape {
    /// `f(r) ~ r^{p−1}` near the origin; `p > 0` for integrability.
    pub inner_power: f64,
    /// Outer edge of the support, if compact.
    pub support: Option<f64>,
    /// `f(r) ~ r^{−q−1}` at infinity when the support is not compact.
    pub outer_decay: f64,
    /// Extra breakpoints inside the support.
    pub breakpoints: [Option<f64>; 2],
}

/// `∫₀^∞ f(r) dr` split at `min(1, support)`: `t = r^p` on the inner piece,
/// plain rule up to the support edge, `r = r_b t^{-1/q}` beyond when the
/// support is not compact.
pub fn radial_integral(
    f: impl Fn(f64) -> f64,
    shape: RadialShape,
    quad: &QuadratureSpec,
) -> RadialIntegral {
    let p = shape.inner_power;
    let edge = match shape.support {
        Some(s) if s <= 0.0 => {
            return RadialIntegral {
                value: 0.0,
                error: 0.0,
                converged: true,
            }
        }
        Some(s) => s,
        None => f64::INFINITY,
    };
    let r_b = edge.min(1.0);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    let mut add = |q: QuadResult| {
        value += q.value;
        error += q.error;
        converged &= q.converged;
    };

    // r = t^{1/p} on (0, r_b]: dr = (1/p)t^{1/p − 1}dt.
    let inner = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let r = t.powf(1.0 / p);
        f(r) * r / (p * t)
    };
    add(quad.integrate(inner, 0.0, r_b.powf(p)));

    if edge > r_b {
        let finite_end = if edge.is_finite() { edge } else { 1.0 };
        let mut cuts = vec![r_b];
        for b in shape.breakpoints.iter().flatten() {
            if *b > r_b && *b < finite_end {
                cuts.push(*b);
            }
        }
        cuts.push(finite_end);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                add(quad.integrate(&f, w[0], w[1]));
            }
        }
        if !edge.is_finite() {
            let q = shape.outer_decay;
            let start = finite_end.max(r_b);
            // r = start·t^{-1/q} on t ∈ (0, 1]: dr = (start/q)t^{-1/q − 1}dt.
            let outer = |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let r = start * t.powf(-1.0 / q);
                f(r) * r / (q * t)
            };
            add(quad.integrate(outer, 0.0, 1.0));
        }
    }
    RadialIntegral {
        value,
        error,
        converged,
    }
}

/// `L^cl_d h^{-d} ∫[V]_-^{1+d/2} dx`, or a divergence marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalResult {
    pub value: Option<f64>,
    pub error_estimate: f64,
    /// Set exactly when `s(1 + d/2) ≥ d`.
    pub divergent: bool,
}

impl ClassicalResult {
    pub fn value(&self) -> Result<f64> {
        self.value.ok_or_else(|| {
            Error::Divergent(
                "the absolute classical term is infinite for s(1 + d/2) >= d; use the relative form"
                    .into(),
            )
        })
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    Ok(())
}

fn tail_decay(potential: &PotentialSpec) -> f64 {
    let d = potential.dimension.as_f64();
    potential.tail_exponent * (1.0 + d / 2.0) - d
}

fn shape_breaks(potential: &PotentialSpec) -> [Option<f64>; 2] {
    match potential.truncation_radius {
        Some(rt) => [Some(rt), Some(2.0 * rt)],
        None => [None, None],
    }
}

/// `∫[V]_-^{1+d/2} dx` for an integrable potential.
pub fn phase_space_volume(
    potential: &PotentialSpec,
    quad: &QuadratureSpec,
) -> Result<RadialIntegral> {
    let d = potential.dimension;
    let df = d.as_f64();
    let exponent = 1.0 + df / 2.0;
    let p = df - potential.s * exponent;
    if p <= 0.0 {
        return Err(Error::Divergent(format!(
            "s(1 + d/2) = {} >= d = {df}",
            potential.s * exponent
        )));
    }
    let support = potential.negative_support_radius();
    let q = tail_decay(potential);
    if support.is_none() && q <= 0.0 {
        return Err(Error::Divergent(format!(
            "tail exponent S = {} does not exceed 2d/(d + 2)",
            potential.tail_exponent
        )));
    }
    let area = d.sphere_area();
    let f = |r: f64| r.powf(df - 1.0) * negative_part(potential.value(r)).powf(exponent);
    let shape = RadialShape {
        inner_power: p,
        support,
        outer_decay: q,
        breakpoints: shape_breaks(potential),
    };
    let res = radial_integral(f, shape, quad);
    Ok(RadialIntegral {
        value: area * res.value,
        error: area * res.error,
        converged: res.converged,
    })
}

/// Classical term `L^cl_d h^{-d} ∫[V]_-^{1+d/2} dx`.
///
/// Returns a result with `divergent = true` and no value when
/// `s(1 + d/2) ≥ d`.
pub fn classical_trace(
    potential: &PotentialSpec,
    h: f64,
    quad: &QuadratureSpec,
) -> Result<ClassicalResult> {
    check_h(h)?;
    let d = potential.dimension.as_f64();
    if potential.s * (1.0 + d / 2.0) >= d {
        return Ok(ClassicalResult {
            value: None,
            error_estimate: f64::INFINITY,
            divergent: true,
        });
    }
    let c = SemiclassicalConstants::new(potential.dimension);
    let res = phase_space_volume(potential, quad)?;
    if !res.converged {
        return Err(Error::Numeric(format!(
            "classical quadrature did not converge (estimate {:e}, error {:e})",
            res.value, res.error
        )));
    }
    let scale = c.l_cl * h.powf(-d);
    Ok(ClassicalResult {
        value: Some(scale * res.value),
        error_estimate: scale * res.error,
        divergent: false,
    })
}

/// `∫([V₁]_-^{1+d/2} − [V₂]_-^{1+d/2}) dx` integrated as one integrand.
pub fn relative_phase_space_volume(
    pair: &PairSpec,
    quad: &QuadratureSpec,
) -> Result<RadialIntegral> {
    let dim = pair.dimension();
    let d = dim.as_f64();
    let s = pair.s();
    let p = d - s * d / 2.0 - pair.r;
    if p <= 0.0 {
        return Err(Error::Admissibility(format!(
            "relative integrand not integrable: s·d/2 + r = {} >= d = {d}",
            s * d / 2.0 + pair.r
        )));
    }
    if pair.is_identical() {
        return Ok(RadialIntegral {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    }
    let support = match (
        pair.first.negative_support_radius(),
        pair.second.negative_support_radius(),
    ) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let q = tail_decay(&pair.first).min(tail_decay(&pair.second));
    if support.is_none() && q <= 0.0 {
        return Err(Error::Divergent(
            "tail exponent does not exceed 2d/(d + 2)".into(),
        ));
    }
    let exponent = 1.0 + d / 2.0;
    let f = |r: f64| {
        let a = negative_part(pair.first.value(r));
        let b = negative_part(pair.second.value(r));
        r.powf(d - 1.0) * pow_difference(a, b, exponent)
    };
    let mut breaks = shape_breaks(&pair.first);
    if breaks[0].is_none() {
        breaks = shape_breaks(&pair.second);
    }
    let shape = RadialShape {
        inner_power: p,
        support,
        outer_decay: q,
        breakpoints: breaks,
    };
    let res = radial_integral(f, shape, quad);
    let area = dim.sphere_area();
    Ok(RadialIntegral {
        value: area * res.value,
        error: area * res.error,
        converged: res.converged,
    })
}

/// Relative classical term `L^cl_d h^{-d} ∫W₁ dx` with
/// `W₁ = [V₁]_-^{1+d/2} − [V₂]_-^{1+d/2}`, finite when `s·d/2 + r < d`
/// even if both absolute integrals diverge.
pub fn relative_classical_trace(
    pair: &PairSpec,
    h: f64,
    quad: &QuadratureSpec,
) -> Result<ClassicalResult> {
    check_h(h)?;
    let d = pair.dimension().as_f64();
    let res = relative_phase_space_volume(pair, quad)?;
    if !res.converged {
        return Err(Error::Numeric(format!(
            "relative quadrature did not converge (estimate {:e}, error {:e})",
            res.value, res.error
        )));
    }
    let c = SemiclassicalConstants::new(pair.dimension());
    let scale = c.l_cl * h.powf(-d);
    Ok(ClassicalResult {
        value: Some(scale * res.value),
        error_estimate: scale * res.error,
        divergent: false,
    })
}

/// Which momentum integral over `{p : h²|p|² + V(u) < 0}` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSpaceKind {
    /// `(2π)^{-d}∫h²|p|² dp = L^kin h^{-d}[V]_-^{1+d/2}`.
    Kinetic,
    /// `(2π)^{-d}∫V(u) dp = −L^pot h^{-d}[V]_-^{1+d/2}`.
    Potential,
    /// `(2π)^{-d}∫(h²|p|² + V(u)) dp = −L^cl h^{-d}[V]_-^{1+d/2}`.
    Classical,
}

/// Closed-form momentum integral at the point `|u|`.
pub fn phase_space_integral(
    potential: &PotentialSpec,
    u: f64,
    h: f64,
    kind: PhaseSpaceKind,
) -> Result<f64> {
    check_h(h)?;
    let c = SemiclassicalConstants::new(potential.dimension);
    let d = potential.dimension.as_f64();
    let density = h.powf(-d) * negative_part(potential.eval(u)?).powf(1.0 + d / 2.0);
    Ok(match kind {
        PhaseSpaceKind::Kinetic => c.l_kin * density,
        PhaseSpaceKind::Potential => -c.l_pot * density,
        PhaseSpaceKind::Classical => -c.l_cl * density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use std::f64::consts::PI;

    #[test]
    fn constants_closed_forms() {
        let c3 = constants(3).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(c3.l_cl, 1.0 / (15.0 * PI * PI)) < 1e-14);
        assert!(rel(c3.omega_d, 4.0 * PI / 3.0) < 1e-14);
        let c2 = constants(2).unwrap();
        assert!(rel(c2.l_cl, 1.0 / (8.0 * PI)) < 1e-14);
        for c in [c2, c3] {
            assert!(rel(c.l_pot - c.l_kin, c.l_cl) < 1e-14);
            let d = c.dimension.as_f64();
            let closed = 2f64.powf(-d) * PI.powf(-d / 2.0) / gamma(2.0 + d / 2.0);
            assert!(rel(c.l_cl, closed) < 1e-14);
            assert!(rel(riesz_classical_constant(c.dimension, 1.0), c.l_cl) < 1e-14);
        }
        assert!(matches!(constants(4), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn hydrogen_classical_term() {
        let v = PotentialSpec::power(Dimension::Three, 1.0, 1.0, 0.1).unwrap();
        let c = classical_trace(&v, 0.1, &QuadratureSpec::default()).unwrap();
        let exact = 1000.0 / (12.0 * 0.1f64.sqrt());
        assert!((c.value().unwrap() - exact).abs() < 1e-8 * exact, "{c:?}");
    }

    #[test]
    fn divergence_flag() {
        let v = PotentialSpec::power(Dimension::Three, 1.0, 1.3, 0.1).unwrap();
        let c = classical_trace(&v, 0.1, &QuadratureSpec::default()).unwrap();
        assert!(c.divergent);
        assert!(matches!(c.value(), Err(Error::Divergent(_))));
        // Exactly at the threshold s = s_c.
        let v = PotentialSpec::power(Dimension::Three, 1.0, 1.2, 0.1).unwrap();
        assert!(
            classical_trace(&v, 0.1, &QuadratureSpec::default())
                .unwrap()
                .divergent
        );
        let v = PotentialSpec::power(Dimension::Two, 1.0, 1.0, 0.1).unwrap();
        assert!(
            classical_trace(&v, 0.1, &QuadratureSpec::default())
                .unwrap()
                .divergent
        );
    }

    #[test]
    fn nonnegative_potential_gives_zero() {
        let v = PotentialSpec::custom(
            Dimension::Three,
            "bump",
            1.0,
            2.0,
            0.0,
            std::sync::Arc::new(|r: f64| (-r).exp()),
            std::sync::Arc::new(|r: f64| -(-r).exp()),
        )
        .unwrap();
        let c = classical_trace(&v, 0.3, &QuadratureSpec::default()).unwrap();
        assert_eq!(c.value, Some(0.0));
    }

    #[test]
    fn non_compact_tail_is_mapped() {
        // V = −r^{-1}·(1 + r)^{-1}: [V]^{5/2} ~ r^{-5} at infinity; compare with
        // a direct truncated integral plus analytic tail.
        let v = PotentialSpec::custom(
            Dimension::Three,
            "screened",
            1.0,
            2.0,
            0.0,
            std::sync::Arc::new(|r: f64| -1.0 / (r * (1.0 + r))),
            std::sync::Arc::new(|r: f64| (1.0 + 2.0 * r) / (r * (1.0 + r)).powi(2)),
        )
        .unwrap();
        let got = phase_space_volume(&v, &QuadratureSpec::default()).unwrap();
        // ∫₀^∞ r² (r(1+r))^{-5/2} dr = B(1/2, 2) = 4/3.
        let exact = 4.0 * PI * 4.0 / 3.0;
        assert!((got.value - exact).abs() < 1e-9 * exact, "{got:?}");
    }

    #[test]
    fn kinetic_density_matches_momentum_shell_quadrature() {
        let v = PotentialSpec::custom(
            Dimension::Three,
            "minus one",
            1.0,
            2.0,
            0.0,
            std::sync::Arc::new(|_| -1.0),
            std::sync::Arc::new(|_| 0.0),
        )
        .unwrap();
        let kin = phase_space_integral(&v, 0.7, 1.0, PhaseSpaceKind::Kinetic).unwrap();
        // (2π)^{-3} ∫_{|p|<1} |p|² dp = (2π)^{-3}·4π∫₀¹ p⁴ dp.
        let (x, w) = gauss_legendre(8);
        let shell: f64 = x
            .iter()
            .zip(&w)
            .map(|(x, w)| w * 0.5 * ((x + 1.0) / 2.0).powi(4))
            .sum();
        let direct = 4.0 * PI * shell / (2.0 * PI).powi(3);
        assert!((kin - direct).abs() < 1e-8);
        let pot = phase_space_integral(&v, 0.7, 1.0, PhaseSpaceKind::Potential).unwrap();
        let cl = phase_space_integral(&v, 0.7, 1.0, PhaseSpaceKind::Classical).unwrap();
        assert!((kin + pot - cl).abs() < 1e-16);
    }
}
