//! Power-law bound on the relative phase-space density and a Lieb–Thirring
//! type estimate for potentials too singular for the classical term.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta as beta_fn;

use crate::error::{Error, Result};
use crate::numeric::{negative_part, Dimension};
use crate::potentials::PotentialSpec;
use crate::semiclassics::{radial_integral, riesz_classical_constant, QuadratureSpec, RadialShape};

/// Pointwise bound `W_β(x) ≤ C_β|x|^{exponent}` on `|x| ≤ 1`, with `C_β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WBetaBound {
    pub exponent: f64,
    pub value: f64,
    /// `s(d/2 + β − 1) + r < d`.
    pub integrable: bool,
}

/// Evaluates `radius^{−(s(d/2+β−1)+r)}` and the integrability flag.
pub fn wbeta_bound(d: Dimension, beta: f64, s: f64, r: f64, radius: f64) -> Result<WBetaBound> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!("beta = {beta} outside [0, 1]")));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::domain(format!("radius = {radius} outside (0, 1]")));
    }
    let df = d.as_f64();
    let power = s * (df / 2.0 + beta - 1.0) + r;
    Ok(WBetaBound {
        exponent: -power,
        value: radius.powf(-power),
        integrable: power < df,
    })
}

/// Lieb–Thirring constants `L_{d,β}` given as ratios to the semiclassical
/// value `L^cl_{d,β}`.
///
/// The three-dimensional default `6.869` is the Cwikel–Lieb–Rozenblum ratio
/// at `β = 0`; ratios are nonincreasing in `β`, so it bounds every `β ≥ 0`.
/// No default is provided in two dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LtConstants {
    pub ratio_d2: Option<f64>,
    pub ratio_d3: Option<f64>,
}

impl Default for LtConstants {
    fn default() -> Self {
        Self {
            ratio_d2: None,
            ratio_d3: Some(6.869),
        }
    }
}

impl LtConstants {
    /// `L_{d,β}` for `−Δ + V`.
    pub fn constant(&self, d: Dimension, beta: f64) -> Result<f64> {
        let ratio = match d {
            Dimension::Two => self.ratio_d2,
            Dimension::Three => self.ratio_d3,
        }
        .ok_or_else(|| {
            Error::Config(format!("no Lieb-Thirring constant configured for d = {d}"))
        })?;
        if !(ratio >= 1.0) {
            return Err(Error::Config(format!(
                "Lieb-Thirring ratio {ratio} must be at least 1"
            )));
        }
        Ok(ratio * riesz_classical_constant(d, beta))
    }
}

/// Coefficients of the two integrals in [`ltsing_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtsingCoefficients {
    /// `β = ε/2`.
    pub beta: f64,
    pub lt_constant: f64,
    /// `B(1 − β, 1 + β + d/2)`.
    pub beta_classical: f64,
    /// `B(β, 1 + β + d/2)`.
    pub beta_quantum: f64,
    /// `A = 2·B(1 − β, 1 + β + d/2)·L_{d,β}`.
    pub a: f64,
    /// `B = 2^{2β}·B(β, 1 + β + d/2)·L_{d,β}`.
    pub b: f64,
}

pub fn ltsing_coefficients(
    d: Dimension,
    epsilon: f64,
    constants: &LtConstants,
) -> Result<LtsingCoefficients> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let beta = epsilon / 2.0;
    let half_d = d.as_f64() / 2.0;
    let lt_constant = constants.constant(d, beta)?;
    let beta_classical = beta_fn(1.0 - beta, 1.0 + beta + half_d);
    let beta_quantum = beta_fn(beta, 1.0 + beta + half_d);
    Ok(LtsingCoefficients {
        beta,
        lt_constant,
        beta_classical,
        beta_quantum,
        a: 2.0 * beta_classical * lt_constant,
        b: 2f64.powf(2.0 * beta) * beta_quantum * lt_constant,
    })
}

/// Value of the singular Lieb–Thirring bound and its two pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtsingBound {
    pub value: f64,
    /// `A ∫_{V ≥ −E/2} [V]_-^{1+d/2}`.
    pub classical_part: f64,
    /// `B E^{1−ε} ∫_{V < −E/2} [V]_-^{ε+d/2}`.
    pub quantum_part: f64,
    /// Outermost radius with `[V]_- > E/2`.
    pub level_radius: Option<f64>,
    pub coefficients: LtsingCoefficients,
}

/// Largest radius where `[V]_- > level`, by a log-radius scan and bisection.
fn level_radius(potential: &PotentialSpec, level: f64) -> Option<f64> {
    let above = |r: f64| negative_part(potential.value(r)) > level;
    let radii = crate::numeric::log_spaced(1e-8, 1e8, 1601);
    let last = radii.iter().rposition(|&r| above(r))?;
    if last + 1 == radii.len() {
        return Some(radii[last]);
    }
    let (mut lo, mut hi) = (radii[last], radii[last + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// Bound on `tr[−Δ + V]_-` for `−Δ + V ≥ −E`:
/// `A ∫_{V ≥ −E/2}[V]_-^{1+d/2} + B E^{1−ε} ∫_{V < −E/2}[V]_-^{ε+d/2}`.
///
/// Needs `s(ε + d/2) < d` for the second integral to converge.
pub fn ltsing_bound(
    potential: &PotentialSpec,
    epsilon: f64,
    energy: f64,
    constants: &LtConstants,
    quad: &QuadratureSpec,
) -> Result<LtsingBound> {
    let d = potential.dimension;
    let df = d.as_f64();
    let coefficients = ltsing_coefficients(d, epsilon, constants)?;
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!(
            "energy E = {energy} must be positive"
        )));
    }
    let quantum_power = epsilon + df / 2.0;
    let p_quantum = df - potential.s * quantum_power;
    if p_quantum <= 0.0 {
        return Err(Error::Divergent(format!(
            "s(epsilon + d/2) = {} >= d = {df}",
            potential.s * quantum_power
        )));
    }
    let support = potential.negative_support_radius();
    let classical_power = 1.0 + df / 2.0;
    let q = potential.tail_exponent * classical_power - df;
    if support.is_none() && q <= 0.0 {
        return Err(Error::Divergent(format!(
            "tail exponent S = {} is too small for the classical integral",
            potential.tail_exponent
        )));
    }
    let half = energy / 2.0;
    let r_e = level_radius(potential, half);
    let area = d.sphere_area();

    let quantum = match r_e {
        None => 0.0,
        Some(edge) => {
            let f = |r: f64| {
                let v = negative_part(potential.value(r));
                if v > half {
                    r.powf(df - 1.0) * v.powf(quantum_power)
                } else {
                    0.0
                }
            };
            let shape = RadialShape {
                inner_power: p_quantum,
                support: Some(edge),
                outer_decay: 1.0,
                breakpoints: [None, None],
            };
            let res = radial_integral(f, shape, quad);
            if !res.converged {
                return Err(Error::Numeric(format!(
                    "quantum-region integral did not converge ({:e})",
                    res.error
                )));
            }
            res.value
        }
    };

    let f = |r: f64| {
        let v = negative_part(potential.value(r));
        if v <= half {
            r.powf(df - 1.0) * v.powf(classical_power)
        } else {
            0.0
        }
    };
    let shape = RadialShape {
        inner_power: df,
        support,
        outer_decay: q.max(1e-3),
        breakpoints: [r_e, potential.truncation_radius],
    };
    let res = radial_integral(f, shape, quad);
    if !res.converged {
        return Err(Error::Numeric(format!(
            "classical-region integral did not converge ({:e})",
            res.error
        )));
    }

    let classical_part = coefficients.a * area * res.value;
    let quantum_part = coefficients.b * energy.powf(1.0 - epsilon) * area * quantum;
    Ok(LtsingBound {
        value: classical_part + quantum_part,
        classical_part,
        quantum_part,
        level_radius: r_e,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;
    use crate::spectral::{ground_state_energy, trace_neg, GridPolicy, TraceOptions};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::sync::Arc;

    const D3: Dimension = Dimension::Three;

    /// `B(a, b)` by the substitution `t = u^{1/a}`, which removes the
    /// endpoint singularity at zero.
    fn beta_by_quadrature(a: f64, b: f64) -> f64 {
        let f = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0) / a;
        let res = integrate_adaptive(f, 0.0, 1.0, 0.0, 1e-12, 4000);
        assert!(res.converged);
        res.value
    }

    #[test]
    fn wbeta_examples() {
        let w = wbeta_bound(D3, 1.0, 1.0, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(w.exponent, -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value, 4.0, epsilon = 1e-14);
        assert!(w.integrable);
        assert!(
            wbeta_bound(D3, 1.0, 1.4, 0.9 - 1e-12, 1.0)
                .unwrap()
                .integrable
        );
        assert!(
            !wbeta_bound(D3, 1.0, 1.4, 0.9 + 1e-12, 1.0)
                .unwrap()
                .integrable
        );
        let w = wbeta_bound(Dimension::Two, 0.0, 1.7, 0.3, 0.2).unwrap();
        assert_abs_diff_eq!(w.exponent, -0.3, epsilon = 1e-15);
        assert!(wbeta_bound(D3, 1.5, 1.0, 0.1, 0.5).is_err());
        assert!(wbeta_bound(D3, 0.5, 1.0, 0.1, 2.0).is_err());
    }

    #[test]
    fn wbeta_flag_matches_integrability_conditions() {
        for i in 0..50 {
            let s = 1.0 + 0.019 * i as f64;
            for j in 0..40 {
                let r = 0.05 * j as f64 + 0.013;
                let d3 = wbeta_bound(D3, 1.0, s, r, 1.0).unwrap().integrable;
                assert_eq!(d3, r < 1.5 * (2.0 - s), "s = {s}, r = {r}");
                let d2 = wbeta_bound(Dimension::Two, 1.0, s, r, 1.0)
                    .unwrap()
                    .integrable;
                assert_eq!(d2, r < 2.0 - s, "s = {s}, r = {r}");
            }
        }
    }

    #[test]
    fn beta_coefficients_match_quadrature() {
        let c = ltsing_coefficients(D3, 0.5, &LtConstants::default()).unwrap();
        assert_relative_eq!(
            c.beta_classical,
            beta_by_quadrature(0.75, 2.75),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            c.beta_quantum,
            beta_by_quadrature(0.25, 2.75),
            max_relative = 1e-10
        );
        assert_relative_eq!(
            c.a,
            2.0 * c.beta_classical * c.lt_constant,
            max_relative = 1e-15
        );
    }

    #[test]
    fn missing_two_dimensional_constant_is_a_config_error() {
        assert!(matches!(
            ltsing_coefficients(Dimension::Two, 0.5, &LtConstants::default()),
            Err(Error::Config(_))
        ));
        let custom = LtConstants {
            ratio_d2: Some(2.0),
            ..Default::default()
        };
        assert!(ltsing_coefficients(Dimension::Two, 0.5, &custom).is_ok());
    }

    #[test]
    fn nonnegative_potential_gives_zero() {
        let v = PotentialSpec::custom(
            D3,
            "bump",
            1.0,
            2.0,
            0.0,
            Arc::new(|r: f64| (-r).exp()),
            Arc::new(|r: f64| -(-r).exp()),
        )
        .unwrap();
        let b = ltsing_bound(
            &v,
            0.5,
            1.0,
            &LtConstants::default(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn too_singular_is_divergent() {
        let v = PotentialSpec::power(D3, 1.0, 1.9, 1.0).unwrap();
        let res = ltsing_bound(
            &v,
            0.9,
            1.0,
            &LtConstants::default(),
            &QuadratureSpec::default(),
        );
        assert!(matches!(res, Err(Error::Divergent(_))));
    }

    #[test]
    fn bound_dominates_hydrogen_like_trace() {
        let v = PotentialSpec::power(D3, 5.0, 1.3, 0.5).unwrap();
        let policy = GridPolicy::default();
        let grid = policy.grid_for(&v, 1.0).unwrap();
        let e_min = ground_state_energy(&v, 1.0, &grid).unwrap();
        let trace = trace_neg(&v, 1.0, &grid, &TraceOptions::default())
            .unwrap()
            .riesz_mean;
        let bound = ltsing_bound(
            &v,
            0.5,
            1.05 * e_min.abs(),
            &LtConstants::default(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(trace > 0.0);
        assert!(trace <= bound.value, "trace {trace} bound {}", bound.value);
    }
}
