//! Dyadic IMS partition of unity around the singularity.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{smoothstep, smoothstep_derivative};

/// `sup |φ′| = (π/2)·sup|smoothstep′| = (π/2)(15/8)`.
pub const BUMP_GRADIENT_SUP: f64 = FRAC_PI_2 * 15.0 / 8.0;

/// Radial bump `φ(t)`: 1 on `t ≤ 1`, 0 on `t ≥ 2`, `cos(π/2·smoothstep(t − 1))`
/// in between. Its complement `√(1 − φ²) = sin(π/2·smoothstep(t − 1))` is
/// C² as well.
pub fn bump(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        (FRAC_PI_2 * smoothstep(t - 1.0)).cos()
    }
}

/// `√(1 − φ(t)²)`, evaluated without cancellation.
pub fn bump_complement(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        (FRAC_PI_2 * smoothstep(t - 1.0)).sin()
    }
}

/// `φ′(t)`.
pub fn bump_derivative(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        -(FRAC_PI_2 * smoothstep(t - 1.0)).sin() * FRAC_PI_2 * smoothstep_derivative(t - 1.0)
    }
}

/// Identifies a partition member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum ZoneId {
    Quantum,
    Semiclassical(i64),
}

/// `Φ^q(x) = φ(h^{−α}|x|)` and `Φ^sc_n(x) = φ(h^{−θ_{n−1}}|x|)·√(1 − φ²(h^{−θ_n}|x|))`
/// with `θ_n = nε`, `n ≤ N = α/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub alpha: f64,
    pub epsilon: f64,
    pub n_max: i64,
    pub h: f64,
}

impl PartitionScheme {
    /// Requires `α/ε` to be an integer (to `1e-9`) and `2h^{θ_n} ≤ h^{θ_{n−1}}`,
    /// i.e. `h^ε ≤ 1/2`, for the product form to reduce to two factors.
    pub fn new(alpha: f64, epsilon: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::domain(format!("h = {h} outside (0, 1)")));
        }
        if !(alpha > 0.0 && epsilon > 0.0) {
            return Err(Error::domain(format!(
                "alpha = {alpha} and epsilon = {epsilon} must be positive"
            )));
        }
        let ratio = alpha / epsilon;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Constraint(format!(
                "alpha/epsilon = {ratio} is not an integer"
            )));
        }
        if 2.0 * h.powf(epsilon) > 1.0 {
            return Err(Error::Constraint(format!(
                "h^epsilon = {} exceeds 1/2; zones overlap beyond nearest neighbours",
                h.powf(epsilon)
            )));
        }
        Ok(Self {
            alpha,
            epsilon,
            n_max: n as i64,
            h,
        })
    }

    pub fn theta(&self, n: i64) -> f64 {
        if n == self.n_max {
            self.alpha
        } else {
            n as f64 * self.epsilon
        }
    }

    /// `h^{θ_n}`.
    pub fn scale(&self, n: i64) -> f64 {
        self.h.powf(self.theta(n))
    }

    /// Value of one member at radius `r`.
    pub fn member(&self, id: ZoneId, r: f64) -> f64 {
        match id {
            ZoneId::Quantum => bump(r / self.scale(self.n_max)),
            ZoneId::Semiclassical(n) => {
                bump(r / self.scale(n - 1)) * bump_complement(r / self.scale(n))
            }
        }
    }

    /// Radial derivative of one member at radius `r`.
    pub fn member_derivative(&self, id: ZoneId, r: f64) -> f64 {
        match id {
            ZoneId::Quantum => {
                let a = self.scale(self.n_max);
                bump_derivative(r / a) / a
            }
            ZoneId::Semiclassical(n) => {
                let (outer, inner) = (self.scale(n - 1), self.scale(n));
                let t_out = r / outer;
                let t_in = r / inner;
                let comp = bump_complement(t_in);
                // d/dt √(1 − φ²) = −φφ′/√(1 − φ²) = (π/2)·smoothstep′·cos(…)
                let dcomp = if t_in <= 1.0 || t_in >= 2.0 {
                    0.0
                } else {
                    (FRAC_PI_2 * smoothstep(t_in - 1.0)).cos()
                        * FRAC_PI_2
                        * smoothstep_derivative(t_in - 1.0)
                };
                bump_derivative(t_out) / outer * comp + bump(t_out) * dcomp / inner
            }
        }
    }

    /// Candidate members whose support may contain radius `r`.
    fn candidates(&self, r: f64) -> Vec<ZoneId> {
        let mut ids = vec![ZoneId::Quantum];
        // r = h^L; member n lives on h^{θ_n} < r < 2h^{θ_{n−1}}.
        let level = r.ln() / self.h.ln();
        let centre = (level / self.epsilon).floor() as i64;
        for n in (centre - 2)..=(centre + 3) {
            if n <= self.n_max {
                ids.push(ZoneId::Semiclassical(n));
            }
        }
        ids
    }

    /// All nonzero members at radius `|x| = r`.
    pub fn eval(&self, r: f64) -> Result<Vec<(ZoneId, f64)>> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius {r} must be positive")));
        }
        Ok(self
            .candidates(r)
            .into_iter()
            .map(|id| (id, self.member(id, r)))
            .filter(|(_, v)| *v != 0.0)
            .collect())
    }

    /// Sum of squares of all members at `r`.
    pub fn sum_of_squares(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.iter().map(|(_, v)| v * v).sum())
    }

    /// Smallest `θ` among the members containing `r`; the gradient bound
    /// there is `C h^{−2θ}`.
    fn local_theta(&self, r: f64) -> f64 {
        self.candidates(r)
            .into_iter()
            .filter(|&id| self.member(id, r) != 0.0 || self.member_derivative(id, r) != 0.0)
            .map(|id| match id {
                ZoneId::Quantum => self.alpha,
                ZoneId::Semiclassical(n) => self.theta(n),
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Result of [`gradient_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub samples: usize,
    /// `max Σ_j|∇Φ_j|² h^{2θ}` over the samples.
    pub max_ratio: f64,
    /// `2‖∇φ‖²_∞`.
    pub bound_constant: f64,
    /// Largest `|∇Φ^q|` found.
    pub max_quantum_gradient: f64,
    /// Largest `Σ_j|∇Φ_j|²` at points where a single member is nonzero.
    pub plateau_gradient: f64,
    pub passed: bool,
}

/// Finite-difference check of `Σ_j|∇Φ_j|² ≤ 2‖∇φ‖²_∞ h^{−2θ_n}` on `Ω^sc_n`.
pub fn gradient_bound_check(scheme: &PartitionScheme, radii: &[f64]) -> Result<GradientReport> {
    let bound_constant = 2.0 * BUMP_GRADIENT_SUP * BUMP_GRADIENT_SUP;
    let mut max_ratio = 0.0_f64;
    let mut max_quantum_gradient = 0.0_f64;
    let mut plateau_gradient = 0.0_f64;
    for &r in radii {
        let step = 1e-6 * r;
        let members = scheme.candidates(r);
        let mut total = 0.0;
        for &id in &members {
            let g = (scheme.member(id, r + step) - scheme.member(id, r - step)) / (2.0 * step);
            total += g * g;
            if id == ZoneId::Quantum {
                max_quantum_gradient = max_quantum_gradient.max(g.abs());
            }
        }
        let live = |x: f64| {
            members
                .iter()
                .filter(|&&id| scheme.member(id, x) != 0.0)
                .count()
        };
        let on_plateau = live(r - step) == 1 && live(r + step) == 1;
        if on_plateau {
            plateau_gradient = plateau_gradient.max(total);
        }
        let theta = scheme.local_theta(r);
        if theta.is_finite() {
            max_ratio = max_ratio.max(total * scheme.h.powf(2.0 * theta));
        }
    }
    // Central differences overshoot the true gradient by O(step²).
    let passed = max_ratio <= bound_constant * (1.0 + 1e-6) && plateau_gradient == 0.0;
    Ok(GradientReport {
        samples: radii.len(),
        max_ratio,
        bound_constant,
        max_quantum_gradient,
        plateau_gradient,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::fit_rate;
    use crate::numeric::log_spaced;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bump_plateaus_and_derivative() {
        assert_eq!(bump(0.3), 1.0);
        assert_eq!(bump(1.0), 1.0);
        assert_eq!(bump(2.0), 0.0);
        for i in 1..100 {
            let t = 1.0 + i as f64 / 100.0;
            let fd = (bump(t + 1e-6) - bump(t - 1e-6)) / 2e-6;
            assert!((fd - bump_derivative(t)).abs() < 1e-6);
            assert!(bump_derivative(t).abs() <= BUMP_GRADIENT_SUP + 1e-15);
            let c = bump_complement(t);
            assert!((bump(t).powi(2) + c * c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            PartitionScheme::new(1.0, 0.3, 0.01),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            PartitionScheme::new(1.0, 0.1, 0.5),
            Err(Error::Constraint(_))
        ));
        assert!(PartitionScheme::new(1.0, 0.25, 0.01).is_ok());
    }

    #[test]
    fn plateau_values() {
        let p = PartitionScheme::new(1.0, 0.25, 0.001).unwrap();
        let q = p.eval(0.5 * p.h.powf(1.0)).unwrap();
        assert_eq!(q, vec![(ZoneId::Quantum, 1.0)]);
        // Between 2h^{θ_n} and h^{θ_{n−1}} only zone n is present.
        let n = 2;
        let r = (2.0 * p.scale(n) * p.scale(n - 1)).sqrt();
        assert!(r > 2.0 * p.scale(n) && r < p.scale(n - 1));
        assert_eq!(p.eval(r).unwrap(), vec![(ZoneId::Semiclassical(n), 1.0)]);
        assert!(p.eval(0.0).is_err());
    }

    #[test]
    fn partition_identity_and_local_finiteness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let n = rng.random_range(2..8) as f64;
            let epsilon = rng.random_range(0.05..0.3);
            let alpha = n * epsilon;
            let h = 0.5f64.powf(1.0 / epsilon) * rng.random_range(1e-3..1.0);
            let p = PartitionScheme::new(alpha, epsilon, h).unwrap();
            let hi = 10.0 * h.powf(-2.0 * epsilon);
            for r in log_spaced(1e-3 * p.scale(p.n_max), hi, 10_000) {
                let members = p.eval(r).unwrap();
                assert!(members.len() <= 2, "r = {r}: {members:?}");
                let sum: f64 = members.iter().map(|(_, v)| v * v).sum();
                assert!((sum - 1.0).abs() < 1e-12, "r = {r}: defect {}", sum - 1.0);
            }
        }
    }

    #[test]
    fn gradient_bound_holds() {
        let p = PartitionScheme::new(0.8, 0.2, 1e-3).unwrap();
        let radii = log_spaced(1e-4, 1e3, 20_000);
        let rep = gradient_bound_check(&p, &radii).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.max_ratio > 0.3 * rep.bound_constant);
        assert_eq!(rep.plateau_gradient, 0.0);
    }

    #[test]
    fn quantum_gradient_scales_like_h_to_minus_alpha() {
        let alpha = 0.6;
        let pts: Vec<(f64, f64)> = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
            .iter()
            .map(|&h| {
                let p = PartitionScheme::new(alpha, 0.2, h).unwrap();
                let a = h.powf(alpha);
                let radii: Vec<f64> = (0..2001)
                    .map(|i| a * (0.9 + 1.2 * i as f64 / 2000.0))
                    .collect();
                (
                    h,
                    gradient_bound_check(&p, &radii)
                        .unwrap()
                        .max_quantum_gradient,
                )
            })
            .collect();
        let slope = fit_rate(&pts).unwrap().slope().unwrap();
        assert!((slope + alpha).abs() < 0.05, "slope {slope}");
    }
}
