//! Radial potentials `V(|x|)` and pairs `(V₁, V₂)` with a singular core.
//!
//! The structural conditions used throughout are
//!
//! * `|V| ≤ C` for `|x| ≥ 1` and `sup_{|x|≥L} [V]_- → 0` as `L → ∞`,
//! * `|∇V| ≤ C|x|^{-s-1}` for `|x| ≤ 1` and `≤ C|x|^{-S-1}` for `|x| ≥ 1`,
//! * `|V₁ − V₂| ≤ C|x|^{-r}` for `|x| ≤ 1`.
//!
//! They are checked by sampling on log-spaced radii, never symbolically.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_spaced, negative_part, smoothstep, smoothstep_derivative, Dimension};

/// Radial profile supplied as a closure, `r ↦ V(r)`.
pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default number of log-spaced radii used by sampling checks.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Sampling window for the structural checks.
pub const SAMPLE_RANGE: (f64, f64) = (1e-8, 1e4);

/// Safety factor applied to sampled envelope constants.
pub const ENVELOPE_SAFETY: f64 = 1.1;

/// Additive perturbation `−a·C₀·r^{-p}` used to build pairs with a
/// prescribed difference exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub a: f64,
    pub p: f64,
}

#[derive(Clone)]
struct CustomProfile {
    name: String,
    value: RadialFn,
    derivative: RadialFn,
}

/// A radial potential with core exponent `s` and tail exponent `S`.
///
/// Built-in families are `V = (−C₀r^{-s} − a·C₀r^{-p} + μ)·χ(r)` where the
/// perturbation term and the cutoff `χ` are optional. `χ` equals 1 on
/// `[0, R_t]`, vanishes beyond `2R_t` and is a quintic smoothstep in between.
/// Custom profiles replace the bracket by an arbitrary closure (still shifted
/// by `μ` and multiplied by `χ`).
#[derive(Clone, Serialize)]
pub struct PotentialSpec {
    pub dimension: Dimension,
    pub c0: f64,
    pub s: f64,
    pub tail_exponent: f64,
    pub mu: f64,
    pub truncation_radius: Option<f64>,
    pub perturbation: Option<Perturbation>,
    #[serde(rename = "custom", serialize_with = "serialize_custom")]
    custom: Option<CustomProfile>,
}

fn serialize_custom<S: serde::Serializer>(
    custom: &Option<CustomProfile>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match custom {
        Some(c) => ser.serialize_some(&c.name),
        None => ser.serialize_none(),
    }
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("dimension", &self.dimension)
            .field("c0", &self.c0)
            .field("s", &self.s)
            .field("tail_exponent", &self.tail_exponent)
            .field("mu", &self.mu)
            .field("truncation_radius", &self.truncation_radius)
            .field("perturbation", &self.perturbation)
            .field("custom", &self.custom.as_ref().map(|c| c.name.as_str()))
            .finish()
    }
}

impl PotentialSpec {
    /// `V = −C₀r^{-s} + μ`.
    ///
    /// The tail exponent defaults to 2 when `μ > 0` (then `[V]_-` has
    /// compact support and any `S` holds) and to `s` otherwise.
    pub fn power(dimension: Dimension, c0: f64, s: f64, mu: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::domain(format!(
                "core strength must be positive, got {c0}"
            )));
        }
        if !(1.0..2.0).contains(&s) {
            return Err(Error::domain(format!(
                "core exponent must satisfy 1 <= s < 2, got {s}"
            )));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!(
                "chemical potential must be >= 0, got {mu}"
            )));
        }
        Ok(Self {
            dimension,
            c0,
            s,
            tail_exponent: if mu > 0.0 { 2.0 } else { s },
            mu,
            truncation_radius: None,
            perturbation: None,
            custom: None,
        })
    }

    /// Arbitrary profile `V = (f(r) + μ)·χ(r)` with declared exponents.
    pub fn custom(
        dimension: Dimension,
        name: impl Into<String>,
        s: f64,
        tail_exponent: f64,
        mu: f64,
        value: RadialFn,
        derivative: RadialFn,
    ) -> Result<Self> {
        let mut spec = Self::power(dimension, 1.0, s, mu)?.with_tail_exponent(tail_exponent)?;
        spec.custom = Some(CustomProfile {
            name: name.into(),
            value,
            derivative,
        });
        Ok(spec)
    }

    pub fn with_tail_exponent(mut self, tail_exponent: f64) -> Result<Self> {
        if !(tail_exponent > 0.0) {
            return Err(Error::domain(format!(
                "tail exponent must be positive, got {tail_exponent}"
            )));
        }
        self.tail_exponent = tail_exponent;
        Ok(self)
    }

    /// Multiplies `V` by a smooth cutoff equal to 1 on `[0, R_t]` and 0 beyond `2R_t`.
    pub fn with_truncation(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!(
                "truncation radius must be positive, got {radius}"
            )));
        }
        self.truncation_radius = Some(radius);
        Ok(self)
    }

    /// Adds `−a·C₀·r^{-p}`; requires `0 ≤ p < s`.
    pub fn with_perturbation(mut self, a: f64, p: f64) -> Result<Self> {
        if self.custom.is_some() {
            return Err(Error::domain(
                "perturbations apply to built-in families only",
            ));
        }
        if !(0.0..self.s).contains(&p) || !a.is_finite() {
            return Err(Error::domain(format!(
                "perturbation needs finite a and 0 <= p < s, got a = {a}, p = {p}"
            )));
        }
        self.perturbation = Some(Perturbation { a, p });
        Ok(self)
    }

    /// Short family label used in reports.
    pub fn family(&self) -> &str {
        match (&self.custom, self.truncation_radius, self.perturbation) {
            (Some(c), _, _) => &c.name,
            (None, None, None) => "power",
            (None, Some(_), None) => "truncated",
            (None, None, Some(_)) => "perturbed",
            (None, Some(_), Some(_)) => "perturbed-truncated",
        }
    }

    fn bracket(&self, r: f64) -> (f64, f64) {
        if let Some(c) = &self.custom {
            return ((c.value)(r) + self.mu, (c.derivative)(r));
        }
        let core = self.c0 * r.powf(-self.s);
        let mut v = -core + self.mu;
        let mut dv = self.s * core / r;
        if let Some(Perturbation { a, p }) = self.perturbation {
            let extra = a * self.c0 * r.powf(-p);
            v -= extra;
            dv += p * extra / r;
        }
        (v, dv)
    }

    fn cutoff(&self, r: f64) -> (f64, f64) {
        match self.truncation_radius {
            None => (1.0, 0.0),
            Some(rt) => {
                let t = (r - rt) / rt;
                (1.0 - smoothstep(t), -smoothstep_derivative(t) / rt)
            }
        }
    }

    /// `V(r)` without argument checks; callers guarantee `r > 0`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let (v, _) = self.bracket(r);
        let (chi, _) = self.cutoff(r);
        if chi == 0.0 {
            0.0
        } else {
            v * chi
        }
    }

    /// `V′(r)` without argument checks.
    pub fn derivative(&self, r: f64) -> f64 {
        let (v, dv) = self.bracket(r);
        let (chi, dchi) = self.cutoff(r);
        if chi == 0.0 && dchi == 0.0 {
            0.0
        } else {
            dv * chi + v * dchi
        }
    }

    /// `V(r)` for `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!(
                "potential evaluated at non-positive radius {r}"
            )));
        }
        Ok(self.value(r))
    }

    /// `V′(r)` for `r > 0`.
    pub fn eval_derivative(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!(
                "potential evaluated at non-positive radius {r}"
            )));
        }
        Ok(self.derivative(r))
    }

    #[inline]
    pub fn negative_part(&self, r: f64) -> f64 {
        negative_part(self.value(r))
    }

    /// `C₀` for built-in families; for custom profiles, `sup r^s [V]_-` on
    /// `(0, 1]` as estimated by sampling.
    pub fn core_strength(&self) -> f64 {
        if self.custom.is_none() {
            return self.c0;
        }
        log_spaced(1e-8, 1.0, 400)
            .into_iter()
            .map(|r| self.negative_part(r) * r.powf(self.s))
            .fold(0.0, f64::max)
    }

    /// Outer edge of `supp [V]_-`, or `None` if `V < 0` persists up to `1e8`.
    pub fn negative_support_radius(&self) -> Option<f64> {
        let radii = log_spaced(1e-8, 1e8, 1601);
        let last = radii.iter().rposition(|&r| self.value(r) < 0.0);
        match last {
            None => Some(0.0),
            Some(i) if i + 1 == radii.len() => None,
            Some(i) => {
                let (mut lo, mut hi) = (radii[i], radii[i + 1]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.value(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(hi)
            }
        }
    }

    /// Radius beyond which `V > −threshold`, capped at `cap`.
    pub fn effective_radius(&self, threshold: f64, cap: f64) -> f64 {
        if let Some(r) = self.negative_support_radius() {
            return r.min(cap);
        }
        let radii = log_spaced(1e-8, cap, 1601);
        radii
            .iter()
            .rposition(|&r| self.value(r) <= -threshold)
            .map(|i| radii[(i + 1).min(radii.len() - 1)])
            .unwrap_or(cap)
    }

    /// Envelope `[V]_- ≤ C′Ṽ` with `Ṽ = r^{-s}` on `r ≤ 1`, `r^{-S}` on
    /// `r ≥ 1`, sampled on `sample_count` log-spaced radii.
    pub fn envelope(&self, sample_count: usize) -> Result<EnvelopeParams> {
        if sample_count < 2 {
            return Err(Error::domain("envelope needs at least 2 samples"));
        }
        let mut worst = 0.0_f64;
        let mut worst_radius = SAMPLE_RANGE.0;
        for r in log_spaced(SAMPLE_RANGE.0, SAMPLE_RANGE.1, sample_count) {
            let v = self.value(r);
            if !v.is_finite() {
                return Err(Error::Validation {
                    radius: r,
                    reason: format!("V(r) = {v}"),
                });
            }
            let ratio = negative_part(v) / self.envelope_profile(r);
            if !ratio.is_finite() {
                return Err(Error::Validation {
                    radius: r,
                    reason: format!("envelope ratio {ratio} is not finite"),
                });
            }
            if ratio > worst {
                worst = ratio;
                worst_radius = r;
            }
        }
        Ok(EnvelopeParams {
            constant: ENVELOPE_SAFETY * worst,
            sampled_max: worst,
            worst_radius,
            s: self.s,
            tail_exponent: self.tail_exponent,
        })
    }

    /// `Ṽ(r)`.
    pub fn envelope_profile(&self, r: f64) -> f64 {
        if r <= 1.0 {
            r.powf(-self.s)
        } else {
            r.powf(-self.tail_exponent)
        }
    }
}

/// Envelope constant `C′` with `[V]_- ≤ C′Ṽ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeParams {
    /// `ENVELOPE_SAFETY × sampled_max`.
    pub constant: f64,
    pub sampled_max: f64,
    pub worst_radius: f64,
    pub s: f64,
    pub tail_exponent: f64,
}

/// A pair `(V₁, V₂)` in the same dimension with difference exponent `r`.
#[derive(Debug, Clone, Serialize)]
pub struct PairSpec {
    pub first: PotentialSpec,
    pub second: PotentialSpec,
    /// Difference exponent `r`.
    pub r: f64,
    /// Sampled `sup_{|x|≤1} |V₁ − V₂|·|x|^r`.
    pub c_diff: f64,
}

impl PairSpec {
    pub fn new(first: PotentialSpec, second: PotentialSpec, r: f64) -> Result<Self> {
        if first.dimension != second.dimension {
            return Err(Error::domain("pair members must share the dimension"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain(format!(
                "difference exponent must be >= 0, got {r}"
            )));
        }
        let c_diff = difference_constant(&first, &second, r, DEFAULT_SAMPLES);
        Ok(Self {
            first,
            second,
            r,
            c_diff,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.first.dimension
    }

    /// Core exponent of the pair: the larger of the two.
    pub fn s(&self) -> f64 {
        self.first.s.max(self.second.s)
    }

    /// Tail exponent of the pair: the smaller of the two.
    pub fn tail_exponent(&self) -> f64 {
        self.first.tail_exponent.min(self.second.tail_exponent)
    }

    pub fn swapped(&self) -> Self {
        Self {
            first: self.second.clone(),
            second: self.first.clone(),
            r: self.r,
            c_diff: self.c_diff,
        }
    }

    pub fn is_identical(&self) -> bool {
        let radii = log_spaced(SAMPLE_RANGE.0, SAMPLE_RANGE.1, 257);
        radii
            .iter()
            .all(|&x| self.first.value(x) == self.second.value(x))
    }
}

fn difference_constant(a: &PotentialSpec, b: &PotentialSpec, r: f64, n: usize) -> f64 {
    log_spaced(SAMPLE_RANGE.0, 1.0, n)
        .into_iter()
        .map(|x| (a.value(x) - b.value(x)).abs() * x.powf(r))
        .fold(0.0, f64::max)
}

/// Outcome of one line of the structural conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Tightest constant found on the samples.
    pub constant: f64,
    /// Radius at which the check failed, if it did.
    pub offending_radius: Option<f64>,
    pub note: String,
}

/// Per-member and pair-level results of [`validate_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub bounded_tail: [ConditionCheck; 2],
    pub gradient: [ConditionCheck; 2],
    pub difference: ConditionCheck,
    /// Local log-log slope estimate of `|V₁ − V₂|` near the origin, negated;
    /// `None` when the difference vanishes there.
    pub fitted_r: Option<f64>,
    pub c_diff: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.bounded_tail.iter().all(|c| c.passed)
            && self.gradient.iter().all(|c| c.passed)
            && self.difference.passed
    }
}

/// Slope tolerance for detecting that a ratio keeps growing toward an end
/// of the sampling window.
const GROWTH_SLOPE: f64 = 0.05;

/// Detects unbounded growth of `ratio(r)` towards the small-`r` end of
/// `radii` (ascending). Returns the offending radius.
fn grows_towards_origin(radii: &[f64], ratio: &[f64]) -> Option<f64> {
    end_trend(radii, ratio, true)
}

fn grows_towards_infinity(radii: &[f64], ratio: &[f64]) -> Option<f64> {
    end_trend(radii, ratio, false)
}

fn end_trend(radii: &[f64], ratio: &[f64], inner: bool) -> Option<f64> {
    if let Some(i) = ratio.iter().position(|q| !q.is_finite()) {
        return Some(radii[i]);
    }
    let n = radii.len();
    if n < 8 {
        return None;
    }
    let decade = |x: f64| x.log10();
    let span = (decade(radii[n - 1]) - decade(radii[0])).max(1e-12);
    // Points in the outermost decade (or eighth of the window).
    let width = 1.0_f64.min(span / 8.0);
    let (edge_idx, slope_sign) = if inner { (0, -1.0) } else { (n - 1, 1.0) };
    let edge = decade(radii[edge_idx]);
    let in_window: Vec<usize> = (0..n)
        .filter(|&i| (decade(radii[i]) - edge).abs() <= width && ratio[i] > 0.0)
        .collect();
    if in_window.len() < 4 {
        return None;
    }
    let xs: Vec<f64> = in_window.iter().map(|&i| radii[i].ln()).collect();
    let ys: Vec<f64> = in_window.iter().map(|&i| ratio[i].ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    // Growth toward the origin shows up as a negative slope in log r.
    if slope * slope_sign > GROWTH_SLOPE {
        Some(radii[edge_idx])
    } else {
        None
    }
}

fn check_bounded_tail(v: &PotentialSpec, n: usize) -> ConditionCheck {
    let radii = log_spaced(1.0, SAMPLE_RANGE.1, n);
    let mut sup_abs = 0.0_f64;
    for &x in &radii {
        let val = v.value(x);
        if !val.is_finite() {
            return ConditionCheck {
                name: "bounded tail".into(),
                passed: false,
                constant: f64::INFINITY,
                offending_radius: Some(x),
                note: format!("V(r) = {val}"),
            };
        }
        sup_abs = sup_abs.max(val.abs());
    }
    // sup_{r ≥ L} [V]_- on the ladder L = 1, 10, 100, ...
    let mut ladder = Vec::new();
    let mut level = 1.0;
    while level <= SAMPLE_RANGE.1 {
        let sup = radii
            .iter()
            .filter(|&&x| x >= level)
            .map(|&x| v.negative_part(x))
            .fold(0.0, f64::max);
        ladder.push((level, sup));
        level *= 10.0;
    }
    let first = ladder.first().map(|p| p.1).unwrap_or(0.0);
    let last = ladder.last().map(|p| p.1).unwrap_or(0.0);
    let decays = last == 0.0 || last <= 0.1 * first;
    let monotone = ladder.windows(2).all(|w| w[1].1 <= w[0].1);
    let passed = decays && monotone;
    ConditionCheck {
        name: "bounded tail".into(),
        passed,
        constant: sup_abs,
        offending_radius: if passed {
            None
        } else {
            ladder.last().map(|p| p.0)
        },
        note: format!(
            "sup_(r>=L)[V]_- from {first:e} at L=1 to {last:e} at L={:e}",
            SAMPLE_RANGE.1
        ),
    }
}

fn check_gradient(v: &PotentialSpec, n: usize) -> ConditionCheck {
    let inner = log_spaced(SAMPLE_RANGE.0, 1.0, n / 2);
    let inner_ratio: Vec<f64> = inner
        .iter()
        .map(|&x| v.derivative(x).abs() * x.powf(v.s + 1.0))
        .collect();
    // The tail bound is only used where [V]_- lives; beyond its support the
    // gradient does not enter any estimate.
    let support = v.negative_support_radius();
    let outer_edge = support.unwrap_or(SAMPLE_RANGE.1).clamp(1.0, SAMPLE_RANGE.1);
    let outer = log_spaced(1.0, outer_edge.max(1.0 + 1e-12), n / 2);
    let outer_ratio: Vec<f64> = outer
        .iter()
        .map(|&x| v.derivative(x).abs() * x.powf(v.tail_exponent + 1.0))
        .collect();
    let constant = inner_ratio
        .iter()
        .chain(&outer_ratio)
        .fold(0.0_f64, |a, &b| a.max(b));
    let offending = grows_towards_origin(&inner, &inner_ratio).or_else(|| {
        if support.is_none() {
            grows_towards_infinity(&outer, &outer_ratio)
        } else {
            outer_ratio
                .iter()
                .position(|q| !q.is_finite())
                .map(|i| outer[i])
        }
    });
    ConditionCheck {
        name: "gradient".into(),
        passed: offending.is_none(),
        constant,
        offending_radius: offending,
        note: format!("tail checked up to r = {outer_edge:e}"),
    }
}

/// Checks all three lines of the structural conditions on log-spaced
/// radii in `[1e-8, 1e4]`. Failures are reported, not returned as errors.
pub fn validate_conditions(pair: &PairSpec, sample_count: usize) -> ValidationReport {
    let n = sample_count.max(64);
    let bounded_tail = [
        check_bounded_tail(&pair.first, n),
        check_bounded_tail(&pair.second, n),
    ];
    let gradient = [
        check_gradient(&pair.first, n),
        check_gradient(&pair.second, n),
    ];

    let radii = log_spaced(SAMPLE_RANGE.0, 1.0, n);
    let diffs: Vec<f64> = radii
        .iter()
        .map(|&x| (pair.first.value(x) - pair.second.value(x)).abs())
        .collect();
    let scaled: Vec<f64> = radii
        .iter()
        .zip(&diffs)
        .map(|(x, d)| d * x.powf(pair.r))
        .collect();
    let c_diff = scaled.iter().fold(0.0_f64, |a, &b| a.max(b));
    let offending = grows_towards_origin(&radii, &scaled);
    let fitted_r = local_exponent(&radii, &diffs);
    let difference = ConditionCheck {
        name: "difference".into(),
        passed: offending.is_none(),
        constant: c_diff,
        offending_radius: offending,
        note: match fitted_r {
            Some(r) => format!("|V1 - V2| ~ r^(-{r:.4}) near the origin"),
            None => "difference vanishes near the origin".into(),
        },
    };
    ValidationReport {
        bounded_tail,
        gradient,
        difference,
        fitted_r,
        c_diff,
    }
}

/// `−d log|f| / d log r` over the innermost decade of `radii`.
fn local_exponent(radii: &[f64], values: &[f64]) -> Option<f64> {
    let cutoff = radii[0] * 10.0;
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter(|(x, v)| **x <= cutoff && **v > 0.0)
        .map(|(x, v)| (x.ln(), v.ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Dimension {
        Dimension::Three
    }

    #[test]
    fn eval_examples() {
        let coulomb = PotentialSpec::power(d3(), 1.0, 1.0, 0.1).unwrap();
        assert!((coulomb.eval(2.0).unwrap() + 0.4).abs() < 1e-15);
        let p = PotentialSpec::power(d3(), 1.0, 1.3, 0.0).unwrap();
        assert_eq!(p.eval(1.0).unwrap(), -1.0);
        assert!(matches!(p.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(PotentialSpec::power(d3(), 0.0, 1.0, 0.0).is_err());
        assert!(PotentialSpec::power(d3(), 1.0, 2.0, 0.0).is_err());
        assert!(PotentialSpec::power(d3(), 1.0, 0.9, 0.0).is_err());
        assert!(PotentialSpec::power(d3(), 1.0, 1.0, -0.1).is_err());
        let v = PotentialSpec::power(d3(), 1.0, 1.3, 0.0).unwrap();
        assert!(v.clone().with_perturbation(1.0, 1.4).is_err());
        assert!(v.with_truncation(0.0).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let v = PotentialSpec::power(d3(), 1.7, 1.3, 0.2)
            .unwrap()
            .with_perturbation(0.4, 0.5)
            .unwrap()
            .with_truncation(3.0)
            .unwrap();
        for &r in &[0.01, 0.5, 2.9, 3.5, 4.4, 5.9, 7.0] {
            let h = 1e-6 * r;
            let fd = (v.value(r + h) - v.value(r - h)) / (2.0 * h);
            let d = v.derivative(r);
            assert!(
                (fd - d).abs() <= 1e-6 * (1.0 + d.abs()),
                "r = {r}: {fd} vs {d}"
            );
        }
        assert_eq!(v.value(6.0 + 1e-9), 0.0);
    }

    #[test]
    fn support_radius() {
        let v = PotentialSpec::power(d3(), 1.0, 1.0, 0.1).unwrap();
        assert!((v.negative_support_radius().unwrap() - 10.0).abs() < 1e-9);
        let pure = PotentialSpec::power(d3(), 1.0, 1.3, 0.0).unwrap();
        assert_eq!(pure.negative_support_radius(), None);
        let t = pure.with_truncation(2.0).unwrap();
        assert!(t.negative_support_radius().unwrap() <= 4.0);
    }

    #[test]
    fn envelope_of_pure_power() {
        let v = PotentialSpec::power(d3(), 1.0, 1.3, 0.0).unwrap();
        let env = v.envelope(DEFAULT_SAMPLES).unwrap();
        assert!((env.constant - 1.1).abs() < 1e-12, "{env:?}");
        let c = PotentialSpec::power(d3(), 1.0, 1.0, 0.1).unwrap();
        // [V]_- r² = r − 0.1r² peaks at r = 5 with value 2.5.
        let env = c.envelope(DEFAULT_SAMPLES).unwrap();
        assert!((env.sampled_max - 2.5).abs() < 1e-5, "{env:?}");
    }

    #[test]
    fn envelope_reports_non_finite_radius() {
        let bad = PotentialSpec::custom(
            d3(),
            "hole",
            1.0,
            2.0,
            0.0,
            Arc::new(|r: f64| {
                if (0.5..2.0).contains(&r) {
                    f64::NAN
                } else {
                    -1.0 / r
                }
            }),
            Arc::new(|r: f64| 1.0 / (r * r)),
        )
        .unwrap();
        match bad.envelope(1000) {
            Err(Error::Validation { radius, .. }) => assert!((0.5..0.6).contains(&radius)),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn identical_pair_validates() {
        let v = PotentialSpec::power(d3(), 1.0, 1.0, 0.1).unwrap();
        let pair = PairSpec::new(v.clone(), v, 0.7).unwrap();
        let rep = validate_conditions(&pair, 4000);
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.c_diff, 0.0);
        assert!(pair.is_identical());
    }

    #[test]
    fn perturbed_pair_recovers_difference_exponent() {
        let v1 = PotentialSpec::power(d3(), 1.0, 1.3, 0.1).unwrap();
        let v2 = v1.clone().with_perturbation(1.0, 0.5).unwrap();
        let pair = PairSpec::new(v1, v2, 0.5).unwrap();
        let rep = validate_conditions(&pair, 4000);
        assert!(rep.difference.passed);
        assert!((rep.fitted_r.unwrap() - 0.5).abs() < 1e-3);
        assert!((pair.c_diff - 1.0).abs() < 1e-8);
        let swapped = validate_conditions(&pair.swapped(), 4000);
        assert_eq!(swapped.fitted_r, rep.fitted_r);
        assert_eq!(swapped.c_diff, rep.c_diff);
    }

    #[test]
    fn wrong_difference_exponent_fails() {
        let v1 = PotentialSpec::power(d3(), 1.0, 1.3, 0.1).unwrap();
        let v2 = v1.clone().with_perturbation(1.0, 0.9).unwrap();
        let pair = PairSpec::new(v1, v2, 0.5).unwrap();
        let rep = validate_conditions(&pair, 4000);
        assert!(!rep.difference.passed);
        assert_eq!(rep.difference.offending_radius, Some(SAMPLE_RANGE.0));
    }

    #[test]
    fn gradient_violation_near_origin_is_located() {
        // V = −r^{-1.2}·(1 + 0.5 sin(r^{-1})): oscillation makes |V′| ~ r^{-3.2}.
        let v = PotentialSpec::power(d3(), 1.0, 1.2, 0.1).unwrap();
        let osc = PotentialSpec::custom(
            d3(),
            "oscillating core",
            1.2,
            2.0,
            0.1,
            Arc::new(|r: f64| -r.powf(-1.2) * (1.0 + 0.5 * (1.0 / r).sin())),
            Arc::new(|r: f64| {
                let c = r.powf(-1.2);
                1.2 * c / r * (1.0 + 0.5 * (1.0 / r).sin()) + c * 0.5 * (1.0 / r).cos() / (r * r)
            }),
        )
        .unwrap();
        let pair = PairSpec::new(v, osc, 1.2).unwrap();
        let rep = validate_conditions(&pair, 4000);
        assert!(rep.gradient[0].passed);
        assert!(!rep.gradient[1].passed);
        assert_eq!(rep.gradient[1].offending_radius, Some(SAMPLE_RANGE.0));
    }
}
