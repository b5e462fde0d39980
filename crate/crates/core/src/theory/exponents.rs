//! Error exponents, admissibility conditions and optimal zone parameters.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Exponent;
use crate::error::{Error, Result};
use crate::numeric::Dimension;

/// Tolerance used when a parameter sits exactly on a branch point.
const BRANCH_TOL: f64 = 1e-12;

/// Closed-form threshold values.
pub mod thresholds {
    /// Upper bound on `s` for `η_loc > 0` as `r → 0` in three dimensions.
    pub const S_MAX_D3: f64 = 62.0 / 45.0;
    /// Upper bound on `s` for `η_loc > 0` as `r → 0` in two dimensions.
    pub const S_MAX_D2: f64 = 5.0 / 4.0;
    /// Tail exponent above which `η_cutoff` is unbounded, `d = 3`.
    pub const S_TAIL_D3: f64 = 14.0 / 9.0;
    /// Tail exponent above which `η_cutoff` is unbounded, `d = 2`.
    pub const S_TAIL_D2: f64 = 4.0 / 3.0;

    /// Largest `s` for which both optimal `α` stay above `2/(8 − s)` in
    /// three dimensions: `(43 − √769)/10`.
    pub fn s_cap_d3() -> f64 {
        (43.0 - 769f64.sqrt()) / 10.0
    }

    /// Zero of `η_sc` at `r = 0`, `d = 3`: `(85 + 3√1313)/140`.
    pub fn eta_sc_zero_d3() -> f64 {
        (85.0 + 3.0 * 1313f64.sqrt()) / 140.0
    }

    /// Zero of `η_sc` at `r = 0`, `d = 2`: `(4 + √6)/5`.
    pub fn eta_sc_zero_d2() -> f64 {
        (4.0 + 6f64.sqrt()) / 5.0
    }
}

/// `s_c = 2d/(d + 2)` for any `d ≥ 2`.
pub fn critical_exponent(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!(
            "critical exponent needs d >= 2, got {d}"
        )));
    }
    let d = d as f64;
    Ok(2.0 * d / (d + 2.0))
}

/// Position of `s` relative to the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Subcritical,
    Critical,
    Supercritical,
}

impl Branch {
    fn of(s: f64, s_c: f64) -> Self {
        if (s - s_c).abs() <= BRANCH_TOL {
            Branch::Critical
        } else if s < s_c {
            Branch::Subcritical
        } else {
            Branch::Supercritical
        }
    }
}

/// Which optimisation produced the chosen `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    /// Balance of quantum and innermost semiclassical error.
    Semiclassical,
    /// Balance of quantum and localisation error.
    Localization,
}

/// Both candidate quantum-zone exponents and the chosen one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaChoice {
    pub alpha_sc: f64,
    pub alpha_loc: f64,
    pub alpha: f64,
    pub rule: AlphaRule,
}

/// Outer cutoff `ω` and the exponent `η_cutoff` it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffChoice {
    pub omega: Exponent,
    pub eta_cutoff: Exponent,
}

/// One named admissibility condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityFlag {
    pub name: String,
    pub passed: bool,
    pub message: String,
}

impl AdmissibilityFlag {
    fn new(name: &str, passed: bool, message: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            message,
        }
    }
}

/// Every exponent attached to a parameter tuple `(d, s, S, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub d: Dimension,
    pub s: f64,
    pub tail_exponent: f64,
    pub r: f64,
    pub s_c: f64,
    pub branch: Branch,
    pub eta_sc: Exponent,
    pub eta_loc: Exponent,
    pub eta_cutoff: Exponent,
    pub eta_star: Exponent,
    pub alpha_sc: f64,
    pub alpha_loc: f64,
    pub alpha: f64,
    pub alpha_rule: AlphaRule,
    pub omega: Exponent,
    pub flags: Vec<AdmissibilityFlag>,
}

impl ExponentReport {
    pub fn admissible(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    /// Messages of the violated conditions.
    pub fn violations(&self) -> Vec<String> {
        self.flags
            .iter()
            .filter(|f| !f.passed)
            .map(|f| format!("{}: {}", f.name, f.message))
            .collect()
    }

    /// `Err(Admissibility)` listing the violated conditions, if any.
    pub fn require_admissible(&self) -> Result<()> {
        if self.admissible() {
            Ok(())
        } else {
            Err(Error::Admissibility(self.violations().join("; ")))
        }
    }

    /// Predicted log-log slope of the scaled residual `h^d·(trace − classical)`.
    pub fn predicted_slope(&self) -> Option<f64> {
        self.eta_star.finite()
    }
}

fn upper_cap(d: Dimension) -> f64 {
    match d {
        Dimension::Three => thresholds::s_cap_d3(),
        Dimension::Two => 2.0,
    }
}

fn check_inputs(d: Dimension, s: f64, r: f64) -> Result<()> {
    let cap = upper_cap(d);
    if !(s >= 1.0 && s < cap) {
        let bound = match d {
            Dimension::Three => "(43 - sqrt 769)/10",
            Dimension::Two => "2",
        };
        return Err(Error::domain(format!(
            "core exponent s = {s} outside [1, {bound}) for d = {d}; the positivity bound is {}",
            match d {
                Dimension::Three => "62/45",
                Dimension::Two => "5/4",
            }
        )));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!(
            "difference exponent r = {r} must be nonnegative"
        )));
    }
    Ok(())
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!(
            "denominator {name} = {value} is not positive"
        )))
    }
}

/// `(α_sc, α_loc, chosen α)` for the quantum zone.
///
/// `α_sc` is taken when `η_sc < η_loc`, otherwise `α_loc`.
pub fn alpha_optimal(d: Dimension, s: f64, r: f64) -> Result<AlphaChoice> {
    check_inputs(d, s, r)?;
    let (alpha_sc, alpha_loc) = alpha_pair(d, s, r)?;
    let (eta_sc, eta_loc) = eta_pair(d, s, r)?;
    let (alpha, rule) = if eta_sc < eta_loc {
        (alpha_sc, AlphaRule::Semiclassical)
    } else {
        (alpha_loc, AlphaRule::Localization)
    };
    Ok(AlphaChoice {
        alpha_sc,
        alpha_loc,
        alpha,
        rule,
    })
}

fn alpha_pair(d: Dimension, s: f64, r: f64) -> Result<(f64, f64)> {
    let two_r = positive("2 - r", 2.0 - r)?;
    Ok(match d {
        Dimension::Two => {
            let den = positive("5s - 3r - 1", 5.0 * s - 3.0 * r - 1.0)?;
            (
                2.0 * (2.0 * s - 1.0) / ((2.0 - s) * den),
                2.0 * (3.0 - 2.0 * s) / ((2.0 - s) * two_r),
            )
        }
        Dimension::Three => {
            let den = positive("10s - 5r + 1", 10.0 * s - 5.0 * r + 1.0)?;
            if s <= 1.2 {
                (5.0 / den, 2.0 / two_r)
            } else {
                (
                    2.0 * (5.0 * s - 4.0) / ((2.0 - s) * den),
                    4.0 * (8.0 - 5.0 * s) / (5.0 * (2.0 - s) * two_r),
                )
            }
        }
    })
}

fn eta_pair(d: Dimension, s: f64, r: f64) -> Result<(Exponent, Exponent)> {
    let two_r = positive("2 - r", 2.0 - r)?;
    Ok(match d {
        Dimension::Two => {
            let den = positive("5s - 3r - 1", 5.0 * s - 3.0 * r - 1.0)?;
            let sc = -2.0 * (s - 1.0) / (2.0 - s)
                + 2.0 * (1.0 - r) * (2.0 * s - 1.0) / ((2.0 - s) * den);
            let loc = 2.0 * (5.0 - 4.0 * r - 4.0 * s + 3.0 * r * s) / ((2.0 - s) * two_r);
            (Exponent::Finite(sc), Exponent::Finite(loc))
        }
        Dimension::Three => {
            if s <= 1.2 {
                (
                    Exponent::Unbounded,
                    Exponent::Finite(2.0 - 8.0 / (5.0 * two_r)),
                )
            } else {
                let den = positive("10s - 5r + 1", 10.0 * s - 5.0 * r + 1.0)?;
                let sc = (175.0 * r * s - 250.0 * r - 350.0 * s * s + 425.0 * s + 82.0)
                    / (5.0 * (2.0 - s) * den);
                let loc =
                    (175.0 * r * s - 250.0 * r - 270.0 * s + 372.0) / (25.0 * (2.0 - s) * two_r);
                (Exponent::Finite(sc), Exponent::Finite(loc))
            }
        }
    })
}

/// Outer cutoff `ω` and `η_cutoff` as functions of the tail exponent `S`.
pub fn omega_cutoff(d: Dimension, tail_exponent: f64) -> Result<CutoffChoice> {
    let big_s = tail_exponent;
    let s_c = d.critical_exponent();
    if !(big_s > s_c) {
        return Err(Error::domain(format!(
            "tail exponent S = {big_s} must exceed s_c = {s_c}"
        )));
    }
    let (threshold, eta) = match d {
        Dimension::Three => (
            thresholds::S_TAIL_D3,
            (5.0 / 3.0) * (big_s - 1.2) / (big_s - 2.0 / 3.0),
        ),
        Dimension::Two => (
            thresholds::S_TAIL_D2,
            (4.0 / 3.0) * (big_s - 1.0) / (big_s - 2.0 / 3.0),
        ),
    };
    if big_s > threshold {
        Ok(CutoffChoice {
            omega: Exponent::Unbounded,
            eta_cutoff: Exponent::Unbounded,
        })
    } else {
        Ok(CutoffChoice {
            omega: Exponent::Finite((2.0 / 3.0) / (big_s - 2.0 / 3.0)),
            eta_cutoff: Exponent::Finite(eta),
        })
    }
}

/// Full exponent report for `(d, s, S, r)`.
///
/// Errors only when a formula is undefined: `s` outside `[1, cap)` with
/// `cap = (43 − √769)/10` for `d = 3` and `2` for `d = 2`, `S ≤ s_c`, or a
/// nonpositive denominator. The admissibility hypotheses are reported as
/// flags instead.
pub fn eta_report(d: Dimension, s: f64, tail_exponent: f64, r: f64) -> Result<ExponentReport> {
    check_inputs(d, s, r)?;
    let s_c = d.critical_exponent();
    let cutoff = omega_cutoff(d, tail_exponent)?;
    let (eta_sc, eta_loc) = eta_pair(d, s, r)?;
    let alpha = alpha_optimal(d, s, r)?;
    let eta_star = eta_sc.min(eta_loc).min(cutoff.eta_cutoff);
    let flags = admissibility(d, s, tail_exponent, r, eta_star, &alpha);
    Ok(ExponentReport {
        d,
        s,
        tail_exponent,
        r,
        s_c,
        branch: Branch::of(s, s_c),
        eta_sc,
        eta_loc,
        eta_cutoff: cutoff.eta_cutoff,
        eta_star,
        alpha_sc: alpha.alpha_sc,
        alpha_loc: alpha.alpha_loc,
        alpha: alpha.alpha,
        alpha_rule: alpha.rule,
        omega: cutoff.omega,
        flags,
    })
}

fn admissibility(
    d: Dimension,
    s: f64,
    big_s: f64,
    r: f64,
    eta_star: Exponent,
    alpha: &AlphaChoice,
) -> Vec<AdmissibilityFlag> {
    let mut flags = Vec::new();
    let alpha_max = 2.0 / (2.0 - s);
    match d {
        Dimension::Three => {
            let s_max = thresholds::S_MAX_D3;
            flags.push(AdmissibilityFlag::new(
                "s_range",
                s < s_max,
                format!("requires s < 62/45, got s = {s}"),
            ));
            flags.push(AdmissibilityFlag::new(
                "tail",
                big_s > 1.2,
                format!("requires S > 6/5, got S = {big_s}"),
            ));
            let bound = s.min(6.0 * (45.0 * s - 62.0) / (25.0 * (7.0 * s - 10.0)));
            flags.push(AdmissibilityFlag::new(
                "r_bound",
                r < bound,
                format!("requires r < min{{s, 6(45s - 62)/(25(7s - 10))}} = {bound}, got r = {r}"),
            ));
            let integrable = 1.5 * (2.0 - s);
            flags.push(AdmissibilityFlag::new(
                "integrability",
                r < integrable,
                format!("requires r < (3/2)(2 - s) = {integrable}, got r = {r}"),
            ));
            let alpha_min = 2.0 / (8.0 - s);
            flags.push(AdmissibilityFlag::new(
                "alpha_lower",
                alpha.alpha >= alpha_min,
                format!(
                    "requires alpha >= 2/(8 - s) = {alpha_min}, got {}",
                    alpha.alpha
                ),
            ));
        }
        Dimension::Two => {
            flags.push(AdmissibilityFlag::new(
                "s_range",
                s < 1.25,
                format!("requires s < 5/4, got s = {s}"),
            ));
            flags.push(AdmissibilityFlag::new(
                "tail",
                big_s > 1.0,
                format!("requires S > 1, got S = {big_s}"),
            ));
            let bound =
                ((5.0 - 4.0 * s) / (4.0 - 3.0 * s)).min((-5.0 * s * s + 8.0 * s - 2.0) / (2.0 - s));
            flags.push(AdmissibilityFlag::new(
                "r_bound",
                r < bound,
                format!(
                    "requires r < min{{(5 - 4s)/(4 - 3s), (-5s^2 + 8s - 2)/(2 - s)}} = {bound}, got r = {r}"
                ),
            ));
            let integrable = 2.0 - s;
            flags.push(AdmissibilityFlag::new(
                "integrability",
                r < integrable,
                format!("requires r < 2 - s = {integrable}, got r = {r}"),
            ));
        }
    }
    flags.push(AdmissibilityFlag::new(
        "alpha_upper",
        alpha.alpha <= alpha_max,
        format!(
            "requires alpha <= 2/(2 - s) = {alpha_max}, got {}",
            alpha.alpha
        ),
    ));
    flags.push(AdmissibilityFlag::new(
        "eta_positive",
        eta_star > Exponent::Finite(0.0),
        format!("requires eta* > 0, got {eta_star}"),
    ));
    flags
}

/// Semiclassical zone type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    /// `θ_{n−1} ≥ 0` and, in three dimensions, `θ_n ≥ 2/(8 − s)`.
    DeepInner,
    /// `θ_{n−1} ≥ 0`.
    Inner,
    /// `θ_{n−1} < 0`.
    Outer,
}

impl fmt::Display for ZoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZoneKind::DeepInner => "deep_inner",
            ZoneKind::Inner => "inner",
            ZoneKind::Outer => "outer",
        })
    }
}

/// Optimal coherent-state exponent `β_n` for a semiclassical zone at
/// scale `θ_n`.
///
/// Inner zones need `θ_n ≥ 0`, outer zones `θ_n ≤ 0`, and deep inner zones
/// (three dimensions only) `θ_n ≥ 2/(8 − s)`. The result must satisfy
/// `β_n > θ_n`.
pub fn beta_optimal(d: Dimension, theta: f64, zone: ZoneKind, s: f64) -> Result<f64> {
    let beta = match (d, zone) {
        (Dimension::Two, ZoneKind::DeepInner) => {
            return Err(Error::domain("deep inner zones exist only for d = 3"));
        }
        (Dimension::Three, ZoneKind::DeepInner) => {
            let lower = 2.0 / (8.0 - s);
            if theta < lower {
                return Err(Error::domain(format!(
                    "deep inner zone needs theta >= 2/(8 - s) = {lower}, got {theta}"
                )));
            }
            0.5 + theta * (4.0 + s) / 4.0
        }
        (_, ZoneKind::Inner) => {
            if theta < 0.0 {
                return Err(Error::domain(format!(
                    "inner zone needs theta >= 0, got {theta}"
                )));
            }
            2.0 / 3.0 + theta * (1.0 + s) / 3.0
        }
        (_, ZoneKind::Outer) => {
            if theta > 0.0 {
                return Err(Error::domain(format!(
                    "outer zone needs theta <= 0, got {theta}"
                )));
            }
            2.0 / 3.0 + theta / 3.0
        }
    };
    if beta <= theta {
        return Err(Error::Constraint(format!(
            "require beta_n > theta_n, got beta = {beta}, theta = {theta}"
        )));
    }
    Ok(beta)
}

/// Order of `tr[−h²Δ − |x|^{−s} + μ]_-` as `h → 0`: `h^{exponent}·|log h|^{log_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauOrder {
    pub exponent: f64,
    pub log_power: u32,
}

impl fmt::Display for LandauOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h^{}", self.exponent)?;
        if self.log_power > 0 {
            f.write_str(" |log h|")?;
        }
        Ok(())
    }
}

/// `h^{−d}` below `s_c`, `h^{−d}|log h|` at `s_c`, `h^{−2s/(2−s)}` above.
pub fn landaus_order(d: u32, s: f64) -> Result<LandauOrder> {
    let s_c = critical_exponent(d)?;
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::domain(format!("s = {s} outside (0, 2)")));
    }
    let d = d as f64;
    Ok(match Branch::of(s, s_c) {
        Branch::Subcritical => LandauOrder {
            exponent: -d,
            log_power: 0,
        },
        Branch::Critical => LandauOrder {
            exponent: -d,
            log_power: 1,
        },
        Branch::Supercritical => LandauOrder {
            exponent: -2.0 * s / (2.0 - s),
            log_power: 0,
        },
    })
}
