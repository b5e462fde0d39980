//! Zone-by-zone bookkeeping of error exponents.
//!
//! Space is split into a quantum zone `|x| ≲ h^α` and dyadic semiclassical
//! zones at scales `h^{θ_n}`, `θ_n = nε`. Every zone carries the exponents
//! of its localisation, semiclassical, quantum and integral errors; each
//! error is `O(h^{exponent})`.

use serde::{Deserialize, Serialize};

use super::exponents::{beta_optimal, eta_report, ExponentReport, ZoneKind};
use super::Exponent;
use crate::error::{Error, Result};
use crate::numeric::Dimension;

/// Bookkeeping constants for [`zone_ledger`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerOptions {
    /// The unquantified constant `A` in `O(h^{−d+η*−Aε})`; it only rescales `ε`.
    pub a_constant: f64,
    /// Upper limit on the number of semiclassical zones.
    pub max_zones: usize,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        Self {
            a_constant: 1.0,
            max_zones: 1_000_000,
        }
    }
}

/// Exponents of the quantum zone at `θ = α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumZoneEntry {
    pub theta: f64,
    pub localization: f64,
    pub quantum: f64,
    pub integral: f64,
}

/// Exponents of one semiclassical zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneEntry {
    pub n: i64,
    pub theta: f64,
    pub kind: ZoneKind,
    /// Local singularity exponent: `s` inside the unit ball, `S` outside.
    pub s_n: f64,
    pub beta: f64,
    pub localization: f64,
    pub semiclassical: [f64; 3],
}

impl ZoneEntry {
    /// Dominant (smallest) semiclassical exponent.
    pub fn semiclassical_worst(&self) -> f64 {
        self.semiclassical
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// The zone responsible for one of `η_sc`, `η_loc`, `η_cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoverningTerm {
    pub name: String,
    pub eta: Exponent,
    /// Zone index; `None` for the quantum zone.
    pub zone: Option<i64>,
    /// `−d + η` when `η` is finite.
    pub exponent: Option<f64>,
}

/// Complete ledger for one parameter tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneLedger {
    pub report: ExponentReport,
    pub eta_target: f64,
    pub a_constant: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub n_max: i64,
    pub n_min: i64,
    /// Set when `ω` is unbounded and the outer zones were cut at `θ = −1`.
    pub truncated: bool,
    pub quantum: QuantumZoneEntry,
    pub zones: Vec<ZoneEntry>,
    pub governing: Vec<GoverningTerm>,
    /// Smallest governing exponent, `−d + η*`.
    pub worst_governing: f64,
    /// Smallest exponent over all raw entries.
    pub raw_minimum: f64,
}

impl ZoneLedger {
    /// `η*` recovered from the governing entries.
    pub fn eta_star(&self) -> f64 {
        self.worst_governing + self.report.d.as_f64()
    }
}

fn zone_kind(d: Dimension, n: i64, theta: f64, s: f64) -> ZoneKind {
    if n >= 1 {
        if d == Dimension::Three && theta >= 2.0 / (8.0 - s) {
            ZoneKind::DeepInner
        } else {
            ZoneKind::Inner
        }
    } else {
        ZoneKind::Outer
    }
}

/// Unoptimised semiclassical error exponents for one zone.
fn semiclassical_triple(
    d: Dimension,
    kind: ZoneKind,
    theta: f64,
    beta: f64,
    s_n: f64,
    a_eps: f64,
) -> [f64; 3] {
    let (t1, t2, t3) = match (d, kind) {
        (Dimension::Three, ZoneKind::Outer) => (
            -3.0 + beta + theta * (2.0 - 1.5 * s_n),
            -3.0 + 2.0 * (1.0 - beta) + theta * (3.0 - 1.5 * s_n),
            -3.0 + 2.0 * beta - theta * (1.0 + 2.5 * s_n),
        ),
        (Dimension::Three, _) => (
            -3.0 + beta + theta * (2.0 - 2.5 * s_n),
            -3.0 + 2.0 * (1.0 - beta) + theta * (3.0 - 1.5 * s_n),
            -3.0 + 2.0 * beta - theta * (1.0 + 2.5 * s_n),
        ),
        (Dimension::Two, ZoneKind::Outer) => (
            -2.0 + beta + theta * (1.0 - s_n),
            -2.0 + 2.0 * (1.0 - beta) + theta * (2.0 - s_n),
            -2.0 + 2.0 * beta - theta * s_n,
        ),
        (Dimension::Two, _) => (
            -2.0 + beta + theta * (1.0 - 2.0 * s_n),
            -2.0 + 2.0 * (1.0 - beta) + theta * (2.0 - s_n),
            -2.0 + 2.0 * beta - theta * (1.0 + s_n),
        ),
    };
    [t1 - a_eps, t2 - a_eps, t3 - a_eps]
}

/// Builds the zone ledger for a target exponent `η < η*`.
///
/// `ε = (η* − η)/A` is shrunk so that `N = α/ε` is an integer. Zones run
/// from `n = N` down to `⌈−ω/ε⌉`, or to `θ = −1` when `ω` is unbounded.
pub fn zone_ledger(
    d: Dimension,
    s: f64,
    tail_exponent: f64,
    r: f64,
    eta_target: f64,
    options: &LedgerOptions,
) -> Result<ZoneLedger> {
    let report = eta_report(d, s, tail_exponent, r)?;
    report.require_admissible()?;
    if !(options.a_constant > 0.0) {
        return Err(Error::Config(format!(
            "ledger constant A = {} must be positive",
            options.a_constant
        )));
    }
    let eta_star = report.eta_star.to_f64();
    if !(eta_target < eta_star) {
        return Err(Error::domain(format!(
            "target exponent {eta_target} must be below eta* = {eta_star}"
        )));
    }
    let a = options.a_constant;
    let df = d.as_f64();
    let s_c = report.s_c;
    let alpha = report.alpha;

    // When η* is unbounded only the requested target matters; use η* − η = 1.
    let gap = if eta_star.is_finite() {
        eta_star - eta_target
    } else {
        1.0
    };
    let raw_eps = gap / a;
    let n_max = (alpha / raw_eps).ceil().max(1.0);
    let epsilon = alpha / n_max;
    let n_max = n_max as i64;
    let (n_min, truncated) = match report.omega {
        Exponent::Finite(omega) => ((-omega / epsilon).ceil() as i64, false),
        Exponent::Unbounded => (-(1.0 / epsilon).ceil() as i64, true),
    };
    let count = (n_max - n_min + 1) as usize;
    if count > options.max_zones {
        return Err(Error::Constraint(format!(
            "{count} zones exceed the cap of {}; choose a target further below eta*",
            options.max_zones
        )));
    }
    let a_eps = a * epsilon;

    let supercritical = s > s_c + 1e-12;
    let critical = (s - s_c).abs() <= 1e-12;
    let loc_penalty = if supercritical {
        4.0 * (s - s_c) / ((2.0 - s) * (2.0 - s_c))
    } else if critical {
        a_eps
    } else {
        0.0
    };
    let quantum_penalty = if supercritical {
        2.0 * s_c * (s - s_c) / ((2.0 - s) * (2.0 - s_c))
    } else {
        0.0
    };
    let quantum = QuantumZoneEntry {
        theta: alpha,
        localization: -df + 2.0 * (1.0 - alpha) + s_c * alpha - loc_penalty,
        quantum: -df + alpha * (s_c - r) - quantum_penalty,
        integral: -df + alpha * (df / 2.0 * (2.0 - s) - r),
    };

    let mut zones = Vec::with_capacity(count);
    for n in (n_min..=n_max).rev() {
        let theta = n as f64 * epsilon;
        let kind = zone_kind(d, n, theta, s);
        let s_n = if kind == ZoneKind::Outer {
            tail_exponent
        } else {
            s
        };
        let beta = beta_optimal(d, theta, kind, s)?;
        zones.push(ZoneEntry {
            n,
            theta,
            kind,
            s_n,
            beta,
            localization: -df + 2.0 + theta * (-2.0 + df / 2.0 * (2.0 - s_n)) - a_eps,
            semiclassical: semiclassical_triple(d, kind, theta, beta, s_n, a_eps),
        });
    }

    let governing_exponent = |eta: Exponent| eta.finite().map(|e| -df + e);
    let governing = vec![
        GoverningTerm {
            name: "eta_loc".into(),
            eta: report.eta_loc,
            zone: None,
            exponent: governing_exponent(report.eta_loc),
        },
        GoverningTerm {
            name: "eta_sc".into(),
            eta: report.eta_sc,
            zone: Some(n_max),
            exponent: governing_exponent(report.eta_sc),
        },
        GoverningTerm {
            name: "eta_cutoff".into(),
            eta: report.eta_cutoff,
            zone: Some(n_min),
            exponent: governing_exponent(report.eta_cutoff),
        },
    ];
    let worst_governing = governing
        .iter()
        .filter_map(|g| g.exponent)
        .fold(f64::INFINITY, f64::min);

    let raw_minimum = zones
        .iter()
        .map(|z| z.localization.min(z.semiclassical_worst()))
        .chain([quantum.localization, quantum.quantum, quantum.integral])
        .fold(f64::INFINITY, f64::min);

    Ok(ZoneLedger {
        report,
        eta_target,
        a_constant: a,
        epsilon,
        alpha,
        n_max,
        n_min,
        truncated,
        quantum,
        zones,
        governing,
        worst_governing,
        raw_minimum,
    })
}
