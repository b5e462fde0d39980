//! Closed-form error exponents and bounds for the relative Weyl law.
//!
//! Everything here is plain arithmetic on the parameters `(d, s, S, r)`:
//! the exponents `η_sc`, `η_loc`, `η_cutoff` and their minimum `η*`, the
//! optimal quantum-zone exponent `α`, the outer cutoff `ω`, the per-zone
//! coherent-state scales `β_n`, and the zone-by-zone error ledger.

mod bounds;
mod exponents;
mod ledger;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use bounds::{
    ltsing_bound, ltsing_coefficients, wbeta_bound, LtConstants, LtsingBound, LtsingCoefficients,
    WBetaBound,
};
pub use exponents::{
    alpha_optimal, beta_optimal, critical_exponent, eta_report, landaus_order, omega_cutoff,
    thresholds, AdmissibilityFlag, AlphaChoice, AlphaRule, Branch, CutoffChoice, ExponentReport,
    LandauOrder, ZoneKind,
};
pub use ledger::{
    zone_ledger, GoverningTerm, LedgerOptions, QuantumZoneEntry, ZoneEntry, ZoneLedger,
};

/// An exponent that is either a finite real or unbounded (`+∞`).
///
/// Serialised as a number or the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Unbounded,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Exponent::Unbounded)
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Value as `f64`, with `+∞` for the unbounded marker.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => a.partial_cmp(b),
            (Exponent::Finite(_), Exponent::Unbounded) => Some(Ordering::Less),
            (Exponent::Unbounded, Exponent::Finite(_)) => Some(Ordering::Greater),
            (Exponent::Unbounded, Exponent::Unbounded) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(x) => ser.serialize_f64(*x),
            Exponent::Unbounded => ser.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(x) => Ok(Exponent::Finite(x)),
            Repr::Text(t) if t == "unbounded" => Ok(Exponent::Unbounded),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid exponent {t:?}"))),
        }
    }
}
