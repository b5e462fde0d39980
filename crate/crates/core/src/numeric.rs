//! Small numerical helpers shared across modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial dimension of the configuration space. Only `d = 2` and `d = 3`
/// are supported by the numerical modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn as_u32(self) -> u32 {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_u32() as f64
    }

    /// Surface area of the unit sphere `S^{d-1}`.
    pub fn sphere_area(self) -> f64 {
        match self {
            Dimension::Two => 2.0 * std::f64::consts::PI,
            Dimension::Three => 4.0 * std::f64::consts::PI,
        }
    }

    /// Critical core exponent `2d/(d+2)`.
    pub fn critical_exponent(self) -> f64 {
        let d = self.as_f64();
        2.0 * d / (d + 2.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.as_u32()
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Quintic smoothstep `6t⁵ − 15t⁴ + 10t³`, clamped to `[0, 1]`.
/// Its first and second derivatives vanish at both ends.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

pub fn smoothstep_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (t - 1.0) * (t - 1.0)
    }
}

/// Negative part `[v]_- = max(-v, 0)`.
#[inline]
pub fn negative_part(v: f64) -> f64 {
    if v < 0.0 {
        -v
    } else {
        0.0
    }
}

/// `a^q − b^q` for `a, b ≥ 0`, accurate when `a ≈ b`.
pub fn pow_difference(a: f64, b: f64, q: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a == 0.0 || b == 0.0 {
        return a.powf(q) - b.powf(q);
    }
    let (hi, lo, sign) = if a > b { (a, b, 1.0) } else { (b, a, -1.0) };
    sign * lo.powf(q) * (q * ((hi - lo) / lo).ln_1p()).exp_m1()
}
