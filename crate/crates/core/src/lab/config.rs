//! TOML experiment configuration.
//!
//! Every section is optional; missing sections and fields take the defaults
//! below, and the fully resolved configuration is echoed into each report.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{log_spaced, Dimension};
use crate::potentials::{PairSpec, PotentialSpec};
use crate::semiclassics::QuadratureSpec;
use crate::spectral::{GridPolicy, OuterRadius, TraceOptions};
use crate::theory::{LedgerOptions, LtConstants};

/// Experiment selected by a CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Exponents,
    TraceNeg,
    Classical,
    Weyl,
    Relative,
    GseScaling,
    ImsCheck,
    MollifySlopes,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Exponents,
        ExperimentKind::TraceNeg,
        ExperimentKind::Classical,
        ExperimentKind::Weyl,
        ExperimentKind::Relative,
        ExperimentKind::GseScaling,
        ExperimentKind::ImsCheck,
        ExperimentKind::MollifySlopes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Exponents => "exponents",
            ExperimentKind::TraceNeg => "trace-neg",
            ExperimentKind::Classical => "classical",
            ExperimentKind::Weyl => "weyl",
            ExperimentKind::Relative => "relative",
            ExperimentKind::GseScaling => "gse-scaling",
            ExperimentKind::ImsCheck => "ims-check",
            ExperimentKind::MollifySlopes => "mollify-slopes",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `−a·C₀·r^{−p}` added to a power potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub a: f64,
    pub p: f64,
}

/// `V = −C₀r^{−s} − a·C₀r^{−p} + μ`, optionally smoothly truncated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub dimension: u32,
    pub c0: f64,
    pub s: f64,
    pub mu: f64,
    /// Declared tail exponent; `None` keeps the family default.
    pub tail_exponent: Option<f64>,
    pub truncation_radius: Option<f64>,
    pub perturbation: Option<PerturbationConfig>,
}

impl Default for PotentialConfig {
    /// Hydrogen-like `−1/r + 0.1` in three dimensions.
    fn default() -> Self {
        Self {
            dimension: 3,
            c0: 1.0,
            s: 1.0,
            mu: 0.1,
            tail_exponent: None,
            truncation_radius: None,
            perturbation: None,
        }
    }
}

/// Parameter errors in a configuration are reported as configuration errors.
fn as_config(err: Error) -> Error {
    match err {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

pub(crate) fn dimension(d: u32) -> Result<Dimension> {
    Dimension::try_from(d)
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec> {
        let d = dimension(self.dimension)?;
        let mut spec = PotentialSpec::power(d, self.c0, self.s, self.mu).map_err(as_config)?;
        if let Some(t) = self.tail_exponent {
            spec = spec.with_tail_exponent(t).map_err(as_config)?;
        }
        if let Some(rt) = self.truncation_radius {
            spec = spec.with_truncation(rt).map_err(as_config)?;
        }
        if let Some(PerturbationConfig { a, p }) = self.perturbation {
            spec = spec.with_perturbation(a, p).map_err(as_config)?;
        }
        Ok(spec)
    }

    /// Pure power law `−C₀r^{−s}` without modifications.
    pub fn is_pure_power(&self) -> bool {
        self.mu == 0.0 && self.truncation_radius.is_none() && self.perturbation.is_none()
    }
}

/// Two potentials and their difference exponent `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    pub first: PotentialConfig,
    pub second: PotentialConfig,
    pub r: f64,
}

impl Default for PairConfig {
    /// `−r^{−1.3} + 1` against the same potential plus `−0.5r^{−1/2}`.
    fn default() -> Self {
        let first = PotentialConfig {
            s: 1.3,
            mu: 1.0,
            ..PotentialConfig::default()
        };
        let second = PotentialConfig {
            perturbation: Some(PerturbationConfig { a: 0.5, p: 0.5 }),
            ..first.clone()
        };
        Self {
            first,
            second,
            r: 0.5,
        }
    }
}

impl PairConfig {
    pub fn build(&self) -> Result<PairSpec> {
        PairSpec::new(self.first.build()?, self.second.build()?, self.r).map_err(as_config)
    }
}

/// Geometric `h` ladder from `h_max` downwards.
///
/// At most one of `ratio` and `h_min` fixes the spacing, with ratio `1/√2`
/// when neither is given; `values` overrides both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub h_max: f64,
    pub ratio: Option<f64>,
    pub h_min: Option<f64>,
    pub count: usize,
    pub values: Option<Vec<f64>>,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            h_max: 0.4,
            ratio: None,
            h_min: None,
            count: 8,
            values: None,
        }
    }
}

impl LadderConfig {
    /// Strictly decreasing `h` values in `(0, 1]`.
    pub fn values(&self) -> Result<Vec<f64>> {
        let ratio = match (self.ratio, self.h_min) {
            (None, None) => Some(std::f64::consts::FRAC_1_SQRT_2),
            (r, _) => r,
        };
        let hs = match (&self.values, ratio, self.h_min) {
            (Some(v), _, _) => v.clone(),
            (None, Some(_), Some(_)) => {
                return Err(Error::Config(
                    "ladder: give either ratio or h_min, not both".into(),
                ))
            }
            (None, None, None) => unreachable!("a default ratio is supplied"),
            (None, Some(ratio), None) => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::Config(format!(
                        "ladder ratio {ratio} must lie in (0, 1)"
                    )));
                }
                (0..self.count)
                    .map(|i| self.h_max * ratio.powi(i as i32))
                    .collect()
            }
            (None, None, Some(h_min)) => {
                if !(h_min > 0.0 && h_min < self.h_max) {
                    return Err(Error::Config(format!(
                        "ladder h_min {h_min} must lie in (0, h_max)"
                    )));
                }
                if self.count < 2 {
                    return Err(Error::Config(
                        "ladder with h_min needs at least 2 points".into(),
                    ));
                }
                let mut v = log_spaced(h_min, self.h_max, self.count);
                v.reverse();
                v
            }
        };
        if hs.is_empty() {
            return Err(Error::Config("ladder is empty".into()));
        }
        if hs.iter().any(|&h| !(h > 0.0 && h <= 1.0)) {
            return Err(Error::Config("ladder values must lie in (0, 1]".into()));
        }
        if hs.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("ladder must be strictly decreasing".into()));
        }
        Ok(hs)
    }
}

/// Inputs of the `exponents` experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentsConfig {
    pub dimension: u32,
    pub s: f64,
    pub tail_exponent: f64,
    pub r: f64,
    /// Target `η < η*` for the zone ledger; no ledger when absent.
    pub eta_target: Option<f64>,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            s: 1.3,
            tail_exponent: 2.0,
            r: 0.5,
            eta_target: None,
        }
    }
}

/// Lieb–Thirring table and the evaluation point of the singular bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LtConfig {
    /// `L_{2,β}/L^cl_{2,β}`.
    pub ratio_d2: Option<f64>,
    /// `L_{3,β}/L^cl_{3,β}`.
    pub ratio_d3: Option<f64>,
    /// `ε` of the singular bound; `trace-neg` reports the bound when set.
    pub epsilon: Option<f64>,
    /// `E = energy_factor·|E_min|`.
    pub energy_factor: f64,
}

impl Default for LtConfig {
    fn default() -> Self {
        let c = LtConstants::default();
        Self {
            ratio_d2: c.ratio_d2,
            ratio_d3: c.ratio_d3,
            epsilon: None,
            energy_factor: 1.05,
        }
    }
}

impl LtConfig {
    pub fn constants(&self) -> LtConstants {
        LtConstants {
            ratio_d2: self.ratio_d2,
            ratio_d3: self.ratio_d3,
        }
    }
}

/// Inputs of `gse-scaling`: pure powers `−C₀r^{−s}` for several `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GseConfig {
    pub dimension: u32,
    pub c0: f64,
    pub s_values: Vec<f64>,
    /// Grid for the ground state, scaled with the quantum length.
    pub grid: GridPolicy,
    /// Allowed relative deviation of the fitted exponent.
    pub tolerance: f64,
}

impl Default for GseConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            c0: 1.0,
            s_values: vec![1.0, 4.0 / 3.0, 1.5],
            grid: GridPolicy {
                outer: OuterRadius::QuantumLengths { multiple: 40.0 },
                ..GridPolicy::default()
            },
            tolerance: 0.02,
        }
    }
}

/// Inputs of `ims-check`: randomly drawn `(α, ε, h)` configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImsConfig {
    pub configs: usize,
    pub radii: usize,
    pub epsilon_min: f64,
    pub epsilon_max: f64,
    /// `N = α/ε` is drawn from `2..=max_zones`.
    pub max_zones: u32,
    pub tolerance: f64,
}

impl Default for ImsConfig {
    fn default() -> Self {
        Self {
            configs: 5,
            radii: 10_000,
            epsilon_min: 0.05,
            epsilon_max: 0.3,
            max_zones: 7,
            tolerance: 1e-12,
        }
    }
}

/// Shell and `h` ladder for the cone-scaling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeConfig {
    pub s: f64,
    pub theta: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub count: usize,
    pub radial_points: usize,
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self {
            s: 1.3,
            theta: 0.5,
            h_min: 1e-3,
            h_max: 1e-1,
            count: 6,
            radial_points: 12,
        }
    }
}

/// Inputs of `mollify-slopes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifyConfig {
    pub dimension: u32,
    pub tau_min: f64,
    pub tau_max: f64,
    pub count: usize,
    pub region_radius: f64,
    pub region_points: usize,
    pub tolerance: f64,
    pub cone: ConeConfig,
}

impl Default for MollifyConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            tau_min: 0.002,
            tau_max: 0.2,
            count: 9,
            region_radius: 1.5,
            region_points: 16,
            tolerance: 0.15,
            cone: ConeConfig::default(),
        }
    }
}

/// Complete experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// If set, must match the subcommand.
    pub kind: Option<ExperimentKind>,
    /// Seed for sampled check points.
    pub seed: u64,
    pub potential: PotentialConfig,
    pub pair: PairConfig,
    pub ladder: LadderConfig,
    pub grid: GridPolicy,
    pub quadrature: QuadratureSpec,
    pub trace: TraceOptions,
    pub exponents: ExponentsConfig,
    pub ledger: LedgerOptions,
    pub lt: LtConfig,
    pub gse: GseConfig,
    pub ims: ImsConfig,
    pub mollify: MollifyConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Rejects a configuration written for another experiment.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<()> {
        match self.kind {
            Some(k) if k != kind => Err(Error::Config(format!(
                "configuration is for `{k}`, not `{kind}`"
            ))),
            _ => Ok(()),
        }
    }
}
