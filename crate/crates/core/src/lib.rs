//! Numerical laboratory for relative Weyl asymptotics of Schrödinger
//! operators `-h²Δ + V` with singular radial potentials.
//!
//! The crate is organised by subsystem:
//!
//! * [`potentials`]: radial potential families and sampling checks of the
//!   structural conditions (core exponent `s`, tail exponent `S`,
//!   difference exponent `r`).
//! * [`spectral`]: negative eigenvalues and Riesz means of `-h²Δ + V` via
//!   angular-momentum channels, graded finite differences and Sturm bisection.
//! * [`semiclassics`]: semiclassical constants and phase-space integrals,
//!   including the relative integral that stays finite when both absolute
//!   integrals diverge.
//! * [`theory`]: closed-form error exponents, optimal localisation
//!   parameters, the zone ledger and the Lieb–Thirring type bounds.
//! * [`mollify`]: the IMS partition of unity and coherent-state mollifiers.
//! * [`lab`]: experiment configuration, h-ladders, convergence fits and
//!   deterministic report emission.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod lab;
pub mod mollify;
pub mod numeric;
pub mod potentials;
pub mod quadrature;
pub mod semiclassics;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use fit::{fit_rate, ConvergenceFit, FitOutcome};
pub use lab::{ExperimentConfig, ExperimentKind, Format, Report};
pub use numeric::Dimension;
pub use potentials::{PairSpec, PotentialSpec};
pub use semiclassics::{ClassicalResult, QuadratureSpec, SemiclassicalConstants};
pub use spectral::{Channel, NegSpectrum, RadialGrid, TridiagonalOperator};
pub use theory::{Exponent, ExponentReport, ZoneLedger};
