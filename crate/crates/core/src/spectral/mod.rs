//! Negative spectrum of `−h²Δ + V` for radial `V` in two and three
//! dimensions.
//!
//! The operator splits into angular-momentum channels. Each channel is a
//! one-dimensional problem `−h²u″ + (h²c/r² + V)u` on a graded grid, which
//! is discretised as a symmetric tridiagonal matrix. Only negative
//! eigenvalues are extracted, by Sturm-sequence bisection.

mod grid;
mod trace;
mod tridiag;

pub use grid::{quantum_length, GridPolicy, OuterRadius, RadialGrid};
pub use trace::{
    ground_state_energy, relative_trace, trace_neg, ChannelDifference, ChannelSpectrum,
    NegSpectrum, RelativeSpectrum, TraceOptions,
};
pub use tridiag::{discretize, Channel, SturmCount, TridiagonalOperator};
