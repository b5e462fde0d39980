//! Channel-summed negative spectra and Riesz means.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::tridiag::{discretize, Channel, TridiagonalOperator};
use crate::error::{Error, Result};
use crate::numeric::{negative_part, CompensatedSum, Dimension};
use crate::potentials::{PairSpec, PotentialSpec};

/// Options for [`trace_neg`] and [`relative_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceOptions {
    /// Riesz exponent `β > 0`.
    pub beta: f64,
    /// Bisection tolerance; `None` selects `1e-10·max(1, |E_min|)` per channel.
    pub abs_tol: Option<f64>,
    pub channel_cap: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            beta: 1.0,
            abs_tol: None,
            channel_cap: 10_000,
        }
    }
}

/// Negative eigenvalues of one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpectrum {
    pub channel: Channel,
    /// Ascending, all `< 0`.
    pub eigenvalues: Vec<f64>,
    /// `multiplicity · Σ|E|^β` for this channel.
    pub riesz: f64,
}

/// Negative spectrum of `−h²Δ + V` collected over channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegSpectrum {
    pub dimension: Dimension,
    pub h: f64,
    pub beta: f64,
    pub grid: RadialGrid,
    /// Channels `0, 1, …` holding negative eigenvalues, without gaps.
    pub channels: Vec<ChannelSpectrum>,
    /// Number of negative eigenvalues counted with multiplicity.
    pub count: usize,
    /// `R_β = Σ mult·|E|^β`.
    pub riesz_mean: f64,
    /// Highest channel index examined (the first empty one).
    pub highest_channel: u32,
    pub warnings: Vec<String>,
}

/// Whether `h²c/r² ≥ [V]_-` on every grid node, in which case the channel
/// operator is nonnegative and has no negative eigenvalues.
fn centrifugally_empty(potential: &PotentialSpec, channel: Channel, h: f64, nodes: &[f64]) -> bool {
    channel.c_ang >= 0.0
        && nodes[1..nodes.len() - 1]
            .iter()
            .all(|&r| h * h * channel.c_ang / (r * r) >= negative_part(potential.value(r)))
}

fn riesz(eigenvalues: &[f64], beta: f64, multiplicity: u32) -> f64 {
    let sum: CompensatedSum = eigenvalues.iter().map(|e| e.abs().powf(beta)).collect();
    multiplicity as f64 * sum.total()
}

fn solve_channel(
    potential: &PotentialSpec,
    channel: Channel,
    h: f64,
    grid: &RadialGrid,
    nodes: &[f64],
    options: &TraceOptions,
) -> (ChannelSpectrum, Vec<String>) {
    if centrifugally_empty(potential, channel, h, nodes) {
        return (
            ChannelSpectrum {
                channel,
                eigenvalues: Vec::new(),
                riesz: 0.0,
            },
            Vec::new(),
        );
    }
    let op = discretize(potential, channel, h, grid);
    let eigenvalues = negative_of(&op, options.abs_tol);
    let riesz = riesz(&eigenvalues, options.beta, channel.multiplicity);
    (
        ChannelSpectrum {
            channel,
            eigenvalues,
            riesz,
        },
        op.warnings,
    )
}

fn negative_of(op: &TridiagonalOperator, abs_tol: Option<f64>) -> Vec<f64> {
    if op.count_negative() == 0 {
        return Vec::new();
    }
    let tol = abs_tol.unwrap_or_else(|| op.default_tolerance());
    op.negative_eigenvalues(tol)
}

/// Runs `solve(ℓ)` for `ℓ = 0, 1, …` in parallel batches until `done(ℓ)`
/// holds, returning the results for `ℓ` below the first done index. The
/// outcome does not depend on the batch size.
fn sweep_channels<T: Send>(
    cap: usize,
    solve: impl Fn(u32) -> T + Sync,
    done: impl Fn(&T) -> bool,
) -> Result<(Vec<T>, u32)> {
    let batch = rayon::current_num_threads().max(1);
    let mut results = Vec::new();
    let mut next = 0usize;
    loop {
        if next >= cap {
            return Err(Error::ChannelCap { cap });
        }
        let end = (next + batch).min(cap);
        let chunk: Vec<T> = (next..end)
            .into_par_iter()
            .map(|l| solve(l as u32))
            .collect();
        for (offset, item) in chunk.into_iter().enumerate() {
            if done(&item) {
                return Ok((results, (next + offset) as u32));
            }
            results.push(item);
        }
        next = end;
    }
}

fn validate_inputs(h: f64, options: &TraceOptions) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    if !(options.beta > 0.0 && options.beta.is_finite()) {
        return Err(Error::domain(format!(
            "Riesz exponent must be positive, got {}",
            options.beta
        )));
    }
    if matches!(options.abs_tol, Some(t) if !(t > 0.0)) {
        return Err(Error::domain("bisection tolerance must be positive"));
    }
    Ok(())
}

/// `tr[−h²Δ + V]_-^β` by channel decomposition.
///
/// Channels are swept upward and the sweep stops at the first channel
/// without negative eigenvalues; higher channels only add centrifugal
/// energy and are empty as well.
pub fn trace_neg(
    potential: &PotentialSpec,
    h: f64,
    grid: &RadialGrid,
    options: &TraceOptions,
) -> Result<NegSpectrum> {
    validate_inputs(h, options)?;
    let d = potential.dimension;
    let nodes = grid.nodes();
    let (solved, highest) = sweep_channels(
        options.channel_cap,
        |l| solve_channel(potential, Channel::new(d, l), h, grid, &nodes, options),
        |(spec, _)| spec.eigenvalues.is_empty(),
    )?;
    let mut warnings = Vec::new();
    let mut total = CompensatedSum::new();
    let mut count = 0;
    let mut channels = Vec::with_capacity(solved.len());
    for (spec, w) in solved {
        total.add(spec.riesz);
        count += spec.eigenvalues.len() * spec.channel.multiplicity as usize;
        for msg in w {
            if !warnings.contains(&msg) {
                warnings.push(msg);
            }
        }
        channels.push(spec);
    }
    Ok(NegSpectrum {
        dimension: d,
        h,
        beta: options.beta,
        grid: *grid,
        channels,
        count,
        riesz_mean: total.total(),
        highest_channel: highest,
        warnings,
    })
}

/// Per-channel Riesz means of both pair members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDifference {
    pub channel: Channel,
    pub first: f64,
    pub second: f64,
}

/// `tr[−h²Δ + V₁]_-^β − tr[−h²Δ + V₂]_-^β` computed on one grid and one
/// channel set, differenced channel by channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeSpectrum {
    pub h: f64,
    pub beta: f64,
    pub grid: RadialGrid,
    pub channels: Vec<ChannelDifference>,
    pub trace_first: f64,
    pub trace_second: f64,
    pub difference: f64,
    /// Number of channels solved (including those empty for one member).
    pub channels_used: u32,
    pub warnings: Vec<String>,
}

pub fn relative_trace(
    pair: &PairSpec,
    h: f64,
    grid: &RadialGrid,
    options: &TraceOptions,
) -> Result<RelativeSpectrum> {
    validate_inputs(h, options)?;
    let d = pair.dimension();
    let nodes = grid.nodes();
    let identical = pair.is_identical();
    let (solved, highest) = sweep_channels(
        options.channel_cap,
        |l| {
            let ch = Channel::new(d, l);
            let a = solve_channel(&pair.first, ch, h, grid, &nodes, options);
            let b = if identical {
                a.clone()
            } else {
                solve_channel(&pair.second, ch, h, grid, &nodes, options)
            };
            (a, b)
        },
        |(a, b)| a.0.eigenvalues.is_empty() && b.0.eigenvalues.is_empty(),
    )?;
    let mut warnings = Vec::new();
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    let mut diff = CompensatedSum::new();
    let mut channels = Vec::with_capacity(solved.len());
    for ((a, wa), (b, wb)) in solved {
        first.add(a.riesz);
        second.add(b.riesz);
        diff.add(a.riesz - b.riesz);
        for msg in wa.into_iter().chain(wb) {
            if !warnings.contains(&msg) {
                warnings.push(msg);
            }
        }
        channels.push(ChannelDifference {
            channel: a.channel,
            first: a.riesz,
            second: b.riesz,
        });
    }
    Ok(RelativeSpectrum {
        h,
        beta: options.beta,
        grid: *grid,
        channels,
        trace_first: first.total(),
        trace_second: second.total(),
        difference: diff.total(),
        channels_used: highest + 1,
        warnings,
    })
}

/// Lowest eigenvalue of the discretised `−h²Δ + V`.
///
/// The channel operators increase with the channel index, so the minimum is
/// attained in channel 0.
pub fn ground_state_energy(potential: &PotentialSpec, h: f64, grid: &RadialGrid) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    let op = discretize(potential, Channel::new(potential.dimension, 0), h, grid);
    let coarse = op.kth_eigenvalue(0, 1e-6 * op.gershgorin().0.abs().max(1.0));
    let e = op.kth_eigenvalue(0, 1e-13 * coarse.abs().max(1e-300));
    if !e.is_finite() {
        return Err(Error::Numeric(
            "ground-state bisection produced a non-finite value".into(),
        ));
    }
    Ok(e)
}
