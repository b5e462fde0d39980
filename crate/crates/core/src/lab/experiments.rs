//! Experiment runners.
//!
//! Every runner is a pure function of its configuration. Ladder points are
//! evaluated in parallel and collected in ladder order, so the output does
//! not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{dimension, ExperimentConfig, ExperimentKind};
use super::report::{Cell, Check, CheckKind, GseFit, Report, Summary, Table};
use crate::error::{Error, Result};
use crate::fit::{fit_rate, FitOutcome};
use crate::mollify::{
    cone_scaling, convolution_error_slope, gaussian_field, gradient_bound_check, ray_region,
    tau_ladder, tent_negative_part_field, PartitionScheme,
};
use crate::numeric::log_spaced;
use crate::potentials::PotentialSpec;
use crate::semiclassics::{
    classical_trace, phase_space_volume, relative_classical_trace, SemiclassicalConstants,
};
use crate::spectral::{ground_state_energy, relative_trace, trace_neg};
use crate::theory::{eta_report, ltsing_bound, zone_ledger};

/// Runs `kind` on a dedicated pool of `threads` workers (all cores when `None`).
pub fn run_experiment(
    kind: ExperimentKind,
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<Report> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(kind, config))
}

/// Runs `kind` on the current rayon pool.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<Report> {
    config.check_kind(kind)?;
    let (table, summary, checks) = match kind {
        ExperimentKind::Exponents => run_exponents(config)?,
        ExperimentKind::TraceNeg => run_trace_neg(config)?,
        ExperimentKind::Classical => run_classical(config)?,
        ExperimentKind::Weyl => run_weyl(config)?,
        ExperimentKind::Relative => run_relative(config)?,
        ExperimentKind::GseScaling => run_gse_scaling(config)?,
        ExperimentKind::ImsCheck => run_ims_check(config)?,
        ExperimentKind::MollifySlopes => run_mollify_slopes(config)?,
    };
    Ok(Report {
        experiment: kind,
        config: config.clone(),
        table,
        summary,
        checks,
    })
}

type Parts = (Table, Summary, Vec<Check>);

fn fit_detail(fit: &FitOutcome) -> String {
    match fit {
        FitOutcome::Fitted(f) => format!("slope {:.4} (prefactor {:.4e})", f.slope, f.prefactor()),
        FitOutcome::ExactAgreement { points } => format!("all {points} residuals are zero"),
    }
}

fn merge_warnings(target: &mut Vec<String>, new: &[String]) {
    for w in new {
        if !target.contains(w) {
            target.push(w.clone());
        }
    }
}

fn run_exponents(config: &ExperimentConfig) -> Result<Parts> {
    let c = &config.exponents;
    let d = dimension(c.dimension)?;
    let report = eta_report(d, c.s, c.tail_exponent, c.r)?;
    let ledger = match c.eta_target {
        Some(target) if report.admissible() => Some(zone_ledger(
            d,
            c.s,
            c.tail_exponent,
            c.r,
            target,
            &config.ledger,
        )?),
        _ => None,
    };
    let mut table = Table::new(&["quantity", "value"]);
    let rows: [(&str, Cell); 10] = [
        ("s_c", report.s_c.into()),
        ("eta_sc", report.eta_sc.into()),
        ("eta_loc", report.eta_loc.into()),
        ("eta_cutoff", report.eta_cutoff.into()),
        ("eta_star", report.eta_star.into()),
        ("alpha_sc", report.alpha_sc.into()),
        ("alpha_loc", report.alpha_loc.into()),
        ("alpha", report.alpha.into()),
        ("omega", report.omega.into()),
        (
            "branch",
            format!("{:?}", report.branch).to_lowercase().into(),
        ),
    ];
    for (name, value) in rows {
        table.push(vec![name.into(), value]);
    }
    if let Some(l) = &ledger {
        table.push(vec!["ledger_epsilon".into(), l.epsilon.into()]);
        table.push(vec!["ledger_eta_star".into(), l.eta_star().into()]);
    }
    let checks = report
        .flags
        .iter()
        .map(|f| {
            Check::new(
                &f.name,
                CheckKind::Admissibility,
                f.passed,
                f.message.clone(),
            )
        })
        .collect();
    Ok((table, Summary::Exponents { report, ledger }, checks))
}

fn run_trace_neg(config: &ExperimentConfig) -> Result<Parts> {
    let v = config.potential.build()?;
    let hs = config.ladder.values()?;
    let d = v.dimension.as_f64();
    let lt = config.lt;
    let rows: Vec<(Vec<Cell>, Vec<String>)> = hs
        .par_iter()
        .map(|&h| {
            let grid = config.grid.grid_for(&v, h)?;
            let spec = trace_neg(&v, h, &grid, &config.trace)?;
            let e_min = spec
                .channels
                .first()
                .and_then(|c| c.eigenvalues.first())
                .copied()
                .unwrap_or(0.0);
            let mut row: Vec<Cell> = vec![
                h.into(),
                spec.riesz_mean.into(),
                spec.count.into(),
                (spec.highest_channel + 1).into(),
                e_min.into(),
                grid.points.into(),
                grid.r_min.into(),
                grid.r_max.into(),
            ];
            if let Some(epsilon) = lt.epsilon {
                // −h²Δ + V(x) is unitarily equivalent to −Δ + V(hy), whose
                // integrals carry an extra factor h^{−d}.
                let bound = if e_min < 0.0 {
                    ltsing_bound(
                        &v,
                        epsilon,
                        lt.energy_factor * e_min.abs(),
                        &lt.constants(),
                        &config.quadrature,
                    )?
                    .value
                        * h.powf(-d)
                } else {
                    0.0
                };
                row.push(bound.into());
            }
            Ok((row, spec.warnings))
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![
        "h",
        "trace",
        "count",
        "channels_used",
        "e_min",
        "grid_N",
        "r_min",
        "r_max",
    ];
    if lt.epsilon.is_some() {
        columns.push("lt_bound");
    }
    let mut table = Table::new(&columns);
    let mut warnings = Vec::new();
    let mut checks = Vec::new();
    for (row, w) in rows {
        if lt.epsilon.is_some() {
            let (h, trace, bound) = (row[0].as_f64(), row[1].as_f64(), row[8].as_f64());
            if let (Some(h), Some(trace), Some(bound)) = (h, trace, bound) {
                checks.push(Check::new(
                    &format!("lt_bound_h_{h}"),
                    CheckKind::Numeric,
                    trace <= bound,
                    format!("trace {trace:.6e} vs bound {bound:.6e}"),
                ));
            }
        }
        table.push(row);
        merge_warnings(&mut warnings, &w);
    }
    Ok((table, Summary::TraceNeg { warnings }, checks))
}

fn run_classical(config: &ExperimentConfig) -> Result<Parts> {
    let v = config.potential.build()?;
    let hs = config.ladder.values()?;
    let mut table = Table::new(&["h", "classical", "error_estimate"]);
    for &h in &hs {
        let c = classical_trace(&v, h, &config.quadrature)?;
        table.push(vec![h.into(), c.value()?.into(), c.error_estimate.into()]);
    }
    let volume = phase_space_volume(&v, &config.quadrature)?.value;
    let l_cl = SemiclassicalConstants::new(v.dimension).l_cl;
    Ok((
        table,
        Summary::Classical {
            phase_space_volume: volume,
            l_cl,
        },
        Vec::new(),
    ))
}

fn divergent_hint(err: Error) -> Error {
    match err {
        Error::Divergent(msg) => {
            Error::Divergent(format!("{msg}; run `relative` with a pair instead"))
        }
        other => other,
    }
}

fn run_weyl(config: &ExperimentConfig) -> Result<Parts> {
    let v = config.potential.build()?;
    let hs = config.ladder.values()?;
    let d = v.dimension.as_f64();
    let scaled_classical = classical_trace(&v, 1.0, &config.quadrature)
        .and_then(|c| c.value())
        .map_err(divergent_hint)?;
    let solved: Vec<(f64, usize, u32, Vec<String>)> = hs
        .par_iter()
        .map(|&h| {
            let grid = config.grid.grid_for(&v, h)?;
            let spec = trace_neg(&v, h, &grid, &config.trace)?;
            Ok((
                spec.riesz_mean,
                grid.points,
                spec.highest_channel + 1,
                spec.warnings,
            ))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "h",
        "trace",
        "classical",
        "diff",
        "residual_scaled",
        "grid_N",
        "channels_used",
    ]);
    let mut points = Vec::with_capacity(hs.len());
    let mut warnings = Vec::new();
    for (&h, (trace, n, channels, w)) in hs.iter().zip(solved) {
        let hd = h.powf(d);
        let classical = scaled_classical / hd;
        let residual = hd * trace - scaled_classical;
        points.push((h, residual));
        table.push(vec![
            h.into(),
            trace.into(),
            classical.into(),
            (trace - classical).into(),
            residual.into(),
            n.into(),
            channels.into(),
        ]);
        merge_warnings(&mut warnings, &w);
    }
    let fit = fit_rate(&points)?;
    let decays = fit.slope().is_none_or(|s| s > 0.0);
    let checks = vec![Check::new(
        "residual_decays",
        CheckKind::Informational,
        decays,
        fit_detail(&fit),
    )];
    Ok((
        table,
        Summary::Weyl {
            scaled_classical,
            fit,
            warnings,
        },
        checks,
    ))
}

fn run_relative(config: &ExperimentConfig) -> Result<Parts> {
    let pair = config.pair.build()?;
    let hs = config.ladder.values()?;
    let exponents = eta_report(pair.dimension(), pair.s(), pair.tail_exponent(), pair.r)?;
    exponents.require_admissible()?;
    let d = pair.dimension().as_f64();
    let classical_relative = relative_classical_trace(&pair, 1.0, &config.quadrature)?.value()?;
    let solved = hs
        .par_iter()
        .map(|&h| {
            let grid = config.grid.grid_for_all(&[&pair.first, &pair.second], h)?;
            relative_trace(&pair, h, &grid, &config.trace)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "h",
        "trace1",
        "trace2",
        "diff",
        "scaled_diff",
        "classical_relative",
        "residual",
        "grid_N",
        "channels_used",
    ]);
    let mut points = Vec::with_capacity(hs.len());
    let mut warnings = Vec::new();
    for rel in &solved {
        let h = rel.h;
        let scaled = h.powf(d) * rel.difference;
        let residual = scaled - classical_relative;
        points.push((h, residual));
        table.push(vec![
            h.into(),
            rel.trace_first.into(),
            rel.trace_second.into(),
            rel.difference.into(),
            scaled.into(),
            classical_relative.into(),
            residual.into(),
            rel.grid.points.into(),
            rel.channels_used.into(),
        ]);
        merge_warnings(&mut warnings, &rel.warnings);
    }
    let eta_star = exponents.eta_star;
    let mut fit = fit_rate(&points)?;
    if let (FitOutcome::Fitted(f), Some(eta)) = (&mut fit, eta_star.finite()) {
        f.predicted_slope = Some(eta);
    }
    let monotone =
        points.windows(2).all(|w| w[1].1.abs() < w[0].1.abs()) || points.iter().all(|p| p.1 == 0.0);
    let mut checks = vec![
        Check::new(
            "admissible",
            CheckKind::Admissibility,
            true,
            format!("eta* = {eta_star}"),
        ),
        Check::new(
            "residual_monotone",
            CheckKind::Informational,
            monotone,
            "|residual| decreases along the ladder".to_string(),
        ),
    ];
    if let (Some(slope), Some(eta)) = (fit.slope(), eta_star.finite()) {
        checks.push(Check::new(
            "slope_at_least_eta_star",
            CheckKind::Informational,
            slope >= eta,
            format!("{} vs eta* = {eta:.4}", fit_detail(&fit)),
        ));
    }
    let summary = Summary::Relative {
        classical_relative,
        exponents,
        eta_star,
        fit,
        monotone,
        warnings,
    };
    Ok((table, summary, checks))
}

fn run_gse_scaling(config: &ExperimentConfig) -> Result<Parts> {
    let g = &config.gse;
    let d = dimension(g.dimension)?;
    let hs = config.ladder.values()?;
    if g.s_values.is_empty() {
        return Err(Error::Config("gse.s_values is empty".into()));
    }
    let potentials = g
        .s_values
        .iter()
        .map(|&s| PotentialSpec::power(d, g.c0, s, 0.0).map_err(|e| Error::Config(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..potentials.len())
        .flat_map(|i| hs.iter().map(move |&h| (i, h)))
        .collect();
    let energies = jobs
        .par_iter()
        .map(|&(i, h)| {
            let grid = g.grid.grid_for(&potentials[i], h)?;
            ground_state_energy(&potentials[i], h, &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["s", "h", "e_min", "scaled_e_min"]);
    let mut fits = Vec::new();
    let mut checks = Vec::new();
    for (i, v) in potentials.iter().enumerate() {
        let s = v.s;
        let predicted = -2.0 * s / (2.0 - s);
        let mut points = Vec::with_capacity(hs.len());
        for (k, &h) in hs.iter().enumerate() {
            let e = energies[i * hs.len() + k];
            points.push((h, e));
            table.push(vec![
                s.into(),
                h.into(),
                e.into(),
                (e * h.powf(-predicted)).into(),
            ]);
        }
        let fit = fit_rate(&points)?;
        let slope = fit
            .slope()
            .ok_or_else(|| Error::Numeric(format!("ground-state energy vanished for s = {s}")))?;
        let relative_error = ((slope - predicted) / predicted).abs();
        checks.push(Check::new(
            &format!("gse_exponent_s_{s:.4}"),
            CheckKind::Numeric,
            relative_error <= g.tolerance,
            format!("fitted {slope:.6} vs {predicted:.6}"),
        ));
        fits.push(GseFit {
            s,
            fit,
            predicted,
            relative_error,
        });
    }
    Ok((table, Summary::GseScaling { fits }, checks))
}

/// `(α, ε, h)` drawn so that `α/ε` is an integer and `h^ε < 1/2`.
fn draw_partition(rng: &mut ChaCha8Rng, config: &ExperimentConfig) -> Result<PartitionScheme> {
    let c = &config.ims;
    if !(c.epsilon_min > 0.0 && c.epsilon_min < c.epsilon_max) || c.max_zones < 2 {
        return Err(Error::Config(
            "ims: need 0 < epsilon_min < epsilon_max and max_zones >= 2".into(),
        ));
    }
    let n = rng.random_range(2..=c.max_zones) as f64;
    let epsilon = rng.random_range(c.epsilon_min..c.epsilon_max);
    let h = 0.5f64.powf(1.0 / epsilon) * rng.random_range(1e-3..1.0);
    PartitionScheme::new(n * epsilon, epsilon, h)
}

fn run_ims_check(config: &ExperimentConfig) -> Result<Parts> {
    let c = &config.ims;
    if c.radii < 2 {
        return Err(Error::Config("ims.radii must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let schemes = (0..c.configs)
        .map(|_| draw_partition(&mut rng, config))
        .collect::<Result<Vec<_>>>()?;
    let results = schemes
        .par_iter()
        .map(|p| {
            let hi = 10.0 * p.h.powf(-2.0 * p.epsilon);
            let radii = log_spaced(1e-3 * p.scale(p.n_max), hi, c.radii);
            let mut max_defect = 0.0f64;
            let mut max_members = 0usize;
            for &r in &radii {
                let members = p.eval(r)?;
                let sum: f64 = members.iter().map(|(_, v)| v * v).sum();
                max_defect = max_defect.max((sum - 1.0).abs());
                max_members = max_members.max(members.len());
            }
            let gradient = gradient_bound_check(p, &radii)?;
            Ok((max_defect, max_members, gradient))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "config",
        "alpha",
        "epsilon",
        "h",
        "n_max",
        "max_defect",
        "max_members",
        "gradient_ratio",
        "gradient_bound",
    ]);
    let mut worst_defect = 0.0f64;
    let mut worst_members = 0usize;
    let mut gradient_ok = true;
    for (i, (p, (defect, members, g))) in schemes.iter().zip(&results).enumerate() {
        table.push(vec![
            i.into(),
            p.alpha.into(),
            p.epsilon.into(),
            p.h.into(),
            p.n_max.into(),
            (*defect).into(),
            (*members).into(),
            g.max_ratio.into(),
            g.bound_constant.into(),
        ]);
        worst_defect = worst_defect.max(*defect);
        worst_members = worst_members.max(*members);
        gradient_ok &= g.passed;
    }
    let checks = vec![
        Check::new(
            "partition_identity",
            CheckKind::Numeric,
            worst_defect < c.tolerance,
            format!(
                "max defect {worst_defect:.3e} over {} configurations",
                schemes.len()
            ),
        ),
        Check::new(
            "local_finiteness",
            CheckKind::Numeric,
            worst_members <= 2,
            format!("at most {worst_members} nonzero members"),
        ),
        Check::new(
            "gradient_bound",
            CheckKind::Numeric,
            gradient_ok,
            "sum of squared gradients within 2|phi'|^2 h^(-2 theta)",
        ),
    ];
    Ok((
        table,
        Summary::ImsCheck {
            max_defect: worst_defect,
            max_members: worst_members,
        },
        checks,
    ))
}

fn run_mollify_slopes(config: &ExperimentConfig) -> Result<Parts> {
    let m = &config.mollify;
    let d = dimension(m.dimension)?;
    let taus = tau_ladder(m.tau_min, m.tau_max, m.count);
    let region = ray_region(d, m.region_radius, m.region_points);
    let smooth = convolution_error_slope(&gaussian_field(), d, &taus, &region)?;
    let kink = convolution_error_slope(&tent_negative_part_field(), d, &taus, &region)?;
    let mut hs = log_spaced(m.cone.h_min, m.cone.h_max, m.cone.count);
    hs.reverse();
    let cone = cone_scaling(d, m.cone.s, m.cone.theta, &hs, m.cone.radial_points)?;

    let mut table = Table::new(&["function", "scale", "sup_error"]);
    for (name, report) in [("gaussian", &smooth), ("tent_negative_part", &kink)] {
        for (&tau, &err) in report.taus.iter().zip(&report.errors) {
            table.push(vec![name.into(), tau.into(), err.into()]);
        }
    }
    for (&h, &err) in cone.hs.iter().zip(&cone.errors) {
        table.push(vec!["cone".into(), h.into(), err.into()]);
    }

    let slope_check = |name: &str, fit: &FitOutcome, expected: f64| match fit.slope() {
        Some(s) => Check::new(
            name,
            CheckKind::Numeric,
            (s - expected).abs() <= m.tolerance,
            format!("slope {s:.4}, expected {expected} within {}", m.tolerance),
        ),
        None => Check::new(name, CheckKind::Numeric, false, "errors vanished; no slope"),
    };
    let mut checks = vec![
        slope_check("smooth_slope", &smooth.fit, 2.0),
        slope_check("kink_slope", &kink.fit, 1.0),
    ];
    if let Some(s) = cone.fit.slope() {
        checks.push(Check::new(
            "cone_gradient_bound",
            CheckKind::Numeric,
            s >= cone.c1_exponent - m.tolerance,
            format!(
                "slope {s:.4} vs gradient-bound exponent {:.4}",
                cone.c1_exponent
            ),
        ));
        checks.push(Check::new(
            "cone_hessian_rate",
            CheckKind::Informational,
            (s - cone.c2_exponent).abs() <= m.tolerance,
            format!(
                "slope {s:.4} vs Hessian-bound exponent {:.4}",
                cone.c2_exponent
            ),
        ));
    }
    Ok((table, Summary::MollifySlopes { smooth, kink, cone }, checks))
}
