//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relweyl::lab::{
    run_experiment, ExperimentConfig, ExperimentKind, Format, LadderConfig, Report, Summary,
};
use relweyl::theory::{alpha_optimal, eta_report, ltsing_coefficients, thresholds, LtConstants};
use relweyl::{Dimension, Exponent, FitOutcome};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    fn all(parts: Vec<Verdict>) -> Self {
        let passed = parts.iter().all(|v| v.passed);
        let detail = parts
            .iter()
            .map(|v| v.detail.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        Self { passed, detail }
    }
}

fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Report {
    run_experiment(kind, config, None).unwrap_or_else(|e| panic!("{kind} failed: {e}"))
}

fn ladder(values: &[f64]) -> LadderConfig {
    LadderConfig {
        values: Some(values.to_vec()),
        ..LadderConfig::default()
    }
}

fn relative_error(value: f64, reference: f64) -> f64 {
    ((value - reference) / reference).abs()
}

fn fitted(outcome: &FitOutcome) -> (f64, f64) {
    let fit = outcome.fitted().expect("a fitted slope");
    (fit.slope, fit.prefactor())
}

/// `Σ_n n²·(1/(4h²n²) − μ)_+` from the exact hydrogen levels `−1/(4h²n²)`.
fn hydrogen_trace_oracle(h: f64, mu: f64) -> f64 {
    (1..)
        .map(|n: u32| {
            let n = n as f64;
            n * n * (1.0 / (4.0 * h * h * n * n) - mu)
        })
        .take_while(|&t| t > 0.0)
        .sum()
}

/// Tanh-sinh quadrature of `B(a, b) = (1/a) ∫_0^1 (1 − u^{1/a})^{b−1} du`,
/// the form taken after `t = u^a` removes the `t^{a−1}` singularity.
fn beta_function_oracle(a: f64, b: f64) -> f64 {
    let step = 1.0 / 128.0;
    let mut sum = 0.0;
    for k in -768..=768 {
        let t = k as f64 * step;
        let s = 0.5 * PI * t.sinh();
        let u = 1.0 / (1.0 + (-2.0 * s).exp());
        let one_minus_u = 1.0 / (1.0 + (2.0 * s).exp());
        if u == 0.0 || one_minus_u == 0.0 {
            continue;
        }
        let ln_u = if u < 0.5 {
            u.ln()
        } else {
            (-one_minus_u).ln_1p()
        };
        let base = -(ln_u / a).exp_m1();
        let weight = 0.5 * PI * t.cosh() / (2.0 * s.cosh().powi(2));
        sum += weight * base.powf(b - 1.0);
    }
    sum * step / a
}

/// Root of a sign-changing function by bisection to the last bit.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "root not bracketed in [{lo}, {hi}]");
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn eta_at_zero_r(d: Dimension, s: f64) -> (f64, f64) {
    let report = eta_report(d, s, 2.0, 0.0).unwrap();
    (report.eta_sc.to_f64(), report.eta_loc.to_f64())
}

fn c1_hydrogen_trace() -> Verdict {
    let mut parts = Vec::new();
    for (h, reference) in [(0.1, 251.0), (0.2, 29.75)] {
        let config = ExperimentConfig {
            ladder: ladder(&[h]),
            ..ExperimentConfig::default()
        };
        let start = Instant::now();
        let report = run(ExperimentKind::TraceNeg, &config);
        let elapsed = start.elapsed();
        let trace = report.table.column_f64("trace").unwrap()[0];
        let oracle = hydrogen_trace_oracle(h, 0.1);
        let err = relative_error(trace, reference);
        parts.push(Verdict::new(
            err < 0.01 && relative_error(oracle, reference) < 1e-12 && elapsed < Duration::from_secs(120),
            format!("h = {h}: {trace:.4} vs {reference} (rel {err:.1e}, exact levels {oracle}, {elapsed:.1?})"),
        ));
    }
    Verdict::all(parts)
}

fn c2_classical() -> Verdict {
    let config = ExperimentConfig {
        ladder: ladder(&[0.1]),
        ..ExperimentConfig::default()
    };
    let report = run(ExperimentKind::Classical, &config);
    let classical = report.table.column_f64("classical").unwrap()[0];
    let err = relative_error(classical, 263.523);
    Verdict::new(
        err < 1e-3,
        format!("{classical:.4} vs 263.523 (rel {err:.1e})"),
    )
}

fn c3_weyl_residual() -> Verdict {
    let config = ExperimentConfig {
        ladder: LadderConfig {
            h_max: 0.4,
            h_min: Some(0.05),
            count: 8,
            ..LadderConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let report = run(ExperimentKind::Weyl, &config);
    let Summary::Weyl { fit, .. } = &report.summary else {
        unreachable!()
    };
    let (slope, prefactor) = fitted(fit);
    let prefactor_err = relative_error(prefactor, 0.125);
    Verdict::new(
        (slope - 1.0).abs() <= 0.15 && prefactor_err <= 0.2,
        format!("slope {slope:.4}, |prefactor| {prefactor:.4} vs 1/8 (rel {prefactor_err:.2})"),
    )
}

fn c4_relative() -> Verdict {
    let config = ExperimentConfig {
        ladder: LadderConfig {
            h_max: 0.4,
            ratio: Some(std::f64::consts::FRAC_1_SQRT_2),
            count: 6,
            ..LadderConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let report = run(ExperimentKind::Relative, &config);
    let elapsed = start.elapsed();
    let Summary::Relative {
        classical_relative,
        eta_star,
        fit,
        monotone,
        ..
    } = &report.summary
    else {
        unreachable!()
    };
    let (slope, _) = fitted(fit);
    let hs = report.table.column_f64("h").unwrap();
    let h = *hs.last().unwrap();
    let scaled =
        |column: &str| h.powi(3) * report.table.column_f64(column).unwrap().last().unwrap();
    let (t1, t2) = (scaled("trace1"), scaled("trace2"));
    let floor = 3.0 * classical_relative.abs();
    let eta_ok = matches!(eta_star, Exponent::Finite(e) if (e - 0.3714).abs() < 1e-4);
    Verdict::new(
        *monotone && slope >= 0.2 && t1 > floor && t2 > floor && eta_ok && elapsed < Duration::from_secs(1800),
        format!(
            "monotone {monotone}, slope {slope:.4} (eta* = {}), h^3 traces {t1:.3}, {t2:.3} vs 3|classical| {floor:.3} at h = {h:.4}, {elapsed:.1?}",
            eta_star
        ),
    )
}

fn c5_ground_state_scaling() -> Verdict {
    let report = run(ExperimentKind::GseScaling, &ExperimentConfig::default());
    let Summary::GseScaling { fits } = &report.summary else {
        unreachable!()
    };
    let mut parts: Vec<Verdict> = fits
        .iter()
        .map(|f| {
            let slope = f.fit.slope().unwrap();
            let predicted = -2.0 * f.s / (2.0 - f.s);
            let err = relative_error(slope, predicted);
            Verdict::new(
                err < 0.02,
                format!("s = {:.4}: {slope:.6} vs {predicted:.6}", f.s),
            )
        })
        .collect();
    parts.push(Verdict::new(
        fits.len() == 3,
        format!("{} exponents", fits.len()),
    ));
    // Absolute level for s = 1: E_min = −1/(4h²).
    let s = report.table.column_f64("s").unwrap();
    let h = report.table.column_f64("h").unwrap();
    let e = report.table.column_f64("e_min").unwrap();
    let worst = (0..s.len())
        .filter(|&i| s[i] == 1.0)
        .map(|i| relative_error(e[i], -1.0 / (4.0 * h[i] * h[i])))
        .fold(0.0, f64::max);
    parts.push(Verdict::new(
        worst < 1e-3,
        format!("hydrogen ground state rel {worst:.1e}"),
    ));
    Verdict::all(parts)
}

fn c6_boundary_values() -> Verdict {
    let d3 = Dimension::Three;
    let d2 = Dimension::Two;
    let loc_d3 = bisect(|s| eta_at_zero_r(d3, s).1, 1.2, 1.45);
    let loc_d2 = bisect(|s| eta_at_zero_r(d2, s).1, 1.0, 1.9);
    let sc_d3 = bisect(|s| eta_at_zero_r(d3, s).0, 1.2, 1.45);
    let sc_d2 = bisect(|s| eta_at_zero_r(d2, s).0, 1.0, 1.9);
    let cap = (43.0 - 769f64.sqrt()) / 10.0;
    // Just below the cap the localisation α sits on the lower bound 2/(8 − s).
    let below = thresholds::s_cap_d3().next_down();
    let gap = alpha_optimal(d3, below, 0.0).unwrap().alpha_loc - 2.0 / (8.0 - below);
    let cases = [
        ("62/45", loc_d3, 62.0 / 45.0),
        ("5/4", loc_d2, 5.0 / 4.0),
        (
            "(85+3sqrt1313)/140",
            sc_d3,
            (85.0 + 3.0 * 1313f64.sqrt()) / 140.0,
        ),
        ("(4+sqrt6)/5", sc_d2, (4.0 + 6f64.sqrt()) / 5.0),
        ("(43-sqrt769)/10", thresholds::s_cap_d3(), cap),
    ];
    let mut parts: Vec<Verdict> = cases
        .iter()
        .map(|(name, found, exact)| {
            let err = (found - exact).abs();
            Verdict::new(err < 1e-12, format!("{name}: {err:.1e}"))
        })
        .collect();
    parts.push(Verdict::new(
        gap.abs() < 1e-12,
        format!("alpha_loc gap at cap {gap:.1e}"),
    ));
    Verdict::all(parts)
}

fn c7_partition() -> Verdict {
    let config = ExperimentConfig::default();
    assert_eq!((config.ims.configs, config.ims.radii), (5, 10_000));
    let report = run(ExperimentKind::ImsCheck, &config);
    let Summary::ImsCheck {
        max_defect,
        max_members,
    } = report.summary
    else {
        unreachable!()
    };
    Verdict::new(
        max_defect < 1e-12 && max_members <= 2,
        format!("max defect {max_defect:.1e}, at most {max_members} members"),
    )
}

fn c8_convolution_slopes() -> Verdict {
    let config = ExperimentConfig::default();
    let span = config.mollify.tau_max / config.mollify.tau_min;
    let report = run(ExperimentKind::MollifySlopes, &config);
    let Summary::MollifySlopes { smooth, kink, .. } = &report.summary else {
        unreachable!()
    };
    let (s2, s1) = (smooth.slope().unwrap(), kink.slope().unwrap());
    Verdict::new(
        (s2 - 2.0).abs() <= 0.15 && (s1 - 1.0).abs() <= 0.15 && span >= 100.0,
        format!("C2 slope {s2:.4}, kink slope {s1:.4}, tau span {span:.0}"),
    )
}

fn c9_lieb_thirring() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut parts = Vec::new();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut config = ExperimentConfig {
            ladder: ladder(&[1.0]),
            ..ExperimentConfig::default()
        };
        config.potential.c0 = rng.random_range(2.0..8.0);
        config.potential.s = rng.random_range(1.21..1.49);
        config.potential.mu = rng.random_range(0.05..1.0);
        config.lt.epsilon = Some(0.5 * (3.0 / config.potential.s - 1.5));
        let report = run(ExperimentKind::TraceNeg, &config);
        let trace = report.table.column_f64("trace").unwrap()[0];
        let bound = report.table.column_f64("lt_bound").unwrap()[0];
        worst = worst.max(trace / bound);
        if trace > bound {
            parts.push(Verdict::new(
                false,
                format!("s = {}: trace {trace} > bound {bound}", config.potential.s),
            ));
        }
    }
    parts.push(Verdict::new(
        parts.is_empty(),
        format!("max trace/bound {worst:.3} over 10 potentials"),
    ));

    let constants = LtConstants {
        ratio_d2: Some(1.0),
        ratio_d3: Some(1.0),
    };
    let mut coefficient_err = 0.0f64;
    for d in [Dimension::Two, Dimension::Three] {
        for epsilon in [0.05, 0.2, 0.37, 0.5, 0.8] {
            let c = ltsing_coefficients(d, epsilon, &constants).unwrap();
            let b = 1.0 + c.beta + d.as_f64() / 2.0;
            coefficient_err = coefficient_err
                .max(relative_error(
                    c.beta_classical,
                    beta_function_oracle(1.0 - c.beta, b),
                ))
                .max(relative_error(
                    c.beta_quantum,
                    beta_function_oracle(c.beta, b),
                ));
        }
    }
    parts.push(Verdict::new(
        coefficient_err < 1e-10,
        format!("beta coefficients rel {coefficient_err:.1e}"),
    ));
    Verdict::all(parts)
}

fn c10_thread_determinism() -> Verdict {
    let mut mismatches = Vec::new();
    for kind in ExperimentKind::ALL {
        let config = ExperimentConfig::default();
        let reports: Vec<Report> = [1, 4, 8]
            .iter()
            .map(|&t| run_experiment(kind, &config, Some(t)).unwrap())
            .collect();
        for format in [Format::Csv, Format::Json] {
            let encoded: Vec<String> = reports.iter().map(|r| r.encode(format).unwrap()).collect();
            if encoded.windows(2).any(|w| w[0] != w[1]) {
                mismatches.push(format!("{kind} {format:?}"));
            }
        }
    }
    Verdict::new(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "all experiments byte-identical in CSV and JSON at 1, 4 and 8 threads".to_string()
        } else {
            format!("differences in {}", mismatches.join(", "))
        },
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("hydrogen trace", c1_hydrogen_trace),
        ("hydrogen classical", c2_classical),
        ("Weyl residual", c3_weyl_residual),
        ("relative residual", c4_relative),
        ("ground-state scaling", c5_ground_state_scaling),
        ("boundary values", c6_boundary_values),
        ("IMS partition", c7_partition),
        ("convolution slopes", c8_convolution_slopes),
        ("Lieb-Thirring bound", c9_lieb_thirring),
        ("thread determinism", c10_thread_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = check();
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, verdict.detail);
        failures += usize::from(!verdict.passed);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
