//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15) and
//! fixed composite Gauss–Legendre rules.
//!
//! The adaptive driver follows the QUADPACK `qag` strategy: keep a heap of
//! subintervals ordered by local error estimate and bisect the worst one
//! until the summed error meets the tolerance.

// The node and weight tables are quoted to full reference precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::numeric::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Single 15-point Kronrod evaluation with the embedded 7-point Gauss
/// estimate. Returns `(value, error estimate)`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut result_k = f_center * WGK[7];
    let mut result_g = f_center * WG[3];
    let mut result_abs = result_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        result_k += WGK[j] * (f1 + f2);
        result_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * result_k;
    let mut result_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = result_k * half;
    let result_abs = result_abs * half.abs();
    let result_asc = result_asc * half.abs();
    let mut err = ((result_k - result_g) * half).abs();
    if result_asc != 0.0 && err != 0.0 {
        err = result_asc * (200.0 * err / result_asc).powf(1.5).min(1.0);
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    (value, err)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)` or after `max_intervals` panels; in the
/// latter case `converged` is false and the best estimate is returned.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;
    let max_intervals = max_intervals.max(1);
    loop {
        let tol = abs_tol.max(rel_tol * total_value.abs());
        if total_error <= tol || heap.len() >= max_intervals {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval exhausted at machine resolution.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum in a fixed order to avoid drift from the running updates.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: CompensatedSum = panels.iter().map(|p| p.value).collect();
    let error: CompensatedSum = panels.iter().map(|p| p.error).collect();
    let value = value.total();
    let error = error.total();
    QuadResult {
        value,
        error,
        intervals: panels.len(),
        converged: error <= abs_tol.max(rel_tol * value.abs()),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre rule with `panels` equal panels of `order`
/// points each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl CompositeRule {
    pub fn new(panels: usize, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            nodes,
            weights,
            panels: panels.max(1),
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let width = (b - a) / self.panels as f64;
        let mut acc = CompensatedSum::new();
        for p in 0..self.panels {
            let lo = a + width * p as f64;
            let center = lo + 0.5 * width;
            let mut panel = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel += w * f(center + 0.5 * width * x);
            }
            acc.add(0.5 * width * panel);
        }
        acc.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(20), 0.0, 1.0);
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_inverse_square_root() {
        let r = integrate_adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 0.0, 1e-10, 500);
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_reports_nonconvergence() {
        let r = integrate_adaptive(|x: f64| (1.0 / x).sin() / x, 1e-6, 1.0, 0.0, 1e-14, 3);
        assert!(!r.converged);
        assert_eq!(r.intervals, 3);
    }

    #[test]
    fn legendre_rule_weights_and_moments() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 2;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn composite_rule_on_smooth_function() {
        let rule = CompositeRule::new(8, 10);
        let v = rule.integrate(|x: f64| x.exp(), 0.0, 2.0);
        assert!((v - (2.0_f64.exp() - 1.0)).abs() < 1e-13);
    }
}
