//! Symmetric tridiagonal operators, Sturm-sequence inertia and bisection.

use serde::{Deserialize, Serialize};

use super::grid::{quantum_length, RadialGrid};
use crate::numeric::Dimension;
use crate::potentials::PotentialSpec;

/// Angular-momentum channel of the radial reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    /// `ℓ` in three dimensions, `|m|` in two.
    pub index: u32,
    pub multiplicity: u32,
    /// Coefficient of `h²/r²` in the effective potential.
    pub c_ang: f64,
}

impl Channel {
    pub fn new(dimension: Dimension, index: u32) -> Self {
        let k = index as f64;
        match dimension {
            Dimension::Three => Self {
                index,
                multiplicity: 2 * index + 1,
                c_ang: k * (k + 1.0),
            },
            Dimension::Two => Self {
                index,
                multiplicity: if index == 0 { 1 } else { 2 },
                c_ang: k * k - 0.25,
            },
        }
    }
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub channel: Option<Channel>,
    pub grid: Option<RadialGrid>,
    /// Resolution warnings raised during assembly.
    pub warnings: Vec<String>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

/// Result of one Sturm sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SturmCount {
    /// Number of eigenvalues strictly below the shift.
    pub count: usize,
    /// Pivots that vanished and were replaced by `−pivmin`.
    pub perturbed_pivots: usize,
}

impl TridiagonalOperator {
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "off-diagonal length must be n - 1"
        );
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let max_sq = off_sq.iter().cloned().fold(1.0, f64::max);
        Self {
            diag,
            off,
            channel: None,
            grid: None,
            warnings: Vec::new(),
            off_sq,
            pivmin: f64::MIN_POSITIVE * max_sq,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Sturm count of eigenvalues `< sigma` via the `LDLᵀ` pivots of
    /// `T − σ`.
    pub fn sturm(&self, sigma: f64) -> SturmCount {
        let mut count = 0;
        let mut perturbed = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off_sq[i - 1] / d };
            d = self.diag[i] - sigma - coupling;
            if d.abs() < self.pivmin {
                d = -self.pivmin;
                perturbed += 1;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        SturmCount {
            count,
            perturbed_pivots: perturbed,
        }
    }

    pub fn count_below(&self, sigma: f64) -> usize {
        self.sturm(sigma).count
    }

    /// Number of negative eigenvalues.
    pub fn count_negative(&self) -> usize {
        self.count_below(0.0)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) to absolute tolerance `tol`.
    pub fn kth_eigenvalue(&self, k: usize, tol: f64) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs().max(hi.abs()).max(1.0));
        lo -= pad;
        hi += pad;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Default bisection tolerance `1e-10·max(1, |E_min|)`.
    pub fn default_tolerance(&self) -> f64 {
        if self.dim() == 0 {
            return 1e-10;
        }
        let e_min = self.kth_eigenvalue(0, 1e-6 * self.gershgorin().0.abs().max(1.0));
        1e-10 * e_min.abs().max(1.0)
    }

    /// All eigenvalues below `upper`, ascending, each within `abs_tol` of a
    /// true eigenvalue. Clustered eigenvalues closer than `abs_tol` are
    /// returned repeated with their Sturm multiplicity.
    pub fn eigenvalues_below(&self, upper: f64, abs_tol: f64) -> Vec<f64> {
        assert!(abs_tol > 0.0, "tolerance must be positive");
        let total = self.count_below(upper);
        if total == 0 {
            return Vec::new();
        }
        let (g_lo, _) = self.gershgorin();
        let lo = g_lo - 1e-12 * g_lo.abs().max(1.0);
        let mut out = Vec::with_capacity(total);
        // Depth-first with the lower half processed first keeps the output sorted.
        let mut stack = vec![(lo, upper, 0usize, total)];
        while let Some((a, b, ca, cb)) = stack.pop() {
            if cb == ca {
                continue;
            }
            let mid = 0.5 * (a + b);
            if b - a <= abs_tol || mid <= a || mid >= b {
                out.extend(std::iter::repeat_n(mid, cb - ca));
                continue;
            }
            let cm = self.count_below(mid);
            stack.push((mid, b, cm, cb));
            stack.push((a, mid, ca, cm));
        }
        out
    }

    /// Negative eigenvalues, ascending.
    pub fn negative_eigenvalues(&self, abs_tol: f64) -> Vec<f64> {
        self.eigenvalues_below(0.0, abs_tol)
    }
}

/// Lumped-mass finite-difference discretisation of
/// `−h²u″ + (h²c/r² + V)u` with Dirichlet ends.
///
/// On the graded grid with spacings `Δ_j` and dual cell widths
/// `w_j = (Δ_{j−1} + Δ_j)/2`, the stiffness matrix is symmetrised by the
/// lumped mass: `T = W^{-1/2}(h²K + W·diag(q))W^{-1/2}`.
pub fn discretize(
    potential: &PotentialSpec,
    channel: Channel,
    h: f64,
    grid: &RadialGrid,
) -> TridiagonalOperator {
    let nodes = grid.nodes();
    let n = grid.unknowns();
    let h2 = h * h;
    let spacing: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    let width: Vec<f64> = (1..=n)
        .map(|j| 0.5 * (spacing[j - 1] + spacing[j]))
        .collect();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for j in 1..=n {
        let r = nodes[j];
        let stiff = h2 * (1.0 / spacing[j - 1] + 1.0 / spacing[j]) / width[j - 1];
        diag.push(stiff + h2 * channel.c_ang / (r * r) + potential.value(r));
        if j < n {
            off.push(-h2 / (spacing[j] * (width[j - 1] * width[j]).sqrt()));
        }
    }
    let mut op = TridiagonalOperator::from_parts(diag, off);
    op.channel = Some(channel);
    op.grid = Some(*grid);

    let lq = quantum_length(
        h,
        potential.core_strength().max(f64::MIN_POSITIVE),
        potential.s,
    );
    if grid.r_min * 100.0 > lq {
        op.warnings.push(format!(
            "r_min = {:e} is not 100x below the quantum length {lq:e}",
            grid.r_min
        ));
    }
    // Local wavelength 2πh/sqrt([V + h²c/r²]_-) must span a few cells.
    for j in 1..=n {
        let r = nodes[j];
        let depth = -(potential.value(r) + h2 * channel.c_ang / (r * r));
        if depth > 0.0 {
            let wavelength = 2.0 * std::f64::consts::PI * h / depth.sqrt();
            if spacing[j].max(spacing[j - 1]) > wavelength / 4.0 {
                op.warnings.push(format!(
                    "grid too coarse near r = {r:e}: spacing {:e}, local wavelength {wavelength:e}",
                    spacing[j]
                ));
                break;
            }
        }
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_eigenvalues(op: &TridiagonalOperator) -> Vec<f64> {
        let n = op.dim();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = op.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = op.off[i];
                m[(i + 1, i)] = op.off[i];
            }
        }
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn random_operator(rng: &mut ChaCha8Rng) -> TridiagonalOperator {
        let n = rng.random_range(1..40);
        let diag = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let off = (0..n - 1).map(|_| rng.random_range(-3.0..0.0)).collect();
        TridiagonalOperator::from_parts(diag, off)
    }

    #[test]
    fn inertia_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let op = random_operator(&mut rng);
            let dense = dense_eigenvalues(&op);
            let bisected = op.eigenvalues_below(10.0, 1e-12);
            for sigma in [-4.0, -1.0, 0.0, 0.5, 3.0] {
                let sturm = op.count_below(sigma);
                let from_dense = dense.iter().filter(|&&e| e < sigma).count();
                let from_list = bisected.iter().filter(|&&e| e < sigma).count();
                // Shifts within rounding of an eigenvalue may legitimately differ.
                if dense.iter().all(|e| (e - sigma).abs() > 1e-9) {
                    assert_eq!(sturm, from_dense);
                    assert_eq!(sturm, from_list);
                }
            }
            let neg = op.negative_eigenvalues(1e-12);
            let dense_neg: Vec<f64> = dense.iter().cloned().filter(|&e| e < 0.0).collect();
            assert_eq!(neg.len(), dense_neg.len());
            for (a, b) in neg.iter().zip(&dense_neg) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn decoupled_blocks_give_union_of_spectra() {
        let a = TridiagonalOperator::from_parts(vec![-2.0, 1.0, -0.5], vec![-1.0, -0.3]);
        let b = TridiagonalOperator::from_parts(vec![-3.0, -1.0], vec![-0.7]);
        let joined = TridiagonalOperator::from_parts(
            vec![-2.0, 1.0, -0.5, -3.0, -1.0],
            vec![-1.0, -0.3, 0.0, -0.7],
        );
        let mut union = a.negative_eigenvalues(1e-13);
        union.extend(b.negative_eigenvalues(1e-13));
        union.sort_by(f64::total_cmp);
        let ev = joined.negative_eigenvalues(1e-13);
        assert_eq!(ev.len(), union.len());
        for (x, y) in ev.iter().zip(&union) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pivots_are_perturbed() {
        let op = TridiagonalOperator::from_parts(vec![0.0, 0.0], vec![-1.0]);
        let c = op.sturm(0.0);
        assert_eq!(c.perturbed_pivots, 1);
        assert_eq!(c.count, 1);
    }

    #[test]
    fn free_laplacian_has_positive_diagonal() {
        let v = PotentialSpec::custom(
            Dimension::Three,
            "zero",
            1.0,
            2.0,
            0.0,
            std::sync::Arc::new(|_| 0.0),
            std::sync::Arc::new(|_| 0.0),
        )
        .unwrap();
        let g = RadialGrid::new(1e-3, 5.0, 200, 2.0).unwrap();
        let op = discretize(&v, Channel::new(Dimension::Three, 0), 0.3, &g);
        assert!(op.diag.iter().all(|&d| d > 0.0));
        assert!(op.off.iter().all(|&e| e < 0.0));
        assert_eq!(op.count_negative(), 0);
    }

    #[test]
    fn uniform_grid_reproduces_standard_stencil() {
        let v = PotentialSpec::custom(
            Dimension::Three,
            "minus one",
            1.0,
            2.0,
            0.0,
            std::sync::Arc::new(|_| -1.0),
            std::sync::Arc::new(|_| 0.0),
        )
        .unwrap();
        let g = RadialGrid::new(1.0, 2.0, 100, 1.0).unwrap();
        let h = 0.2;
        let dr = 0.01;
        let op = discretize(&v, Channel::new(Dimension::Three, 0), h, &g);
        for &d in &op.diag {
            assert!((d - (2.0 * h * h / (dr * dr) - 1.0)).abs() < 1e-9 * d.abs());
        }
        for &e in &op.off {
            assert!((e + h * h / (dr * dr)).abs() < 1e-9 * e.abs());
        }
    }

    #[test]
    fn graded_grid_matches_dense_finite_element_assembly() {
        // Oracle: P1 stiffness matrix with lumped mass, assembled densely
        // element by element and symmetrised by M^{-1/2}.
        let v = PotentialSpec::power(Dimension::Three, 1.0, 1.3, 0.2).unwrap();
        let g = RadialGrid::new(1e-4, 10.0, 60, 2.0).unwrap();
        let h = 0.15;
        let ch = Channel::new(Dimension::Three, 2);
        let op = discretize(&v, ch, h, &g);
        let x = g.nodes();
        let n = x.len() - 1;
        let mut k = DMatrix::<f64>::zeros(n + 1, n + 1);
        let mut mass = vec![0.0; n + 1];
        for e in 0..n {
            let len = x[e + 1] - x[e];
            k[(e, e)] += 1.0 / len;
            k[(e + 1, e + 1)] += 1.0 / len;
            k[(e, e + 1)] -= 1.0 / len;
            k[(e + 1, e)] -= 1.0 / len;
            mass[e] += len / 2.0;
            mass[e + 1] += len / 2.0;
        }
        for i in 1..n {
            for j in 1..n {
                let mut a = h * h * k[(i, j)] / (mass[i] * mass[j]).sqrt();
                if i == j {
                    a += h * h * ch.c_ang / (x[i] * x[i]) + v.value(x[i]);
                    assert!((a - op.diag[i - 1]).abs() <= 1e-14 * a.abs().max(1.0));
                } else if j == i + 1 {
                    assert!((a - op.off[i - 1]).abs() <= 1e-14 * a.abs().max(1.0));
                } else if j > i + 1 {
                    assert_eq!(a, 0.0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn sturm_count_is_monotone_in_shift(seed in 0u64..1000, a in -6.0f64..6.0, b in -6.0f64..6.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let op = random_operator(&mut rng);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(op.count_below(lo) <= op.count_below(hi));
        }
    }
}
