//! Discrete Dirichlet forms of the scaled difference chain and of the
//! random walk, the embeddings of test functions into grid spaces, the
//! potential kernel and the dual form of the walk.
//!
//! Grid functions live on (1/N)ℤ and are indexed by the lattice site i of
//! the point i/N. The walk generator is
//! Δ_N g(i) = N²Σ_{r≥1}p(r)[g(i+r) - 2g(i) + g(i-r)] and μ_N = (1/N)·counting.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::FiniteRangeKernel;
use crate::quadrature::{integrate, Options};
use crate::test_function::TestFunction;

/// Finitely supported function on (1/N)ℤ, zero outside `first..first+len`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub n: u32,
    /// Lattice site of `values[0]`.
    pub first: i64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(n: u32, first: i64, values: Vec<f64>) -> Self {
        GridFunction { n, first, values }
    }

    /// Zero function on the symmetric window of half-width `m` sites.
    pub fn zeros(n: u32, m: usize) -> Self {
        GridFunction { n, first: -(m as i64), values: vec![0.0; 2 * m + 1] }
    }

    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    /// g(i/N), zero outside the window.
    pub fn get(&self, i: i64) -> f64 {
        if i < self.first || i > self.last() {
            0.0
        } else {
            self.values[(i - self.first) as usize]
        }
    }

    pub fn set(&mut self, i: i64, v: f64) {
        let idx = (i - self.first) as usize;
        self.values[idx] = v;
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.first..=self.last()
    }

    /// (1/N)Σg.
    pub fn mean_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n as f64
    }

    /// ‖g‖² in L²((1/N)ℤ, μ_N).
    pub fn norm_rw_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.n as f64
    }

    /// ‖g‖² in L²((1/N)ℤ, μ_N + √2γδ₀).
    pub fn norm_sip_sq(&self, gamma: f64) -> f64 {
        let g0 = self.get(0);
        self.norm_rw_sq() + SQRT_2 * gamma * g0 * g0
    }

    /// ⟨f, g⟩ in L²((1/N)ℤ, μ_N).
    pub fn inner_rw(&self, other: &GridFunction) -> f64 {
        let lo = self.first.max(other.first);
        let hi = self.last().min(other.last());
        (lo..=hi).map(|i| self.get(i) * other.get(i)).sum::<f64>() / self.n as f64
    }
}

/// Parameters of the inclusion form: γ, the kernel and N.
#[derive(Debug, Clone)]
pub struct FormParams {
    pub gamma: f64,
    pub kernel: FiniteRangeKernel,
    pub n: u32,
}

impl FormParams {
    pub fn new(gamma: f64, kernel: FiniteRangeKernel, n: u32) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || n == 0 {
            return Err(Error::InvalidParameter("need γ > 0 and N ≥ 1".into()));
        }
        kernel.validate()?;
        Ok(FormParams { gamma, kernel, n })
    }
}

/// Half-width in sites of the window that holds supp f inflated by 2R sites.
pub fn default_window(f: &TestFunction, kernel: &FiniteRangeKernel, n: u32) -> usize {
    let (lo, hi) = f.support();
    let w = lo.abs().max(hi.abs());
    (w * n as f64).ceil() as usize + 2 * kernel.range()
}

/// Φ_N f: restriction of f to the grid on the window of half-width `m` sites.
pub fn phi_n(f: &TestFunction, n: u32, m: usize) -> GridFunction {
    let mut g = GridFunction::zeros(n, m);
    for i in g.sites().collect::<Vec<_>>() {
        g.set(i, f.value(i as f64 / n as f64));
    }
    g
}

/// Ψ_N f: Φ_N f with the values on A_N replaced by f(0).
pub fn psi_n(f: &TestFunction, n: u32, kernel: &FiniteRangeKernel, m: usize) -> GridFunction {
    let mut g = phi_n(f, n, m);
    let f0 = f.value(0.0);
    for r in kernel.jumps() {
        if r.unsigned_abs() as usize <= m {
            g.set(r, f0);
        }
    }
    g
}

/// ℛ_N(g) = NΣ_{r≥1}p(r)Σ_i(g(i+r) - g(i))².
pub fn form_r_n(g: &GridFunction, kernel: &FiniteRangeKernel) -> f64 {
    let n = g.n as f64;
    let mut total = 0.0;
    for (ri, &p) in kernel.weights().iter().enumerate() {
        let r = ri as i64 + 1;
        if p == 0.0 {
            continue;
        }
        let s: f64 = (g.first - r..=g.last()).map(|i| (g.get(i + r) - g.get(i)).powi(2)).sum();
        total += p * s;
    }
    n * total
}

/// ℛ_N(g) = -Σ_i g(i)Δ_N g(i)μ_N(i), summed literally.
pub fn form_r_n_literal(g: &GridFunction, kernel: &FiniteRangeKernel) -> f64 {
    let n = g.n as f64;
    let lap = |i: i64| -> f64 {
        kernel
            .weights()
            .iter()
            .enumerate()
            .map(|(ri, p)| {
                let r = ri as i64 + 1;
                p * (g.get(i + r) - 2.0 * g.get(i) + g.get(i - r))
            })
            .sum::<f64>()
            * n
            * n
    };
    -g.sites().map(|i| g.get(i) * lap(i)).sum::<f64>() / n
}

/// ℰ_N(g) - ℛ_N(g) = √2γN²Σ_{r∈A}p(r)(g(r/N) - g(0))².
pub fn inclusion_gap(g: &GridFunction, params: &FormParams) -> f64 {
    let n = params.n as f64;
    let g0 = g.get(0);
    let s: f64 = params.kernel.jumps().into_iter().map(|r| params.kernel.p(r) * (g.get(r) - g0).powi(2)).sum();
    SQRT_2 * params.gamma * n * n * s
}

/// ℰ_N(g) in sum-of-squares form: ℛ_N(g) plus the inclusion gap.
pub fn form_e_n(g: &GridFunction, params: &FormParams) -> f64 {
    form_r_n(g, &params.kernel) + inclusion_gap(g, params)
}

/// ℰ_N(g) = -Σ_w g(w)Σ_{r∈A}2p(r)(N²/2 + (N³γ/√2)1{r=-w})(g(w+r) - g(w))ν_{γ,N}(w),
/// summed literally.
pub fn form_e_n_literal(g: &GridFunction, params: &FormParams) -> f64 {
    let n = params.n as f64;
    let jumps = params.kernel.jumps();
    let mut total = 0.0;
    for w in g.sites() {
        let nu = 1.0 / n + if w == 0 { SQRT_2 * params.gamma } else { 0.0 };
        let mut inner = 0.0;
        for &r in &jumps {
            let hit = if r == -w { n * n * n * params.gamma / SQRT_2 } else { 0.0 };
            inner += 2.0 * params.kernel.p(r) * (0.5 * n * n + hit) * (g.get(w + r) - g.get(w));
        }
        total -= g.get(w) * inner * nu;
    }
    total
}

/// The inclusion (indicator) part of ℰ_N alone, summed literally:
/// -Σ_w g(w)Σ_{r∈A}2p(r)(N³γ/√2)1{r=-w}(g(w+r) - g(w))ν_{γ,N}(w).
pub fn inclusion_part_literal(g: &GridFunction, params: &FormParams) -> f64 {
    let n = params.n as f64;
    let c = n * n * n * params.gamma / SQRT_2;
    let mut total = 0.0;
    for r in params.kernel.jumps() {
        let w = -r;
        total -= g.get(w) * 2.0 * params.kernel.p(r) * c * (g.get(0) - g.get(w)) / n;
    }
    total
}

/// One row of [`mosco2_sequence`].
#[derive(Debug, Clone, Copy)]
pub struct MoscoRow {
    pub n: u32,
    /// ℰ_N(Ψ_N f)
    pub e_psi: f64,
    /// ℛ_N(Φ_N f)
    pub r_phi: f64,
}

/// ℰ_N(Ψ_N f) over a sequence of N with its extrapolation.
#[derive(Debug, Clone)]
pub struct MoscoTable {
    pub rows: Vec<MoscoRow>,
    /// Richardson extrapolation assuming an O(1/N) leading error, from the
    /// two largest N.
    pub extrapolated: f64,
    /// Observed order log₂ of successive difference ratios, from the three
    /// largest N (NaN with fewer rows or a non-geometric sequence).
    pub observed_order: f64,
    /// χ∫(f')², the limit derived from the sum-of-squares form.
    pub derived_limit: f64,
    /// (χ/2)∫(f')², the constant in the paper's convention.
    pub paper_limit: f64,
}

impl MoscoTable {
    /// Slope of log|ℰ_N(Ψ_N f) - limit| against log N, negated: the fitted
    /// order in 1/N.
    pub fn fitted_order(&self, limit: f64) -> f64 {
        let x: Vec<f64> = self.rows.iter().map(|r| (r.n as f64).ln()).collect();
        let y: Vec<f64> = self.rows.iter().map(|r| (r.e_psi - limit).abs().ln()).collect();
        -crate::stats::slope(&x, &y)
    }
}

/// ℰ_N(Ψ_N f) and ℛ_N(Φ_N f) for increasing N.
pub fn mosco2_sequence(f: &TestFunction, ns: &[u32], gamma: f64, kernel: &FiniteRangeKernel) -> Result<MoscoTable> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("N list must be nonempty and increasing".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let params = FormParams::new(gamma, kernel.clone(), n)?;
        let m = default_window(f, kernel, n);
        let psi = psi_n(f, n, kernel, m);
        let phi = phi_n(f, n, m);
        rows.push(MoscoRow { n, e_psi: form_e_n(&psi, &params), r_phi: form_r_n(&phi, kernel) });
    }
    let k = rows.len();
    let extrapolated = if k >= 2 {
        let (a, b) = (&rows[k - 2], &rows[k - 1]);
        let ratio = b.n as f64 / a.n as f64;
        (ratio * b.e_psi - a.e_psi) / (ratio - 1.0)
    } else {
        rows[0].e_psi
    };
    let observed_order = if k >= 3 {
        let (a, b, c) = (&rows[k - 3], &rows[k - 2], &rows[k - 1]);
        let ratio = b.n as f64 / a.n as f64;
        if (c.n as f64 / b.n as f64 - ratio).abs() > 1e-12 {
            f64::NAN
        } else {
            ((a.e_psi - b.e_psi) / (b.e_psi - c.e_psi)).abs().ln() / ratio.ln()
        }
    } else {
        f64::NAN
    };
    let d = f.dirichlet_integral();
    let chi = kernel.chi();
    Ok(MoscoTable { rows, extrapolated, observed_order, derived_limit: chi * d, paper_limit: 0.5 * chi * d })
}

/// Continuum forms (ℰ_bm, ℰ_sbm) = ((1/2)∫(f')², (χ/2)∫(f')²) by quadrature.
pub fn continuum_forms(f: &TestFunction, chi: f64) -> Result<(f64, f64)> {
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let (lo, hi) = f.support();
    let d = integrate(|x| f.derivative(x).powi(2), lo, hi, Options::tol(1e-14, 1e-14))?.value;
    Ok((0.5 * d, 0.5 * chi * d))
}

/// φ̂(k) = Σ_{r≥1}2p(r)(1 - cos rk).
pub fn symbol(kernel: &FiniteRangeKernel, k: f64) -> f64 {
    kernel
        .weights()
        .iter()
        .enumerate()
        .map(|(ri, p)| 4.0 * p * (0.5 * (ri + 1) as f64 * k).sin().powi(2))
        .sum()
}

/// Midpoint nodes k_j = -π + (j + 1/2)·2π/Q; Q even keeps k = 0 off the grid.
fn midpoint_mean<F: Fn(f64) -> f64>(f: F, q: usize) -> f64 {
    let h = 2.0 * PI / q as f64;
    (0..q).map(|j| f(-PI + (j as f64 + 0.5) * h)).sum::<f64>() / q as f64
}

/// Doubles the node count of a periodic midpoint rule until two successive
/// values agree to `rel` (relative), starting at `q0`.
fn periodic_mean<F: Fn(f64) -> f64>(f: F, q0: usize, rel: f64) -> Result<f64> {
    let mut q = q0.max(8).next_power_of_two();
    let mut prev = midpoint_mean(&f, q);
    for _ in 0..8 {
        q *= 2;
        let next = midpoint_mean(&f, q);
        if (next - prev).abs() <= rel * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { estimate: prev, error: f64::NAN })
}

/// Potential kernel a(n) = (1/2π)∫(1 - cos nk)/φ̂(k)dk. With the walk
/// generator Lf(x) = Σ_{r∈A}p(r)(f(x+r) - f(x)) it satisfies La = δ₀ and
/// a(0) = 0; for p(±1) = 1/2 it is |n|.
pub fn potential_kernel(n: i64, kernel: &FiniteRangeKernel) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    // 1 - cos x = 2sin²(x/2) keeps the ratio accurate near k = 0
    periodic_mean(|k| 2.0 * (0.5 * nf * k).sin().powi(2) / symbol(kernel, k), 4 * n.unsigned_abs() as usize + 64, 1e-13)
}

/// Tolerance on (1/N)Σg above which the dual form is infinite.
pub const MEAN_TOLERANCE: f64 = 1e-8;

/// Extra sites on each side of the window in the Legendre route; the
/// maximizer is constant beyond the support up to corrections that decay
/// geometrically in the distance for R > 1.
pub const LEGENDRE_MARGIN: usize = 64;

fn project_mean_zero(g: &GridFunction) -> Vec<f64> {
    let mean = g.values.iter().sum::<f64>() / g.values.len() as f64;
    g.values.iter().map(|v| v - mean).collect()
}

/// ℛ_N*(g) = sup_h(⟨g, h⟩ - ℛ_N(h)) by solving the stationarity system on
/// the window extended by [`LEGENDRE_MARGIN`] sites, with h pinned to 0 at
/// the left end. Infinite when (1/N)Σg ≠ 0.
pub fn dual_form_legendre(g: &GridFunction, kernel: &FiniteRangeKernel) -> Result<f64> {
    if g.mean_mass().abs() > MEAN_TOLERANCE {
        return Ok(f64::INFINITY);
    }
    let values = project_mean_zero(g);
    let size = values.len() + 2 * LEGENDRE_MARGIN;
    if size < 2 {
        return Err(Error::SingularSystem("window has fewer than two sites".into()));
    }
    let n = g.n as f64;
    // Laplacian of the window graph with edge weights N·p(r)
    let mut k = DMatrix::<f64>::zeros(size, size);
    for (ri, &p) in kernel.weights().iter().enumerate() {
        let r = ri + 1;
        let w = n * p;
        for i in 0..size.saturating_sub(r) {
            let j = i + r;
            k[(i, i)] += w;
            k[(j, j)] += w;
            k[(i, j)] -= w;
            k[(j, i)] -= w;
        }
    }
    let reduced = k.view((1, 1), (size - 1, size - 1)).into_owned();
    let mut rhs = DVector::<f64>::zeros(size - 1);
    for (i, v) in values.iter().enumerate() {
        let idx = i + LEGENDRE_MARGIN;
        if idx > 0 {
            rhs[idx - 1] = *v;
        }
    }
    let chol = reduced
        .cholesky()
        .ok_or_else(|| Error::SingularSystem("window Laplacian is not positive definite after pinning".into()))?;
    let x = chol.solve(&rhs);
    // maximizer h = K⁺g/(2N); value = gᵀK⁺g/(4N²)
    Ok(rhs.dot(&x) / (4.0 * n * n))
}

/// ℛ_N*(g) = (1/(8πN³))∫_{-π}^{π}|ĝ(k)|²/φ̂(k)dk with ĝ(k) = Σ_i g(i)e^{iki}.
/// Infinite when (1/N)Σg ≠ 0.
pub fn dual_form_fourier(g: &GridFunction, kernel: &FiniteRangeKernel) -> Result<f64> {
    if g.mean_mass().abs() > MEAN_TOLERANCE {
        return Ok(f64::INFINITY);
    }
    let values = project_mean_zero(g);
    let n = g.n as f64;
    let integrand = |k: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let (s, c) = (j as f64 * k).sin_cos();
            re += v * c;
            im += v * s;
        }
        (re * re + im * im) / symbol(kernel, k)
    };
    // (1/(8πN³))·2π·mean = mean/(4N³)
    let mean = periodic_mean(integrand, 2 * values.len() + 16, 1e-13)?;
    Ok(mean / (4.0 * n * n * n))
}

/// Both routes of the dual form.
#[derive(Debug, Clone, Copy)]
pub struct DualForm {
    pub legendre: f64,
    pub fourier: f64,
}

impl DualForm {
    pub fn discrepancy(&self) -> f64 {
        if self.legendre.is_infinite() && self.fourier.is_infinite() {
            0.0
        } else {
            (self.legendre - self.fourier).abs()
        }
    }
}

/// ℛ_N*(g) by the Legendre and the Fourier route.
pub fn dual_form_rw(g: &GridFunction, kernel: &FiniteRangeKernel) -> Result<DualForm> {
    Ok(DualForm { legendre: dual_form_legendre(g, kernel)?, fourier: dual_form_fourier(g, kernel)? })
}

/// Limit of ℛ_N*(Φ_N φ') as N → ∞: ∫φ²/(4χ), the Legendre transform of χ∫(f')²
/// at φ'. The paper's convention gives (1/4)∫φ² for the walk with ℰ_bm.
pub fn dual_limit_of_derivative(base: &TestFunction, kernel: &FiniteRangeKernel) -> f64 {
    base.l2_norm_sq() / (4.0 * kernel.chi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn random_grid(n: u32, m: usize, r: &mut crate::rng::Rng, mean_zero: bool) -> GridFunction {
        let mut g = GridFunction::zeros(n, m);
        for v in g.values.iter_mut() {
            *v = r.random::<f64>() * 2.0 - 1.0;
        }
        if mean_zero {
            let mean = g.values.iter().sum::<f64>() / g.values.len() as f64;
            g.values.iter_mut().for_each(|v| *v -= mean);
        }
        g
    }

    fn kernels() -> Vec<FiniteRangeKernel> {
        vec![FiniteRangeKernel::nearest_neighbor(), FiniteRangeKernel::range_two(), FiniteRangeKernel::new(vec![0.3, 0.0, 0.2]).unwrap()]
    }

    #[test]
    fn forms_vanish_on_constants_and_zero() {
        let k = FiniteRangeKernel::range_two();
        let p = FormParams::new(1.0, k.clone(), 8).unwrap();
        // a constant on the whole line: take a window wider than the kernel
        // and only sum increments inside it
        let c = GridFunction { n: 8, first: -20, values: vec![3.0; 41] };
        let inner: f64 = (1..=2i64)
            .map(|r| k.p(r) * (-20..=20 - r).map(|i| (c.get(i + r) - c.get(i)).powi(2)).sum::<f64>())
            .sum();
        assert_eq!(inner, 0.0);
        assert_eq!(inclusion_gap(&c, &p), 0.0);
        let z = GridFunction::zeros(8, 5);
        assert_eq!(form_e_n(&z, &p), 0.0);
        assert_eq!(form_r_n(&z, &k), 0.0);
    }

    #[test]
    fn symmetrized_forms_match_literal_sums() {
        let mut r = rng(3);
        for k in kernels() {
            for n in [4u32, 16, 50] {
                let p = FormParams::new(0.8, k.clone(), n).unwrap();
                for _ in 0..20 {
                    let g = random_grid(n, 12, &mut r, false);
                    let (a, b) = (form_r_n(&g, &k), form_r_n_literal(&g, &k));
                    assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} {b}");
                    let (a, b) = (form_e_n(&g, &p), form_e_n_literal(&g, &p));
                    assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn recovery_sequence_has_no_inclusion_part() {
        let f = TestFunction::raised_cosine(0.25, 1.0);
        for k in kernels() {
            for n in [10u32, 64] {
                let p = FormParams::new(1.0, k.clone(), n).unwrap();
                let m = default_window(&f, &k, n);
                let psi = psi_n(&f, n, &k, m);
                assert_eq!(inclusion_gap(&psi, &p), 0.0);
                assert_eq!(inclusion_part_literal(&psi, &p), 0.0);
                assert!(inclusion_gap(&phi_n(&f, n, m), &p) > 0.0);
            }
        }
    }

    #[test]
    fn psi_differs_from_phi_exactly_on_the_jump_set() {
        let f = TestFunction::raised_cosine(0.25, 1.0);
        let k = FiniteRangeKernel::nearest_neighbor();
        let (phi, psi) = (phi_n(&f, 10, 15), psi_n(&f, 10, &k, 15));
        let diff: Vec<i64> = phi.sites().filter(|&i| phi.get(i) != psi.get(i)).collect();
        assert_eq!(diff, vec![-1, 1]);
        let gap = GridFunction::new(10, phi.first, phi.values.iter().zip(&psi.values).map(|(a, b)| a - b).collect());
        let expect: f64 = [-1i64, 1].iter().map(|&i| (f.value(i as f64 / 10.0) - f.value(0.0)).powi(2)).sum::<f64>() / 10.0;
        // g(0) is unchanged, so the sip and rw norms of the difference agree
        assert!((gap.norm_sip_sq(1.0) - expect).abs() < 1e-15);
        let c = TestFunction::Zero;
        assert_eq!(phi_n(&c, 10, 15), psi_n(&c, 10, &k, 15));
    }

    #[test]
    fn embedding_norms_converge() {
        let gamma = 1.3;
        for f in [TestFunction::raised_cosine(0.1, 0.9), TestFunction::poly_bump(-0.2, 1.1)] {
            let k = FiniteRangeKernel::nearest_neighbor();
            for n in [50u32, 100, 200] {
                let g = phi_n(&f, n, default_window(&f, &k, n));
                assert!((g.norm_rw_sq() - f.l2_norm_sq()).abs() < 1e-2);
                let target = f.l2_norm_sq() + SQRT_2 * gamma * f.value(0.0).powi(2);
                assert!((g.norm_sip_sq(gamma) - target).abs() < 1e-2);
                let d = g.norm_sip_sq(gamma) - g.norm_rw_sq() - SQRT_2 * gamma * f.value(0.0).powi(2);
                assert!(d.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mosco_sequence_converges_at_first_order() {
        let f = TestFunction::raised_cosine(0.25, 1.0);
        let k = FiniteRangeKernel::nearest_neighbor();
        let t = mosco2_sequence(&f, &[32, 64, 128, 256], 1.0, &k).unwrap();
        let order = t.fitted_order(t.derived_limit);
        assert!((0.8..=1.2).contains(&order), "order {order}");
        assert!((t.observed_order - 1.0).abs() < 0.2, "{}", t.observed_order);
        assert!((t.extrapolated - t.derived_limit).abs() < 0.01 * t.derived_limit);
        assert!((t.paper_limit - 0.5 * t.derived_limit).abs() < 1e-15);
        // the walk form of Φ_N f converges to the same constant
        let last = t.rows.last().unwrap();
        assert!((last.r_phi - t.derived_limit).abs() < 1e-3 * t.derived_limit);
    }

    #[test]
    fn mosco_sequence_of_constant_is_zero() {
        let t = mosco2_sequence(&TestFunction::Zero, &[8, 16], 1.0, &FiniteRangeKernel::range_two()).unwrap();
        assert!(t.rows.iter().all(|r| r.e_psi == 0.0 && r.r_phi == 0.0));
    }

    #[test]
    fn continuum_form_values() {
        let f = TestFunction::raised_cosine(0.3, 0.7);
        let (bm, sbm) = continuum_forms(&f, 0.5).unwrap();
        assert!((bm - PI * PI / (8.0 * 0.7)).abs() < 1e-8);
        assert!((sbm - 0.5 * bm).abs() < 1e-15);
        assert_eq!(continuum_forms(&TestFunction::Zero, 0.5).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn potential_kernel_nearest_neighbor_is_abs() {
        let k = FiniteRangeKernel::nearest_neighbor();
        assert_eq!(potential_kernel(0, &k).unwrap(), 0.0);
        for n in -20i64..=20 {
            assert!((potential_kernel(n, &k).unwrap() - n.abs() as f64).abs() < 1e-10, "{n}");
        }
    }

    #[test]
    fn potential_kernel_is_a_green_function() {
        for k in kernels() {
            let a: Vec<f64> = (-30i64..=30).map(|n| potential_kernel(n, &k).unwrap()).collect();
            let at = |n: i64| a[(n + 30) as usize];
            for x in -20i64..=20 {
                let la: f64 = k.jumps().into_iter().map(|r| k.p(r) * (at(x + r) - at(x))).sum();
                let delta = if x == 0 { 1.0 } else { 0.0 };
                assert!((la - delta).abs() < 1e-10, "{k:?} x={x}: {la}");
            }
        }
    }

    #[test]
    fn potential_kernel_grows_linearly() {
        let k = FiniteRangeKernel::range_two();
        let dev: Vec<f64> =
            (1..=200i64).step_by(7).map(|n| potential_kernel(n, &k).unwrap() - n as f64 / (2.0 * k.chi())).collect();
        // bounded, and constant up to geometrically small terms
        assert!(dev.iter().all(|d| d.abs() < 1.0), "{dev:?}");
        let tail = &dev[5..];
        let spread = tail.iter().cloned().fold(f64::MIN, f64::max) - tail.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-9, "{dev:?}");
    }

    #[test]
    fn dual_routes_agree_on_dipole() {
        for k in kernels() {
            for n in [4u32, 16, 64] {
                let mut g = GridFunction::zeros(n, 3);
                g.set(1, 1.0);
                g.set(-1, -1.0);
                let d = dual_form_rw(&g, &k).unwrap();
                assert!(d.discrepancy() < 1e-8 * d.legendre.max(1.0), "{d:?}");
            }
        }
    }

    #[test]
    fn dual_dipole_closed_form() {
        // (-Δ_N)⁻¹g = -N⁻²Σ_j a(· - j)g_j + const, so ℛ_N*(g) = -(1/(4N³))Σ g_i g_j a(i-j),
        // which is 2a(2)/(4N³) = 1/N³ for δ₁ - δ₋₁
        let k = FiniteRangeKernel::nearest_neighbor();
        let mut g = GridFunction::zeros(10, 3);
        g.set(1, 1.0);
        g.set(-1, -1.0);
        let v = dual_form_legendre(&g, &k).unwrap();
        assert!((v - 1e-3).abs() < 1e-14, "{v}");
    }

    #[test]
    fn dual_is_infinite_for_nonzero_mean() {
        let mut r = rng(5);
        let k = FiniteRangeKernel::nearest_neighbor();
        let g = random_grid(16, 10, &mut r, false);
        let d = dual_form_rw(&g, &k).unwrap();
        assert!(d.legendre.is_infinite() && d.fourier.is_infinite());
    }

    #[test]
    fn dual_routes_agree_on_random_inputs() {
        let mut r = rng(11);
        for k in kernels() {
            for n in [16u32, 64] {
                for _ in 0..10 {
                    let g = random_grid(n, n as usize, &mut r, true);
                    let d = dual_form_rw(&g, &k).unwrap();
                    assert!(d.discrepancy() < 1e-8, "{k:?} N={n}: {d:?}");
                }
            }
        }
    }

    #[test]
    fn dual_of_derivative_approaches_limit() {
        let base = TestFunction::raised_cosine(0.0, 1.0);
        let f = TestFunction::derivative_of(base.clone());
        let k = FiniteRangeKernel::nearest_neighbor();
        let target = dual_limit_of_derivative(&base, &k);
        let errs: Vec<f64> = [16u32, 32, 64]
            .iter()
            .map(|&n| {
                let g = phi_n(&f, n, default_window(&f, &k, n));
                (dual_form_fourier(&g, &k).unwrap() - target).abs()
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 1e-3 * target, "{errs:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn domination_identity(seed in any::<u64>(), n in 1u32..80, gamma in 0.05f64..5.0, which in 0usize..3) {
            let k = kernels()[which].clone();
            let p = FormParams::new(gamma, k.clone(), n).unwrap();
            let mut r = rng(seed);
            let g = random_grid(n, 9, &mut r, false);
            let (e, rr, gap) = (form_e_n(&g, &p), form_r_n(&g, &k), inclusion_gap(&g, &p));
            prop_assert!(rr >= 0.0 && e >= rr);
            let lit = form_e_n_literal(&g, &p) - form_r_n_literal(&g, &k);
            prop_assert!((lit - gap).abs() <= 1e-10 * e.max(1.0));
        }
    }
}
