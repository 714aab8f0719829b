//! The difference w = x₂ - x₁ of two dual SIP particles: a continuous-time
//! chain on ℤ with rate 2p(r)(k + 1_{r=-w}) from w to w + r.
//!
//! Transition probabilities come from uniformization on a reflected window
//! {-M, ..., M}; the condensive scaling runs the chain with k_N = 1/(√2γN)
//! for time α(N, t) = γN³t/√2.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::kernel::FiniteRangeKernel;
use crate::rng::Rng;
use crate::special::ln_gamma;

/// Truncation error allowed in the Poisson mixture.
pub const POISSON_TAIL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiffChainParams {
    pub k: f64,
    pub kernel: FiniteRangeKernel,
    /// When false the attraction term 1_{r=-w} is dropped and the chain is a
    /// free symmetric walk with rates 2kp(r).
    pub inclusion: bool,
}

impl DiffChainParams {
    pub fn new(k: f64, kernel: FiniteRangeKernel) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
        }
        kernel.validate()?;
        Ok(DiffChainParams { k, kernel, inclusion: true })
    }

    pub fn without_inclusion(mut self) -> Self {
        self.inclusion = false;
        self
    }

    /// Rate from w to w + r.
    pub fn rate(&self, w: i64, r: i64) -> f64 {
        let hit = if self.inclusion && r == -w { 1.0 } else { 0.0 };
        2.0 * self.kernel.p(r) * (self.k + hit)
    }

    /// (r, rate) for every r ∈ A.
    pub fn jump_rates(&self, w: i64) -> Vec<(i64, f64)> {
        self.kernel.jumps().into_iter().map(|r| (r, self.rate(w, r))).collect()
    }

    pub fn total_rate(&self, w: i64) -> f64 {
        self.kernel.jumps().into_iter().map(|r| self.rate(w, r)).sum()
    }
}

/// ν_k(w) = 1 + 1/k at w = 0, 1 elsewhere.
pub fn stationary_weight(w: i64, k: f64) -> f64 {
    if w == 0 {
        1.0 + 1.0 / k
    } else {
        1.0
    }
}

/// ν_k(w)·rate(w→w+r) - ν_k(w+r)·rate(w+r→w).
pub fn detailed_balance_residual(w: i64, r: i64, params: &DiffChainParams) -> f64 {
    stationary_weight(w, params.k) * params.rate(w, r)
        - stationary_weight(w + r, params.k) * params.rate(w + r, -r)
}

/// Exact realization of w_t started from w0.
pub fn simulate_path(w0: i64, params: &DiffChainParams, t: f64, rng: &mut Rng) -> i64 {
    let mut path = None;
    simulate(w0, params, t, rng, &mut path)
}

/// As [`simulate_path`], returning the jump times and states (starting with
/// (0, w0)).
pub fn simulate_path_recorded(w0: i64, params: &DiffChainParams, t: f64, rng: &mut Rng) -> Vec<(f64, i64)> {
    let mut path = Some(vec![(0.0, w0)]);
    simulate(w0, params, t, rng, &mut path);
    path.unwrap_or_default()
}

fn simulate(w0: i64, params: &DiffChainParams, t: f64, rng: &mut Rng, path: &mut Option<Vec<(f64, i64)>>) -> i64 {
    let jumps = params.kernel.jumps();
    let mut w = w0;
    let mut now = 0.0;
    let mut rates = vec![0.0; jumps.len()];
    loop {
        let mut total = 0.0;
        for (slot, &r) in rates.iter_mut().zip(&jumps) {
            *slot = params.rate(w, r);
            total += *slot;
        }
        let e: f64 = Exp1.sample(rng);
        now += e / total;
        if now > t {
            return w;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = jumps.len() - 1;
        for (i, q) in rates.iter().enumerate() {
            if u < *q {
                pick = i;
                break;
            }
            u -= q;
        }
        w += jumps[pick];
        if let Some(p) = path.as_mut() {
            p.push((now, w));
        }
    }
}

/// Tail probability targeted by [`TruncationWindow::auto`].
pub const WINDOW_TAIL: f64 = 1e-10;

/// State space {-M, ..., M} with reflecting boundary (jumps leaving the
/// window are suppressed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationWindow {
    pub m: usize,
}

impl TruncationWindow {
    pub fn new(m: usize) -> Self {
        TruncationWindow { m }
    }

    /// Smallest x with the Bennett bound 2exp(-(V/R²)h(Rx/V)) on P(|S_t| ≥ x)
    /// below [`WINDOW_TAIL`], where S is the free walk (jumps bounded by R,
    /// variance V = 4kχt), plus R. Gaussian-like (≈ 6.3√V) for large V,
    /// Poisson-like for small V, where a fixed multiple of √V is too narrow.
    pub fn auto(params: &DiffChainParams, t: f64) -> Self {
        let r = params.kernel.range();
        let rf = r as f64;
        let v = 4.0 * params.k * params.kernel.chi() * t;
        let m = if v > 0.0 {
            let h = |u: f64| (1.0 + u) * (1.0 + u).ln() - u;
            let target = (2.0 / WINDOW_TAIL).ln();
            let exponent = |x: f64| v / (rf * rf) * h(rf * x / v);
            let mut hi = (2.0 * target * v).sqrt().max(rf);
            while exponent(hi) < target {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if exponent(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi.ceil() as usize + r
        } else {
            r
        };
        TruncationWindow { m: m.max(2 * r + 1) }
    }

    pub fn doubled(&self) -> Self {
        TruncationWindow { m: 2 * self.m }
    }
}

/// Poisson(λ) weights w_n for n in [first, first + len), with both tails below
/// `eps`/2. Computed outward from the mode by the ratio recursion.
#[derive(Debug, Clone)]
pub struct PoissonWeights {
    pub first: usize,
    pub weights: Vec<f64>,
    pub tail_bound: f64,
}

pub fn poisson_weights(lambda: f64, eps: f64) -> PoissonWeights {
    if lambda <= 0.0 {
        return PoissonWeights { first: 0, weights: vec![1.0], tail_bound: 0.0 };
    }
    let mode = lambda.floor() as usize;
    let w_mode = (-lambda + mode as f64 * lambda.ln() - ln_gamma(mode as f64 + 1.0)).exp();
    let mut left = Vec::new();
    let mut n = mode;
    let mut w = w_mode;
    let mut left_tail = 0.0;
    while n > 0 {
        let ratio = n as f64 / lambda;
        let bound = w * ratio / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if ratio < 1.0 && bound < eps / 2.0 {
            left_tail = bound;
            break;
        }
        w *= ratio;
        n -= 1;
        left.push(w);
    }
    let first = n;
    let mut weights: Vec<f64> = left.into_iter().rev().collect();
    weights.push(w_mode);
    let mut n = mode;
    let mut w = w_mode;
    let right_tail;
    loop {
        let ratio = lambda / (n as f64 + 1.0);
        let bound = w * ratio / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if ratio < 1.0 && bound < eps / 2.0 {
            right_tail = bound;
            break;
        }
        w *= ratio;
        n += 1;
        weights.push(w);
    }
    // the mode weight carries the rounding of -λ + n ln λ - ln n!, which is
    // O(λ·1e-16); normalizing removes it
    let tail_bound = left_tail + right_tail;
    let total: f64 = weights.iter().sum();
    let norm = (1.0 - tail_bound) / total;
    for w in &mut weights {
        *w *= norm;
    }
    PoissonWeights { first, weights, tail_bound }
}

/// Uniformized chain on the window: P = I + Q/Λ stored as a diagonal and one
/// coefficient band per jump.
struct Uniformized {
    m: usize,
    pad: usize,
    lambda: f64,
    jumps: Vec<i64>,
    diag: Vec<f64>,
    bands: Vec<Vec<f64>>,
}

impl Uniformized {
    fn new(params: &DiffChainParams, window: TruncationWindow) -> Self {
        let m = window.m as i64;
        let jumps = params.kernel.jumps();
        let pad = params.kernel.range();
        let size = 2 * window.m + 1;
        let mut out_rate = vec![0.0; size];
        let mut bands = vec![vec![0.0; size]; jumps.len()];
        for (i, slot) in out_rate.iter_mut().enumerate() {
            let w = i as i64 - m;
            for (b, &r) in jumps.iter().enumerate() {
                if (w + r).abs() <= m {
                    let q = params.rate(w, r);
                    bands[b][i] = q;
                    *slot += q;
                }
            }
        }
        let lambda = out_rate.iter().cloned().fold(0.0, f64::max);
        let diag = out_rate.iter().map(|q| 1.0 - q / lambda).collect();
        for band in &mut bands {
            for q in band.iter_mut() {
                *q /= lambda;
            }
        }
        Uniformized { m: window.m, pad, lambda, jumps, diag, bands }
    }

    fn size(&self) -> usize {
        2 * self.m + 1
    }

    /// Σ_n Pois(n; Λt) Pⁿ v, applied to v = e_{start}, either as a column
    /// (backward, v ↦ Pv) or as a row (forward, π ↦ πP).
    fn mix(&self, start: usize, t: f64, forward: bool) -> (Vec<f64>, f64) {
        let size = self.size();
        let pad = self.pad;
        let pw = poisson_weights(self.lambda * t, POISSON_TAIL);
        let mut cur = vec![0.0; size + 2 * pad];
        let mut next = vec![0.0; size + 2 * pad];
        let mut acc = vec![0.0; size];
        cur[pad + start] = 1.0;
        let last = pw.first + pw.weights.len() - 1;
        let r = self.jumps.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(1);
        for n in 0..=last {
            if n >= pw.first {
                let wn = pw.weights[n - pw.first];
                for (a, c) in acc.iter_mut().zip(&cur[pad..pad + size]) {
                    *a += wn * c;
                }
            }
            if n == last {
                break;
            }
            // support of the iterate after n steps
            let lo = start.saturating_sub(n * r + r);
            let hi = (start + n * r + r).min(size - 1);
            if forward {
                for i in lo..=hi {
                    next[pad + i] = self.diag[i] * cur[pad + i];
                }
                for (band, &d) in self.bands.iter().zip(&self.jumps) {
                    for i in lo..=hi {
                        let src = i as i64 - d;
                        if src >= 0 && (src as usize) < size {
                            let src = src as usize;
                            next[pad + i] += band[src] * cur[pad + src];
                        }
                    }
                }
            } else {
                for i in lo..=hi {
                    next[pad + i] = self.diag[i] * cur[pad + i];
                }
                for (band, &d) in self.bands.iter().zip(&self.jumps) {
                    let off = (pad as i64 + d) as usize;
                    let src = &cur[off + lo..off + hi + 1];
                    for ((nx, b), s) in next[pad + lo..pad + hi + 1].iter_mut().zip(&band[lo..=hi]).zip(src) {
                        *nx += b * s;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        (acc, pw.tail_bound)
    }
}

/// p_t(w, 0) for every w in a window, with an error bound.
#[derive(Debug, Clone)]
pub struct Column {
    pub m: usize,
    /// values[w + m] = p_t(w, 0)
    pub values: Vec<f64>,
    pub error_bound: f64,
}

impl Column {
    pub fn get(&self, w: i64) -> f64 {
        if w.unsigned_abs() as usize > self.m {
            0.0
        } else {
            self.values[(w + self.m as i64) as usize]
        }
    }
}

/// p_t(·, 0) on the window, computed by uniformization; the window is
/// validated by recomputing with 2M and comparing on {-M, ..., M}.
pub fn transition_column(params: &DiffChainParams, t: f64, window: TruncationWindow, tolerance: f64) -> Result<Column> {
    if window.m <= params.kernel.range() {
        return Err(Error::InvalidParameter("window M must exceed the kernel range".into()));
    }
    let coarse = column_on(params, t, window);
    let fine = column_on(params, t, window.doubled());
    let m = window.m;
    let change = (0..coarse.0.len())
        .map(|i| (coarse.0[i] - fine.0[i + m]).abs())
        .fold(0.0, f64::max);
    if change > tolerance {
        return Err(Error::WindowTooSmall { change, tolerance });
    }
    Ok(Column { m, values: fine.0[m..m + 2 * m + 1].to_vec(), error_bound: change + fine.1 })
}

fn column_on(params: &DiffChainParams, t: f64, window: TruncationWindow) -> (Vec<f64>, f64) {
    let u = Uniformized::new(params, window);
    u.mix(window.m, t, false)
}

/// Result of [`transition_prob`].
#[derive(Debug, Clone, Copy)]
pub struct TransitionProb {
    pub p: f64,
    pub error_bound: f64,
}

/// P(w_t = target | w_0 = w0) by uniformization with the 2M check.
pub fn transition_prob(
    w0: i64,
    target: i64,
    params: &DiffChainParams,
    t: f64,
    window: TruncationWindow,
    tolerance: f64,
) -> Result<TransitionProb> {
    let m = window.m as i64;
    if w0.abs() > m || target.abs() > m {
        return Err(Error::InvalidParameter(format!("|w0| and |target| must be at most M = {m}")));
    }
    let row = |win: TruncationWindow| {
        let u = Uniformized::new(params, win);
        let (pi, tail) = u.mix((w0 + win.m as i64) as usize, t, true);
        (pi[(target + win.m as i64) as usize], tail)
    };
    let (a, _) = row(window);
    let (b, tail) = row(window.doubled());
    let change = (a - b).abs();
    if change > tolerance {
        return Err(Error::WindowTooSmall { change, tolerance });
    }
    Ok(TransitionProb { p: b, error_bound: change + tail })
}

/// Law of w_t from w0 on the reflected window (index w + M), with the
/// Poisson truncation bound.
pub fn distribution(w0: i64, params: &DiffChainParams, t: f64, window: TruncationWindow) -> (Vec<f64>, f64) {
    let u = Uniformized::new(params, window);
    u.mix((w0 + window.m as i64) as usize, t, true)
}

/// Condensive scaling: N, γ and the kernel.
#[derive(Debug, Clone)]
pub struct ScaledDiffParams {
    pub n: u32,
    pub gamma: f64,
    pub kernel: FiniteRangeKernel,
}

impl ScaledDiffParams {
    pub fn new(n: u32, gamma: f64, kernel: FiniteRangeKernel) -> Result<Self> {
        if n == 0 || !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter("need N ≥ 1 and γ > 0".into()));
        }
        kernel.validate()?;
        Ok(ScaledDiffParams { n, gamma, kernel })
    }

    /// k_N = 1/(√2·γ·N).
    pub fn k_n(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.gamma * self.n as f64)
    }

    /// α(N, t) = γN³t/√2.
    pub fn alpha(&self, t: f64) -> f64 {
        let n = self.n as f64;
        self.gamma * n * n * n * t / std::f64::consts::SQRT_2
    }

    pub fn chain(&self) -> DiffChainParams {
        DiffChainParams { k: self.k_n(), kernel: self.kernel.clone(), inclusion: true }
    }

    pub fn window(&self, t: f64) -> TruncationWindow {
        TruncationWindow::auto(&self.chain(), self.alpha(t))
    }

    /// Lattice point N·v of a grid point v ∈ (1/N)ℤ (rounded).
    pub fn lattice(&self, v: f64) -> i64 {
        (v * self.n as f64).round() as i64
    }
}

/// p_{α(N,t)}(N·v, 0) for the chain with k_N.
pub fn scaled_transition(v: f64, t: f64, sp: &ScaledDiffParams, window: TruncationWindow, tolerance: f64) -> Result<f64> {
    let w = sp.lattice(v);
    if t == 0.0 {
        return Ok(if w == 0 { 1.0 } else { 0.0 });
    }
    let col = transition_column(&sp.chain(), sp.alpha(t), window, tolerance)?;
    Ok(col.get(w))
}

/// The whole profile w ↦ p_{α(N,t)}(w, 0) of the scaled chain.
pub fn scaled_column(t: f64, sp: &ScaledDiffParams, tolerance: f64) -> Result<Column> {
    scaled_column_covering(t, sp, 0, tolerance)
}

/// As [`scaled_column`] with the window widened to at least `min_m`.
pub fn scaled_column_covering(t: f64, sp: &ScaledDiffParams, min_m: usize, tolerance: f64) -> Result<Column> {
    let window = TruncationWindow::new(sp.window(t).m.max(min_m));
    if t == 0.0 {
        let mut values = vec![0.0; 2 * window.m + 1];
        values[window.m] = 1.0;
        return Ok(Column { m: window.m, values, error_bound: 0.0 });
    }
    transition_column(&sp.chain(), sp.alpha(t), window, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{par_replicas, rng};
    use crate::stats::{ks_critical, ks_statistic};
    use proptest::prelude::*;
    use rand_distr::Poisson;

    fn nn(k: f64) -> DiffChainParams {
        DiffChainParams::new(k, FiniteRangeKernel::nearest_neighbor()).unwrap()
    }

    #[test]
    fn jump_rate_examples() {
        let p = nn(1.0);
        assert_eq!(p.jump_rates(0), vec![(-1, 1.0), (1, 1.0)]);
        assert_eq!(p.jump_rates(1), vec![(-1, 2.0), (1, 1.0)]);
        let r2 = DiffChainParams::new(0.3, FiniteRangeKernel::range_two()).unwrap();
        assert!((r2.total_rate(7) - 2.0 * 0.3 * r2.kernel.total_weight()).abs() < 1e-15);
    }

    #[test]
    fn stationary_weights() {
        assert_eq!(stationary_weight(0, 1.0), 2.0);
        assert_eq!(stationary_weight(3, 1.0), 1.0);
        assert_eq!(stationary_weight(-2, 0.1), 1.0);
    }

    #[test]
    fn detailed_balance_exhaustive() {
        for kernel in [FiniteRangeKernel::nearest_neighbor(), FiniteRangeKernel::range_two()] {
            for k in [0.1, 1.0, 10.0] {
                let p = DiffChainParams::new(k, kernel.clone()).unwrap();
                let rr = 2 * kernel.range() as i64;
                for w in -rr..=rr {
                    for r in kernel.jumps() {
                        let scale = stationary_weight(w, k) * p.rate(w, r);
                        let res = detailed_balance_residual(w, r, &p);
                        assert!(res.abs() <= 1e-14 * scale.max(1e-300), "w={w} r={r} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn poisson_weights_cover_mass() {
        for lam in [0.3, 5.0, 80.0, 12_345.6] {
            let pw = poisson_weights(lam, 1e-12);
            let s: f64 = pw.weights.iter().sum();
            assert!((1.0 - s).abs() < 1e-11, "λ={lam}: {s}");
            assert!(pw.tail_bound < 1e-12);
        }
    }

    #[test]
    fn zero_time_is_indicator() {
        let p = nn(1.0);
        let w = TruncationWindow::new(10);
        assert_eq!(transition_prob(0, 0, &p, 0.0, w, 1e-9).unwrap().p, 1.0);
        assert_eq!(transition_prob(2, 0, &p, 0.0, w, 1e-9).unwrap().p, 0.0);
        let mut r = rng(0);
        assert_eq!(simulate_path(3, &p, 0.0, &mut r), 3);
    }

    #[test]
    fn rows_are_stochastic_and_column_matches_rows() {
        let p = DiffChainParams::new(0.4, FiniteRangeKernel::range_two()).unwrap();
        let win = TruncationWindow::new(30);
        for w0 in [-3, 0, 2, 11] {
            let (pi, _) = distribution(w0, &p, 2.5, win);
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let col = column_on(&p, 2.5, win).0;
        for w0 in [-3i64, 0, 2, 11] {
            let (pi, _) = distribution(w0, &p, 2.5, win);
            assert!((pi[30] - col[(w0 + 30) as usize]).abs() < 1e-13);
        }
    }

    #[test]
    fn column_is_symmetric() {
        let p = nn(0.2);
        let col = transition_column(&p, 40.0, TruncationWindow::auto(&p, 40.0), 1e-8).unwrap();
        for w in 0..col.m as i64 {
            assert!((col.get(w) - col.get(-w)).abs() < 1e-12);
        }
    }

    #[test]
    fn auto_window_passes_doubling_check() {
        for kernel in [FiniteRangeKernel::nearest_neighbor(), FiniteRangeKernel::range_two()] {
            for k in [0.01, 0.5, 5.0] {
                let p = DiffChainParams::new(k, kernel.clone()).unwrap();
                for t in [0.01, 0.3, 2.0, 40.0] {
                    let w = TruncationWindow::auto(&p, t);
                    assert!(transition_column(&p, t, w, 1e-8).is_ok(), "k={k} t={t} R={} M={}", kernel.range(), w.m);
                }
            }
        }
    }

    #[test]
    fn window_too_small_is_reported() {
        let p = nn(1.0);
        let e = transition_prob(0, 0, &p, 50.0, TruncationWindow::new(2), 1e-9);
        assert!(matches!(e, Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn uniformization_matches_monte_carlo() {
        let p = nn(1.0);
        let win = TruncationWindow::auto(&p, 1.0);
        let reps = 40_000;
        for w0 in [0i64, 1, 2] {
            let exact = transition_prob(w0, 0, &p, 1.0, win, 1e-9).unwrap().p;
            let hits = par_replicas(reps, 100 + w0 as u64, |_, r| simulate_path(w0, &p, 1.0, r) == 0)
                .into_iter()
                .filter(|h| *h)
                .count();
            let phat = hits as f64 / reps as f64;
            let se = (exact * (1.0 - exact) / reps as f64).sqrt();
            assert!((phat - exact).abs() < 4.0 * se, "w0={w0}: {phat} vs {exact}");
        }
    }

    fn free_walk(w0: i64, k: f64, kernel: &FiniteRangeKernel, t: f64, r: &mut crate::rng::Rng) -> i64 {
        // Poissonized jump count, then i.i.d. steps with law p(r)/Σp
        let lam = 2.0 * k * kernel.total_weight() * t;
        let n = Poisson::new(lam).unwrap().sample(r) as u64;
        let jumps = kernel.jumps();
        let total = kernel.total_weight();
        let mut w = w0;
        for _ in 0..n {
            let mut u = r.random::<f64>() * total;
            for &d in &jumps {
                let q = kernel.p(d);
                if u < q {
                    w += d;
                    break;
                }
                u -= q;
            }
        }
        w
    }

    #[test]
    fn without_inclusion_is_free_walk() {
        let kernel = FiniteRangeKernel::range_two();
        let p = DiffChainParams::new(0.7, kernel.clone()).unwrap().without_inclusion();
        let n = 20_000;
        let a: Vec<f64> = par_replicas(n, 1, |_, r| simulate_path(1, &p, 2.0, r) as f64);
        let b: Vec<f64> = par_replicas(n, 2, |_, r| free_walk(1, 0.7, &kernel, 2.0, r) as f64);
        assert!(ks_statistic(&a, &b) < ks_critical(a.len(), b.len(), 1e-4));
    }

    #[test]
    fn reflection_symmetry_of_paths() {
        let p = nn(0.5);
        let n = 20_000;
        let a: Vec<f64> = par_replicas(n, 3, |_, r| simulate_path(2, &p, 1.5, r) as f64);
        let b: Vec<f64> = par_replicas(n, 4, |_, r| -simulate_path(-2, &p, 1.5, r) as f64);
        assert!(ks_statistic(&a, &b) < ks_critical(a.len(), b.len(), 1e-4));
    }

    #[test]
    fn scaled_parameters() {
        let sp = ScaledDiffParams::new(10, 1.0, FiniteRangeKernel::nearest_neighbor()).unwrap();
        assert!((sp.k_n() - 1.0 / (std::f64::consts::SQRT_2 * 10.0)).abs() < 1e-15);
        assert!((sp.alpha(0.5) - 500.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
        let w = sp.window(0.5);
        assert_eq!(scaled_transition(0.0, 0.0, &sp, w, 1e-9).unwrap(), 1.0);
        assert_eq!(scaled_transition(0.3, 0.0, &sp, w, 1e-9).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn transition_symmetric_in_start(w0 in 0i64..6, k in 0.05f64..3.0, t in 0.01f64..4.0) {
            let p = nn(k);
            let win = TruncationWindow::new(40);
            let a = transition_prob(w0, 0, &p, t, win, 1e-6).unwrap().p;
            let b = transition_prob(-w0, 0, &p, t, win, 1e-6).unwrap().p;
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn detailed_balance_random_k(k in 1e-3f64..1e3, w in -6i64..6) {
            let p = DiffChainParams::new(k, FiniteRangeKernel::range_two()).unwrap();
            for r in p.kernel.jumps() {
                let scale = stationary_weight(w, k) * p.rate(w, r);
                prop_assert!(detailed_balance_residual(w, r, &p).abs() <= 1e-14 * scale);
            }
        }
    }
}
