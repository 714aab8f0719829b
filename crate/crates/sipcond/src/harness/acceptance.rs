//! The acceptance suite: thirteen numbered checks, each returning an
//! [`Outcome`] with a one-line verdict, wall time and optional informational
//! lines. Failures are reported, never thrown.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use crate::difference_chain::{
    detailed_balance_residual, scaled_column, simulate_path, stationary_weight, transition_column, transition_prob,
    Column, DiffChainParams, ScaledDiffParams, TruncationWindow,
};
use crate::dirichlet_forms::{
    dual_form_rw, form_e_n_literal, form_r_n_literal, inclusion_gap, mosco2_sequence, potential_kernel, FormParams,
    GridFunction,
};
use crate::error::Result;
use crate::fluctuation_field::{finite_variance_from_column, limit_variance, limit_variance_alt, limit_variance_with, support_sites, VarianceInputs};
use crate::harness::table::{Cell, ResultTable};
use crate::kernel::FiniteRangeKernel;
use crate::rng::{par_replicas, rng, DEFAULT_SEED};
use crate::sip_lattice::{duality_check, sample_poisson_product, simulate_in_place, Configuration, DualConfiguration, SipParams};
use crate::stats::MeanVar;
use crate::sticky_bm::StickyKernel;
use crate::test_function::TestFunction;

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// The measured quantities behind the verdict.
    pub detail: String,
    /// Informational lines that do not enter the verdict.
    pub info: Vec<String>,
    pub wall_s: f64,
}

impl Outcome {
    /// The single verdict line.
    pub fn verdict_line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.wall_s
        )
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict_line())?;
        for line in &self.info {
            write!(f, "\n               info: {line}")?;
        }
        Ok(())
    }
}

/// Settings shared by the criteria. `gamma` drives the chains and forms,
/// `reference_gamma` the closed-form targets they are compared with; the two
/// coincide except in fixtures that force a mismatch.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub seed: u64,
    pub gamma: f64,
    pub reference_gamma: f64,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture { seed: DEFAULT_SEED, gamma: 1.0, reference_gamma: 1.0 }
    }
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> Result<(bool, String, Vec<String>)>) -> Outcome {
    let start = Instant::now();
    let (passed, detail, info) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}"), Vec::new()),
    };
    Outcome { id, title, passed, detail, info, wall_s: start.elapsed().as_secs_f64() }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Columns p_{α(N,t)}(·, 0) of the scaled chain, shared between criteria.
fn cached_column(n: u32, t: f64, gamma: f64, tolerance: f64) -> Result<Arc<Column>> {
    type Slot = Arc<OnceLock<std::result::Result<Arc<Column>, String>>>;
    type Cache = Mutex<HashMap<(u32, u64, u64), Slot>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = (n, t.to_bits(), gamma.to_bits());
    let slot = {
        let mut map = CACHE.get_or_init(Default::default).lock().expect("column cache poisoned");
        map.entry(key).or_default().clone()
    };
    let r = slot.get_or_init(|| {
        ScaledDiffParams::new(n, gamma, FiniteRangeKernel::nearest_neighbor())
            .and_then(|sp| scaled_column(t, &sp, tolerance))
            .map(Arc::new)
            .map_err(|e| e.to_string())
    });
    r.clone().map_err(crate::error::Error::Tolerance)
}

/// 1. atom + ∫density = 1 within 1e-8 for γ ∈ {0.5, 1, 2}, t ∈ {0.1, 1, 10}.
pub fn criterion_1(_: &Fixture) -> Outcome {
    timed(1, "sticky kernel normalization", || {
        let mut worst: f64 = 0.0;
        for g in [0.5, 1.0, 2.0] {
            for t in [0.1, 1.0, 10.0] {
                worst = worst.max(StickyKernel::printed(g).normalization_error(t)?.abs());
            }
        }
        Ok((worst <= 1e-8, format!("max |mass + ∫density - 1| = {worst:.2e} over 9 cases (tol 1e-8)"), vec![]))
    })
}

/// 2. Chapman-Kolmogorov at the atom with weight √2γ, γ = 1.
pub fn criterion_2(fx: &Fixture) -> Outcome {
    timed(2, "semigroup identity at the atom", || {
        let pairs = [(0.5, 0.5), (0.2, 1.0)];
        let residuals = |k: StickyKernel| -> Result<Vec<f64>> {
            pairs.iter().map(|&(s, t)| Ok(k.semigroup_residual(s, t)?.abs())).collect()
        };
        let printed = residuals(StickyKernel::printed(fx.reference_gamma))?;
        let reversible = residuals(StickyKernel::reversible(fx.reference_gamma))?;
        let worst = printed.iter().cloned().fold(0.0, f64::max);
        Ok((
            worst <= 1e-6,
            format!("residuals {} for (s,t) = (0.5,0.5), (0.2,1.0) (tol 1e-6)", fmt_list(&printed)),
            vec![format!("kernel with stickiness √2γ (reversible measure dx + √2γδ₀): residuals {}", fmt_list(&reversible))],
        ))
    })
}

/// 3. Detailed balance of the difference chain, exhaustively near the origin.
pub fn criterion_3(_: &Fixture) -> Outcome {
    timed(3, "difference-chain detailed balance", || {
        let mut worst: f64 = 0.0;
        let mut cases = 0;
        for kernel in [FiniteRangeKernel::nearest_neighbor(), FiniteRangeKernel::range_two()] {
            let r = kernel.range() as i64;
            for k in [0.1, 1.0, 10.0] {
                let params = DiffChainParams::new(k, kernel.clone())?;
                for w in -2 * r..=2 * r {
                    for &jump in &kernel.jumps() {
                        let scale = (stationary_weight(w, k) * params.rate(w, jump)).abs().max(f64::MIN_POSITIVE);
                        worst = worst.max(detailed_balance_residual(w, jump, &params).abs() / scale);
                        cases += 1;
                    }
                }
            }
        }
        Ok((worst <= 1e-14, format!("max relative residual {worst:.2e} over {cases} cases (tol 1e-14)"), vec![]))
    })
}

/// 4. Uniformization against 1e5 simulated paths, k = 1, t = 1.
pub fn criterion_4(fx: &Fixture) -> Outcome {
    timed(4, "uniformization vs Monte Carlo", || {
        let params = DiffChainParams::new(1.0, FiniteRangeKernel::nearest_neighbor())?;
        let t = 1.0;
        let reps = 100_000;
        let window = TruncationWindow::auto(&params, t);
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, w0) in [0i64, 1, 2].into_iter().enumerate() {
            let exact = transition_prob(w0, 0, &params, t, window, 1e-8)?.p;
            let hits = par_replicas(reps, fx.seed ^ (i as u64 + 1), |_, r| {
                if simulate_path(w0, &params, t, r) == 0 {
                    1.0
                } else {
                    0.0
                }
            });
            let mv: MeanVar = hits.into_iter().collect();
            let z = (mv.mean() - exact) / mv.se();
            ok &= z.abs() <= 4.0;
            parts.push(format!("w0={w0}: p={exact:.5} p̂={:.5} z={z:+.2}", mv.mean()));
        }
        Ok((ok, format!("{} (tol 4 SE, 1e5 replicas)", parts.join("; ")), vec![]))
    })
}

const SCHEDULE: [u32; 4] = [25, 50, 100, 200];

/// 5. p_{α(N,t)}(0, 0) against the closed-form atom, γ = 1, t = 0.5.
pub fn criterion_5(fx: &Fixture) -> Outcome {
    timed(5, "convergence to the sticky atom", || {
        let t = 0.5;
        let target = StickyKernel::printed(fx.reference_gamma).mass(t);
        let rev = StickyKernel::reversible(fx.reference_gamma).mass(t);
        let mut p = Vec::new();
        for n in SCHEDULE {
            p.push(cached_column(n, t, fx.gamma, 1e-8)?.get(0));
        }
        let rel: Vec<f64> = p.iter().map(|x| (x - target).abs() / target).collect();
        let rel_rev: Vec<f64> = p.iter().map(|x| (x - rev).abs() / rev).collect();
        let ok = strictly_decreasing(&rel) && rel[3] <= 0.10;
        Ok((
            ok,
            format!(
                "p(0,0) = {} vs e^{{4γ²t}}erfc(2γ√t) = {target:.5}; relative errors {} (need decreasing, ≤ 10% at N=200)",
                fmt_list(&p),
                fmt_list(&rel)
            ),
            vec![format!("against the stickiness-√2γ atom {rev:.5}: relative errors {}", fmt_list(&rel_rev))],
        ))
    })
}

/// 6. p_{α(N,t)}(⌊vN⌋, 0) against √2γ·density(v, t) for v ∈ {0.25, 0.5}.
pub fn criterion_6(fx: &Fixture) -> Outcome {
    timed(6, "off-atom convergence", || {
        let t = 0.5;
        let printed = StickyKernel::printed(fx.reference_gamma);
        let reversible = StickyKernel::reversible(fx.reference_gamma);
        let mut ok = true;
        let mut parts = Vec::new();
        let mut info = Vec::new();
        for v in [0.25, 0.5] {
            let target = printed.hit_zero_prob(v, t);
            let target_rev = reversible.hit_zero_prob(v, t);
            let mut err = Vec::new();
            let mut err_rev = Vec::new();
            for n in SCHEDULE {
                let w = (v * n as f64).floor() as i64;
                let p = cached_column(n, t, fx.gamma, 1e-8)?.get(w);
                err.push((p - target).abs());
                err_rev.push((p - target_rev).abs());
            }
            ok &= strictly_decreasing(&err);
            parts.push(format!("v={v}: target {target:.5}, errors {}", fmt_list(&err)));
            info.push(format!("v={v}: stickiness-√2γ target {target_rev:.5}, errors {}", fmt_list(&err_rev)));
        }
        Ok((ok, format!("{} (need decreasing)", parts.join("; ")), info))
    })
}

/// 7. Internal consistency of the limit variance and its endpoint limits.
pub fn criterion_7(_: &Fixture) -> Outcome {
    timed(7, "limit variance consistency", || {
        let rho = 1.0;
        let phi = TestFunction::raised_cosine(0.0, 1.0);
        let mut worst: f64 = 0.0;
        for g in [0.5, 1.0, 2.0] {
            for t in [0.1, 1.0, 10.0] {
                let a = limit_variance(t, &phi, rho, g)?.value;
                let b = limit_variance_alt(t, &phi, rho, g)?.value;
                worst = worst.max((a - b).abs());
            }
        }
        let mut small: f64 = 0.0;
        for g in [0.5, 1.0, 2.0] {
            let scale = SQRT_2 * g * rho * rho * phi.l2_norm_sq();
            small = small.max(limit_variance(1e-6, &phi, rho, g)?.value.abs() / scale);
        }
        // at t = 1e3 the relative deficit is about m(t) + (∫φ)²/(√(2πt)∫φ²);
        // the narrow bump at γ = 2 keeps it below 1%
        let narrow = TestFunction::raised_cosine(0.0, 0.25);
        let large = |g: f64, f: &TestFunction| -> Result<f64> {
            let target = SQRT_2 * g * rho * rho * f.l2_norm_sq();
            Ok((limit_variance(1e3, f, rho, g)?.value - target).abs() / target)
        };
        let large_dev = large(2.0, &narrow)?;
        let ok = worst <= 1e-6 && small <= 1e-4 && large_dev <= 0.01;
        let mut info = Vec::new();
        for (g, f, label) in [(0.5, &phi, "a=1"), (1.0, &phi, "a=1"), (2.0, &phi, "a=1"), (0.5, &narrow, "a=0.25"), (1.0, &narrow, "a=0.25")] {
            info.push(format!("t=1e3 relative deviation at γ={g}, halfwidth {label}: {:.3e}", large(g, f)?));
        }
        Ok((
            ok,
            format!(
                "max |formula - alt| = {worst:.2e} on 3×3 grid (tol 1e-6); t=1e-6: {small:.2e}·√2γρ²∫φ² (tol 1e-4); t=1e3, γ=2, halfwidth 0.25: relative deviation {large_dev:.3e} (tol 1e-2)"
            ),
            info,
        ))
    })
}

/// 8. finite_variance(N) approaches limit_variance over N ∈ {20, 40, 80}.
pub fn criterion_8(fx: &Fixture) -> Outcome {
    timed(8, "finite-N variance converges to the limit", || {
        let (t, rho) = (0.1, 1.0);
        let phi = TestFunction::raised_cosine(0.0, 1.0);
        let kernel = FiniteRangeKernel::nearest_neighbor();
        let inputs = VarianceInputs::poisson(rho)?;
        let lim = limit_variance(t, &phi, rho, fx.reference_gamma)?.value;
        let lim_rev = limit_variance_with(t, &phi, rho, &StickyKernel::reversible(fx.reference_gamma))?.value;
        let mut vals = Vec::new();
        for n in [20u32, 40, 80] {
            let sp = ScaledDiffParams::new(n, fx.gamma, kernel.clone())?;
            let col = crate::difference_chain::scaled_column_covering(t, &sp, support_sites(&phi, n) + 1, 1e-8)?;
            vals.push(finite_variance_from_column(n, &phi, inputs, fx.gamma, &col)?.value);
        }
        let err: Vec<f64> = vals.iter().map(|v| (v - lim).abs()).collect();
        let err_rev: Vec<f64> = vals.iter().map(|v| (v - lim_rev).abs()).collect();
        Ok((
            strictly_decreasing(&err),
            format!("finite {} vs limit {lim:.6}; errors {} (need decreasing)", fmt_list(&vals), fmt_list(&err)),
            vec![format!("against the limit with stickiness √2γ ({lim_rev:.6}): errors {}", fmt_list(&err_rev))],
        ))
    })
}

/// 9. Duality by Monte Carlo, and the two-point covariance formula checked
///    against the particle system on a torus of 64 sites.
pub fn criterion_9(fx: &Fixture) -> Outcome {
    timed(9, "duality oracle", || {
        let reps = 100_000;
        let kernel = FiniteRangeKernel::nearest_neighbor();
        // two dual particles
        let l = 12;
        let params = SipParams::new(0.8, kernel.clone(), l)?;
        let eta = Configuration::from_occupancies(vec![2, 0, 1, 3, 0, 0, 1, 2, 0, 1, 0, 0]);
        let xi = DualConfiguration::new(vec![2, 3]);
        let d = duality_check(&xi, &eta, &params, 0.4, reps, fx.seed)?;
        let z_dual = d.z_score();

        // covariance, Poisson(ρ) start, k = 1, t = 1
        let (k, rho, t, l) = (1.0, 1.0, 1.0, 64usize);
        let sigma = rho * rho;
        let sip = SipParams::new(k, kernel.clone(), l)?;
        let lags = [0usize, 1, 2];
        let samples = par_replicas(reps, fx.seed ^ 0x9e37, |_, r| {
            let mut c = sample_poisson_product(rho, l, r);
            simulate_in_place(&mut c, &sip, t, r);
            let occ = c.occupancies();
            lags.map(|d| {
                (0..l).map(|x| (occ[x] as f64 - rho) * (occ[(x + d) % l] as f64 - rho)).sum::<f64>() / l as f64
            })
        });
        let chain = DiffChainParams::new(k, kernel)?;
        let col = transition_column(&chain, t, TruncationWindow::auto(&chain, t), 1e-8)?;
        let mut ok = z_dual <= 4.0;
        let mut parts = vec![format!("E[D(ξ,η_t)] = {:.5} vs E[D(ξ_t,η)] = {:.5}, z = {z_dual:.2}", d.lhs.mean(), d.rhs.mean())];
        for (i, &lag) in lags.iter().enumerate() {
            let mv: MeanVar = samples.iter().map(|s| s[i]).collect();
            let same = if lag == 0 { 1.0 } else { 0.0 };
            let rhs = (1.0 + same / k) * (k * sigma / (k + 1.0) - rho * rho) * col.get(lag as i64)
                + same * (rho * rho / k + rho);
            let z = (mv.mean() - rhs) / mv.se();
            ok &= z.abs() <= 4.0;
            parts.push(format!("cov(x,x+{lag}) = {:.5} vs {rhs:.5}, z = {z:+.2}", mv.mean()));
        }
        Ok((ok, format!("{} (tol 4 SE, 1e5 replicas)", parts.join("; ")), vec![]))
    })
}

/// 10. ℰ_N(Ψ_N f) converges at first order to χ∫(f')².
pub fn criterion_10(fx: &Fixture) -> Outcome {
    timed(10, "Mosco-II recovery sequence", || {
        let f = TestFunction::raised_cosine(0.25, 1.0);
        let table = mosco2_sequence(&f, &[32, 64, 128, 256], fx.gamma, &FiniteRangeKernel::nearest_neighbor())?;
        let order = table.fitted_order(table.derived_limit);
        let rel = (table.extrapolated - table.derived_limit).abs() / table.derived_limit;
        let values: Vec<f64> = table.rows.iter().map(|r| r.e_psi).collect();
        Ok((
            (0.8..=1.2).contains(&order) && rel <= 0.01,
            format!(
                "ℰ_N(Ψ_N f) = {}; fitted order {order:.3} (need [0.8, 1.2]); extrapolated {:.6} vs χ∫f'² = {:.6}, rel {rel:.2e} (tol 1e-2)",
                fmt_list(&values),
                table.extrapolated,
                table.derived_limit
            ),
            vec![format!(
                "paper convention (χ/2)∫f'² = {:.6}; observed order from successive ratios {:.3}",
                table.paper_limit, table.observed_order
            )],
        ))
    })
}

fn random_grid(n: u32, m: usize, r: &mut crate::rng::Rng, mean_zero: bool) -> GridFunction {
    use rand::Rng as _;
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

/// 11. ℰ_N - ℛ_N equals the closed-form gap on random grid functions.
pub fn criterion_11(fx: &Fixture) -> Outcome {
    timed(11, "form domination identity", || {
        let kernel = FiniteRangeKernel::nearest_neighbor();
        let mut r = rng(fx.seed);
        let mut worst: f64 = 0.0;
        let mut worst_abs: f64 = 0.0;
        let mut min_gap = f64::INFINITY;
        for n in [16u32, 64] {
            let params = FormParams::new(fx.gamma, kernel.clone(), n)?;
            let reference = FormParams::new(fx.reference_gamma, kernel.clone(), n)?;
            for _ in 0..100 {
                let g = random_grid(n, n as usize, &mut r, false);
                let diff = form_e_n_literal(&g, &params) - form_r_n_literal(&g, &kernel);
                let gap = inclusion_gap(&g, &reference);
                worst = worst.max((diff - gap).abs() / gap.max(1.0));
                worst_abs = worst_abs.max((diff - gap).abs());
                min_gap = min_gap.min(gap);
            }
        }
        Ok((
            worst <= 1e-10 && min_gap >= 0.0,
            format!("max |ℰ_N - ℛ_N - gap|/max(gap, 1) = {worst:.2e} over 200 functions (tol 1e-10); min gap {min_gap:.3e}"),
            vec![format!("max absolute residual {worst_abs:.2e}; the gap itself reaches O(N²)")],
        ))
    })
}

/// 12. Legendre and Fourier routes of ℛ_N* agree; nonzero mean gives +∞.
pub fn criterion_12(fx: &Fixture) -> Outcome {
    timed(12, "dual form by two routes", || {
        let mut r = rng(fx.seed ^ 12);
        let mut worst: f64 = 0.0;
        let mut infinite = true;
        for kernel in [FiniteRangeKernel::nearest_neighbor(), FiniteRangeKernel::range_two()] {
            for n in [16u32, 64] {
                for _ in 0..100 {
                    let g = random_grid(n, n as usize, &mut r, true);
                    worst = worst.max(dual_form_rw(&g, &kernel)?.discrepancy());
                }
                for _ in 0..10 {
                    let g = random_grid(n, n as usize, &mut r, false);
                    let d = dual_form_rw(&g, &kernel)?;
                    infinite &= d.legendre == f64::INFINITY && d.fourier == f64::INFINITY;
                }
            }
        }
        Ok((
            worst <= 1e-8 && infinite,
            format!(
                "max |Legendre - Fourier| = {worst:.2e} on 400 mean-zero inputs (tol 1e-8); nonzero mean → +∞: {}",
                if infinite { "yes" } else { "no" }
            ),
            vec![],
        ))
    })
}

/// 13. a(n) = |n| for the nearest-neighbour walk, a(0) = 0 exactly.
pub fn criterion_13(_: &Fixture) -> Outcome {
    timed(13, "potential kernel", || {
        let kernel = FiniteRangeKernel::nearest_neighbor();
        let mut worst: f64 = 0.0;
        for n in -20i64..=20 {
            worst = worst.max((potential_kernel(n, &kernel)? - n.abs() as f64).abs());
        }
        let a0 = potential_kernel(0, &kernel)?;
        Ok((
            worst <= 1e-10 && a0 == 0.0,
            format!("max |a(n) - |n|| = {worst:.2e} for |n| ≤ 20 (tol 1e-10); a(0) = {a0}"),
            vec![],
        ))
    })
}

pub type Criterion = fn(&Fixture) -> Outcome;

/// All criteria in order.
pub const CRITERIA: [Criterion; 13] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
];

/// Runs the selected criteria (all when `ids` is empty) in order, printing
/// each outcome as it completes when `echo` is set.
pub fn run_suite(fx: &Fixture, ids: &[u32], echo: bool) -> Vec<Outcome> {
    let mut out = Vec::new();
    for (i, c) in CRITERIA.iter().enumerate() {
        let id = i as u32 + 1;
        if !ids.is_empty() && !ids.contains(&id) {
            continue;
        }
        let o = c(fx);
        if echo {
            println!("{o}");
        }
        out.push(o);
    }
    out
}

/// Machine-readable summary of a suite run.
pub fn summary_table(outcomes: &[Outcome]) -> ResultTable {
    let mut t = ResultTable::new("acceptance", &["criterion", "title", "verdict", "wall_time_s", "detail"]);
    for o in outcomes {
        t.push(vec![
            Cell::Int(o.id as i64),
            o.title.into(),
            if o.passed { "pass" } else { "fail" }.into(),
            o.wall_s.into(),
            o.detail.clone().into(),
        ]);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    t.meta("passed", format!("{passed}/{}", outcomes.len()));
    t
}
