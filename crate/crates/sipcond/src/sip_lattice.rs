//! The SIP on a periodic lattice: product-measure samplers, exact Gillespie
//! simulation and self-duality functions.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::kernel::FiniteRangeKernel;
use crate::rng::{par_replicas, Rng};
use crate::special::ln_gamma;
use crate::stats::MeanVar;
use crate::sumtree::SumTree;

/// Occupancies η_x on the torus {0, ..., L-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    occ: Vec<u64>,
    total: u64,
}

impl Configuration {
    pub fn empty(l: usize) -> Self {
        Configuration { occ: vec![0; l], total: 0 }
    }

    pub fn from_occupancies(occ: Vec<u64>) -> Self {
        let total = occ.iter().sum();
        Configuration { occ, total }
    }

    pub fn len(&self) -> usize {
        self.occ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn occupancies(&self) -> &[u64] {
        &self.occ
    }

    pub fn get(&self, x: usize) -> u64 {
        self.occ[x]
    }

    /// η^{ij}: moves one particle from i to j. Requires η_i > 0.
    pub fn move_particle(&mut self, i: usize, j: usize) {
        debug_assert!(self.occ[i] > 0);
        self.occ[i] -= 1;
        self.occ[j] += 1;
    }

    fn add(&mut self, x: usize) {
        self.occ[x] += 1;
        self.total += 1;
    }
}

/// Model parameters: diffusion parameter k, kernel, lattice size L.
#[derive(Debug, Clone)]
pub struct SipParams {
    pub k: f64,
    pub kernel: FiniteRangeKernel,
    pub l: usize,
}

impl SipParams {
    pub fn new(k: f64, kernel: FiniteRangeKernel, l: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
        }
        kernel.validate()?;
        if l <= 2 * kernel.range() {
            return Err(Error::InvalidParameter(format!("lattice size {l} must exceed 2R")));
        }
        Ok(SipParams { k, kernel, l })
    }
}

/// Finite multiset of dual particle positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualConfiguration {
    pub positions: Vec<usize>,
}

impl DualConfiguration {
    pub fn new(positions: Vec<usize>) -> Self {
        DualConfiguration { positions }
    }

    pub fn to_configuration(&self, l: usize) -> Configuration {
        let mut c = Configuration::empty(l);
        for &x in &self.positions {
            c.add(x % l);
        }
        c
    }
}

fn poisson(lambda: f64, rng: &mut Rng) -> u64 {
    if lambda <= 0.0 || !lambda.is_finite() {
        return 0;
    }
    Poisson::new(lambda).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// I.i.d. Poisson(ρ) occupancies; second factorial moment σ = ρ².
pub fn sample_poisson_product(rho: f64, l: usize, rng: &mut Rng) -> Configuration {
    Configuration::from_occupancies((0..l).map(|_| poisson(rho, rng)).collect())
}

/// I.i.d. negative-binomial marginals of the reversible product measure
/// μ_ρ, drawn as a Gamma(k, ρ/k)-mixed Poisson.
pub fn sample_stationary_product(rho: f64, k: f64, l: usize, rng: &mut Rng) -> Configuration {
    let g = Gamma::new(k, rho / k).expect("k and rho are positive");
    Configuration::from_occupancies((0..l).map(|_| poisson(g.sample(rng), rng)).collect())
}

/// μ_ρ(η_x = n) = k^k ρ^n/(k+ρ)^{k+n} · Γ(k+n)/(n!Γ(k)).
pub fn stationary_marginal_pmf(n: u64, rho: f64, k: f64) -> f64 {
    let nf = n as f64;
    (k * (k / (k + rho)).ln() + nf * (rho / (k + rho)).ln() + ln_gamma(k + nf)
        - ln_gamma(nf + 1.0)
        - ln_gamma(k))
    .exp()
}

fn wrap(x: i64, l: usize) -> usize {
    x.rem_euclid(l as i64) as usize
}

fn site_rate(c: &Configuration, x: usize, p: &SipParams) -> f64 {
    let n = c.occ[x];
    if n == 0 {
        return 0.0;
    }
    let r = p.kernel.range() as i64;
    let mut s = 0.0;
    for d in 1..=r {
        let w = p.kernel.p(d);
        if w > 0.0 {
            let a = c.occ[wrap(x as i64 + d, p.l)] as f64;
            let b = c.occ[wrap(x as i64 - d, p.l)] as f64;
            s += w * (2.0 * p.k + a + b);
        }
    }
    n as f64 * s
}

/// Exact event-driven realization of the SIP with rates p(j-i)·η_i·(k+η_j)
/// run for time `t_end` from `eta0`.
pub fn simulate(eta0: &Configuration, params: &SipParams, t_end: f64, rng: &mut Rng) -> Configuration {
    let mut c = eta0.clone();
    simulate_in_place(&mut c, params, t_end, rng);
    c
}

/// As [`simulate`], mutating the configuration; returns the number of jumps.
pub fn simulate_in_place(c: &mut Configuration, params: &SipParams, t_end: f64, rng: &mut Rng) -> u64 {
    assert_eq!(c.len(), params.l, "configuration and lattice size differ");
    if t_end <= 0.0 || c.total == 0 {
        return 0;
    }
    let l = params.l;
    let r = params.kernel.range() as i64;
    let jumps = params.kernel.jumps();
    let rates: Vec<f64> = (0..l).map(|x| site_rate(c, x, params)).collect();
    let mut tree = SumTree::new(&rates);
    let mut t = 0.0;
    let mut events = 0u64;
    let mut weights = vec![0.0; jumps.len()];
    loop {
        let total = tree.total();
        if total <= 0.0 {
            break;
        }
        let e: f64 = Exp1.sample(rng);
        t += e / total;
        if t > t_end {
            break;
        }
        let x = tree.find(rng.random::<f64>() * total);
        if c.occ[x] == 0 {
            // only reachable through rounding at a leaf boundary
            continue;
        }
        let mut wsum = 0.0;
        for (slot, &d) in weights.iter_mut().zip(&jumps) {
            let y = wrap(x as i64 + d, l);
            *slot = params.kernel.p(d) * (params.k + c.occ[y] as f64);
            wsum += *slot;
        }
        let mut u = rng.random::<f64>() * wsum;
        let mut pick = jumps.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                pick = i;
                break;
            }
            u -= w;
        }
        let y = wrap(x as i64 + jumps[pick], l);
        c.move_particle(x, y);
        events += 1;
        for centre in [x as i64, y as i64] {
            for d in -r..=r {
                let z = wrap(centre + d, l);
                tree.set(z, site_rate(c, z, params));
            }
        }
    }
    events
}

/// d(m, n) = n!Γ(k)/((n-m)!Γ(k+m)) for m ≤ n, else 0.
pub fn duality_single(m: u64, n: u64, k: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    if m == 0 {
        return 1.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    (ln_gamma(nf + 1.0) + ln_gamma(k) - ln_gamma(nf - mf + 1.0) - ln_gamma(k + mf)).exp()
}

/// D(ξ, η) = Π_x d(ξ_x, η_x).
pub fn duality_d(xi: &DualConfiguration, eta: &Configuration, k: f64) -> f64 {
    let mut sites: Vec<usize> = xi.positions.iter().map(|x| x % eta.len()).collect();
    sites.sort_unstable();
    let mut out = 1.0;
    let mut i = 0;
    while i < sites.len() {
        let x = sites[i];
        let mut m = 0;
        while i < sites.len() && sites[i] == x {
            m += 1;
            i += 1;
        }
        out *= duality_single(m, eta.get(x), k);
        if out == 0.0 {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct DualityCheck {
    pub lhs: MeanVar,
    pub rhs: MeanVar,
}

impl DualityCheck {
    /// |lhs - rhs| in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        let se = (self.lhs.se().powi(2) + self.rhs.se().powi(2)).sqrt();
        let d = (self.lhs.mean() - self.rhs.mean()).abs();
        if d == 0.0 {
            0.0
        } else {
            d / se
        }
    }
}

/// Monte Carlo estimates of E_η[D(ξ, η_t)] and E_ξ[D(ξ_t, η)].
pub fn duality_check(
    xi: &DualConfiguration,
    eta: &Configuration,
    params: &SipParams,
    t: f64,
    reps: u64,
    seed: u64,
) -> Result<DualityCheck> {
    if xi.positions.len() > 3 {
        return Err(Error::InvalidParameter("at most 3 dual particles".into()));
    }
    let xi_conf = xi.to_configuration(params.l);
    let samples = par_replicas(reps, seed, |_, rng| {
        let eta_t = simulate(eta, params, t, rng);
        let lhs = duality_d(xi, &eta_t, params.k);
        let xi_t = simulate(&xi_conf, params, t, rng);
        let dual = DualConfiguration::new(
            xi_t.occupancies()
                .iter()
                .enumerate()
                .flat_map(|(x, &n)| std::iter::repeat_n(x, n as usize))
                .collect(),
        );
        (lhs, duality_d(&dual, eta, params.k))
    });
    let mut out = DualityCheck { lhs: MeanVar::new(), rhs: MeanVar::new() };
    for (a, b) in samples {
        out.lhs.push(a);
        out.rhs.push(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use proptest::prelude::*;

    fn nn(l: usize, k: f64) -> SipParams {
        SipParams::new(k, FiniteRangeKernel::nearest_neighbor(), l).unwrap()
    }

    #[test]
    fn single_site_duality_values() {
        assert_eq!(duality_single(0, 7, 0.3), 1.0);
        assert!((duality_single(2, 3, 1.0) - 3.0).abs() < 1e-12);
        assert_eq!(duality_single(4, 3, 1.0), 0.0);
        for n in 0..20u64 {
            assert!((duality_single(1, n, 2.5) - n as f64 / 2.5).abs() < 1e-12 * (1.0 + n as f64));
        }
    }

    #[test]
    fn duality_function_products() {
        let eta = Configuration::from_occupancies(vec![3, 0, 2, 5]);
        assert_eq!(duality_d(&DualConfiguration::default(), &eta, 1.0), 1.0);
        let one = DualConfiguration::new(vec![3]);
        assert!((duality_d(&one, &eta, 2.0) - 2.5).abs() < 1e-12);
        assert_eq!(duality_d(&DualConfiguration::new(vec![1]), &eta, 2.0), 0.0);
        // multiplicative over disjoint supports
        let a = DualConfiguration::new(vec![0, 0]);
        let b = DualConfiguration::new(vec![2, 3]);
        let ab = DualConfiguration::new(vec![0, 0, 2, 3]);
        let lhs = duality_d(&ab, &eta, 0.7);
        let rhs = duality_d(&a, &eta, 0.7) * duality_d(&b, &eta, 0.7);
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs());
    }

    #[test]
    fn zero_time_is_identity() {
        let mut r = rng(1);
        let c = sample_poisson_product(2.0, 30, &mut r);
        assert_eq!(simulate(&c, &nn(30, 1.0), 0.0, &mut r), c);
    }

    #[test]
    fn poisson_sampler_moments() {
        let mut r = rng(2);
        let rho = 1.7;
        let c = sample_poisson_product(rho, 1_000_000, &mut r);
        let m: MeanVar = c.occupancies().iter().map(|&n| n as f64).collect();
        assert!((m.mean() - rho).abs() < 4.0 * m.se());
        let f: MeanVar = c.occupancies().iter().map(|&n| (n * n.saturating_sub(1)) as f64).collect();
        assert!((f.mean() - rho * rho).abs() < 4.0 * f.se());
        let tiny = sample_poisson_product(1e-12, 1000, &mut r);
        assert_eq!(tiny.total(), 0);
    }

    #[test]
    fn stationary_sampler_matches_marginal() {
        let mut r = rng(3);
        let (rho, k) = (1.5, 0.4);
        let l = 400_000;
        let c = sample_stationary_product(rho, k, l, &mut r);
        let m: MeanVar = c.occupancies().iter().map(|&n| n as f64).collect();
        assert!((m.mean() - rho).abs() < 4.0 * m.se());
        for n in 0..5u64 {
            let p = stationary_marginal_pmf(n, rho, k);
            let freq = c.occupancies().iter().filter(|&&x| x == n).count() as f64 / l as f64;
            let se = (p * (1.0 - p) / l as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "n={n}: {freq} vs {p}");
        }
        assert!((stationary_marginal_pmf(0, rho, k) - (k / (k + rho)).powf(k)).abs() < 1e-14);
    }

    #[test]
    fn marginal_approaches_poisson() {
        let rho: f64 = 1.3;
        let tv = |k: f64| {
            (0..60u64)
                .map(|n| {
                    let pois = (-rho + n as f64 * rho.ln() - ln_gamma(n as f64 + 1.0)).exp();
                    (stationary_marginal_pmf(n, rho, k) - pois).abs()
                })
                .sum::<f64>()
        };
        let ks = [0.5, 2.0, 10.0, 100.0];
        for w in ks.windows(2) {
            assert!(tv(w[1]) < tv(w[0]));
        }
    }

    #[test]
    fn single_particle_walk_rate() {
        // a lone particle jumps at rate k·Σ_A p(r)
        let p = nn(50, 0.8);
        let t = 3.0;
        let reps = 4000;
        let m: MeanVar = par_replicas(reps, 9, |_, r| {
            let mut c = Configuration::empty(50);
            c.add(0);
            simulate_in_place(&mut c, &p, t, r) as f64
        })
        .into_iter()
        .collect();
        let expect = 0.8 * p.kernel.total_weight() * t;
        assert!((m.mean() - expect).abs() < 4.0 * m.se(), "{} vs {expect}", m.mean());
    }

    #[test]
    fn stationary_measure_is_preserved() {
        let (rho, k, l) = (1.0, 0.5, 40);
        let p = nn(l, k);
        let reps = 3000;
        let counts = par_replicas(reps, 11, |_, r| {
            let c = sample_stationary_product(rho, k, l, r);
            let c = simulate(&c, &p, 2.0, r);
            c.occupancies().to_vec()
        });
        for n in 0..3u64 {
            let p0 = stationary_marginal_pmf(n, rho, k);
            // site 0 only, so replicas are independent
            let freq = counts.iter().filter(|c| c[0] == n).count() as f64 / reps as f64;
            let se = (p0 * (1.0 - p0) / reps as f64).sqrt();
            assert!((freq - p0).abs() < 4.0 * se, "n={n}");
        }
    }

    #[test]
    fn duality_check_trivial_cases() {
        let p = nn(12, 1.0);
        let eta = Configuration::from_occupancies(vec![1, 2, 0, 3, 1, 0, 0, 2, 1, 0, 0, 1]);
        let xi = DualConfiguration::new(vec![1, 3]);
        let d = duality_check(&xi, &eta, &p, 0.0, 5, 1).unwrap();
        let exact = duality_d(&xi, &eta, 1.0);
        assert_eq!(d.lhs.mean(), exact);
        assert_eq!(d.rhs.mean(), exact);
        let e = duality_check(&DualConfiguration::default(), &eta, &p, 0.7, 50, 1).unwrap();
        assert_eq!(e.lhs.mean(), 1.0);
        assert_eq!(e.rhs.mean(), 1.0);
    }

    #[test]
    fn duality_two_particles_mc() {
        let p = nn(10, 1.0);
        let eta = Configuration::from_occupancies(vec![2, 1, 0, 3, 1, 0, 2, 0, 1, 1]);
        let xi = DualConfiguration::new(vec![3, 4]);
        let d = duality_check(&xi, &eta, &p, 0.3, 20_000, 5).unwrap();
        assert!(d.z_score() < 4.0, "z = {}", d.z_score());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn particles_conserved(seed in 0u64..1000, t in 0.0f64..3.0, k in 0.05f64..3.0) {
            let mut r = rng(seed);
            let p = SipParams::new(k, FiniteRangeKernel::range_two(), 25).unwrap();
            let c = sample_poisson_product(1.2, 25, &mut r);
            let out = simulate(&c, &p, t, &mut r);
            prop_assert_eq!(out.total(), c.total());
            prop_assert_eq!(out.occupancies().iter().sum::<u64>(), c.total());
        }
    }
}
