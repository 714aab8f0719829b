//! Variance of the density fluctuation field
//! X_N(φ, t) = N⁻¹Σ_x φ(x/N)(η_{α(N,t)}(x) - ρ), at finite N through the
//! two-particle duality and in the N → ∞ limit.

use std::f64::consts::{PI, SQRT_2};

use crate::difference_chain::{scaled_column_covering, Column, ScaledDiffParams};
use crate::error::{Error, Result};
use crate::kernel::FiniteRangeKernel;
use crate::quadrature::{integrate, integrate_breaks, Estimate, Nested, Options};
use crate::rng::par_replicas;
use crate::sip_lattice::{sample_poisson_product, sample_stationary_product, simulate_in_place, SipParams};
use crate::special::erf;
use crate::stats::MeanVar;
use crate::sticky_bm::StickyKernel;
use crate::test_function::TestFunction;

/// Initial product measure ν: Poisson(ρ) or the stationary law at k_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    Poisson,
    Stationary,
}

impl std::str::FromStr for SigmaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(SigmaMode::Poisson),
            "stationary" => Ok(SigmaMode::Stationary),
            _ => Err(Error::Config(format!("unknown sigma mode `{s}` (poisson|stationary)"))),
        }
    }
}

impl SigmaMode {
    /// Second factorial moment σ = ∫η(η-1)dν.
    pub fn sigma(&self, rho: f64, k: f64) -> f64 {
        match self {
            SigmaMode::Poisson => rho * rho,
            SigmaMode::Stationary => rho * rho * (k + 1.0) / k,
        }
    }
}

/// Density ρ and second factorial moment σ of the initial product measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceInputs {
    pub rho: f64,
    pub sigma: f64,
}

impl VarianceInputs {
    pub fn new(rho: f64, sigma: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) || !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter("need ρ > 0 and σ ≥ 0".into()));
        }
        Ok(VarianceInputs { rho, sigma })
    }

    pub fn poisson(rho: f64) -> Result<Self> {
        Self::new(rho, rho * rho)
    }
}

/// Lattice sites x with φ(x/N) ≠ 0 and the values φ(x/N).
fn grid_values(phi: &TestFunction, n: u32) -> (i64, Vec<f64>) {
    let nf = n as f64;
    let (lo, hi) = phi.support();
    let first = (lo * nf).ceil() as i64;
    let last = (hi * nf).floor() as i64;
    if phi.is_zero() || last < first {
        return (0, Vec::new());
    }
    (first, (first..=last).map(|x| phi.value(x as f64 / nf)).collect())
}

/// Autocorrelation sums S(d) = Σ_x φ(x/N)φ((x+d)/N), d = 0..len.
fn autocorrelation(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|d| values.iter().zip(&values[d..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// E_ν[X_N(φ, t)²] from the duality formula, with p_{α(N,t)}(·, 0) of the
/// scaled difference chain. The window is widened to cover the support of φ.
pub fn finite_variance(
    n: u32,
    t: f64,
    phi: &TestFunction,
    inputs: VarianceInputs,
    gamma: f64,
    kernel: &FiniteRangeKernel,
    tolerance: f64,
) -> Result<Estimate> {
    let sp = ScaledDiffParams::new(n, gamma, kernel.clone())?;
    let col = scaled_column_covering(t, &sp, support_sites(phi, n) + kernel.range(), tolerance)?;
    finite_variance_from_column(n, phi, inputs, gamma, &col)
}

/// Smallest column half-width that covers all differences x - y of sites in
/// the support of φ.
pub fn support_sites(phi: &TestFunction, n: u32) -> usize {
    grid_values(phi, n).1.len()
}

/// [`finite_variance`] from a precomputed column p_{α(N,t)}(·, 0).
pub fn finite_variance_from_column(
    n: u32,
    phi: &TestFunction,
    inputs: VarianceInputs,
    gamma: f64,
    column: &Column,
) -> Result<Estimate> {
    let (_, values) = grid_values(phi, n);
    if values.is_empty() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let s = autocorrelation(&values);
    if s.len() > column.m + 1 {
        return Err(Error::InvalidParameter(format!(
            "column window {} does not cover the support of φ ({} sites)",
            column.m,
            s.len()
        )));
    }
    let p: Vec<f64> = (0..s.len()).map(|d| column.get(d as i64)).collect();
    Ok(assemble(n, gamma, inputs, &s, &p, column.error_bound))
}

fn assemble(n: u32, gamma: f64, inputs: VarianceInputs, s: &[f64], p: &[f64], col_error: f64) -> Estimate {
    let nf = n as f64;
    let c = SQRT_2 * gamma * nf;
    let VarianceInputs { rho, sigma } = inputs;
    let off = sigma / (1.0 + c) - rho * rho;
    // d = 0 carries the factor (1 + c), d ≠ 0 appears twice (±d)
    let mut sum = (1.0 + c) * off * s[0] * p[0];
    let mut abs = (1.0 + c) * (off * s[0]).abs();
    for d in 1..s.len() {
        sum += 2.0 * off * s[d] * p[d];
        abs += 2.0 * (off * s[d]).abs();
    }
    sum += s[0] * (c * rho * rho + rho);
    let scale = 1.0 / (nf * nf);
    Estimate { value: sum * scale, error: abs * col_error * scale }
}

/// ∫φ(x)φ(x-z)dx for z ≥ 0.
fn autocorrelation_integral(phi: &TestFunction, z: f64, opts: Options) -> Result<Estimate> {
    let (lo, hi) = phi.support();
    if lo + z >= hi {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    integrate(|x| phi.value(x) * phi.value(x - z), lo + z, hi, opts)
}

/// Break points 0, s, 2s, 4s, … below `end`, then `end`.
fn geometric_breaks(s: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = s;
    while x < end {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(end);
    pts
}

const INNER: Options = Options { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000 };
const OUTER: Options = Options { abs_tol: 1e-11, rel_tol: 1e-11, max_intervals: 4000 };

/// Limit variance
/// -ρ²∬φ(x)φ(y)·√2γ·q_t(x-y)dxdy + √2γρ²(1 - m(t))∫φ²,
/// with m and q the atom and density of `kernel`. The double integral is
/// taken in z = x - y against the autocorrelation of φ.
pub fn limit_variance_with(t: f64, phi: &TestFunction, rho: f64, kernel: &StickyKernel) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("limit variance needs t > 0".into()));
    }
    if phi.is_zero() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let nu = kernel.nu_weight();
    let (lo, hi) = phi.support();
    let width = hi - lo;
    let l2 = autocorrelation_integral(phi, 0.0, INNER)?;
    let nested = Nested::new();
    let pts = geometric_breaks(kernel.scale * (2.0 * t).sqrt(), width);
    let outer = integrate_breaks(
        |z| kernel.density(z, t) * nested.inner(autocorrelation_integral(phi, z, INNER)),
        &pts,
        OUTER,
    );
    let cross = nested.finish(outer)?;
    let value = nu * rho * rho * ((1.0 - kernel.mass(t)) * l2.value - 2.0 * cross.value);
    let error = nu * rho * rho * (l2.error + 2.0 * cross.error);
    Ok(Estimate { value, error })
}

/// [`limit_variance_with`] for the kernel in its printed closed form.
pub fn limit_variance(t: f64, phi: &TestFunction, rho: f64, gamma: f64) -> Result<Estimate> {
    limit_variance_with(t, phi, rho, &StickyKernel::printed(gamma))
}

/// Limit variance in the form
/// (√2γρ²/2)∫[φ(u/2)²(1 - m) - ∫q_t(v)φ((u+v)/2)φ((u-v)/2)dv]du.
pub fn limit_variance_alt_with(t: f64, phi: &TestFunction, rho: f64, kernel: &StickyKernel) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("limit variance needs t > 0".into()));
    }
    if phi.is_zero() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let nu = kernel.nu_weight();
    let m = kernel.mass(t);
    let (lo, hi) = phi.support();
    let s = kernel.scale * (2.0 * t).sqrt();
    let nested = Nested::new();
    let outer = integrate(
        |u| {
            let vmax = (2.0 * hi - u).min(u - 2.0 * lo);
            if vmax <= 0.0 {
                return 0.0;
            }
            // the v-integrand is even, the kink of q at 0 sits on an endpoint
            let inner = integrate_breaks(
                |v| kernel.density(v, t) * phi.value(0.5 * (u + v)) * phi.value(0.5 * (u - v)),
                &geometric_breaks(s, vmax),
                INNER,
            );
            let f = phi.value(0.5 * u);
            f * f * (1.0 - m) - 2.0 * nested.inner(inner)
        },
        2.0 * lo,
        2.0 * hi,
        OUTER,
    );
    let e = nested.finish(outer)?;
    let c = 0.5 * nu * rho * rho;
    Ok(Estimate { value: c * e.value, error: c * e.error })
}

/// [`limit_variance_alt_with`] for the printed closed form.
pub fn limit_variance_alt(t: f64, phi: &TestFunction, rho: f64, gamma: f64) -> Result<Estimate> {
    limit_variance_alt_with(t, phi, rho, &StickyKernel::printed(gamma))
}

/// Both evaluations of ρ²∫dv∬φ(x)φ(y)p̄_t(v; dx, dy).
#[derive(Debug, Clone, Copy)]
pub struct SecondMoment {
    /// ρ²(∫φ)² + limit variance.
    pub formula: Estimate,
    /// ρ²[∬φφ G(x-y) + H∫φ²] from first-passage decompositions, where
    /// G(z) = ∫dv p_t(v, dz)/dz and H = ∫dv p_t(v, {0}).
    pub first_passage: Estimate,
}

impl SecondMoment {
    pub fn discrepancy(&self) -> f64 {
        (self.formula.value - self.first_passage.value).abs()
    }
}

/// ∫dv p_t(v, {0}) = ∫₀ᵗ σ√(2/(πs))·m(t-s)ds, with s = r².
fn atom_inflow(t: f64, kernel: &StickyKernel) -> Result<Estimate> {
    let c = 2.0 * kernel.scale * (2.0 / PI).sqrt();
    let e = integrate(|r| kernel.mass(t - r * r), 0.0, t.sqrt(), INNER)?;
    Ok(Estimate { value: c * e.value, error: c * e.error })
}

/// ∫dv p_t(v, dz)/dz for z ≠ 0: the part that never reached 0 plus paths
/// that hit 0 at time s and spread from there.
fn density_inflow(z: f64, t: f64, kernel: &StickyKernel) -> Result<f64> {
    let sigma = kernel.scale;
    let free = erf(z.abs() / (sigma * (2.0 * t).sqrt()));
    let c = 2.0 * sigma * (2.0 / PI).sqrt();
    let e = integrate(|r| kernel.density(z, t - r * r), 0.0, t.sqrt(), INNER)?;
    Ok(free + c * e.value)
}

/// Uncentred second moment of the limit field by two routes.
pub fn uncentred_second_moment_with(t: f64, phi: &TestFunction, rho: f64, kernel: &StickyKernel) -> Result<SecondMoment> {
    let var = limit_variance_with(t, phi, rho, kernel)?;
    let r2 = rho * rho;
    let mean = phi.integral();
    let formula = Estimate { value: r2 * mean * mean + var.value, error: var.error };
    if phi.is_zero() {
        return Ok(SecondMoment { formula, first_passage: Estimate { value: 0.0, error: 0.0 } });
    }
    let (lo, hi) = phi.support();
    let l2 = autocorrelation_integral(phi, 0.0, INNER)?;
    let h = atom_inflow(t, kernel)?;
    let nested = Nested::new();
    let pts = geometric_breaks(kernel.scale * (2.0 * t).sqrt(), hi - lo);
    let outer = integrate_breaks(
        |z| {
            let g = match density_inflow(z, t, kernel) {
                Ok(g) => g,
                Err(e) => {
                    nested.inner(Err(e));
                    0.0
                }
            };
            g * nested.inner(autocorrelation_integral(phi, z, INNER))
        },
        &pts,
        OUTER,
    );
    let cross = nested.finish(outer)?;
    let first_passage = Estimate {
        value: r2 * (2.0 * cross.value + h.value * l2.value),
        error: r2 * (2.0 * cross.error + h.error * l2.value + h.value * l2.error),
    };
    Ok(SecondMoment { formula, first_passage })
}

/// [`uncentred_second_moment_with`] for the printed closed form.
pub fn uncentred_second_moment(t: f64, phi: &TestFunction, rho: f64, gamma: f64) -> Result<SecondMoment> {
    uncentred_second_moment_with(t, phi, rho, &StickyKernel::printed(gamma))
}

/// Settings of the direct Monte Carlo estimate of E_ν[X_N²].
#[derive(Debug, Clone)]
pub struct FieldMc {
    pub n: u32,
    pub t: f64,
    pub rho: f64,
    pub gamma: f64,
    pub kernel: FiniteRangeKernel,
    pub sigma_mode: SigmaMode,
    /// Torus length in units of N.
    pub length_factor: usize,
    pub replicas: u64,
    pub seed: u64,
}

/// Samples X_N(φ, t) from the particle system on a torus of length
/// `length_factor·N` centred at the origin, and returns the statistics of X².
pub fn field_mc(cfg: &FieldMc, phi: &TestFunction) -> Result<MeanVar> {
    let sp = ScaledDiffParams::new(cfg.n, cfg.gamma, cfg.kernel.clone())?;
    let k = sp.k_n();
    let l = cfg.length_factor * cfg.n as usize;
    let params = SipParams::new(k, cfg.kernel.clone(), l)?;
    let (lo, hi) = phi.support();
    let nf = cfg.n as f64;
    let half = (l / 2) as i64;
    if (lo * nf) < -(half as f64) || (hi * nf) >= half as f64 {
        return Err(Error::InvalidParameter("torus does not contain the support of φ".into()));
    }
    let weights: Vec<f64> = (0..l as i64).map(|i| phi.value((i - half) as f64 / nf)).collect();
    let alpha = sp.alpha(cfg.t);
    let samples = par_replicas(cfg.replicas, cfg.seed, |_, rng| {
        let mut eta = match cfg.sigma_mode {
            SigmaMode::Poisson => sample_poisson_product(cfg.rho, l, rng),
            SigmaMode::Stationary => sample_stationary_product(cfg.rho, k, l, rng),
        };
        simulate_in_place(&mut eta, &params, alpha, rng);
        let x: f64 = weights
            .iter()
            .zip(eta.occupancies())
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, &e)| w * (e as f64 - cfg.rho))
            .sum::<f64>()
            / nf;
        x * x
    });
    Ok(samples.into_iter().collect())
}
