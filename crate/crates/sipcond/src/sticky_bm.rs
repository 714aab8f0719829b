//! Two-sided sticky Brownian motion started at 0: the law at time t is an atom
//! at the origin plus a symmetric density.
//!
//! For stickiness θ (reversible measure dx + θδ₀, unit diffusion away from 0)
//! and u = |v|/√(2t), b = √(2t)/θ,
//!
//! ```text
//! mass(t)      = E(b)
//! density(v,t) = (1/θ)·e^{-u²}·E(b + u)
//! ```
//!
//! with E(x) = e^{x²}erfc(x). The closed form e^{4γ²t}erfc(2γ√t) with density
//! √2γ·e^{2√2γ|v|+4γ²t}erfc(2γ√t + |v|/√(2t)) is the case θ = 1/(√2γ); the
//! scaled difference chain converges to the case θ = √2γ. Both are available
//! through [`Convention`].

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Options};
use crate::rng::Rng;
use crate::special::{erfc, erfcx, log_erfc};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Complementary error function (2/√π)∫_x^∞ e^{-y²}dy.
pub fn erfc_paper(x: f64) -> f64 {
    erfc(x)
}

/// e^{4γ²t}·erfc(2γ√t).
pub fn mass_at_zero(t: f64, gamma: f64) -> f64 {
    StickyKernel::printed(gamma).mass(t)
}

/// √2γ·e^{2√2γ|v|+4γ²t}·erfc(2γ√t + |v|/√(2t)).
pub fn density(v: f64, t: f64, gamma: f64) -> f64 {
    StickyKernel::printed(gamma).density(v, t)
}

/// mass_at_zero at v = 0, √2γ·density(v) elsewhere.
pub fn hit_zero_prob(v: f64, t: f64, gamma: f64) -> f64 {
    StickyKernel::printed(gamma).hit_zero_prob(v, t)
}

/// Which stickiness the closed form is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// θ = 1/(√2γ), the closed form as printed.
    Printed,
    /// θ = √2γ, the weight of the atom in the reversible measure dx + √2γδ₀.
    Reversible,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Convention::Printed),
            "reversible" => Ok(Convention::Reversible),
            _ => Err(Error::Config(format!("unknown convention `{s}` (printed|reversible)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StickyKernel {
    pub gamma: f64,
    pub convention: Convention,
    /// Spatial scale σ: the kernel is evaluated for X = σY with Y of unit
    /// diffusion. 1 unless rescaled by [`StickyKernel::with_chi`].
    pub scale: f64,
    inner_gamma: f64,
}

impl StickyKernel {
    pub fn new(gamma: f64, convention: Convention) -> Self {
        StickyKernel { gamma, convention, scale: 1.0, inner_gamma: gamma }
    }

    pub fn printed(gamma: f64) -> Self {
        Self::new(gamma, Convention::Printed)
    }

    pub fn reversible(gamma: f64) -> Self {
        Self::new(gamma, Convention::Reversible)
    }

    /// Experimental: kernel of the limit for a walk with χ ≠ 1/2, i.e.
    /// generator χf'' away from 0 and reversible measure dx + √2γδ₀. Evaluated
    /// as X = σY with σ = √(2χ) and Y sticky with γ_Y = γ/σ at the same t.
    pub fn with_chi(mut self, chi: f64) -> Self {
        let sigma = (2.0 * chi).sqrt();
        self.scale = sigma;
        self.inner_gamma = self.gamma / sigma;
        self
    }

    /// Stickiness θ of the unit-diffusion kernel being evaluated.
    pub fn theta(&self) -> f64 {
        match self.convention {
            Convention::Printed => 1.0 / (SQRT2 * self.inner_gamma),
            Convention::Reversible => SQRT2 * self.inner_gamma,
        }
    }

    /// Weight √2γ of δ₀ in ν̄ = dx + √2γδ₀.
    pub fn nu_weight(&self) -> f64 {
        SQRT2 * self.gamma
    }

    fn b(&self, t: f64) -> f64 {
        (2.0 * t).sqrt() / self.theta()
    }

    /// Probability of the atom at time t.
    pub fn mass(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        erfcx(self.b(t))
    }

    /// Density of the continuous part at v.
    pub fn density(&self, v: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let y = v.abs() / self.scale;
        let u = y / (2.0 * t).sqrt();
        (-u * u).exp() * erfcx(self.b(t) + u) / (self.theta() * self.scale)
    }

    /// ln density(v, t), finite far into the Gaussian tail.
    pub fn log_density(&self, v: f64, t: f64) -> f64 {
        let y = v.abs() / self.scale;
        let u = y / (2.0 * t).sqrt();
        -(self.theta() * self.scale).ln() - u * u + erfcx(self.b(t) + u).ln()
    }

    /// The same density through log-space evaluation of the exponential and
    /// erfc factors; used to cross-check [`StickyKernel::density`].
    pub fn density_log_space(&self, v: f64, t: f64) -> f64 {
        let y = v.abs() / self.scale;
        let b = self.b(t);
        let u = y / (2.0 * t).sqrt();
        ((1.0 / (self.theta() * self.scale)).ln() + 2.0 * b * u + b * b + log_erfc(b + u)).exp()
    }

    /// p_t(v, {0}): the atom at v = 0, √2γ·density(v) elsewhere.
    pub fn hit_zero_prob(&self, v: f64, t: f64) -> f64 {
        if v == 0.0 {
            self.mass(t)
        } else {
            self.nu_weight() * self.density(v, t)
        }
    }

    /// ∫density by quadrature.
    pub fn continuous_mass(&self, t: f64) -> Result<f64> {
        let s = self.scale * (2.0 * t).sqrt();
        let e = integrate_to_infinity(|v| self.density(v, t), 0.0, s, Options::tol(1e-13, 1e-13))?;
        Ok(2.0 * e.value)
    }

    /// ∫density in closed form: 1 - E(b) by ∫₀^∞e^{2bu}erfc(b+u)du = (e^{-b²} - erfc(b))/(2b).
    pub fn continuous_mass_closed(&self, t: f64) -> f64 {
        let b = self.b(t);
        let half = (1.0 - erfcx(b)) / (2.0 * b);
        2.0 * half * (2.0 * t).sqrt() / self.theta()
    }

    /// mass + ∫density - 1, by quadrature.
    pub fn normalization_error(&self, t: f64) -> Result<f64> {
        Ok(self.mass(t) + self.continuous_mass(t)? - 1.0)
    }

    /// mass(s+t) - mass(s)mass(t) - √2γ∫density(z,s)density(z,t)dz.
    pub fn semigroup_residual(&self, s: f64, t: f64) -> Result<f64> {
        let scale = self.scale * (2.0 * s.min(t)).sqrt();
        let cross = integrate_to_infinity(
            |z| self.density(z, s) * self.density(z, t),
            0.0,
            scale,
            Options::tol(1e-14, 1e-13),
        )?;
        Ok(self.mass(s + t) - self.mass(s) * self.mass(t) - self.nu_weight() * 2.0 * cross.value)
    }

    /// ∫v² p_t(0, dv) by quadrature.
    pub fn second_moment(&self, t: f64) -> Result<f64> {
        let s = self.scale * (2.0 * t).sqrt();
        let e = integrate_to_infinity(|v| v * v * self.density(v, t), 0.0, s, Options::tol(1e-13, 1e-12))?;
        Ok(2.0 * e.value)
    }

    /// One-sided derivatives of u(x) = hit_zero_prob(x, t) at 0⁺ in closed
    /// form: (u'(0⁺), u''(0⁺)).
    pub fn hit_derivatives_at_zero(&self, t: f64) -> (f64, f64) {
        let b = self.b(t);
        let c = self.nu_weight() / (self.theta() * self.scale);
        let g = 2.0 * b * erfcx(b) - 2.0 * FRAC_1_SQRT_PI;
        let du = 1.0 / (self.scale * (2.0 * t).sqrt());
        (c * g * du, c * 2.0 * b * g * du * du)
    }

    /// The boundary condition √2γ·u''(0⁺) = u'(0⁺) - u'(0⁻) for u(x) =
    /// hit_zero_prob(x, t), from one-sided finite differences with step h.
    /// Returns (left side, right side).
    pub fn boundary_condition_fd(&self, t: f64, h: f64) -> (f64, f64) {
        let u = |x: f64| self.nu_weight() * self.density(x, t);
        // second-order one-sided stencils on (0, ∞), using the continuous part
        let d1 = (-3.0 * u(0.0) + 4.0 * u(h) - u(2.0 * h)) / (2.0 * h);
        let d2 = (2.0 * u(0.0) - 5.0 * u(h) + 4.0 * u(2.0 * h) - u(3.0 * h)) / (h * h);
        (self.nu_weight() * d2, 2.0 * d1)
    }

    /// Draws from p_t(0, ·).
    pub fn sample_marginal(&self, t: f64, rng: &mut Rng) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let m = self.mass(t);
        if rng.random::<f64>() < m {
            return Ok(0.0);
        }
        // envelope: e^{-u²}E(b+u) ≤ E(b)e^{-u²}, a Gaussian with variance σ²t
        let b = self.b(t);
        let eb = erfcx(b);
        let sd = self.scale * t.sqrt();
        let max_trials = 100_000;
        for _ in 0..max_trials {
            let z: f64 = StandardNormal.sample(rng);
            let v = sd * z;
            let u = z.abs() / SQRT2;
            if rng.random::<f64>() * eb <= erfcx(b + u) {
                return Ok(v);
            }
        }
        Err(Error::RejectionStall { rate: 1.0 / max_trials as f64 })
    }
}

/// Grid of the Brownian path, its local-time estimate and the additive
/// functional T_s = s + θL_s.
#[derive(Debug, Clone)]
pub struct TimeChangeGrid {
    pub dt: f64,
    pub s: Vec<f64>,
    pub b: Vec<f64>,
    pub local_time: Vec<f64>,
    pub clock: Vec<f64>,
}

/// Sticky path sampled on the grid t_j = j·dt.
#[derive(Debug, Clone)]
pub struct StickyPath {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub band: f64,
    pub grid: TimeChangeGrid,
}

/// B^sbm(t) = B_{τ(t)}, τ(t) = inf{s : s + θL_s > t}, θ = √2γ, with the
/// local time from the band estimator (1/2ε)∫1{|B| ≤ ε}ds, ε = √dt.
pub fn time_change_path(t_end: f64, gamma: f64, dt: f64, rng: &mut Rng) -> Result<StickyPath> {
    time_change_path_theta(t_end, SQRT2 * gamma, dt, rng)
}

/// As [`time_change_path`] with an explicit stickiness θ.
pub fn time_change_path_theta(t_end: f64, theta: f64, dt: f64, rng: &mut Rng) -> Result<StickyPath> {
    if !(dt > 0.0) || !(t_end >= 0.0) || theta < 0.0 {
        return Err(Error::InvalidParameter("need dt > 0, t_end ≥ 0, θ ≥ 0".into()));
    }
    let steps = (t_end / dt).ceil() as usize;
    let eps = dt.sqrt();
    let sd = dt.sqrt();
    let mut grid = TimeChangeGrid {
        dt,
        s: Vec::with_capacity(steps + 1),
        b: Vec::with_capacity(steps + 1),
        local_time: Vec::with_capacity(steps + 1),
        clock: Vec::with_capacity(steps + 1),
    };
    let (mut b, mut l) = (0.0f64, 0.0f64);
    for i in 0..=steps {
        let s = i as f64 * dt;
        grid.s.push(s);
        grid.b.push(b);
        grid.local_time.push(l);
        grid.clock.push(s + theta * l);
        if b.abs() <= eps {
            l += dt / (2.0 * eps);
        }
        let z: f64 = StandardNormal.sample(rng);
        b += sd * z;
    }
    // τ(t) ≤ t, so the grid on [0, t_end] suffices; the clock interval
    // [T_i, T_{i+1}) is spent at B_i
    let mut t = Vec::with_capacity(steps + 1);
    let mut x = Vec::with_capacity(steps + 1);
    let mut i = 0;
    for j in 0..=steps {
        let tj = j as f64 * dt;
        while i + 1 < grid.clock.len() && grid.clock[i + 1] <= tj {
            i += 1;
        }
        t.push(tj);
        x.push(grid.b[i]);
    }
    Ok(StickyPath { t, x, band: eps, grid })
}

/// (1/t_end)∫₀^{t_end} mass(t)dt.
pub fn average_mass(kernel: &StickyKernel, t_end: f64) -> Result<f64> {
    let e = integrate(|t| kernel.mass(t), 0.0, t_end, Options::tol(1e-12, 1e-12))?;
    Ok(e.value / t_end)
}
