//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

impl Options {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        Options { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece { a, b, value: kron * h, error: ((kron - gauss) * h).abs() }
}

/// Integrates f over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: Options) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if b < a {
        let e = integrate(f, b, a, opts)?;
        return Ok(Estimate { value: -e.value, error: e.error });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let (mut total, mut err) = (first.value, first.error);
    heap.push(first);
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNotConverged { estimate: total, error: err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::QuadratureNotConverged { estimate: total, error: err });
        }
        let left = kronrod(&mut f, worst.a, m);
        let right = kronrod(&mut f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // resum to keep the running totals free of drift
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// Integrates over consecutive intervals between sorted break points.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], opts: Options) -> Result<Estimate> {
    let mut out = Estimate { value: 0.0, error: 0.0 };
    for w in points.windows(2) {
        let e = integrate(&mut f, w[0], w[1], opts)?;
        out.value += e.value;
        out.error += e.error;
    }
    Ok(out)
}

/// Integrates over [a, ∞) through x = a + scale·s/(1-s), s ∈ [0, 1).
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, opts: Options) -> Result<Estimate> {
    integrate(
        |s| {
            let x = a + scale * s / (1.0 - s);
            let jac = scale / ((1.0 - s) * (1.0 - s));
            let v = f(x) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Nested integration helper: evaluates an inner integral inside an outer
/// integrand and surfaces the first inner failure after the outer pass.
pub struct Nested {
    failure: RefCell<Option<Error>>,
}

impl Default for Nested {
    fn default() -> Self {
        Self::new()
    }
}

impl Nested {
    pub fn new() -> Self {
        Nested { failure: RefCell::new(None) }
    }

    pub fn inner(&self, r: Result<Estimate>) -> f64 {
        match r {
            Ok(e) => e.value,
            Err(e) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                0.0
            }
        }
    }

    pub fn finish(self, outer: Result<Estimate>) -> Result<Estimate> {
        if let Some(e) = self.failure.into_inner() {
            return Err(e);
        }
        outer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, Options::default()).unwrap();
        assert!((e.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn kink_and_reverse() {
        let e = integrate(|x: f64| x.abs(), -1.0, 2.0, Options::default()).unwrap();
        assert!((e.value - 2.5).abs() < 1e-11);
        let r = integrate(|x: f64| x.abs(), 2.0, -1.0, Options::default()).unwrap();
        assert!((r.value + 2.5).abs() < 1e-11);
    }

    #[test]
    fn gaussian_half_line() {
        let e = integrate_to_infinity(|x| (-x * x).exp(), 0.0, 1.0, Options::default()).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = Options { abs_tol: 1e-15, rel_tol: 0.0, max_intervals: 4 };
        assert!(integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, opts).is_err());
    }
}
