//! Finite-range symmetric jump kernel p(·).

use crate::error::{Error, Result};

/// Symmetric kernel stored by its positive half p(1..=R); p(-r) = p(r) and
/// p(0) = 0 by construction. Weights are not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRangeKernel {
    weights: Vec<f64>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteRangeKernel {
    /// Builds and validates a kernel from p(1), ..., p(R).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let k = FiniteRangeKernel { weights };
        k.validate()?;
        Ok(k)
    }

    /// Builds without validation (used to exercise `validate`).
    pub fn unchecked(weights: Vec<f64>) -> Self {
        FiniteRangeKernel { weights }
    }

    /// p(±1) = 1/2.
    pub fn nearest_neighbor() -> Self {
        FiniteRangeKernel { weights: vec![0.5] }
    }

    /// p(±1) = p(±2) = 1/4.
    pub fn range_two() -> Self {
        FiniteRangeKernel { weights: vec![0.25, 0.25] }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "nn" | "nearest-neighbor" | "nearest_neighbor" => Some(Self::nearest_neighbor()),
            "range2" | "range-2" => Some(Self::range_two()),
            _ => None,
        }
    }

    /// gcd of {r ≥ 1 : p(r) > 0}; 0 for the zero kernel. The walk is
    /// irreducible on ℤ exactly when this is 1.
    pub fn support_gcd(&self) -> usize {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .fold(0, |g, (i, _)| gcd(g, i + 1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::InvalidKernel("range must be at least 1".into()));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidKernel("weights must be finite and nonnegative".into()));
        }
        match self.support_gcd() {
            0 => Err(Error::AllZero),
            1 => Ok(()),
            g => Err(Error::NonIrreducible { gcd: g }),
        }
    }

    pub fn range(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// p(r) for any integer r.
    pub fn p(&self, r: i64) -> f64 {
        let a = r.unsigned_abs() as usize;
        if a == 0 || a > self.weights.len() {
            0.0
        } else {
            self.weights[a - 1]
        }
    }

    /// χ = Σ_{r≥1} r² p(r).
    pub fn chi(&self) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| ((i + 1) * (i + 1)) as f64 * w).sum()
    }

    /// Σ_{r∈A} p(r), the total jump weight.
    pub fn total_weight(&self) -> f64 {
        2.0 * self.weights.iter().sum::<f64>()
    }

    /// The jump set A = {-R..R} \ {0}.
    pub fn jumps(&self) -> Vec<i64> {
        let r = self.range() as i64;
        (-r..=r).filter(|&x| x != 0).collect()
    }

    /// (A_N, A_N⁺, B_N) as points of (1/N)ℤ.
    pub fn support_sets(&self, n: u32) -> SupportSets {
        let r = self.range() as i64;
        let scale = 1.0 / n as f64;
        SupportSets {
            a: self.jumps().into_iter().map(|x| x as f64 * scale).collect(),
            a_plus: (1..=r).map(|x| x as f64 * scale).collect(),
            b: (-2 * r..=2 * r).map(|x| x as f64 * scale).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSets {
    pub a: Vec<f64>,
    pub a_plus: Vec<f64>,
    pub b: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation_cases() {
        assert!(FiniteRangeKernel::new(vec![0.5]).is_ok());
        assert!(matches!(
            FiniteRangeKernel::new(vec![0.0, 0.5]),
            Err(Error::NonIrreducible { gcd: 2 })
        ));
        assert!(FiniteRangeKernel::new(vec![0.25, 0.25]).is_ok());
        assert!(matches!(FiniteRangeKernel::new(vec![0.0, 0.0]), Err(Error::AllZero)));
        assert!(matches!(
            FiniteRangeKernel::new(vec![0.0, 0.0, 1.0 / 3.0]),
            Err(Error::NonIrreducible { gcd: 3 })
        ));
    }

    #[test]
    fn chi_values() {
        assert_eq!(FiniteRangeKernel::nearest_neighbor().chi(), 0.5);
        assert_eq!(FiniteRangeKernel::range_two().chi(), 1.25);
    }

    #[test]
    fn support_set_examples() {
        let nn = FiniteRangeKernel::nearest_neighbor();
        assert_eq!(nn.support_sets(1).a, vec![-1.0, 1.0]);
        assert_eq!(nn.support_sets(10).a, vec![-0.1, 0.1]);
        let r2 = FiniteRangeKernel::range_two();
        assert_eq!(r2.support_sets(1).b, (-4..=4).map(|x| x as f64).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn chi_linear_and_positive(w in proptest::collection::vec(0.0f64..2.0, 1..5), c in 0.1f64..10.0) {
            let mut w = w;
            w[0] += 0.01;
            let k = FiniteRangeKernel::new(w.clone()).unwrap();
            let scaled = FiniteRangeKernel::new(w.iter().map(|x| c * x).collect()).unwrap();
            prop_assert!(k.chi() > 0.0);
            prop_assert!((scaled.chi() - c * k.chi()).abs() <= 1e-12 * scaled.chi());
        }

        #[test]
        fn support_sets_scale(r in 1usize..5, n in 1u32..50) {
            let k = FiniteRangeKernel::unchecked(vec![1.0; r]);
            let one = k.support_sets(1);
            let s = k.support_sets(n);
            for (x, y) in one.b.iter().zip(&s.b) {
                prop_assert!((x / n as f64 - y).abs() < 1e-15);
            }
            for (x, y) in one.a.iter().zip(&s.a) {
                prop_assert!((x / n as f64 - y).abs() < 1e-15);
            }
        }
    }
}
