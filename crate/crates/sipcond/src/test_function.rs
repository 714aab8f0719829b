//! Closed-form compactly supported test functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smooth bump functions with closed-form derivatives and integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Zero,
    /// (1 + cos(π(x-c)/a))/2 on |x-c| ≤ a.
    RaisedCosine { center: f64, halfwidth: f64 },
    /// (1 - ((x-c)/a)²)³ on |x-c| ≤ a.
    PolyBump { center: f64, halfwidth: f64 },
    /// The derivative of a raised-cosine or polynomial bump (mean zero).
    Derivative(Box<TestFunction>),
}

impl TestFunction {
    pub fn raised_cosine(center: f64, halfwidth: f64) -> Self {
        TestFunction::RaisedCosine { center, halfwidth }
    }

    pub fn poly_bump(center: f64, halfwidth: f64) -> Self {
        TestFunction::PolyBump { center, halfwidth }
    }

    pub fn derivative_of(base: TestFunction) -> Self {
        TestFunction::Derivative(Box::new(base))
    }

    /// Parses `raised-cosine`, `poly` or `d-<base>` with the given placement.
    pub fn from_name(name: &str, center: f64, halfwidth: f64) -> Result<Self> {
        if !(halfwidth > 0.0) {
            return Err(Error::Config("phi_halfwidth must be positive".into()));
        }
        match name {
            "zero" => Ok(TestFunction::Zero),
            "raised-cosine" | "cosine" => Ok(Self::raised_cosine(center, halfwidth)),
            "poly" | "poly-bump" => Ok(Self::poly_bump(center, halfwidth)),
            _ => match name.strip_prefix("d-") {
                Some(base) if !base.starts_with("d-") => {
                    Ok(Self::derivative_of(Self::from_name(base, center, halfwidth)?))
                }
                _ => Err(Error::Config(format!("unknown test function `{name}`"))),
            },
        }
    }

    /// Closed support interval (empty functions report (0, 0)).
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Zero => (0.0, 0.0),
            TestFunction::RaisedCosine { center, halfwidth } | TestFunction::PolyBump { center, halfwidth } => {
                (center - halfwidth, center + halfwidth)
            }
            TestFunction::Derivative(b) => b.support(),
        }
    }

    /// (f, f', f'') at x.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        match self {
            TestFunction::Zero => (0.0, 0.0, 0.0),
            TestFunction::RaisedCosine { center, halfwidth: a } => {
                let s = (x - center) / a;
                if s.abs() >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (sn, cs) = (PI * s).sin_cos();
                (0.5 * (1.0 + cs), -0.5 * PI / a * sn, -0.5 * PI * PI / (a * a) * cs)
            }
            TestFunction::PolyBump { center, halfwidth: a } => {
                let s = (x - center) / a;
                if s.abs() >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let q = 1.0 - s * s;
                (q * q * q, -6.0 * s * q * q / a, -6.0 * q * (1.0 - 5.0 * s * s) / (a * a))
            }
            TestFunction::Derivative(b) => {
                let (_, d1, d2) = b.jet(x);
                (d1, d2, b.third(x))
            }
        }
    }

    fn third(&self, x: f64) -> f64 {
        match self {
            TestFunction::RaisedCosine { center, halfwidth: a } => {
                let s = (x - center) / a;
                if s.abs() >= 1.0 {
                    return 0.0;
                }
                0.5 * PI.powi(3) / a.powi(3) * (PI * s).sin()
            }
            TestFunction::PolyBump { center, halfwidth: a } => {
                let s = (x - center) / a;
                if s.abs() >= 1.0 {
                    return 0.0;
                }
                // d/ds of -6(1-s²)(1-5s²) = 12s(1-5s²) + 60s(1-s²) = 72s - 120s³
                (72.0 * s - 120.0 * s * s * s) / a.powi(3)
            }
            _ => f64::NAN,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.jet(x).1
    }

    /// ∫f in closed form.
    pub fn integral(&self) -> f64 {
        match self {
            TestFunction::Zero | TestFunction::Derivative(_) => 0.0,
            TestFunction::RaisedCosine { halfwidth, .. } => *halfwidth,
            TestFunction::PolyBump { halfwidth, .. } => 32.0 / 35.0 * halfwidth,
        }
    }

    /// ∫f² in closed form.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            TestFunction::Zero => 0.0,
            TestFunction::RaisedCosine { halfwidth, .. } => 0.75 * halfwidth,
            TestFunction::PolyBump { halfwidth, .. } => 2048.0 / 3003.0 * halfwidth,
            TestFunction::Derivative(b) => b.dirichlet_integral(),
        }
    }

    /// ∫(f')² in closed form.
    pub fn dirichlet_integral(&self) -> f64 {
        match self {
            TestFunction::Zero => 0.0,
            TestFunction::RaisedCosine { halfwidth, .. } => PI * PI / (4.0 * halfwidth),
            TestFunction::PolyBump { halfwidth, .. } => 9216.0 / (3465.0 * halfwidth),
            TestFunction::Derivative(b) => match **b {
                TestFunction::RaisedCosine { halfwidth, .. } => PI.powi(4) / (4.0 * halfwidth.powi(3)),
                TestFunction::PolyBump { halfwidth, .. } => 9216.0 / (315.0 * halfwidth.powi(3)),
                _ => f64::NAN,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TestFunction::Zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Options};

    fn all() -> Vec<TestFunction> {
        vec![
            TestFunction::raised_cosine(0.25, 1.0),
            TestFunction::raised_cosine(-0.1, 0.6),
            TestFunction::poly_bump(0.0, 1.3),
            TestFunction::derivative_of(TestFunction::raised_cosine(0.2, 0.9)),
            TestFunction::derivative_of(TestFunction::poly_bump(0.1, 1.1)),
        ]
    }

    fn quad<F: Fn(f64) -> f64>(f: &TestFunction, g: F) -> f64 {
        let (lo, hi) = f.support();
        integrate(g, lo, hi, Options::tol(1e-14, 1e-14)).unwrap().value
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for f in all() {
            assert!((quad(&f, |x| f.value(x)) - f.integral()).abs() < 1e-10, "{f:?}");
            assert!((quad(&f, |x| f.value(x).powi(2)) - f.l2_norm_sq()).abs() < 1e-8, "{f:?}");
            assert!((quad(&f, |x| f.derivative(x).powi(2)) - f.dirichlet_integral()).abs() < 1e-8, "{f:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in all() {
            for x in [-0.3, 0.05, 0.4, 0.7] {
                let (v, d1, d2) = f.jet(x);
                let fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let fd2 = (f.value(x + h) - 2.0 * v + f.value(x - h)) / (h * h);
                assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "{f:?} x={x}");
                assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "{f:?} x={x}");
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(TestFunction::from_name("poly", 0.0, 1.0).unwrap(), TestFunction::poly_bump(0.0, 1.0));
        assert!(matches!(TestFunction::from_name("d-raised-cosine", 0.0, 1.0).unwrap(), TestFunction::Derivative(_)));
        assert!(TestFunction::from_name("d-d-poly", 0.0, 1.0).is_err());
        assert!(TestFunction::from_name("spline", 0.0, 1.0).is_err());
    }
}
