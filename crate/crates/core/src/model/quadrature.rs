//! Quadrature rules and the distributions of jump aggregates.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussLaguerre, GaussLegendre};
use num_complex::Complex64;

use crate::error::{PricingError, Result};
use crate::model::JumpLaw;

pub const DEFAULT_JUMP_NODES: usize = 32;

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn legendre(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Nodes `(x_i, w_i)` with `Σ w_i g(x_i) ≈ E[g(X₁ + … + X_l)]`.
///
/// Exponential sums are Gamma(l, θ) and use generalized Gauss–Laguerre with
/// exponent `l − 1`; fixed jumps collapse to the single point `l·c`.
/// `l = 0` yields the point mass at zero.
pub fn jump_sum_nodes(law: &JumpLaw, l: usize, n_nodes: usize) -> Result<Vec<(f64, f64)>> {
    if l == 0 {
        return Ok(vec![(0.0, 1.0)]);
    }
    match *law {
        JumpLaw::Fixed { c } => Ok(vec![(l as f64 * c, 1.0)]),
        JumpLaw::Exponential { theta } => {
            let alpha = FiniteAboveNegOneF64::new(l as f64 - 1.0).expect("l >= 1");
            let rule = GaussLaguerre::new(NonZeroUsize::new(n_nodes.max(1)).unwrap(), alpha);
            // Raw weights integrate against x^{l-1}e^{-x}; normalising by their
            // sum turns them into Gamma(l, 1) probabilities.
            let total: f64 = rule.iter().map(|(_, w)| *w).sum();
            Ok(rule.iter().map(|(x, w)| (*x / theta, *w / total)).collect())
        }
        JumpLaw::Lognormal { .. } => Err(PricingError::UnsupportedLaw(
            "sums of lognormal rate jumps have no quadrature rule; use the Monte Carlo engine"
                .into(),
        )),
    }
}

/// Law of `Π_{i=1}^n Y_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProductLaw {
    Constant(f64),
    /// `ln Π Y ~ Normal(mu, sigma²)`.
    Lognormal { mu: f64, sigma: f64 },
}

impl ProductLaw {
    pub fn log_shift(&self) -> LogShift {
        match *self {
            Self::Constant(c) => LogShift::point(c.ln()),
            Self::Lognormal { mu, sigma } => LogShift {
                mean: mu,
                var: sigma * sigma,
            },
        }
    }
}

pub fn product_law_shift(law: &JumpLaw, n: usize) -> Result<ProductLaw> {
    if n == 0 {
        return Ok(ProductLaw::Constant(1.0));
    }
    match *law {
        JumpLaw::Fixed { c } => Ok(ProductLaw::Constant(c.powi(n as i32))),
        JumpLaw::Lognormal { mu, sigma } => Ok(ProductLaw::Lognormal {
            mu: n as f64 * mu,
            sigma: (n as f64).sqrt() * sigma,
        }),
        JumpLaw::Exponential { .. } => Err(PricingError::UnsupportedLaw(
            "products of exponential asset jumps need the n-fold density; use the Monte Carlo engine"
                .into(),
        )),
    }
}

/// An independent Gaussian (possibly degenerate) shift `y` of the log price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogShift {
    pub mean: f64,
    pub var: f64,
}

impl LogShift {
    pub const ZERO: LogShift = LogShift {
        mean: 0.0,
        var: 0.0,
    };

    pub fn point(mean: f64) -> Self {
        Self { mean, var: 0.0 }
    }

    /// `E[e^{iuy}]` for complex `u`.
    pub fn cf(&self, u: Complex64) -> Complex64 {
        let i = Complex64::i();
        (i * u * self.mean - 0.5 * u * u * self.var).exp()
    }

    /// Shift of `a·y₁ + b·y₂` for independent shifts.
    pub fn combine(a: f64, y1: LogShift, b: f64, y2: LogShift) -> LogShift {
        LogShift {
            mean: a * y1.mean + b * y2.mean,
            var: a * a * y1.var + b * b * y2.var,
        }
    }

    pub fn then(self, extra_mean: f64) -> Self {
        Self {
            mean: self.mean + extra_mean,
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expect(nodes: &[(f64, f64)], g: impl Fn(f64) -> f64) -> f64 {
        nodes.iter().map(|(x, w)| w * g(*x)).sum()
    }

    #[test]
    fn fixed_sum_is_a_point() {
        let nodes = jump_sum_nodes(&JumpLaw::fixed(0.001), 3, 32).unwrap();
        assert_eq!(nodes.len(), 1);
        assert!((nodes[0].0 - 0.003).abs() < 1e-18);
        assert_eq!(nodes[0].1, 1.0);
    }

    #[test]
    fn exponential_sum_means() {
        let law = JumpLaw::exponential(1000.0);
        let one = jump_sum_nodes(&law, 1, 32).unwrap();
        assert!((expect(&one, |x| x) - 0.001).abs() < 1e-12);
        let five = jump_sum_nodes(&law, 5, 32).unwrap();
        assert!((expect(&five, |x| x) - 0.005).abs() < 1e-10);
    }

    #[test]
    fn gamma_moments_up_to_third_order() {
        // E[G^p] for G ~ Gamma(l, θ) is l(l+1)…(l+p−1)/θ^p.
        for theta in [1000.0, 2.5] {
            let law = JumpLaw::exponential(theta);
            for l in 1..=10 {
                let nodes = jump_sum_nodes(&law, l, 32).unwrap();
                let mut rising = 1.0;
                for p in 1..=3 {
                    rising *= (l + p - 1) as f64;
                    let exact = rising / theta.powi(p as i32);
                    let got = expect(&nodes, |x| x.powi(p as i32));
                    assert!(((got - exact) / exact).abs() < 1e-8, "l={l} p={p}");
                }
            }
        }
    }

    #[test]
    fn lognormal_rate_sum_unsupported() {
        let e = jump_sum_nodes(&JumpLaw::lognormal(0.0, 0.1), 2, 32).unwrap_err();
        assert_eq!(e.name(), "UnsupportedLaw");
    }

    #[test]
    fn product_laws() {
        assert_eq!(
            product_law_shift(&JumpLaw::fixed(1.01), 7).unwrap(),
            ProductLaw::Constant(1.01f64.powi(7))
        );
        for law in [
            JumpLaw::fixed(1.3),
            JumpLaw::lognormal(0.2, 0.1),
            JumpLaw::exponential(3.0),
        ] {
            assert_eq!(product_law_shift(&law, 0).unwrap(), ProductLaw::Constant(1.0));
        }
        match product_law_shift(&JumpLaw::lognormal(0.0, 0.1), 4).unwrap() {
            ProductLaw::Lognormal { mu, sigma } => {
                assert_eq!(mu, 0.0);
                assert!((sigma - 0.2).abs() < 1e-15);
                assert!((sigma * sigma - 4.0 * 0.01).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(product_law_shift(&JumpLaw::exponential(3.0), 2).is_err());
    }

    #[test]
    fn log_shift_cf_matches_gaussian() {
        let y = LogShift {
            mean: 0.1,
            var: 0.04,
        };
        // E[e^{y}] = e^{μ + σ²/2}
        let at_minus_i = y.cf(Complex64::new(0.0, -1.0));
        assert!((at_minus_i.re - (0.1f64 + 0.02).exp()).abs() < 1e-15);
        assert!(at_minus_i.im.abs() < 1e-15);
        assert_eq!(y.cf(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let nodes = legendre(0.0, 2.0, 5);
        assert!((expect(&nodes, |x| x.powi(9)) - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }
}
