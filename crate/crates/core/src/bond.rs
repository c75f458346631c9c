//! Zero-coupon bond under the jump-extended CIR rate.
//!
//! `b(s, r) = exp(A(s) + G(s) r)` with `s = T − t`, where `G` solves
//! `G' = −1 − kG + ½σ_r²G²` and
//! `A' = G(ka − λC_X) + λ(E[e^{GX}] − 1)`, both vanishing at `s = 0`.

use crate::error::{PricingError, Result};
use crate::model::quadrature::legendre;
use crate::model::{JumpLaw, RateParams};

pub const DEFAULT_OUTER_NODES: usize = 64;

/// Relative disagreement between `n` and `2n` node jump integrals that
/// counts as a failed refinement.
const REFINEMENT_TOL: f64 = 1e-10;

/// Rate loading `G(s)`.
pub fn loading_g(rate: &RateParams, s: f64) -> f64 {
    let k = rate.k;
    let m = rate.m();
    if s < 1e-8 {
        return -s + 0.5 * k * s * s;
    }
    let ms = m * s;
    if ms <= 1.0 {
        let e = ms.exp_m1();
        -2.0 * e / (2.0 * m + (k + m) * e)
    } else {
        // divide through by e^{ms} so large s cannot overflow
        let q = (-ms).exp();
        -2.0 * (1.0 - q) / (2.0 * m * q + (k + m) * (1.0 - q))
    }
}

/// `∫₀^s G(u) du` in closed form.
pub fn integral_g(rate: &RateParams, s: f64) -> f64 {
    let k = rate.k;
    let sig2 = rate.sigma_r * rate.sigma_r;
    if sig2 == 0.0 {
        return -(s + (-k * s).exp_m1() / k) / k;
    }
    if sig2 < 1e-8 * k * k {
        // the closed form cancels catastrophically as σ_r → 0
        return legendre(0.0, s, DEFAULT_OUTER_NODES)
            .iter()
            .map(|&(u, w)| w * loading_g(rate, u))
            .sum();
    }
    let m = rate.m();
    let ms = m * s;
    let log_term = if ms <= 1.0 {
        ((m + k) * ms.exp_m1() / (2.0 * m)).ln_1p()
    } else {
        ms + ((m + k) / (2.0 * m) + (m - k) / (2.0 * m) * (-ms).exp()).ln()
    };
    (2.0 / sig2) * (0.5 * (m + k) * s - log_term)
}

/// `λ ∫₀^s (E[e^{G(u)X}] − 1) du` by Gauss–Legendre with `n` nodes.
fn jump_integral(rate: &RateParams, s: f64, n: usize) -> f64 {
    if rate.lambda == 0.0 || s == 0.0 {
        return 0.0;
    }
    let law: JumpLaw = rate.x_law;
    rate.lambda
        * legendre(0.0, s, n)
            .iter()
            .map(|&(u, w)| w * law.mgf_minus_one(loading_g(rate, u)))
            .sum::<f64>()
}

/// Constant loading `A(s)` using `outer_nodes` for the jump integral.
pub fn loading_a_with(rate: &RateParams, s: f64, outer_nodes: usize) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let drift = rate.k * rate.a - rate.lambda * rate.c_x();
    let coarse = jump_integral(rate, s, outer_nodes);
    if rate.lambda != 0.0 {
        let fine = jump_integral(rate, s, 2 * outer_nodes);
        let delta = (fine - coarse).abs();
        if delta > REFINEMENT_TOL * coarse.abs().max(1e-3) {
            return Err(PricingError::QuadratureNotConverged {
                what: "bond jump integral",
                delta,
            });
        }
    }
    Ok(drift * integral_g(rate, s) + coarse)
}

pub fn loading_a(rate: &RateParams, s: f64) -> Result<f64> {
    loading_a_with(rate, s, DEFAULT_OUTER_NODES)
}

/// Bond loadings at one maturity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondLoading {
    pub s: f64,
    pub g: f64,
    pub a: f64,
    pub m: f64,
}

impl BondLoading {
    pub fn new(rate: &RateParams, s: f64) -> Result<Self> {
        Ok(Self {
            s,
            g: loading_g(rate, s),
            a: loading_a(rate, s)?,
            m: rate.m(),
        })
    }

    pub fn price(&self, r: f64) -> f64 {
        (self.a + self.g * r).exp()
    }
}

/// `b(s, r) = exp(A(s) + G(s) r)`.
pub fn bond_price(rate: &RateParams, r: f64, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(BondLoading::new(rate, s)?.price(r))
}
