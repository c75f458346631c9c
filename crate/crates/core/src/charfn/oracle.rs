//! Direct RK4 integration of the affine Riccati system, used as an
//! independent check on the power series and as the `σ_r = 0` fallback.

use num_complex::Complex64;

use super::{drift_weight, Loadings};
use crate::bond::loading_g;
use crate::error::{PricingError, Result};
use crate::model::{AssetParams, RateParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Initial number of RK4 steps over `[0, τ]`.
    pub steps: usize,
    /// Accepted step-halving error estimate, relative to `|(B, D)|`.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            steps: 10_000,
            tol: 1e-11,
            max_steps: 1_280_000,
        }
    }
}

fn integrate(rate: &RateParams, sigma: f64, phi: Complex64, tau: f64, steps: usize) -> Loadings {
    let i = Complex64::i();
    let s2 = rate.sigma_r * rate.sigma_r;
    let diffusion = -0.5 * sigma * sigma * (phi * phi + i * phi);
    let rhs = |s: f64, d: Complex64| {
        let dd = i * phi - rate.k * d + s2 * loading_g(rate, s) * d + 0.5 * s2 * d * d;
        let db = d * drift_weight(rate, s) + diffusion;
        (dd, db)
    };
    let h = tau / steps as f64;
    let (mut d, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for n in 0..steps {
        let s = n as f64 * h;
        let (k1, l1) = rhs(s, d);
        let (k2, l2) = rhs(s + 0.5 * h, d + 0.5 * h * k1);
        let (k3, l3) = rhs(s + 0.5 * h, d + 0.5 * h * k2);
        let (k4, l4) = rhs(s + h, d + h * k3);
        d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        b += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
    Loadings { b, d }
}

/// `(B, D)` by RK4, doubling the step count until the step-halving
/// estimate meets `opts.tol`.
pub(crate) fn loadings(
    rate: &RateParams,
    sigma: f64,
    phi: Complex64,
    tau: f64,
    opts: &OracleOptions,
) -> Result<Loadings> {
    if tau == 0.0 {
        return Ok(Loadings {
            b: Complex64::new(0.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        });
    }
    let mut steps = opts.steps.max(2);
    let mut coarse = integrate(rate, sigma, phi, tau, steps / 2);
    loop {
        let fine = integrate(rate, sigma, phi, tau, steps);
        // Richardson: the fine error is about 1/15 of the difference
        let err = ((fine.b - coarse.b).norm() + (fine.d - coarse.d).norm()) / 15.0;
        let scale = 1.0 + fine.b.norm() + fine.d.norm();
        if err <= opts.tol * scale {
            return Ok(fine);
        }
        if steps * 2 > opts.max_steps {
            return Err(PricingError::StepCountExceeded {
                max_steps: opts.max_steps,
            });
        }
        coarse = fine;
        steps *= 2;
    }
}

/// `exp(B + D r + iφz)` with `(B, D)` from RK4 integration.
pub fn riccati_oracle(
    rate: &RateParams,
    asset: &AssetParams,
    phi: Complex64,
    tau: f64,
    z: f64,
    r: f64,
) -> Result<Complex64> {
    riccati_oracle_with(rate, asset, phi, tau, z, r, &OracleOptions::default())
}

pub fn riccati_oracle_with(
    rate: &RateParams,
    asset: &AssetParams,
    phi: Complex64,
    tau: f64,
    z: f64,
    r: f64,
    opts: &OracleOptions,
) -> Result<Complex64> {
    Ok(loadings(rate, asset.sigma, phi, tau, opts)?.eval(phi, z, r))
}
