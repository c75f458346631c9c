use crate::error::{PricingError, Result};
use crate::fourier::black_scholes_reference;
use crate::model::poisson::{poisson_weight, truncation};
use crate::model::{JumpLaw, POISSON_CAP};

/// Merton's jump-diffusion call under a flat rate: a Poisson mixture of
/// Black–Scholes prices with the spot compensated by `e^{−λ₁C_Yτ}`.
pub fn merton_reference(
    s: f64,
    k: f64,
    sigma: f64,
    rate: f64,
    tau: f64,
    lambda1: f64,
    y_law: &JumpLaw,
) -> Result<f64> {
    let c_y = y_law.mean() - 1.0;
    let comp = -lambda1 * c_y * tau;
    let cut = truncation(lambda1, tau, 1e-12, POISSON_CAP);
    let mut total = 0.0;
    for n in 0..=cut.n_max {
        let p = poisson_weight(lambda1, tau, n);
        let nf = n as f64;
        let term = match *y_law {
            JumpLaw::Fixed { c } => {
                black_scholes_reference(s * (nf * c.ln() + comp).exp(), k, sigma, rate, tau)
            }
            JumpLaw::Lognormal { mu, sigma: sj } => {
                let spot = s * (nf * mu + 0.5 * nf * sj * sj + comp).exp();
                let vol = (sigma * sigma + nf * sj * sj / tau).sqrt();
                black_scholes_reference(spot, k, vol, rate, tau)
            }
            JumpLaw::Exponential { .. } => {
                return Err(PricingError::UnsupportedLaw(
                    "Merton's series needs fixed or lognormal asset jumps".into(),
                ))
            }
        };
        total += p * term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_jumps_are_black_scholes() {
        let bs = black_scholes_reference(110.0, 100.0, 0.05, 0.03, 1.0);
        let none = merton_reference(110.0, 100.0, 0.05, 0.03, 1.0, 0.0, &JumpLaw::fixed(1.3)).unwrap();
        assert_eq!(none, bs);
        let unit = merton_reference(110.0, 100.0, 0.05, 0.03, 1.0, 2.5, &JumpLaw::fixed(1.0)).unwrap();
        assert!((unit - bs).abs() < 1e-10);
    }

    #[test]
    fn lognormal_reduces_to_wider_black_scholes_for_one_certain_jump_scale() {
        // zero-variance lognormal jumps act like fixed e^{mu}
        let a = merton_reference(110.0, 100.0, 0.05, 0.03, 1.0, 1.0, &JumpLaw::lognormal(0.01, 0.0))
            .unwrap();
        let b = merton_reference(110.0, 100.0, 0.05, 0.03, 1.0, 1.0, &JumpLaw::fixed(0.01f64.exp()))
            .unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}
