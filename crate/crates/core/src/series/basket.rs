//! Geometric two-asset baskets by one-dimensional reduction.
//!
//! For `H = S₁^α S₂^{1−α}` the continuous auxiliary model makes `ln H`
//! conditionally Gaussian with variance rate `σ_H²` and a drift shortfall
//! `δ` relative to a traded asset, so `W^H(S₁, S₂) = W(S₁^α S₂^{1−α}e^{−δτ})`
//! priced with volatility `σ_H`.

use super::{asset_shift, poisson_cut, ConvergenceReport, SeriesEngine, SeriesTerm, SeriesTruncation};
use crate::charfn::CharFnOptions;
use crate::error::{PricingError, Result};
use crate::fourier::QuadratureSpec;
use crate::model::poisson::poisson_weight;
use crate::model::quadrature::{jump_sum_nodes, LogShift};
use crate::model::{BasketKind, BasketParams, BasketState, PriceResult, RateParams, TermsUsed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricReduction {
    pub alpha: f64,
    pub sigma_h: f64,
    pub delta: f64,
}

impl GeometricReduction {
    /// Spot of the equivalent single asset.
    pub fn spot(&self, s1: f64, s2: f64, tau: f64) -> f64 {
        s1.powf(self.alpha) * s2.powf(1.0 - self.alpha) * (-self.delta * tau).exp()
    }
}

pub fn geometric_reduction(basket: &BasketParams) -> Result<GeometricReduction> {
    let alpha = match basket.kind {
        BasketKind::Geometric { alpha } => alpha,
        BasketKind::Arithmetic { .. } => {
            return Err(PricingError::UnsupportedBasket(
                "arithmetic baskets have no transform reduction; use the Monte Carlo engine".into(),
            ))
        }
    };
    let (s1, s2) = (basket.asset1.sigma, basket.asset2.sigma);
    let beta = 1.0 - alpha;
    let var =
        alpha * alpha * s1 * s1 + beta * beta * s2 * s2 + 2.0 * basket.rho * alpha * beta * s1 * s2;
    let delta = 0.5 * (alpha * s1 * s1 + beta * s2 * s2) - 0.5 * var;
    Ok(GeometricReduction {
        alpha,
        sigma_h: var.max(0.0).sqrt(),
        delta,
    })
}

/// Triple jump series `G` for a geometric basket.
pub fn g_basket(
    rate: &RateParams,
    basket: &BasketParams,
    state: &BasketState,
    trunc: &SeriesTruncation,
) -> Result<(PriceResult, ConvergenceReport)> {
    g_basket_with(
        rate,
        basket,
        state,
        trunc,
        &QuadratureSpec::default(),
        &CharFnOptions::default(),
    )
}

pub fn g_basket_with(
    rate: &RateParams,
    basket: &BasketParams,
    state: &BasketState,
    trunc: &SeriesTruncation,
    spec: &QuadratureSpec,
    opts: &CharFnOptions,
) -> Result<(PriceResult, ConvergenceReport)> {
    let mut v = rate.violations();
    v.extend(basket.violations());
    v.extend(state.violations());
    if !v.is_empty() {
        return Err(PricingError::InvalidParameter(v));
    }
    trunc.validate()?;
    let red = geometric_reduction(basket)?;
    if red.sigma_h == 0.0 {
        return Err(PricingError::invalid(
            "rho",
            "the basket has zero effective volatility",
        ));
    }
    let tau = state.tau;
    let (a1, a2) = (&basket.asset1, &basket.asset2);
    let beta = 1.0 - red.alpha;
    // an asset with zero weight in H never moves the payoff
    let lambda1 = if red.alpha == 0.0 { 0.0 } else { a1.lambda1 };
    let lambda2 = if beta == 0.0 { 0.0 } else { a2.lambda1 };
    let (l_top, l_ok) = poisson_cut(rate.lambda, tau, trunc, trunc.l_max);
    let (n_top, n_ok) = poisson_cut(lambda1, tau, trunc, trunc.n_max);
    let (m_top, m_ok) = poisson_cut(lambda2, tau, trunc, trunc.m_max);
    jump_sum_nodes(&rate.x_law, l_top.min(1), 1)?;
    let shifts1 = (0..=n_top)
        .map(|n| asset_shift(a1, tau, n))
        .collect::<Result<Vec<_>>>()?;
    let shifts2 = (0..=m_top)
        .map(|m| asset_shift(a2, tau, m))
        .collect::<Result<Vec<_>>>()?;

    let spot = red.spot(state.spot[0], state.spot[1], tau);
    let mut engine = SeriesEngine::new(rate, red.sigma_h, tau, *spec, *opts, trunc.jump_nodes)?;
    let mut terms = Vec::new();
    for l in 0..=l_top {
        let pl = poisson_weight(rate.lambda, tau, l);
        for (n, y1) in shifts1.iter().enumerate() {
            let pn = poisson_weight(lambda1, tau, n);
            for (m, y2) in shifts2.iter().enumerate() {
                let weight = pl * pn * poisson_weight(lambda2, tau, m);
                let expectation = if weight == 0.0 {
                    0.0
                } else {
                    let shift = LogShift::combine(red.alpha, *y1, beta, *y2);
                    engine.expectation(spot, state.r, state.strike, l, shift, weight)?
                };
                terms.push(SeriesTerm {
                    l,
                    n,
                    m: Some(m),
                    weight,
                    expectation,
                });
            }
        }
    }
    let used = TermsUsed {
        l: l_top,
        n: n_top,
        m: Some(m_top),
    };
    let report = ConvergenceReport::from_terms(terms, used);
    let result = PriceResult {
        value: report.total(),
        terms_used: used,
        quad_error: engine.quad_error,
        converged: l_ok && n_ok && m_ok,
        stderr: None,
    };
    Ok((result, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference, AssetParams, JumpLaw, MarketState};
    use crate::series::f_single;

    fn basket(alpha: f64, rho: f64) -> BasketParams {
        BasketParams {
            asset1: reference::asset(),
            asset2: AssetParams {
                sigma: 0.08,
                lambda1: 0.5,
                y_law: JumpLaw::lognormal(-0.01, 0.05),
            },
            rho,
            kind: BasketKind::Geometric { alpha },
        }
    }

    fn state() -> BasketState {
        BasketState {
            spot: [110.0, 95.0],
            r: 0.03,
            tau: 1.0,
            strike: 100.0,
        }
    }

    #[test]
    fn full_weight_on_first_asset_is_single_asset() {
        let rate = reference::rate();
        let trunc = SeriesTruncation::default();
        let (g, _) = g_basket(&rate, &basket(1.0, 0.3), &state(), &trunc).unwrap();
        let single = MarketState::new(110.0, 0.03, 1.0, 100.0);
        let (f, _) = f_single(&rate, &reference::asset(), &single, &trunc).unwrap();
        assert!((g.value - f.value).abs() < 1e-12);
        assert_eq!(g.terms_used.m, Some(0));
    }

    #[test]
    fn perfect_correlation_equal_vols() {
        let b = BasketParams {
            asset2: reference::asset(),
            ..basket(0.4, 1.0)
        };
        let red = geometric_reduction(&b).unwrap();
        assert!((red.sigma_h - 0.05).abs() < 1e-15 && red.delta.abs() < 1e-15);
    }

    #[test]
    fn arithmetic_is_rejected() {
        let b = BasketParams {
            kind: BasketKind::Arithmetic {
                weights: [0.5, 0.5],
            },
            ..basket(0.5, 0.0)
        };
        let e = g_basket(&reference::rate(), &b, &state(), &SeriesTruncation::default()).unwrap_err();
        assert_eq!(e.name(), "UnsupportedBasket");
    }

    #[test]
    fn jumps_raise_the_basket_price_terms_sum_to_value() {
        let (g, report) = g_basket(
            &reference::rate(),
            &basket(0.5, 0.2),
            &state(),
            &SeriesTruncation::default(),
        )
        .unwrap();
        assert!(g.converged);
        assert!((report.total() - g.value).abs() < 1e-14);
        assert!(report.terms.iter().all(|t| t.expectation >= 0.0));
    }
}
