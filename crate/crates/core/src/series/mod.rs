//! Poisson-weighted jump series.
//!
//! `F(S, r, τ) = Σ_l Σ_n P_l(λτ) P_n(λ₁τ) E[W(S ΠY e^{−λ₁C_Yτ}, r + ΣX, τ)]`
//! and the option price `U = b(τ, r)·F`. Two-asset geometric baskets add a
//! third index for the second asset's jumps.

mod basket;
mod convergence;
mod merton;

pub use basket::{g_basket, g_basket_with, geometric_reduction, GeometricReduction};
pub use convergence::{convergence_study, ConvergenceRow, Study};
pub use merton::merton_reference;

use serde::Serialize;

use crate::bond::bond_price;
use crate::charfn::CharFnOptions;
use crate::error::{PricingError, Result};
use crate::fourier::{QuadratureSpec, TransformGrid};
use crate::model::poisson::{poisson_weight, truncation};
use crate::model::quadrature::{jump_sum_nodes, product_law_shift, LogShift, DEFAULT_JUMP_NODES};
use crate::model::{AssetParams, MarketState, PriceResult, RateParams, TermsUsed, POISSON_CAP};

/// Where the jump series are cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTruncation {
    pub l_max: usize,
    pub n_max: usize,
    pub m_max: usize,
    /// Discarded Poisson mass allowed per index.
    pub mass_tol: f64,
    /// Successive-difference level regarded as converged.
    pub term_tol: f64,
    /// Quadrature nodes for sums of exponential rate jumps.
    pub jump_nodes: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self {
            l_max: POISSON_CAP,
            n_max: POISSON_CAP,
            m_max: POISSON_CAP,
            mass_tol: 1e-10,
            term_tol: 1e-10,
            jump_nodes: DEFAULT_JUMP_NODES,
        }
    }
}

impl SeriesTruncation {
    /// Square truncation at index `n` for every series, ignoring Poisson mass.
    pub fn square(n: usize) -> Self {
        Self {
            l_max: n,
            n_max: n,
            m_max: n,
            mass_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_tol >= 0.0 && self.term_tol > 0.0) || self.jump_nodes == 0 {
            return Err(PricingError::invalid(
                "truncation",
                "tolerances must be nonnegative and jump_nodes >= 1",
            ));
        }
        Ok(())
    }
}

/// One `(l, n[, m])` term of a jump series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub l: usize,
    pub n: usize,
    pub m: Option<usize>,
    /// Product of the Poisson weights.
    pub weight: f64,
    /// Conditional expectation `E_{l,n[,m]}[W]`.
    pub expectation: f64,
}

/// Terms of a series plus its diagonal partial sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub terms: Vec<SeriesTerm>,
    /// Partial sums over `l, n[, m] ≤ L` for `L = 0, 1, …`.
    pub rows: Vec<ConvergenceRow>,
    pub final_terms: TermsUsed,
}

impl ConvergenceReport {
    fn from_terms(terms: Vec<SeriesTerm>, final_terms: TermsUsed) -> Self {
        let depth = final_terms
            .l
            .max(final_terms.n)
            .max(final_terms.m.unwrap_or(0));
        let mut rows = Vec::with_capacity(depth + 1);
        let mut prev = 0.0;
        for big_l in 0..=depth {
            let sum: f64 = terms
                .iter()
                .filter(|t| t.l <= big_l && t.n <= big_l && t.m.unwrap_or(0) <= big_l)
                .map(|t| t.weight * t.expectation)
                .sum();
            rows.push(ConvergenceRow {
                index: big_l,
                partial_sum: sum,
                abs_diff: (sum - prev).abs(),
            });
            prev = sum;
        }
        Self {
            terms,
            rows,
            final_terms,
        }
    }

    /// Value of the full (rectangular) truncation.
    pub fn total(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * t.expectation).sum()
    }
}

/// Poisson cut for one index: `(largest index, converged)`.
fn poisson_cut(rate: f64, tau: f64, trunc: &SeriesTruncation, cap: usize) -> (usize, bool) {
    if trunc.mass_tol == 0.0 {
        return (if rate * tau == 0.0 { 0 } else { cap }, true);
    }
    let t = truncation(rate, tau, trunc.mass_tol, cap);
    (t.n_max, t.converged)
}

/// Log shift of `ΠY·e^{−λ₁C_Yτ}` for `n` asset jumps.
pub(crate) fn asset_shift(asset: &AssetParams, tau: f64, n: usize) -> Result<LogShift> {
    let compensator = -asset.lambda1 * asset.c_y() * tau;
    Ok(product_law_shift(&asset.y_law, n)?.log_shift().then(compensator))
}

/// Evaluation engine shared by the single-asset and basket pricers.
pub(crate) struct SeriesEngine {
    grid: TransformGrid,
    rate: RateParams,
    jump_nodes: usize,
    quad_error: f64,
}

impl SeriesEngine {
    pub(crate) fn new(
        rate: &RateParams,
        sigma: f64,
        tau: f64,
        spec: QuadratureSpec,
        opts: CharFnOptions,
        jump_nodes: usize,
    ) -> Result<Self> {
        Ok(Self {
            grid: TransformGrid::new(rate, sigma, tau, spec, opts)?,
            rate: *rate,
            jump_nodes,
            quad_error: 0.0,
        })
    }

    /// `E[W(spot·e^{y}, r + Σ_{i≤l} X_i)]`; accumulates `weight`-scaled
    /// quadrature error.
    pub(crate) fn expectation(
        &mut self,
        spot: f64,
        r: f64,
        strike: f64,
        l: usize,
        shift: LogShift,
        weight: f64,
    ) -> Result<f64> {
        let nodes = jump_sum_nodes(&self.rate.x_law, l, self.jump_nodes)?;
        let mut e = 0.0;
        for (x, w) in nodes {
            let inv = self.grid.invert(spot, r + x, strike, shift)?;
            e += w * inv.value;
            self.quad_error += weight * w * inv.quad_error;
        }
        Ok(e)
    }
}

fn check_single(rate: &RateParams, asset: &AssetParams, state: &MarketState) -> Result<()> {
    let mut v = rate.violations();
    v.extend(asset.violations());
    v.extend(state.violations());
    if v.is_empty() {
        Ok(())
    } else {
        Err(PricingError::InvalidParameter(v))
    }
}

/// `F` by the double jump series with default quadrature.
pub fn f_single(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    trunc: &SeriesTruncation,
) -> Result<(PriceResult, ConvergenceReport)> {
    f_single_with(
        rate,
        asset,
        state,
        trunc,
        &QuadratureSpec::default(),
        &CharFnOptions::default(),
    )
}

pub fn f_single_with(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    trunc: &SeriesTruncation,
    spec: &QuadratureSpec,
    opts: &CharFnOptions,
) -> Result<(PriceResult, ConvergenceReport)> {
    check_single(rate, asset, state)?;
    trunc.validate()?;
    let tau = state.tau;
    let (l_top, l_ok) = poisson_cut(rate.lambda, tau, trunc, trunc.l_max);
    let (n_top, n_ok) = poisson_cut(asset.lambda1, tau, trunc, trunc.n_max);
    // validate the jump laws before any pricing work
    jump_sum_nodes(&rate.x_law, l_top.min(1), 1)?;
    asset_shift(asset, tau, n_top.min(1))?;

    let mut engine = SeriesEngine::new(rate, asset.sigma, tau, *spec, *opts, trunc.jump_nodes)?;
    let mut terms = Vec::with_capacity((l_top + 1) * (n_top + 1));
    for l in 0..=l_top {
        let pl = poisson_weight(rate.lambda, tau, l);
        for n in 0..=n_top {
            let weight = pl * poisson_weight(asset.lambda1, tau, n);
            let expectation = if weight == 0.0 {
                0.0
            } else {
                let shift = asset_shift(asset, tau, n)?;
                engine.expectation(state.spot, state.r, state.strike, l, shift, weight)?
            };
            terms.push(SeriesTerm {
                l,
                n,
                m: None,
                weight,
                expectation,
            });
        }
    }
    let used = TermsUsed {
        l: l_top,
        n: n_top,
        m: None,
    };
    let report = ConvergenceReport::from_terms(terms, used);
    let result = PriceResult {
        value: report.total(),
        terms_used: used,
        quad_error: engine.quad_error,
        converged: l_ok && n_ok,
        stderr: None,
    };
    Ok((result, report))
}

/// `U = b(τ, r)·F`.
pub fn option_price(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    trunc: &SeriesTruncation,
) -> Result<PriceResult> {
    option_price_with(
        rate,
        asset,
        state,
        trunc,
        &QuadratureSpec::default(),
        &CharFnOptions::default(),
    )
}

pub fn option_price_with(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    trunc: &SeriesTruncation,
    spec: &QuadratureSpec,
    opts: &CharFnOptions,
) -> Result<PriceResult> {
    let (f, _) = f_single_with(rate, asset, state, trunc, spec, opts)?;
    let b = bond_price(rate, state.r, state.tau)?;
    Ok(PriceResult {
        value: b * f.value,
        quad_error: b * f.quad_error,
        ..f
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::w_price;
    use crate::model::{reference, JumpLaw};

    #[test]
    fn no_jumps_is_w() {
        let rate = reference::rate().without_jumps();
        let asset = reference::asset().without_jumps();
        let state = reference::market();
        let (f, report) = f_single(&rate, &asset, &state, &SeriesTruncation::default()).unwrap();
        let w = w_price(&rate, &asset, &state, &QuadratureSpec::default()).unwrap();
        assert_eq!(f.value, w.value);
        assert_eq!(report.terms.len(), 1);
        assert_eq!(f.terms_used, TermsUsed { l: 0, n: 0, m: None });
    }

    #[test]
    fn unit_asset_jump_collapses() {
        let rate = reference::rate();
        let state = reference::market();
        let unit = AssetParams {
            y_law: JumpLaw::fixed(1.0),
            ..reference::asset()
        };
        let (with, _) = f_single(&rate, &unit, &state, &SeriesTruncation::default()).unwrap();
        let (without, _) =
            f_single(&rate, &unit.without_jumps(), &state, &SeriesTruncation::default()).unwrap();
        assert!((with.value - without.value).abs() < 1e-8);
    }

    #[test]
    fn zero_intensity_gives_identical_surviving_terms() {
        // λ₁ = 0 leaves the rate-jump series Σ_l P_l E_l[W(S, r + ΣX)]
        let rate = reference::rate();
        let state = reference::market();
        let trunc = SeriesTruncation::default();
        let still = reference::asset().without_jumps();
        let (f, collapsed) = f_single(&rate, &still, &state, &trunc).unwrap();
        assert!(collapsed.terms.iter().all(|t| t.n == 0));
        let mut engine = SeriesEngine::new(
            &rate,
            still.sigma,
            state.tau,
            QuadratureSpec::default(),
            CharFnOptions::default(),
            trunc.jump_nodes,
        )
        .unwrap();
        let mut direct = 0.0;
        for t in &collapsed.terms {
            let e = engine
                .expectation(state.spot, state.r, state.strike, t.l, LogShift::ZERO, 1.0)
                .unwrap();
            assert_eq!(t.expectation.to_bits(), e.to_bits());
            direct += poisson_weight(rate.lambda, state.tau, t.l) * e;
        }
        assert_eq!(f.value.to_bits(), direct.to_bits());
    }

    #[test]
    fn terms_nonnegative_and_partial_sums_monotone() {
        let (f, report) = f_single(
            &reference::rate(),
            &reference::asset(),
            &reference::market(),
            &SeriesTruncation::default(),
        )
        .unwrap();
        assert!(f.converged);
        assert!(report.terms.iter().all(|t| t.expectation >= 0.0));
        for w in report.rows.windows(2) {
            assert!(w[1].partial_sum >= w[0].partial_sum);
        }
        assert!((report.rows.last().unwrap().partial_sum - f.value).abs() < 1e-12);
    }

    #[test]
    fn expiry_returns_payoff() {
        let state = reference::market().with_tau(0.0);
        let u = option_price(
            &reference::rate(),
            &reference::asset(),
            &state,
            &SeriesTruncation::default(),
        )
        .unwrap();
        assert_eq!(u.value, 10.0);
    }

    #[test]
    fn unsupported_laws_are_named() {
        let state = reference::market();
        let asset = AssetParams {
            y_law: JumpLaw::exponential(1.0),
            ..reference::asset()
        };
        let e = f_single(&reference::rate(), &asset, &state, &SeriesTruncation::default())
            .unwrap_err();
        assert_eq!(e.name(), "UnsupportedLaw");
    }

    #[test]
    fn lognormal_asset_jumps_price() {
        let asset = AssetParams {
            y_law: JumpLaw::lognormal(0.0, 0.1),
            ..reference::asset()
        };
        let (f, _) = f_single(
            &reference::rate(),
            &asset,
            &reference::market(),
            &SeriesTruncation::default(),
        )
        .unwrap();
        assert!(f.converged && f.value > 10.0);
    }
}
