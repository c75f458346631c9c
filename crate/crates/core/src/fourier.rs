//! European call on the continuous auxiliary model by Fourier inversion.
//!
//! With forward `F = f(−i)`,
//! `Π₂ = ½ + (1/π)∫₀^∞ Re[e^{−iφ ln K} f(φ)/(iφ)] dφ` and
//! `Π₁ = ½ + (1/π)∫₀^∞ Re[e^{−iφ ln K} f(φ−i)/(iφ F)] dφ`, so that
//! `W = F·Π₁ − K·Π₂` is the forward-measure expectation of `(S_T − K)⁺`.
//! Both integrals run over successive Gauss–Legendre panels until a panel
//! contributes less than the tail tolerance.

use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::charfn::{loadings_with, CharFnOptions, Loadings, TimeNodes};
use crate::error::{PricingError, Result, Violation};
use crate::model::quadrature::{legendre, LogShift};
use crate::model::{AssetParams, MarketState, PriceResult, RateParams};

/// Panel layout of the inversion integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub phi_max_cap: f64,
    pub tail_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_width: 5.0,
            nodes_per_panel: 20,
            phi_max_cap: 200.0,
            tail_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(self.panel_width > 0.0 && self.panel_width.is_finite()) {
            v.push(Violation::new("panel_width", "panel_width must be > 0"));
        }
        if self.nodes_per_panel < 2 {
            v.push(Violation::new("nodes_per_panel", "nodes_per_panel must be >= 2"));
        }
        if !(self.phi_max_cap > 0.0) {
            v.push(Violation::new("phi_max", "phi_max must be > 0"));
        }
        if !(self.tail_tol > 0.0) {
            v.push(Violation::new("tail_tol", "tail_tol must be > 0"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(PricingError::InvalidParameter(v))
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    phi: f64,
    w: f64,
    /// Loadings at `φ` and at `φ − i`.
    at: Loadings,
    shifted: Loadings,
}

#[derive(Debug, Clone)]
struct Level {
    width: f64,
    panels: Vec<Vec<Node>>,
}

/// One inversion: exercise probabilities under the share and bond measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub forward: f64,
    pub p1: f64,
    pub p2: f64,
    pub value: f64,
    pub quad_error: f64,
    /// Upper end of the last panel used.
    pub phi_end: f64,
}

/// Loadings cached on the frequency nodes of one `(rate, σ, τ)` triple.
///
/// Spot and short-rate shifts only move `z` and `r`, which enter the
/// exponent linearly, so one grid serves every term of a jump series.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    rate: RateParams,
    sigma: f64,
    tau: f64,
    spec: QuadratureSpec,
    opts: CharFnOptions,
    time_nodes: TimeNodes,
    at_minus_i: Loadings,
    levels: Vec<Level>,
}

impl TransformGrid {
    pub fn new(
        rate: &RateParams,
        sigma: f64,
        tau: f64,
        spec: QuadratureSpec,
        opts: CharFnOptions,
    ) -> Result<Self> {
        spec.validate()?;
        let time_nodes = TimeNodes::new(rate, tau);
        let at_minus_i = loadings_with(rate, sigma, Complex64::new(0.0, -1.0), &time_nodes, &opts)?;
        Ok(Self {
            rate: *rate,
            sigma,
            tau,
            spec,
            opts,
            time_nodes,
            at_minus_i,
            levels: Vec::new(),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `ln f(−i)` for spot `1`, rate `r` and no shift.
    pub fn log_forward_factor(&self, r: f64) -> f64 {
        (self.at_minus_i.b + self.at_minus_i.d * r).re
    }

    /// Forward `E^T[S_T] = f(−i)`.
    pub fn forward(&self, spot: f64, r: f64, shift: LogShift) -> f64 {
        let cf = shift.cf(Complex64::new(0.0, -1.0)).re;
        spot * self.log_forward_factor(r).exp() * cf
    }

    fn panel(&self, width: f64, idx: usize) -> Result<Vec<Node>> {
        let lo = idx as f64 * width;
        let hi = (lo + width).min(self.spec.phi_max_cap);
        let i = Complex64::i();
        legendre(lo, hi, self.spec.nodes_per_panel)
            .into_iter()
            .map(|(phi, w)| {
                let c = Complex64::new(phi, 0.0);
                let at = loadings_with(&self.rate, self.sigma, c, &self.time_nodes, &self.opts)?;
                let shifted =
                    loadings_with(&self.rate, self.sigma, c - i, &self.time_nodes, &self.opts)?;
                Ok(Node {
                    phi,
                    w,
                    at,
                    shifted,
                })
            })
            .collect()
    }

    fn panel_count(&self, width: f64) -> usize {
        (self.spec.phi_max_cap / width - 1e-12).ceil().max(1.0) as usize
    }

    /// Panel width resolving an oscillation of frequency `x`: the largest
    /// `panel_width / 2^j` covering at most two periods.
    fn level_for(&mut self, x: f64) -> usize {
        let mut width = self.spec.panel_width;
        let mut j = 0;
        while width * x > 4.0 * std::f64::consts::PI && j < 30 {
            width *= 0.5;
            j += 1;
        }
        while self.levels.len() <= j {
            let w = self.spec.panel_width * 0.5f64.powi(self.levels.len() as i32);
            self.levels.push(Level {
                width: w,
                panels: Vec::new(),
            });
        }
        j
    }

    /// Inverts the transform of `ln S_T + y`, `y` an independent Gaussian
    /// shift, for spot `spot`, short rate `r` and strike `strike`.
    pub fn invert(&mut self, spot: f64, r: f64, strike: f64, shift: LogShift) -> Result<Inversion> {
        let z = spot.ln();
        let ln_k = strike.ln();
        if self.tau == 0.0 && shift.var == 0.0 {
            let s = spot * shift.mean.exp();
            let itm = if s > strike { 1.0 } else { 0.0 };
            return Ok(Inversion {
                forward: s,
                p1: itm,
                p2: itm,
                value: (s - strike).max(0.0),
                quad_error: 0.0,
                phi_end: 0.0,
            });
        }
        let forward = self.forward(spot, r, shift);
        let ln_f = forward.ln();
        let lvl = self.level_for((ln_f - ln_k).abs());
        let width = self.levels[lvl].width;
        let n_panels = self.panel_count(width);
        let i = Complex64::i();
        let (mut i1, mut i2) = (0.0, 0.0);
        let mut last = (f64::INFINITY, f64::INFINITY);
        let mut phi_end = 0.0;
        for p in 0..n_panels {
            if self.levels[lvl].panels.len() <= p {
                let panel = self.panel(width, p)?;
                self.levels[lvl].panels.push(panel);
            }
            let (mut c1, mut c2) = (0.0, 0.0);
            for node in &self.levels[lvl].panels[p] {
                let phi = Complex64::new(node.phi, 0.0);
                let u = phi - i;
                let iphi = i * node.phi;
                let log_shift = |u: Complex64| i * u * shift.mean - 0.5 * u * u * shift.var;
                let e2 = node.at.b + node.at.d * r + i * phi * (z - ln_k) + log_shift(phi);
                let e1 = node.shifted.b + node.shifted.d * r + i * u * z - iphi * ln_k
                    + log_shift(u)
                    - ln_f;
                let g2 = (e2.exp() / iphi).re;
                let g1 = (e1.exp() / iphi).re;
                i1 += node.w * g1;
                i2 += node.w * g2;
                c1 += node.w * g1.abs();
                c2 += node.w * g2.abs();
            }
            last = (c1, c2);
            phi_end = ((p + 1) as f64 * width).min(self.spec.phi_max_cap);
            if c1 < self.spec.tail_tol && c2 < self.spec.tail_tol {
                break;
            }
        }
        if !(last.0 < self.spec.tail_tol && last.1 < self.spec.tail_tol) {
            return Err(PricingError::TailNotDecayed {
                phi_max: self.spec.phi_max_cap,
                contribution: last.0.max(last.1),
            });
        }
        let pi = std::f64::consts::PI;
        let p1 = 0.5 + i1 / pi;
        let p2 = 0.5 + i2 / pi;
        Ok(Inversion {
            forward,
            p1,
            p2,
            value: (forward * p1 - strike * p2).max(0.0),
            quad_error: (forward * last.0 + strike * last.1) / pi,
            phi_end,
        })
    }
}

fn check_inputs(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &QuadratureSpec,
) -> Result<()> {
    let mut v = rate.violations();
    v.extend(asset.violations());
    v.extend(state.violations());
    if !v.is_empty() {
        return Err(PricingError::InvalidParameter(v));
    }
    spec.validate()
}

fn invert_single(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &QuadratureSpec,
    opts: &CharFnOptions,
) -> Result<Inversion> {
    check_inputs(rate, asset, state, spec)?;
    let mut grid = TransformGrid::new(rate, asset.sigma, state.tau, *spec, *opts)?;
    grid.invert(state.spot, state.r, state.strike, LogShift::ZERO)
}

/// Exercise probabilities and forward for one market state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTerms {
    /// Exercise probability under the share measure.
    pub p1: f64,
    /// Exercise probability under the `T`-forward measure.
    pub p2: f64,
    /// `f(−i) = E^T[S_T]`.
    pub forward: f64,
}

pub fn p_terms(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &QuadratureSpec,
) -> Result<PTerms> {
    let inv = invert_single(rate, asset, state, spec, &CharFnOptions::default())?;
    Ok(PTerms {
        p1: inv.p1,
        p2: inv.p2,
        forward: inv.forward,
    })
}

/// `W = F·Π₁ − K·Π₂`, the undiscounted forward-measure call value.
pub fn w_price(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &QuadratureSpec,
) -> Result<PriceResult> {
    w_price_with(rate, asset, state, spec, &CharFnOptions::default())
}

pub fn w_price_with(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &QuadratureSpec,
    opts: &CharFnOptions,
) -> Result<PriceResult> {
    let inv = invert_single(rate, asset, state, spec, opts)?;
    Ok(PriceResult {
        quad_error: inv.quad_error,
        ..PriceResult::exact(inv.value)
    })
}

fn d1_d2(s: f64, k: f64, sigma: f64, rate: f64, tau: f64) -> (f64, f64) {
    let v = sigma * tau.sqrt();
    let d1 = ((s / k).ln() + (rate + 0.5 * sigma * sigma) * tau) / v;
    (d1, d1 - v)
}

/// Black–Scholes call with continuous rate `rate`.
pub fn black_scholes_reference(s: f64, k: f64, sigma: f64, rate: f64, tau: f64) -> f64 {
    let disc = (-rate * tau).exp();
    if sigma * tau.sqrt() == 0.0 || k == 0.0 {
        return (s - k * disc).max(0.0);
    }
    let n = Normal::standard();
    let (d1, d2) = d1_d2(s, k, sigma, rate, tau);
    s * n.cdf(d1) - k * disc * n.cdf(d2)
}

/// Undiscounted Black–Scholes value `E[(S_T − K)⁺]` with `E[S_T] = S e^{rτ}`.
pub fn black_scholes_forward(s: f64, k: f64, sigma: f64, rate: f64, tau: f64) -> f64 {
    let fwd = s * (rate * tau).exp();
    if sigma * tau.sqrt() == 0.0 || k == 0.0 {
        return (fwd - k).max(0.0);
    }
    let n = Normal::standard();
    let (d1, d2) = d1_d2(s, k, sigma, rate, tau);
    fwd * n.cdf(d1) - k * n.cdf(d2)
}
