//! Forward-measure characteristic function of the log price in the
//! continuous auxiliary model.
//!
//! `f(φ) = exp(B(φ; τ) + D(φ; τ) r + iφz)`. With `u = Σ âₙ τⁿ`,
//! `D = −2u'/(σ_r² u)` where `u` solves
//! `u'' + (k − σ_r² G)u' + ½iφσ_r² u = 0`; multiplying by the bond
//! denominator `2m + (k + m)(e^{mτ} − 1)` turns it into a recurrence for âₙ.

mod oracle;

pub use oracle::{riccati_oracle, riccati_oracle_with, OracleOptions};

use num_complex::Complex64;

use crate::bond::loading_g;
use crate::error::{PricingError, Result};
use crate::model::quadrature::legendre;
use crate::model::{AssetParams, RateParams};

/// Hard cap on the power-series order.
pub const ORDER_CAP: usize = 200;
/// Relative size of the last retained terms at which the series is cut.
pub const SERIES_TOL: f64 = 1e-16;
/// Gauss–Legendre nodes for the time integral in `B`.
pub const B_NODES: usize = 64;
const DENOMINATOR_FLOOR: f64 = 1e-12;

/// How many power-series terms to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesOrder {
    /// Grow until the tail is below [`SERIES_TOL`], at most [`ORDER_CAP`].
    #[default]
    Adaptive,
    /// Exactly `â_0..â_N`.
    Fixed(usize),
}

/// `τ`-radius inside which `Σ âₙ τⁿ` provably converges:
/// `(1/m)·√(ln²((m−k)/(m+k)) + π²)`, the modulus of the nearest zero of the
/// bond denominator.
pub fn radius_bound(rate: &RateParams) -> Result<f64> {
    if rate.sigma_r == 0.0 {
        return Err(PricingError::DegenerateVolatility);
    }
    let (k, m) = (rate.k, rate.m());
    let ln = ((m - k) / (m + k)).ln();
    Ok((ln * ln + std::f64::consts::PI.powi(2)).sqrt() / m)
}

/// Taylor coefficients `c_j = m^j / j!` of `e^{mτ} − 1` (with `c_0 = 0`).
fn exp_coeffs(m: f64, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    let mut term = 1.0;
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        term *= m / j as f64;
        *cj = term;
    }
    c
}

/// Recurrence state; extends the coefficient list one order at a time.
struct Recurrence {
    k: f64,
    m: f64,
    s2: f64,
    phi: Complex64,
    c: Vec<f64>,
    a: Vec<Complex64>,
}

impl Recurrence {
    fn new(rate: &RateParams, phi: Complex64) -> Self {
        let m = rate.m();
        Self {
            k: rate.k,
            m,
            s2: rate.sigma_r * rate.sigma_r,
            phi,
            c: exp_coeffs(m, ORDER_CAP + 2),
            a: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    /// Push `â_{n+2}` where `n = len − 2`.
    fn step(&mut self) {
        let n = self.a.len() - 2;
        let (k, m, s2, a, c) = (self.k, self.m, self.s2, &self.a, &self.c);
        let i = Complex64::i();
        let iphi = i * self.phi;
        let mut conv2 = Complex64::new(0.0, 0.0);
        let mut conv1 = Complex64::new(0.0, 0.0);
        let mut conv0 = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            conv2 += ((n + 2 - j) * (n + 1 - j)) as f64 * c[j] * a[n + 2 - j];
            conv1 += (n + 1 - j) as f64 * c[j] * a[n + 1 - j];
            conv0 += c[j] * a[n - j];
        }
        let big_i = 2.0 * k * m * (n + 1) as f64 * a[n + 1]
            + iphi * s2 * m * a[n]
            + (k + m) * conv2
            + (k * k + k * m + 2.0 * s2) * conv1
            + 0.5 * iphi * s2 * (k + m) * conv0;
        let next = -big_i / (2.0 * m * ((n + 1) * (n + 2)) as f64);
        self.a.push(next);
    }
}

/// `â_0..â_N` for frequency `φ` (complex `φ` is analytic continuation).
pub fn coeff_recurrence(rate: &RateParams, phi: Complex64, n: usize) -> Vec<Complex64> {
    let mut rec = Recurrence::new(rate, phi);
    while rec.a.len() <= n.max(1) {
        rec.step();
    }
    rec.a.truncate(n + 1);
    rec.a
}

fn horner(coeffs: &[Complex64], tau: f64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * tau + a)
}

/// `Σ (n+1) â_{n+1} τⁿ`.
fn horner_derivative(coeffs: &[Complex64], tau: f64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (n, a)| acc * tau + a * n as f64)
}

/// `D(τ) = −2 Σ(n+1)â_{n+1}τⁿ / (σ_r² Σ âₙ τⁿ)` from truncated coefficients.
pub fn d_eval(coeffs: &[Complex64], sigma_r: f64, tau: f64) -> Result<Complex64> {
    let den = horner(coeffs, tau);
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(PricingError::DenominatorVanishing {
            tau,
            modulus: den.norm(),
        });
    }
    Ok(-2.0 * horner_derivative(coeffs, tau) / (sigma_r * sigma_r * den))
}

/// Truncated power-series expansion for one `(φ, τ)`.
#[derive(Debug, Clone)]
pub struct CharFnExpansion {
    pub phi: Complex64,
    pub tau: f64,
    pub coeffs: Vec<Complex64>,
    pub c: Vec<f64>,
    /// Highest retained order.
    pub order: usize,
    /// `true` when the adaptive rule ran into [`ORDER_CAP`].
    pub hit_cap: bool,
    sigma_r: f64,
}

impl CharFnExpansion {
    /// Builds coefficients good for every `s ∈ [0, τ]`.
    pub fn new(rate: &RateParams, phi: Complex64, tau: f64, order: SeriesOrder) -> Result<Self> {
        let bound = radius_bound(rate)?;
        if tau >= bound {
            return Err(PricingError::RadiusExceeded { tau, bound });
        }
        let mut rec = Recurrence::new(rate, phi);
        let mut hit_cap = false;
        match order {
            SeriesOrder::Fixed(n) => {
                while rec.a.len() <= n.max(1) {
                    rec.step();
                }
                rec.a.truncate(n + 1);
            }
            SeriesOrder::Adaptive => loop {
                rec.step();
                let n = rec.a.len() - 1;
                if n >= 4 {
                    let sum = horner(&rec.a, tau).norm();
                    let tail = (n as f64 + 1.0)
                        * (rec.a[n].norm() * tau.powi(n as i32)
                            + rec.a[n - 1].norm() * tau.powi(n as i32 - 1));
                    if tail <= SERIES_TOL * sum {
                        break;
                    }
                }
                if n >= ORDER_CAP {
                    hit_cap = true;
                    break;
                }
            },
        }
        let order = rec.a.len() - 1;
        Ok(Self {
            phi,
            tau,
            c: exp_coeffs(rec.m, order),
            coeffs: rec.a,
            order,
            hit_cap,
            sigma_r: rate.sigma_r,
        })
    }

    /// `Σ âₙ sⁿ`.
    pub fn u(&self, s: f64) -> Complex64 {
        horner(&self.coeffs, s)
    }

    pub fn d(&self, s: f64) -> Result<Complex64> {
        d_eval(&self.coeffs, self.sigma_r, s)
    }
}

/// `ka + λ(E[X e^{G(s)X}] − C_X)`, the forward-measure drift weight on `D`.
pub(crate) fn drift_weight(rate: &RateParams, s: f64) -> f64 {
    let base = rate.k * rate.a;
    if rate.lambda == 0.0 {
        return base;
    }
    base + rate.lambda * (rate.x_law.mgf_prime(loading_g(rate, s)) - rate.c_x())
}

/// Loadings of the log characteristic function at maturity `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loadings {
    pub b: Complex64,
    pub d: Complex64,
}

impl Loadings {
    /// `exp(B + D r + iφz)`.
    pub fn eval(&self, phi: Complex64, z: f64, r: f64) -> Complex64 {
        (self.b + self.d * r + Complex64::i() * phi * z).exp()
    }
}

/// Evaluation options shared by the series and ODE paths.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CharFnOptions {
    pub order: SeriesOrder,
    pub oracle: OracleOptions,
}

/// Precomputed `s`-nodes of the `B` integral with their drift weights.
#[derive(Debug, Clone)]
pub(crate) struct TimeNodes {
    tau: f64,
    nodes: Vec<(f64, f64)>,
}

impl TimeNodes {
    pub(crate) fn new(rate: &RateParams, tau: f64) -> Self {
        let nodes = legendre(0.0, tau, B_NODES)
            .into_iter()
            .map(|(s, w)| (s, w * drift_weight(rate, s)))
            .collect();
        Self { tau, nodes }
    }
}

/// Loadings for asset volatility `sigma`, reusing precomputed time nodes.
pub(crate) fn loadings_with(
    rate: &RateParams,
    sigma: f64,
    phi: Complex64,
    nodes: &TimeNodes,
    opts: &CharFnOptions,
) -> Result<Loadings> {
    let tau = nodes.tau;
    if tau == 0.0 {
        return Ok(Loadings {
            b: Complex64::new(0.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        });
    }
    if rate.sigma_r == 0.0 {
        return oracle::loadings(rate, sigma, phi, tau, &opts.oracle);
    }
    let exp = CharFnExpansion::new(rate, phi, tau, opts.order)?;
    let mut integral = Complex64::new(0.0, 0.0);
    for &(s, w) in &nodes.nodes {
        integral += w * exp.d(s)?;
    }
    let diffusion = -0.5 * sigma * sigma * (phi * phi + Complex64::i() * phi) * tau;
    Ok(Loadings {
        b: integral + diffusion,
        d: exp.d(tau)?,
    })
}

/// `(B, D)` at `(φ, τ)` for asset volatility `sigma`.
pub fn loadings(
    rate: &RateParams,
    sigma: f64,
    phi: Complex64,
    tau: f64,
    opts: &CharFnOptions,
) -> Result<Loadings> {
    loadings_with(rate, sigma, phi, &TimeNodes::new(rate, tau), opts)
}

/// `D(φ; τ)` from the power series.
pub fn d_loading(rate: &RateParams, phi: Complex64, tau: f64) -> Result<Complex64> {
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    CharFnExpansion::new(rate, phi, tau, SeriesOrder::Adaptive)?.d(tau)
}

/// `B(φ; τ) = ∫₀^τ D(s)[ka + λ(E[Xe^{G(s)X}] − C_X)]ds − ½σ²(φ² + iφ)τ`.
pub fn b_eval(rate: &RateParams, asset: &AssetParams, phi: Complex64, tau: f64) -> Result<Complex64> {
    Ok(loadings(rate, asset.sigma, phi, tau, &CharFnOptions::default())?.b)
}

/// `f(φ) = exp(B + D r + iφz)`; falls back to the Riccati integrator when
/// `σ_r = 0` leaves the series undefined.
pub fn charfn_eval(
    rate: &RateParams,
    asset: &AssetParams,
    phi: Complex64,
    tau: f64,
    z: f64,
    r: f64,
) -> Result<Complex64> {
    Ok(loadings(rate, asset.sigma, phi, tau, &CharFnOptions::default())?.eval(phi, z, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bond::bond_price;
    use crate::model::reference;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn radius_regression_and_limits() {
        let rate = reference::rate();
        let m = rate.m();
        let ln = ((m - 2.0) / (m + 2.0)).ln();
        let direct = (ln * ln + std::f64::consts::PI.powi(2)).sqrt() / m;
        let bound = radius_bound(&rate).unwrap();
        assert_eq!(bound, direct);
        assert!((bound - 4.327_977_496_653_866).abs() < 1e-12, "{bound}");
        let flat = RateParams { sigma_r: 0.0, ..rate };
        assert_eq!(radius_bound(&flat).unwrap_err().name(), "DegenerateVolatility");
        // k → 0 leaves only the π term
        let driftless = RateParams {
            k: 0.0,
            sigma_r: 1.0,
            ..rate
        };
        let expect = std::f64::consts::PI / driftless.m();
        assert!((radius_bound(&driftless).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn leading_coefficients() {
        let rate = reference::rate();
        let phi = c(1.7, 0.0);
        let a = coeff_recurrence(&rate, phi, 6);
        assert_eq!(a[0], c(1.0, 0.0));
        assert_eq!(a[1], c(0.0, 0.0));
        let expect = -Complex64::i() * phi * rate.sigma_r.powi(2) / 4.0;
        assert!((a[2] - expect).norm() < 1e-18);
        // D'(0) = −4â₂/σ_r² = iφ
        let slope = -4.0 * a[2] / rate.sigma_r.powi(2);
        assert!((slope - Complex64::i() * phi).norm() < 1e-14);
    }

    #[test]
    fn zero_frequency_has_trivial_series() {
        let a = coeff_recurrence(&reference::rate(), c(0.0, 0.0), 30);
        assert!(a[2..].iter().all(|x| *x == c(0.0, 0.0)));
        let f = charfn_eval(&reference::rate(), &reference::asset(), c(0.0, 0.0), 1.0, 4.7, 0.03)
            .unwrap();
        assert_eq!(f, c(1.0, 0.0));
    }

    #[test]
    fn d_small_tau_slope() {
        let rate = reference::rate();
        let phi = c(2.0, 0.0);
        assert_eq!(d_loading(&rate, phi, 0.0).unwrap(), c(0.0, 0.0));
        let tau = 1e-4;
        let d = d_loading(&rate, phi, tau).unwrap();
        assert!((d - Complex64::i() * phi * tau).norm() < 10.0 * tau * tau);
    }

    #[test]
    fn series_matches_oracle() {
        let rate = reference::rate();
        let asset = reference::asset();
        for phi in [1.0, 5.0, 20.0] {
            let phi = c(phi, 0.0);
            let s = charfn_eval(&rate, &asset, phi, 1.0, 110f64.ln(), 0.03).unwrap();
            let o = riccati_oracle(&rate, &asset, phi, 1.0, 110f64.ln(), 0.03).unwrap();
            assert!((s - o).norm() < 1e-8, "phi={phi}: {s} vs {o}");
        }
    }

    #[test]
    fn martingale_identity_at_minus_i() {
        let rate = reference::rate();
        let asset = reference::asset();
        let (s, r) = (110.0f64, 0.03);
        let f = charfn_eval(&rate, &asset, c(0.0, -1.0), 1.0, s.ln(), r).unwrap();
        let b = bond_price(&rate, r, 1.0).unwrap();
        assert!(f.im.abs() < 1e-12);
        // the residual is the O(λE[X²]G²) convexity of the compensated jumps
        assert!(((f.re * b - s) / s).abs() < 1e-6);
        let jumpless = rate.without_jumps();
        let f = charfn_eval(&jumpless, &asset, c(0.0, -1.0), 1.0, s.ln(), r).unwrap();
        let b = bond_price(&jumpless, r, 1.0).unwrap();
        assert!(((f.re * b - s) / s).abs() < 1e-12);
    }

    #[test]
    fn modulus_and_symmetry() {
        let rate = reference::rate();
        let asset = reference::asset();
        for i in 0..=100 {
            let phi = 2.0 * i as f64;
            let f = charfn_eval(&rate, &asset, c(phi, 0.0), 1.0, 4.7, 0.03).unwrap();
            assert!(f.norm() <= 1.0 + 1e-12);
            let g = charfn_eval(&rate, &asset, c(-phi, 0.0), 1.0, 4.7, 0.03).unwrap();
            assert!((g - f.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn radius_guard() {
        let rate = reference::rate();
        let bound = radius_bound(&rate).unwrap();
        let e = charfn_eval(&rate, &reference::asset(), c(1.0, 0.0), bound + 0.1, 0.0, 0.03)
            .unwrap_err();
        assert_eq!(e.name(), "RadiusExceeded");
    }

    #[test]
    fn fixed_order_truncates() {
        let rate = reference::rate();
        let e = CharFnExpansion::new(&rate, c(3.0, 0.0), 1.0, SeriesOrder::Fixed(10)).unwrap();
        assert_eq!(e.coeffs.len(), 11);
        let full = CharFnExpansion::new(&rate, c(3.0, 0.0), 1.0, SeriesOrder::Adaptive).unwrap();
        assert!(!full.hit_cap && full.order > 10);
        assert_eq!(&full.coeffs[..11], &e.coeffs[..]);
        assert_eq!(full.c[3], rate.m().powi(3) / 6.0);
    }

    #[test]
    fn zero_rate_vol_falls_back_to_ode() {
        let rate = RateParams {
            sigma_r: 0.0,
            lambda: 0.0,
            ..reference::rate()
        };
        let phi = c(2.5, 0.0);
        let l = loadings(&rate, 0.05, phi, 1.0, &CharFnOptions::default()).unwrap();
        let exact = Complex64::i() * phi * (1.0 - (-rate.k).exp()) / rate.k;
        assert!((l.d - exact).norm() < 1e-10);
    }
}
