use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result, Violation};
use crate::model::JumpLaw;

/// Jump-extended CIR short rate
/// `dr = k(a − r)dt + σ_r √r dW + d(Σ X_i − λ C_X t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub k: f64,
    pub a: f64,
    pub sigma_r: f64,
    pub lambda: f64,
    pub x_law: JumpLaw,
}

impl RateParams {
    /// `m = √(k² + 2σ_r²)`, the growth rate of the bond Riccati solution.
    pub fn m(&self) -> f64 {
        (self.k * self.k + 2.0 * self.sigma_r * self.sigma_r).sqrt()
    }

    /// Mean rate jump `C_X = E[X]`.
    pub fn c_x(&self) -> f64 {
        self.x_law.mean()
    }

    pub fn without_jumps(mut self) -> Self {
        self.lambda = 0.0;
        self
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.k > 0.0 && self.k.is_finite()) {
            out.push(Violation::new("k", format!("k must be > 0, got {}", self.k)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            out.push(Violation::new("a", format!("a must be > 0, got {}", self.a)));
        }
        if !(self.sigma_r >= 0.0 && self.sigma_r.is_finite()) {
            out.push(Violation::new(
                "sigma_r",
                format!("sigma_r must be >= 0, got {}", self.sigma_r),
            ));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            out.push(Violation::new(
                "lambda",
                format!("lambda must be >= 0, got {}", self.lambda),
            ));
        }
        out.extend(self.x_law.violations("x_law", false));
        out
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }
}

/// Jump-diffusion asset `dS = S⁻[(r − λ₁C_Y)dt + σ dW₁ + (Y − 1)dN₁]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssetParams {
    pub sigma: f64,
    pub lambda1: f64,
    pub y_law: JumpLaw,
}

impl AssetParams {
    /// `C_Y = E[Y] − 1`.
    pub fn c_y(&self) -> f64 {
        self.y_law.mean() - 1.0
    }

    pub fn without_jumps(mut self) -> Self {
        self.lambda1 = 0.0;
        self
    }

    fn violations_with(&self, prefix: &str) -> Vec<Violation> {
        let name = |f: &str| {
            if prefix.is_empty() {
                f.to_string()
            } else {
                format!("{prefix}.{f}")
            }
        };
        let mut out = Vec::new();
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            out.push(Violation::new(
                name("sigma"),
                format!("sigma must be > 0, got {}", self.sigma),
            ));
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            out.push(Violation::new(
                name("lambda1"),
                format!("lambda1 must be >= 0, got {}", self.lambda1),
            ));
        }
        out.extend(self.y_law.violations(&name("y_law"), true));
        if out.is_empty() && !self.c_y().is_finite() {
            out.push(Violation::new(name("y_law"), "E[Y] must be finite"));
        }
        out
    }

    pub fn violations(&self) -> Vec<Violation> {
        self.violations_with("")
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }
}

/// Basket function `H(S₁, S₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasketKind {
    /// `H = S₁^α S₂^{1−α}`.
    Geometric { alpha: f64 },
    /// `H = w₁S₁ + w₂S₂`.
    Arithmetic { weights: [f64; 2] },
}

impl BasketKind {
    pub fn apply(&self, s1: f64, s2: f64) -> f64 {
        match *self {
            Self::Geometric { alpha } => s1.powf(alpha) * s2.powf(1.0 - alpha),
            Self::Arithmetic { weights } => weights[0] * s1 + weights[1] * s2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasketParams {
    pub asset1: AssetParams,
    pub asset2: AssetParams,
    pub rho: f64,
    pub kind: BasketKind,
}

impl BasketParams {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.asset1.violations_with("asset");
        out.extend(self.asset2.violations_with("asset2"));
        if !(-1.0..=1.0).contains(&self.rho) {
            out.push(Violation::new(
                "rho",
                format!("rho must lie in [-1, 1], got {}", self.rho),
            ));
        }
        match self.kind {
            BasketKind::Geometric { alpha } => {
                if !(0.0..=1.0).contains(&alpha) {
                    out.push(Violation::new(
                        "alpha",
                        format!("alpha must lie in [0, 1], got {alpha}"),
                    ));
                }
            }
            BasketKind::Arithmetic { weights } => {
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    out.push(Violation::new("weights", "weights must be nonnegative"));
                } else if (weights[0] + weights[1] - 1.0).abs() > 1e-12 {
                    out.push(Violation::new("weights", "weights must sum to 1"));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }
}

/// Market inputs for a single-asset option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub spot: f64,
    pub r: f64,
    pub tau: f64,
    pub strike: f64,
}

impl MarketState {
    pub fn new(spot: f64, r: f64, tau: f64, strike: f64) -> Self {
        Self {
            spot,
            r,
            tau,
            strike,
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        market_violations(&[self.spot], self.r, self.tau, self.strike)
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }

    pub fn with_strike(mut self, strike: f64) -> Self {
        self.strike = strike;
        self
    }

    pub fn with_spot(mut self, spot: f64) -> Self {
        self.spot = spot;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

/// Market inputs for a two-asset basket option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasketState {
    pub spot: [f64; 2],
    pub r: f64,
    pub tau: f64,
    pub strike: f64,
}

impl BasketState {
    pub fn violations(&self) -> Vec<Violation> {
        market_violations(&self.spot, self.r, self.tau, self.strike)
    }

    pub fn validate(&self) -> Result<()> {
        into_result(self.violations())
    }
}

fn market_violations(spots: &[f64], r: f64, tau: f64, strike: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if spots.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        out.push(Violation::new("spot", "spot must be finite and > 0"));
    }
    if !r.is_finite() {
        out.push(Violation::new("r", "r must be finite"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        out.push(Violation::new("tau", format!("tau must be >= 0, got {tau}")));
    }
    if !(strike > 0.0 && strike.is_finite()) {
        out.push(Violation::new(
            "strike",
            format!("strike must be > 0, got {strike}"),
        ));
    }
    out
}

fn into_result(v: Vec<Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(PricingError::InvalidParameter(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate() -> RateParams {
        RateParams {
            k: 2.0,
            a: 0.05,
            sigma_r: 0.05,
            lambda: 1.0,
            x_law: JumpLaw::exponential(1000.0),
        }
    }

    fn asset() -> AssetParams {
        AssetParams {
            sigma: 0.05,
            lambda1: 1.0,
            y_law: JumpLaw::fixed(1.01),
        }
    }

    #[test]
    fn reference_parameters_validate() {
        assert!(rate().validate().is_ok());
        assert!(asset().validate().is_ok());
    }

    #[test]
    fn negative_mean_reversion_is_named() {
        let p = RateParams { k: -1.0, ..rate() };
        let err = p.validate().unwrap_err();
        assert_eq!(err.fields(), vec!["k"]);
        assert_eq!(err.name(), "InvalidParameter");
        assert!(err.to_string().starts_with("InvalidParameter(k)"));
    }

    #[test]
    fn every_violation_is_reported() {
        let p = RateParams {
            k: 0.0,
            a: -1.0,
            sigma_r: -0.1,
            lambda: -2.0,
            x_law: JumpLaw::exponential(0.0),
        };
        let err = p.validate().unwrap_err();
        assert_eq!(
            err.fields(),
            vec!["k", "a", "sigma_r", "lambda", "x_law.theta"]
        );
    }

    #[test]
    fn correlation_bound() {
        let b = BasketParams {
            asset1: asset(),
            asset2: asset(),
            rho: 1.5,
            kind: BasketKind::Geometric { alpha: 0.5 },
        };
        assert_eq!(b.validate().unwrap_err().fields(), vec!["rho"]);
        let b = BasketParams {
            rho: 0.2,
            kind: BasketKind::Arithmetic {
                weights: [0.7, 0.4],
            },
            ..b
        };
        assert_eq!(b.validate().unwrap_err().fields(), vec!["weights"]);
    }

    #[test]
    fn m_dominates_k() {
        let p = rate();
        assert!(p.m() >= p.k && p.m() > 0.0);
        let flat = RateParams { sigma_r: 0.0, ..p };
        assert_eq!(flat.m(), flat.k);
    }

    #[test]
    fn market_bounds() {
        assert!(MarketState::new(110.0, -0.001, 1.0, 100.0).validate().is_ok());
        let e = MarketState::new(0.0, 0.03, -1.0, 100.0).validate().unwrap_err();
        assert_eq!(e.fields(), vec!["spot", "tau"]);
    }
}
