//! Distributions of jump magnitudes.
//!
//! Rate jumps `X` live on `[0, ∞)`; asset jumps `Y` are positive
//! multiplicative factors. Each law exposes its mean and the exponential
//! transforms `E[e^{uX}]` and `E[X e^{uX}]` that enter the bond and
//! characteristic-function loadings.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussHermite;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::Violation;

const HERMITE_NODES: usize = 64;

/// Law of a single jump magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JumpLaw {
    /// Exponential with rate `theta` (mean `1/theta`).
    Exponential { theta: f64 },
    /// Point mass at `c`.
    Fixed { c: f64 },
    /// `ln J ~ Normal(mu, sigma²)`.
    Lognormal { mu: f64, sigma: f64 },
}

/// Physicists' Gauss–Hermite rule, shared by every lognormal transform.
fn hermite() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussHermite::new(NonZeroUsize::new(HERMITE_NODES).unwrap());
        let norm = std::f64::consts::PI.sqrt();
        rule.iter().map(|(x, w)| (*x, *w / norm)).collect()
    })
}

impl JumpLaw {
    pub fn exponential(theta: f64) -> Self {
        Self::Exponential { theta }
    }

    /// Exponential law given by its mean rather than its rate.
    pub fn exponential_mean(mean: f64) -> Self {
        Self::Exponential { theta: 1.0 / mean }
    }

    pub fn fixed(c: f64) -> Self {
        Self::Fixed { c }
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Self {
        Self::Lognormal { mu, sigma }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Fixed { .. } => "fixed",
            Self::Lognormal { .. } => "lognormal",
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { theta } => 1.0 / theta,
            Self::Fixed { c } => c,
            Self::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
        }
    }

    /// `E[J²]`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            Self::Exponential { theta } => 2.0 / (theta * theta),
            Self::Fixed { c } => c * c,
            Self::Lognormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
        }
    }

    /// `E[e^{uJ}]`; `+∞` outside the domain of finiteness.
    pub fn mgf(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 1.0;
        }
        match *self {
            Self::Exponential { theta } => {
                if u < theta {
                    theta / (theta - u)
                } else {
                    f64::INFINITY
                }
            }
            Self::Fixed { c } => (u * c).exp(),
            Self::Lognormal { mu, sigma } => {
                if u > 0.0 {
                    return f64::INFINITY;
                }
                hermite()
                    .iter()
                    .map(|&(x, w)| w * (u * (mu + std::f64::consts::SQRT_2 * sigma * x).exp()).exp())
                    .sum()
            }
        }
    }

    /// `E[e^{uJ}] − 1`, accurate for small `u`.
    pub fn mgf_minus_one(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { theta } => {
                if u < theta {
                    u / (theta - u)
                } else {
                    f64::INFINITY
                }
            }
            Self::Fixed { c } => (u * c).exp_m1(),
            Self::Lognormal { mu, sigma } => {
                if u > 0.0 {
                    return f64::INFINITY;
                }
                hermite()
                    .iter()
                    .map(|&(x, w)| {
                        w * (u * (mu + std::f64::consts::SQRT_2 * sigma * x).exp()).exp_m1()
                    })
                    .sum()
            }
        }
    }

    /// `E[J e^{uJ}]`, the derivative of [`JumpLaw::mgf`].
    pub fn mgf_prime(&self, u: f64) -> f64 {
        match *self {
            Self::Exponential { theta } => {
                if u < theta {
                    theta / ((theta - u) * (theta - u))
                } else {
                    f64::INFINITY
                }
            }
            Self::Fixed { c } => c * (u * c).exp(),
            Self::Lognormal { mu, sigma } => {
                if u == 0.0 {
                    return self.mean();
                }
                if u > 0.0 {
                    return f64::INFINITY;
                }
                hermite()
                    .iter()
                    .map(|&(x, w)| {
                        let j = (mu + std::f64::consts::SQRT_2 * sigma * x).exp();
                        w * j * (u * j).exp()
                    })
                    .sum()
            }
        }
    }

    /// Draw one magnitude.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { theta } => Exp::new(theta).expect("validated rate").sample(rng),
            Self::Fixed { c } => c,
            Self::Lognormal { mu, sigma } => {
                LogNormal::new(mu, sigma).expect("validated sigma").sample(rng)
            }
        }
    }

    /// Deterministic stream of magnitudes for a given seed.
    pub fn sampler(&self, seed: u64) -> impl Iterator<Item = f64> {
        let law = *self;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        std::iter::repeat_with(move || law.sample(&mut rng))
    }

    /// Constraint check. `positive` requires strictly positive support
    /// (multiplicative asset jumps); otherwise nonnegative support suffices.
    pub(crate) fn violations(&self, prefix: &str, positive: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        match *self {
            Self::Exponential { theta } => {
                if !(theta > 0.0 && theta.is_finite()) {
                    out.push(Violation::new(
                        format!("{prefix}.theta"),
                        format!("theta must be finite and > 0, got {theta}"),
                    ));
                }
            }
            Self::Fixed { c } => {
                let ok = if positive { c > 0.0 } else { c >= 0.0 };
                if !(ok && c.is_finite()) {
                    let bound = if positive { "> 0" } else { ">= 0" };
                    out.push(Violation::new(
                        format!("{prefix}.c"),
                        format!("c must be finite and {bound}, got {c}"),
                    ));
                }
            }
            Self::Lognormal { mu, sigma } => {
                if !positive {
                    out.push(Violation::new(
                        format!("{prefix}.kind"),
                        "rate jumps must be exponential or fixed",
                    ));
                }
                if !mu.is_finite() {
                    out.push(Violation::new(format!("{prefix}.mu"), "mu must be finite"));
                }
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    out.push(Violation::new(
                        format!("{prefix}.sigma"),
                        format!("sigma must be finite and >= 0, got {sigma}"),
                    ));
                }
            }
        }
        out
    }
}
