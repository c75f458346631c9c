//! Option pricing when both the short rate and the underlying jump.
//!
//! The short rate follows a CIR diffusion plus compensated compound Poisson
//! jumps; the asset is a jump diffusion with multiplicative jumps. Prices
//! are built from an affine bond formula, a power-series characteristic
//! function, Fourier inversion and Poisson-weighted jump series, with a Monte
//! Carlo engine as an independent oracle.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bond;
pub mod charfn;
pub mod error;
pub mod fourier;
pub mod model;
pub mod montecarlo;
pub mod series;

pub use error::{PricingError, Result};
pub use model::{
    AssetParams, BasketKind, BasketParams, BasketState, JumpLaw, MarketState, PriceResult,
    RateParams, TermsUsed,
};
