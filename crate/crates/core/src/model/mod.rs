//! Parameter containers, jump laws, Poisson weights and the quadrature
//! rules shared by all pricers.

mod jump_law;
mod params;
pub mod poisson;
pub mod quadrature;
mod result;

pub use jump_law::JumpLaw;
pub use params::{AssetParams, BasketKind, BasketParams, BasketState, MarketState, RateParams};
pub use poisson::{poisson_weight, PoissonTruncation, POISSON_CAP};
pub use quadrature::{jump_sum_nodes, product_law_shift, LogShift, ProductLaw};
pub use result::{PriceResult, TermsUsed};

/// Parameter set of the reference convergence experiment: `k = 2`,
/// `a = 0.05`, `σ_r = σ = 0.05`, `λ = λ₁ = 1`, `X ~ Exp(rate 1000)`,
/// `Y ≡ 1.01`, `S₀ = 110`, `K = 100`, `r₀ = 0.03`, `τ = 1`.
pub mod reference {
    use super::*;

    pub fn rate() -> RateParams {
        RateParams {
            k: 2.0,
            a: 0.05,
            sigma_r: 0.05,
            lambda: 1.0,
            x_law: JumpLaw::exponential(1000.0),
        }
    }

    pub fn asset() -> AssetParams {
        AssetParams {
            sigma: 0.05,
            lambda1: 1.0,
            y_law: JumpLaw::fixed(1.01),
        }
    }

    pub fn market() -> MarketState {
        MarketState::new(110.0, 0.03, 1.0, 100.0)
    }
}
