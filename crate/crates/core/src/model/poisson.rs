use statrs::function::gamma::ln_gamma;

/// Hard cap on the number of Poisson terms any pricer will sum.
pub const POISSON_CAP: usize = 60;

/// `(rate·τ)^n e^{−rate·τ} / n!`, evaluated in log space.
pub fn poisson_weight(rate: f64, tau: f64, n: usize) -> f64 {
    let mean = rate * tau;
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if n == 0 {
        return (-mean).exp();
    }
    (n as f64 * mean.ln() - mean - ln_gamma(n as f64 + 1.0)).exp()
}

/// Where a Poisson series was cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonTruncation {
    /// Largest index included.
    pub n_max: usize,
    /// `Σ_{n ≤ n_max}` of the weights.
    pub mass: f64,
    /// Whether `mass ≥ 1 − tol` was reached before the cap.
    pub converged: bool,
}

/// Smallest `N` with cumulative weight `≥ 1 − mass_tol`, capped at `cap`.
pub fn truncation(rate: f64, tau: f64, mass_tol: f64, cap: usize) -> PoissonTruncation {
    let mut mass = 0.0;
    for n in 0..=cap {
        mass += poisson_weight(rate, tau, n);
        if mass >= 1.0 - mass_tol {
            return PoissonTruncation {
                n_max: n,
                mass,
                converged: true,
            };
        }
    }
    PoissonTruncation {
        n_max: cap,
        mass,
        converged: false,
    }
}

pub fn weights(rate: f64, tau: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| poisson_weight(rate, tau, n)).collect()
}
