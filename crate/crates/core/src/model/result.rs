use serde::{Deserialize, Serialize};

/// Truncation indices `(l, n[, m])` of a Poisson-weighted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TermsUsed {
    pub l: usize,
    pub n: usize,
    pub m: Option<usize>,
}

/// A price plus the diagnostics needed to judge it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceResult {
    pub value: f64,
    pub terms_used: TermsUsed,
    /// Estimated absolute quadrature error, always `>= 0`.
    pub quad_error: f64,
    pub converged: bool,
    /// Monte Carlo standard error, when the price is an estimate.
    pub stderr: Option<f64>,
}

impl PriceResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            terms_used: TermsUsed::default(),
            quad_error: 0.0,
            converged: true,
            stderr: None,
        }
    }

    pub fn estimate(value: f64, stderr: f64) -> Self {
        Self {
            stderr: Some(stderr),
            ..Self::exact(value)
        }
    }

    /// Number of standard errors separating this estimate from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        let se = self.stderr.unwrap_or(0.0);
        let diff = (self.value - value).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}
