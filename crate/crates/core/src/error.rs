use std::fmt;

use thiserror::Error;

/// A single violated parameter constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvalidParameter({}): {}", self.field, self.constraint)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("{}", join_violations(.0))]
    InvalidParameter(Vec<Violation>),

    #[error("UnsupportedLaw: {0}")]
    UnsupportedLaw(String),

    #[error("UnsupportedBasket: {0}")]
    UnsupportedBasket(String),

    #[error("QuadratureNotConverged: {what} (refinement changed the value by {delta:e})")]
    QuadratureNotConverged { what: &'static str, delta: f64 },

    #[error("DegenerateVolatility: sigma_r = 0 leaves the power series undefined")]
    DegenerateVolatility,

    #[error("RadiusExceeded: tau = {tau} is beyond the series convergence bound {bound}")]
    RadiusExceeded { tau: f64, bound: f64 },

    #[error("DenominatorVanishing: |sum a_n tau^n| = {modulus:e} at tau = {tau}")]
    DenominatorVanishing { tau: f64, modulus: f64 },

    #[error("StepCountExceeded: Riccati integration needed more than {max_steps} steps")]
    StepCountExceeded { max_steps: usize },

    #[error("TailNotDecayed: last panel ending at phi = {phi_max} still contributes {contribution:e}")]
    TailNotDecayed { phi_max: f64, contribution: f64 },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl PricingError {
    /// Short error name, as printed by the command-line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvalidParameter(_) => "InvalidParameter",
            Self::UnsupportedLaw(_) => "UnsupportedLaw",
            Self::UnsupportedBasket(_) => "UnsupportedBasket",
            Self::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Self::DegenerateVolatility => "DegenerateVolatility",
            Self::RadiusExceeded { .. } => "RadiusExceeded",
            Self::DenominatorVanishing { .. } => "DenominatorVanishing",
            Self::StepCountExceeded { .. } => "StepCountExceeded",
            Self::TailNotDecayed { .. } => "TailNotDecayed",
        }
    }

    pub fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self::InvalidParameter(vec![Violation::new(field, constraint)])
    }

    /// Field names of every violated constraint, empty for other variants.
    pub fn fields(&self) -> Vec<&str> {
        match self {
            Self::InvalidParameter(v) => v.iter().map(|x| x.field.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

pub type Result<T> = std::result::Result<T, PricingError>;
