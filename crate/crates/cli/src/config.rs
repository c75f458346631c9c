//! Run configuration: TOML sections with defaults, file values and
//! `key=value` overrides.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use jumpcir::fourier::QuadratureSpec;
use jumpcir::montecarlo::SimSpec;
use jumpcir::series::SeriesTruncation;
use jumpcir::{
    AssetParams, BasketKind, BasketParams, BasketState, JumpLaw, MarketState, RateParams,
};

/// A configuration that cannot be read or does not describe a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Exponential,
    Fixed,
    Lognormal,
}

/// How `theta` of an exponential law is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaParam {
    #[default]
    Rate,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawConfig {
    pub kind: LawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "is_rate")]
    pub param: ThetaParam,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

fn is_rate(p: &ThetaParam) -> bool {
    *p == ThetaParam::Rate
}

impl LawConfig {
    pub fn from_law(law: JumpLaw) -> Self {
        let blank = Self {
            kind: LawKind::Fixed,
            theta: None,
            param: ThetaParam::Rate,
            c: None,
            mu: None,
            sigma: None,
        };
        match law {
            JumpLaw::Exponential { theta } => Self {
                kind: LawKind::Exponential,
                theta: Some(theta),
                ..blank
            },
            JumpLaw::Fixed { c } => Self { c: Some(c), ..blank },
            JumpLaw::Lognormal { mu, sigma } => Self {
                kind: LawKind::Lognormal,
                mu: Some(mu),
                sigma: Some(sigma),
                ..blank
            },
        }
    }

    pub fn to_law(&self, at: &str) -> Result<JumpLaw, ConfigError> {
        let need = |v: Option<f64>, f: &str| {
            v.ok_or_else(|| ConfigError(format!("{at}.{f} is required for this law")))
        };
        Ok(match self.kind {
            LawKind::Exponential => {
                let theta = need(self.theta, "theta")?;
                match self.param {
                    ThetaParam::Rate => JumpLaw::exponential(theta),
                    ThetaParam::Mean => JumpLaw::exponential_mean(theta),
                }
            }
            LawKind::Fixed => JumpLaw::fixed(need(self.c, "c")?),
            LawKind::Lognormal => JumpLaw::lognormal(need(self.mu, "mu")?, need(self.sigma, "sigma")?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateSection {
    pub k: f64,
    pub a: f64,
    pub sigma_r: f64,
    pub lambda: f64,
    pub x_law: LawConfig,
}

impl Default for RateSection {
    fn default() -> Self {
        Self::from_params(&jumpcir::model::reference::rate())
    }
}

impl RateSection {
    pub fn from_params(p: &RateParams) -> Self {
        Self {
            k: p.k,
            a: p.a,
            sigma_r: p.sigma_r,
            lambda: p.lambda,
            x_law: LawConfig::from_law(p.x_law),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssetSection {
    pub sigma: f64,
    pub lambda1: f64,
    pub y_law: LawConfig,
}

impl Default for AssetSection {
    fn default() -> Self {
        Self::from_params(&jumpcir::model::reference::asset())
    }
}

impl AssetSection {
    pub fn from_params(p: &AssetParams) -> Self {
        Self {
            sigma: p.sigma,
            lambda1: p.lambda1,
            y_law: LawConfig::from_law(p.y_law),
        }
    }

    fn params(&self, at: &str) -> Result<AssetParams, ConfigError> {
        Ok(AssetParams {
            sigma: self.sigma,
            lambda1: self.lambda1,
            y_law: self.y_law.to_law(&format!("{at}.y_law"))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasketShape {
    Geometric,
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasketSection {
    pub kind: BasketShape,
    pub alpha: f64,
    pub weights: [f64; 2],
    pub rho: f64,
}

impl Default for BasketSection {
    fn default() -> Self {
        Self {
            kind: BasketShape::Geometric,
            alpha: 0.5,
            weights: [0.5, 0.5],
            rho: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketSection {
    pub spot: f64,
    /// Second spot, used by basket and two-asset path runs.
    pub spot2: f64,
    pub r: f64,
    pub tau: f64,
    pub strike: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        let m = jumpcir::model::reference::market();
        Self {
            spot: m.spot,
            spot2: m.spot,
            r: m.r,
            tau: m.tau,
            strike: m.strike,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesSection {
    pub l_max: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub mass_tol: f64,
    pub term_tol: f64,
    pub jump_nodes: usize,
}

impl Default for SeriesSection {
    fn default() -> Self {
        let t = SeriesTruncation::default();
        Self {
            l_max: t.l_max,
            n_max: t.n_max,
            m_max: t.m_max,
            mass_tol: t.mass_tol,
            term_tol: t.term_tol,
            jump_nodes: t.jump_nodes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub phi_max: f64,
    pub tail_tol: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            panel_width: q.panel_width,
            nodes_per_panel: q.nodes_per_panel,
            phi_max: q.phi_max_cap,
            tail_tol: q.tail_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimSpec::default();
        Self {
            n_paths: s.n_paths,
            n_steps: s.n_steps,
            seed: s.seed,
            antithetic: s.antithetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub rate: RateSection,
    pub asset: AssetSection,
    pub asset2: AssetSection,
    pub basket: BasketSection,
    pub market: MarketSection,
    pub series: SeriesSection,
    pub quadrature: QuadratureSection,
    pub sim: SimSection,
}

impl Config {
    /// Defaults, then `path` (if any), then every `key=value` in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = Config::default()
            .to_toml()?
            .parse()
            .expect("default configuration parses");
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?;
            let file = text
                .parse::<toml::Table>()
                .map_err(|e| ConfigError(format!("cannot parse {}: {e}", p.display())))?;
            merge(&mut table, file);
        }
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError(format!("invalid configuration: {e}")))
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError(format!("cannot write configuration: {e}")))
    }

    pub fn rate(&self) -> Result<RateParams, ConfigError> {
        let r = &self.rate;
        Ok(RateParams {
            k: r.k,
            a: r.a,
            sigma_r: r.sigma_r,
            lambda: r.lambda,
            x_law: r.x_law.to_law("rate.x_law")?,
        })
    }

    pub fn asset(&self) -> Result<AssetParams, ConfigError> {
        self.asset.params("asset")
    }

    pub fn asset2(&self) -> Result<AssetParams, ConfigError> {
        self.asset2.params("asset2")
    }

    pub fn basket(&self) -> Result<BasketParams, ConfigError> {
        let b = &self.basket;
        Ok(BasketParams {
            asset1: self.asset()?,
            asset2: self.asset2()?,
            rho: b.rho,
            kind: match b.kind {
                BasketShape::Geometric => BasketKind::Geometric { alpha: b.alpha },
                BasketShape::Arithmetic => BasketKind::Arithmetic { weights: b.weights },
            },
        })
    }

    pub fn market(&self) -> MarketState {
        let m = &self.market;
        MarketState::new(m.spot, m.r, m.tau, m.strike)
    }

    pub fn basket_state(&self) -> BasketState {
        let m = &self.market;
        BasketState {
            spot: [m.spot, m.spot2],
            r: m.r,
            tau: m.tau,
            strike: m.strike,
        }
    }

    pub fn truncation(&self) -> SeriesTruncation {
        let s = &self.series;
        SeriesTruncation {
            l_max: s.l_max,
            n_max: s.n_max,
            m_max: s.m_max,
            mass_tol: s.mass_tol,
            term_tol: s.term_tol,
            jump_nodes: s.jump_nodes,
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            panel_width: q.panel_width,
            nodes_per_panel: q.nodes_per_panel,
            phi_max_cap: q.phi_max,
            tail_tol: q.tail_tol,
        }
    }

    pub fn sim(&self) -> SimSpec {
        let s = &self.sim;
        SimSpec {
            n_paths: s.n_paths,
            n_steps: s.n_steps,
            seed: s.seed,
            antithetic: s.antithetic,
        }
    }

    /// Rewrites exponential laws given by their mean into rate form.
    pub fn canonical(mut self) -> Result<Self, ConfigError> {
        self.rate.x_law = LawConfig::from_law(self.rate.x_law.to_law("rate.x_law")?);
        self.asset.y_law = LawConfig::from_law(self.asset.y_law.to_law("asset.y_law")?);
        self.asset2.y_law = LawConfig::from_law(self.asset2.y_law.to_law("asset2.y_law")?);
        Ok(self)
    }
}

/// Deep merge of `over` into `base`. A table naming a law `kind` replaces
/// the base table, so stale parameters of another law do not leak in.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !o.contains_key("kind") => {
                merge(b, o)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Sets a dotted key such as `rate.x_law.theta=2000`. Values are read as
/// TOML literals, falling back to bare strings (`kind=lognormal`).
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), ConfigError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("override key `{key}` is malformed")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut node = table;
    for p in parents {
        node = node
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError(format!("override `{key}`: `{p}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
