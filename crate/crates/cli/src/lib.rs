//! Command-line front end: configuration loading, dispatch and CSV output.

pub mod config;
pub mod csv;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use jumpcir::bond::BondLoading;
use jumpcir::charfn::{charfn_eval, riccati_oracle, CharFnOptions};
use jumpcir::fourier::w_price_with;
use jumpcir::montecarlo::{mc_basket_price, mc_bond_price, mc_option_price, simulate_paths};
use jumpcir::series::{convergence_study, g_basket_with, option_price_with, Study};
use jumpcir::PricingError;

use crate::config::{Config, ConfigError};
use crate::csv::{emit_csv, emit_text, num, Table};

const PRECEDENCE: &str = "\
Values are resolved as: dedicated flags (--seed, --paths, --steps, --max-terms, --tol, \
--phi-max) > --set key=value overrides (applied in order) > the --config file > built-in \
defaults. Defaults reproduce the reference experiment: S=110, K=100, r=0.03, tau=1, k=2, \
a=0.05, sigma=sigma_r=0.05, lambda=lambda1=1, X ~ Exp(rate 1000), Y = 1.01.

Exit status: 0 on success, 1 on a model or numerical error, 2 on a usage or configuration error.";

#[derive(Debug, Parser)]
#[command(name = "jumpcir", version, about = "Option pricing under a jump-extended CIR short rate", after_help = PRECEDENCE)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML configuration with [rate], [asset], [asset2], [basket], [market],
    /// [series], [quadrature] and [sim] sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Monte Carlo path count.
    #[arg(long, global = true, value_name = "N")]
    pub paths: Option<usize>,

    /// Monte Carlo steps per unit time.
    #[arg(long, global = true, value_name = "N")]
    pub steps: Option<usize>,

    /// Jump-series caps; depth of `converge` (default 12).
    #[arg(long = "max-terms", global = true, value_name = "N")]
    pub max_terms: Option<usize>,

    /// Poisson mass and successive-difference tolerance of the jump series.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,

    /// Upper cap of the Fourier integrals; top of the `charfn` grid.
    #[arg(long = "phi-max", global = true, value_name = "X")]
    pub phi_max: Option<f64>,

    /// Override one configuration value, e.g. --set rate.k=1.5 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long = "dump-config", global = true)]
    pub dump_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesChoice {
    /// Jump series F, diagonal partial sums
    F,
    /// Characteristic-function power series inside W, by order
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Product {
    Option,
    Bond,
    Basket,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series price U of a single-asset call.
    Price,
    /// Series price of a geometric basket call.
    Basket,
    /// Zero-coupon bond with its loadings A and G.
    Bond,
    /// Forward-measure value W without asset jumps.
    #[command(name = "w-price")]
    WPrice,
    /// Characteristic function on a phi grid, with its distance to the ODE oracle.
    Charfn {
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Partial sums of the jump series or of the power series.
    Converge {
        #[arg(long, value_enum, default_value_t = SeriesChoice::F)]
        series: SeriesChoice,
    },
    /// Monte Carlo price with its standard error.
    Mc {
        #[arg(long, value_enum, default_value_t = Product::Option)]
        product: Product,
    },
    /// Simulated paths in long CSV format.
    Paths {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        assets: u8,
    },
    /// Check every parameter and report the first violations.
    Validate,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(PricingError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Domain(_) | Self::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Domain(e) => write!(f, "{e}"),
            Self::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        Self::Domain(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Usage(e.0)
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("usage: jumpcir <COMMAND> [--config PATH] [--set KEY=VALUE]...; see --help");
            }
            e.exit_code()
        }
    }
}

/// Configuration after file, overrides and dedicated flags.
pub fn resolve(cli: &Cli) -> Result<Config, CliError> {
    let mut c = Config::load(cli.config.as_deref(), &cli.set)?;
    if let Some(s) = cli.seed {
        c.sim.seed = s;
    }
    if let Some(p) = cli.paths {
        c.sim.n_paths = p;
    }
    if let Some(s) = cli.steps {
        c.sim.n_steps = s;
    }
    if let Some(n) = cli.max_terms {
        if !matches!(cli.command, Command::Converge { .. }) {
            c.series.l_max = n;
            c.series.n_max = n;
            c.series.m_max = n;
        }
    }
    if let Some(t) = cli.tol {
        c.series.mass_tol = t;
        c.series.term_tol = t;
    }
    if let Some(x) = cli.phi_max {
        c.quadrature.phi_max = x;
    }
    Ok(c)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let out = cli.out.as_deref();
    if cli.dump_config {
        let text = cfg.canonical()?.to_toml()?;
        return emit_text(&text, out).map_err(|e| CliError::Io(e.to_string()));
    }
    let table = match cli.command {
        Command::Validate => {
            validate(&cfg)?;
            return emit_text("ok\n", out).map_err(|e| CliError::Io(e.to_string()));
        }
        Command::Price => price(&cfg)?,
        Command::Basket => basket(&cfg)?,
        Command::Bond => bond(&cfg)?,
        Command::WPrice => w_price(&cfg)?,
        Command::Charfn { points } => charfn(&cfg, points)?,
        Command::Converge { series } => converge(&cfg, series, cli.max_terms.unwrap_or(12))?,
        Command::Mc { product } => mc(&cfg, product)?,
        Command::Paths { assets } => paths(&cfg, assets)?,
    };
    emit_csv(&table, out).map_err(|e| CliError::Io(e.to_string()))
}

fn validate(cfg: &Config) -> Result<(), CliError> {
    let mut v = cfg.rate()?.violations();
    v.extend(cfg.basket()?.violations());
    v.extend(cfg.basket_state().violations());
    if !v.is_empty() {
        return Err(PricingError::InvalidParameter(v).into());
    }
    cfg.truncation().validate()?;
    cfg.quadrature().validate()?;
    cfg.sim().validate()?;
    Ok(())
}

fn price(cfg: &Config) -> Result<Table, CliError> {
    let p = option_price_with(
        &cfg.rate()?,
        &cfg.asset()?,
        &cfg.market(),
        &cfg.truncation(),
        &cfg.quadrature(),
        &CharFnOptions::default(),
    )?;
    let mut t = Table::new(&["value", "quad_error", "l", "n", "converged"]);
    t.push(vec![
        num(p.value),
        num(p.quad_error),
        p.terms_used.l.to_string(),
        p.terms_used.n.to_string(),
        p.converged.to_string(),
    ]);
    Ok(t)
}

fn basket(cfg: &Config) -> Result<Table, CliError> {
    let rate = cfg.rate()?;
    let state = cfg.basket_state();
    let (g, _) = g_basket_with(
        &rate,
        &cfg.basket()?,
        &state,
        &cfg.truncation(),
        &cfg.quadrature(),
        &CharFnOptions::default(),
    )?;
    let b = jumpcir::bond::bond_price(&rate, state.r, state.tau)?;
    let mut t = Table::new(&["value", "quad_error", "l", "n", "m", "converged"]);
    t.push(vec![
        num(b * g.value),
        num(b * g.quad_error),
        g.terms_used.l.to_string(),
        g.terms_used.n.to_string(),
        g.terms_used.m.unwrap_or(0).to_string(),
        g.converged.to_string(),
    ]);
    Ok(t)
}

fn bond(cfg: &Config) -> Result<Table, CliError> {
    let rate = cfg.rate()?;
    rate.validate()?;
    let m = cfg.market();
    m.validate()?;
    let mut t = Table::new(&["tau", "r", "b", "A", "G"]);
    let (b, a, g) = if m.tau == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        let l = BondLoading::new(&rate, m.tau)?;
        (l.price(m.r), l.a, l.g)
    };
    t.push(vec![num(m.tau), num(m.r), num(b), num(a), num(g)]);
    Ok(t)
}

fn w_price(cfg: &Config) -> Result<Table, CliError> {
    let m = cfg.market();
    let w = w_price_with(
        &cfg.rate()?,
        &cfg.asset()?,
        &m,
        &cfg.quadrature(),
        &CharFnOptions::default(),
    )?;
    let mut t = Table::new(&["S", "K", "tau", "W", "quad_error"]);
    t.push(vec![num(m.spot), num(m.strike), num(m.tau), num(w.value), num(w.quad_error)]);
    Ok(t)
}

fn charfn(cfg: &Config, points: usize) -> Result<Table, CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be >= 1".into()));
    }
    let (rate, asset, m) = (cfg.rate()?, cfg.asset()?, cfg.market());
    rate.validate()?;
    asset.validate()?;
    m.validate()?;
    let top = cfg.quadrature.phi_max;
    let z = m.spot.ln();
    let mut t = Table::new(&["phi", "re", "im", "abs_diff"]);
    for j in 0..points {
        let frac = if points == 1 { 0.0 } else { j as f64 / (points - 1) as f64 };
        let phi = Complex64::new(0.1 + (top - 0.1) * frac, 0.0);
        let f = charfn_eval(&rate, &asset, phi, m.tau, z, m.r)?;
        let o = riccati_oracle(&rate, &asset, phi, m.tau, z, m.r)?;
        t.push(vec![num(phi.re), num(f.re), num(f.im), num((f - o).norm())]);
    }
    Ok(t)
}

fn converge(cfg: &Config, series: SeriesChoice, depth: usize) -> Result<Table, CliError> {
    let (rate, asset, m, q) = (cfg.rate()?, cfg.asset()?, cfg.market(), cfg.quadrature());
    let t = match series {
        SeriesChoice::F => {
            let rows = convergence_study(Study::JumpSeries, &rate, &asset, &m, depth, &q)?;
            let mut t = Table::new(&["l", "n", "partial_sum", "abs_diff"]);
            for r in rows {
                t.push(vec![
                    r.index.to_string(),
                    r.index.to_string(),
                    num(r.partial_sum),
                    num(r.abs_diff),
                ]);
            }
            t
        }
        SeriesChoice::W => {
            let rows = convergence_study(Study::PowerSeries, &rate, &asset, &m, depth, &q)?;
            let mut t = Table::new(&["order", "partial_sum", "abs_diff"]);
            for r in rows {
                t.push(vec![r.index.to_string(), num(r.partial_sum), num(r.abs_diff)]);
            }
            t
        }
    };
    Ok(t)
}

fn mc(cfg: &Config, product: Product) -> Result<Table, CliError> {
    let rate = cfg.rate()?;
    let sim = cfg.sim();
    let p = match product {
        Product::Option => mc_option_price(&rate, &cfg.asset()?, &cfg.market(), &sim)?,
        Product::Bond => {
            let m = cfg.market();
            mc_bond_price(&rate, m.r, m.tau, &sim)?
        }
        Product::Basket => mc_basket_price(&rate, &cfg.basket()?, &cfg.basket_state(), &sim)?,
    };
    let mut t = Table::new(&["value", "stderr", "n_paths"]);
    t.push(vec![
        num(p.value),
        num(p.stderr.unwrap_or(0.0)),
        sim.effective_paths().to_string(),
    ]);
    Ok(t)
}

fn paths(cfg: &Config, assets: u8) -> Result<Table, CliError> {
    let m = cfg.market();
    let (params, spots) = if assets == 2 {
        (vec![cfg.asset()?, cfg.asset2()?], vec![m.spot, cfg.market.spot2])
    } else {
        (vec![cfg.asset()?], vec![m.spot])
    };
    let b = simulate_paths(&cfg.rate()?, &params, cfg.basket.rho, m.r, &spots, m.tau, &cfg.sim())?;
    let header: &[&str] = if assets == 2 {
        &["path", "t", "r", "S", "S2"]
    } else {
        &["path", "t", "r", "S"]
    };
    let mut t = Table::new(header);
    for p in 0..b.r.len() {
        for i in 1..b.times.len() {
            let mut row = vec![p.to_string(), num(b.times[i]), num(b.r[p][i]), num(b.s[p][i])];
            if let Some(s2) = &b.s2 {
                row.push(num(s2[p][i]));
            }
            t.push(row);
        }
    }
    Ok(t)
}
