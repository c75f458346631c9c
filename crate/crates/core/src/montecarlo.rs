//! Risk-neutral Monte Carlo of the full jump models.
//!
//! The rate uses full-truncation Euler; the log asset takes an exact step
//! given the rate, with its drift and the discount both built from the
//! trapezoid `½(r_t + r_{t+Δ})Δ`, so `e^{−∫r}S` is a martingale on the grid.
//! Jump arrival times are drawn from exponential inter-arrival gaps, which
//! makes per-step jump counts exactly Poisson; the jumps land at step ends.
//!
//! Every antithetic pair owns ChaCha8 streams derived from `(seed, pair)`,
//! and chunk statistics are merged in index order, so results do not depend
//! on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

use crate::error::{PricingError, Result};
use crate::model::{
    AssetParams, BasketKind, BasketParams, BasketState, JumpLaw, MarketState, PriceResult,
    RateParams,
};

const CHUNK_PAIRS: usize = 512;
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub n_paths: usize,
    /// Steps per unit time.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            n_steps: 252,
            seed: 20_240_601,
            antithetic: true,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(PricingError::invalid("paths", "n_paths must be >= 1"));
        }
        if self.n_steps == 0 {
            return Err(PricingError::invalid("steps", "n_steps must be >= 1"));
        }
        Ok(())
    }

    /// Grid size on `[0, τ]`.
    pub fn steps_for(&self, tau: f64) -> usize {
        ((self.n_steps as f64 * tau).ceil() as usize).max(1)
    }

    /// Independent sampling units: antithetic pairs, or single paths.
    fn units(&self) -> usize {
        if self.antithetic {
            self.n_paths.div_ceil(2)
        } else {
            self.n_paths
        }
    }

    fn lanes(&self) -> usize {
        if self.antithetic {
            2
        } else {
            1
        }
    }

    /// Paths actually simulated (odd antithetic requests round up).
    pub fn effective_paths(&self) -> usize {
        self.units() * self.lanes()
    }
}

/// Which process a recorded jump hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSource {
    Rate,
    Asset1,
    Asset2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub source: JumpSource,
    pub magnitude: f64,
}

/// Simulated trajectories on a common grid (starting at `t = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub times: Vec<f64>,
    pub r: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub s2: Option<Vec<Vec<f64>>>,
    pub jumps: Vec<Vec<JumpEvent>>,
}

/// Compound Poisson arrivals with exact exponential gaps.
struct Arrivals {
    next: f64,
    gap: Option<Exp<f64>>,
    law: JumpLaw,
}

impl Arrivals {
    fn new<R: Rng>(lambda: f64, law: JumpLaw, rng: &mut R) -> Self {
        let gap = (lambda > 0.0).then(|| Exp::new(lambda).expect("validated intensity"));
        let next = gap.map_or(f64::INFINITY, |g| g.sample(rng));
        Self { next, gap, law }
    }

    fn idle() -> Self {
        Self {
            next: f64::INFINITY,
            gap: None,
            law: JumpLaw::fixed(1.0),
        }
    }

    #[inline]
    fn pending(&self, t_end: f64) -> bool {
        self.next <= t_end
    }

    /// Magnitudes of the jumps in `(·, t_end]`, pushed into `out`.
    fn collect<R: Rng>(&mut self, t_end: f64, rng: &mut R, out: &mut Vec<(f64, f64)>) {
        while self.next <= t_end {
            out.push((self.next, self.law.sample(rng)));
            self.next += self.gap.expect("finite arrival implies a gap law").sample(rng);
        }
    }
}

/// Model pieces one path needs.
#[derive(Debug, Clone, Copy)]
struct SimModel<'a> {
    rate: &'a RateParams,
    assets: [Option<&'a AssetParams>; 2],
    rho: f64,
    r0: f64,
    ln_spot: [f64; 2],
    tau: f64,
}

/// Terminal values of one lane.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Terminal {
    discount: f64,
    s: [f64; 2],
}

#[derive(Clone, Copy)]
struct Lane {
    r: f64,
    int_r: f64,
    ln_s: [f64; 2],
}

struct Streams {
    rate: ChaCha8Rng,
    asset: [ChaCha8Rng; 2],
}

impl Streams {
    fn new(seed: u64, unit: usize) -> Self {
        let make = |c: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(unit as u64 * 4 + c);
            rng
        };
        Self {
            rate: make(0),
            asset: [make(1), make(2)],
        }
    }
}

/// Shared jump and noise draws for one step of every lane in a unit.
struct StepDraws {
    xi_r: f64,
    xi: [f64; 2],
    dx: f64,
    log_y: [f64; 2],
}

struct UnitSim<'a> {
    model: SimModel<'a>,
    streams: Streams,
    x_arr: Arrivals,
    y_arr: [Arrivals; 2],
    n_assets: usize,
    buf: Vec<(f64, f64)>,
    dt: f64,
    drift: [f64; 2],
    /// `σ√Δ` per asset
    vol: [f64; 2],
    rho_c: f64,
    /// `ka − λC_X`
    rate_drift: f64,
    /// `σ_r√Δ`
    rate_vol: f64,
}

impl<'a> UnitSim<'a> {
    fn new(model: SimModel<'a>, seed: u64, unit: usize, steps: usize) -> Self {
        let mut streams = Streams::new(seed, unit);
        let x_arr = Arrivals::new(model.rate.lambda, model.rate.x_law, &mut streams.rate);
        let dt = model.tau / steps as f64;
        let mut y_arr = [Arrivals::idle(), Arrivals::idle()];
        let mut drift = [0.0; 2];
        let mut vol = [0.0; 2];
        let n_assets = model.assets.iter().take_while(|a| a.is_some()).count();
        for (j, a) in model.assets.iter().flatten().enumerate() {
            y_arr[j] = Arrivals::new(a.lambda1, a.y_law, &mut streams.asset[j]);
            drift[j] = -a.lambda1 * a.c_y() - 0.5 * a.sigma * a.sigma;
            vol[j] = a.sigma * dt.sqrt();
        }
        Self {
            model,
            streams,
            x_arr,
            y_arr,
            n_assets,
            buf: Vec::new(),
            dt,
            drift,
            vol,
            rho_c: (1.0 - model.rho * model.rho).max(0.0).sqrt(),
            rate_drift: model.rate.k * model.rate.a - model.rate.lambda * model.rate.c_x(),
            rate_vol: model.rate.sigma_r * dt.sqrt(),
        }
    }

    fn draws(&mut self, t_end: f64, mut record: Option<&mut Vec<JumpEvent>>) -> StepDraws {
        let xi_r: f64 = self.streams.rate.sample(StandardNormal);
        let mut dx = 0.0;
        if self.x_arr.pending(t_end) {
            self.buf.clear();
            self.x_arr.collect(t_end, &mut self.streams.rate, &mut self.buf);
            dx = self.buf.iter().map(|(_, x)| x).sum();
            if let Some(rec) = record.as_deref_mut() {
                push_events(rec, &self.buf, JumpSource::Rate);
            }
        }
        let mut xi = [0.0; 2];
        let mut log_y = [0.0; 2];
        for j in 0..self.n_assets {
            xi[j] = self.streams.asset[j].sample(StandardNormal);
            if self.y_arr[j].pending(t_end) {
                self.buf.clear();
                self.y_arr[j].collect(t_end, &mut self.streams.asset[j], &mut self.buf);
                log_y[j] = self.buf.iter().map(|(_, y)| y.ln()).sum();
                if let Some(rec) = record.as_deref_mut() {
                    let source = [JumpSource::Asset1, JumpSource::Asset2][j];
                    push_events(rec, &self.buf, source);
                }
            }
        }
        // asset 2 loads on asset 1's noise through ρ
        xi[1] = self.model.rho * xi[0] + self.rho_c * xi[1];
        StepDraws {
            xi_r,
            xi,
            dx,
            log_y,
        }
    }

    #[inline]
    fn advance(&self, lane: &mut Lane, d: &StepDraws, sign: f64) {
        let dt = self.dt;
        let rp = lane.r.max(0.0);
        let r_next = lane.r + (self.rate_drift - self.model.rate.k * rp) * dt
            + self.rate_vol * rp.sqrt() * sign * d.xi_r
            + d.dx;
        let r_bar = 0.5 * (lane.r + r_next);
        lane.int_r += r_bar * dt;
        for j in 0..self.n_assets {
            lane.ln_s[j] +=
                (r_bar + self.drift[j]) * dt + self.vol[j] * sign * d.xi[j] + d.log_y[j];
        }
        lane.r = r_next;
    }

    fn start(&self) -> Lane {
        Lane {
            r: self.model.r0,
            int_r: 0.0,
            ln_s: self.model.ln_spot,
        }
    }
}

fn push_events(rec: &mut Vec<JumpEvent>, buf: &[(f64, f64)], source: JumpSource) {
    rec.extend(buf.iter().map(|&(time, magnitude)| JumpEvent {
        time,
        source,
        magnitude,
    }));
}

fn terminal(lane: &Lane) -> Terminal {
    Terminal {
        discount: (-lane.int_r).exp(),
        s: [lane.ln_s[0].exp(), lane.ln_s[1].exp()],
    }
}

/// Running `(n, mean, M2)` with Chan's parallel merge.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

/// Mean and standard error of `payoff` over all sampling units.
fn estimate<F>(model: SimModel<'_>, spec: &SimSpec, payoff: F) -> (f64, f64)
where
    F: Fn(&Terminal) -> f64 + Sync,
{
    let steps = spec.steps_for(model.tau);
    let units = spec.units();
    let lanes = spec.lanes();
    let chunks = units.div_ceil(CHUNK_PAIRS);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::default();
            let end = ((c + 1) * CHUNK_PAIRS).min(units);
            for base in (c * CHUNK_PAIRS..end).step_by(BATCH) {
                // independent units in lockstep overlap their latency chains
                let mut sims: Vec<UnitSim> = (base..(base + BATCH).min(end))
                    .map(|unit| UnitSim::new(model, spec.seed, unit, steps))
                    .collect();
                let mut states: Vec<[Lane; 2]> =
                    sims.iter().map(|s| [s.start(), s.start()]).collect();
                for i in 0..steps {
                    for (sim, st) in sims.iter_mut().zip(states.iter_mut()) {
                        let d = sim.draws((i + 1) as f64 * sim.dt, None);
                        sim.advance(&mut st[0], &d, 1.0);
                        if lanes == 2 {
                            sim.advance(&mut st[1], &d, -1.0);
                        }
                    }
                }
                for st in &states {
                    let v: f64 = st[..lanes].iter().map(|l| payoff(&terminal(l))).sum();
                    acc.push(v / lanes as f64);
                }
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    (total.mean, total.stderr())
}

fn mc_result(mean: f64, se: f64) -> PriceResult {
    PriceResult::estimate(mean, se)
}

fn single_model<'a>(rate: &'a RateParams, asset: &'a AssetParams, state: &MarketState) -> SimModel<'a> {
    SimModel {
        rate,
        assets: [Some(asset), None],
        rho: 0.0,
        r0: state.r,
        ln_spot: [state.spot.ln(), 0.0],
        tau: state.tau,
    }
}

fn check(v: Vec<crate::error::Violation>, spec: &SimSpec) -> Result<()> {
    if !v.is_empty() {
        return Err(PricingError::InvalidParameter(v));
    }
    spec.validate()
}

/// `E^Q[e^{−∫r}(S_T − K)⁺]`.
pub fn mc_option_price(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &SimSpec,
) -> Result<PriceResult> {
    let mut v = rate.violations();
    v.extend(asset.violations());
    v.extend(state.violations());
    check(v, spec)?;
    if state.tau == 0.0 {
        return Ok(mc_result((state.spot - state.strike).max(0.0), 0.0));
    }
    let k = state.strike;
    let (m, se) = estimate(single_model(rate, asset, state), spec, |t| {
        t.discount * (t.s[0] - k).max(0.0)
    });
    Ok(mc_result(m, se))
}

/// `E^Q[e^{−∫r}]` from `r₀` over `τ`.
pub fn mc_bond_price(rate: &RateParams, r0: f64, tau: f64, spec: &SimSpec) -> Result<PriceResult> {
    let mut v = rate.violations();
    if !(tau >= 0.0 && tau.is_finite()) {
        v.push(crate::error::Violation::new("tau", "tau must be >= 0"));
    }
    check(v, spec)?;
    if tau == 0.0 {
        return Ok(mc_result(1.0, 0.0));
    }
    let model = SimModel {
        rate,
        assets: [None, None],
        rho: 0.0,
        r0,
        ln_spot: [0.0, 0.0],
        tau,
    };
    let (m, se) = estimate(model, spec, |t| t.discount);
    Ok(mc_result(m, se))
}

/// `E^Q[e^{−∫r}S_T]`, which must equal the spot.
pub fn mc_discounted_asset(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &SimSpec,
) -> Result<PriceResult> {
    let mut v = rate.violations();
    v.extend(asset.violations());
    v.extend(state.violations());
    check(v, spec)?;
    let (m, se) = estimate(single_model(rate, asset, state), spec, |t| t.discount * t.s[0]);
    Ok(mc_result(m, se))
}

/// `E^Q[e^{−∫r}(H(S₁, S₂)_T − K)⁺]` for geometric or arithmetic `H`.
pub fn mc_basket_price(
    rate: &RateParams,
    basket: &BasketParams,
    state: &BasketState,
    spec: &SimSpec,
) -> Result<PriceResult> {
    let mut v = rate.violations();
    v.extend(basket.violations());
    v.extend(state.violations());
    check(v, spec)?;
    let kind: BasketKind = basket.kind;
    if state.tau == 0.0 {
        let h = kind.apply(state.spot[0], state.spot[1]);
        return Ok(mc_result((h - state.strike).max(0.0), 0.0));
    }
    let model = SimModel {
        rate,
        assets: [Some(&basket.asset1), Some(&basket.asset2)],
        rho: basket.rho,
        r0: state.r,
        ln_spot: [state.spot[0].ln(), state.spot[1].ln()],
        tau: state.tau,
    };
    let k = state.strike;
    let (m, se) = estimate(model, spec, |t| t.discount * (kind.apply(t.s[0], t.s[1]) - k).max(0.0));
    Ok(mc_result(m, se))
}

/// Full trajectories for `n_paths` paths (antithetic partners adjacent).
pub fn simulate_paths(
    rate: &RateParams,
    assets: &[AssetParams],
    rho: f64,
    r0: f64,
    spots: &[f64],
    tau: f64,
    spec: &SimSpec,
) -> Result<PathBundle> {
    if assets.is_empty() || assets.len() > 2 || spots.len() != assets.len() {
        return Err(PricingError::invalid(
            "spot",
            "one spot per asset, one or two assets",
        ));
    }
    let mut v = rate.violations();
    for a in assets {
        v.extend(a.violations());
    }
    if spots.iter().any(|s| !(*s > 0.0)) {
        v.push(crate::error::Violation::new("spot", "spot must be > 0"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        v.push(crate::error::Violation::new("rho", "rho must lie in [-1, 1]"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        v.push(crate::error::Violation::new("tau", "tau must be > 0 for paths"));
    }
    check(v, spec)?;
    let two = assets.len() == 2;
    let model = SimModel {
        rate,
        assets: [Some(&assets[0]), assets.get(1)],
        rho,
        r0,
        ln_spot: [spots[0].ln(), spots.get(1).map_or(0.0, |s| s.ln())],
        tau,
    };
    let steps = spec.steps_for(tau);
    let lanes = spec.lanes();
    let mut bundle = PathBundle {
        times: (0..=steps).map(|i| tau * i as f64 / steps as f64).collect(),
        r: Vec::new(),
        s: Vec::new(),
        s2: two.then(Vec::new),
        jumps: Vec::new(),
    };
    for unit in 0..spec.units() {
        let mut sim = UnitSim::new(model, spec.seed, unit, steps);
        let mut state = [sim.start(), sim.start()];
        let mut rs = vec![vec![r0]; lanes];
        let mut ss = vec![vec![spots[0]]; lanes];
        let mut ss2 = vec![vec![spots.get(1).copied().unwrap_or(0.0)]; lanes];
        let mut events = Vec::new();
        for i in 0..steps {
            let d = sim.draws((i + 1) as f64 * sim.dt, Some(&mut events));
            for (lane, sign) in [1.0, -1.0].into_iter().enumerate().take(lanes) {
                sim.advance(&mut state[lane], &d, sign);
                rs[lane].push(state[lane].r);
                ss[lane].push(state[lane].ln_s[0].exp());
                ss2[lane].push(state[lane].ln_s[1].exp());
            }
        }
        for lane in 0..lanes {
            if bundle.r.len() == spec.n_paths {
                break;
            }
            bundle.r.push(std::mem::take(&mut rs[lane]));
            bundle.s.push(std::mem::take(&mut ss[lane]));
            if let Some(s2) = bundle.s2.as_mut() {
                s2.push(std::mem::take(&mut ss2[lane]));
            }
            bundle.jumps.push(events.clone());
        }
    }
    Ok(bundle)
}

/// Coupled estimate of how much halving `Δ` moves the no-jump price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationCheck {
    pub coarse: PriceResult,
    pub fine: PriceResult,
    /// Mean of `fine − coarse` on shared noise.
    pub shift: f64,
    pub shift_stderr: f64,
}

/// Runs `spec` and a grid with half the step on the same Brownian paths:
/// each coarse increment is the sum of the two fine increments. Jumps are
/// switched off for the comparison.
pub fn discretization_check(
    rate: &RateParams,
    asset: &AssetParams,
    state: &MarketState,
    spec: &SimSpec,
) -> Result<DiscretizationCheck> {
    let mut v = rate.violations();
    v.extend(asset.violations());
    v.extend(state.violations());
    check(v, spec)?;
    let rate = rate.without_jumps();
    let asset = asset.without_jumps();
    let model = single_model(&rate, &asset, state);
    let coarse_steps = spec.steps_for(state.tau);
    let k = state.strike;
    let payoff = |l: &Lane| (-l.int_r).exp() * (l.ln_s[0].exp() - k).max(0.0);
    let units = spec.units();
    let lanes = spec.lanes();
    let chunks = units.div_ceil(CHUNK_PAIRS);
    let parts: Vec<[Moments; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [Moments::default(); 3];
            for unit in c * CHUNK_PAIRS..((c + 1) * CHUNK_PAIRS).min(units) {
                // the coarse simulator only supplies its step size
                let mut sim = UnitSim::new(model, spec.seed, unit, 2 * coarse_steps);
                let coarse = UnitSim::new(model, spec.seed, unit, coarse_steps);
                let mut lf = [sim.start(); 2];
                let mut lc = [coarse.start(); 2];
                for _ in 0..coarse_steps {
                    let a = sim.draws(0.0, None);
                    let b = sim.draws(0.0, None);
                    let joined = StepDraws {
                        xi_r: (a.xi_r + b.xi_r) * std::f64::consts::FRAC_1_SQRT_2,
                        xi: [
                            (a.xi[0] + b.xi[0]) * std::f64::consts::FRAC_1_SQRT_2,
                            0.0,
                        ],
                        dx: 0.0,
                        log_y: [0.0; 2],
                    };
                    for (lane, sign) in [1.0, -1.0].into_iter().enumerate().take(lanes) {
                        sim.advance(&mut lf[lane], &a, sign);
                        sim.advance(&mut lf[lane], &b, sign);
                        coarse.advance(&mut lc[lane], &joined, sign);
                    }
                }
                let f: f64 = lf[..lanes].iter().map(payoff).sum::<f64>() / lanes as f64;
                let g: f64 = lc[..lanes].iter().map(payoff).sum::<f64>() / lanes as f64;
                acc[0].push(g);
                acc[1].push(f);
                acc[2].push(f - g);
            }
            acc
        })
        .collect();
    let mut total = [Moments::default(); 3];
    for p in parts {
        for j in 0..3 {
            total[j] = total[j].merge(p[j]);
        }
    }
    Ok(DiscretizationCheck {
        coarse: mc_result(total[0].mean, total[0].stderr()),
        fine: mc_result(total[1].mean, total[1].stderr()),
        shift: total[2].mean,
        shift_stderr: total[2].stderr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;

    fn quick(n: usize) -> SimSpec {
        SimSpec {
            n_paths: n,
            ..SimSpec::default()
        }
    }

    #[test]
    fn expiry_and_zero_maturity() {
        let st = reference::market().with_tau(0.0);
        let p = mc_option_price(&reference::rate(), &reference::asset(), &st, &quick(10)).unwrap();
        assert_eq!(p.value, 10.0);
        assert_eq!(p.stderr, Some(0.0));
        let b = mc_bond_price(&reference::rate(), 0.03, 0.0, &quick(10)).unwrap();
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let spec = quick(2_000);
        let a = mc_option_price(&reference::rate(), &reference::asset(), &reference::market(), &spec)
            .unwrap();
        let b = mc_option_price(&reference::rate(), &reference::asset(), &reference::market(), &spec)
            .unwrap();
        assert_eq!(a, b);
        let other = SimSpec { seed: 1, ..spec };
        let c = mc_option_price(&reference::rate(), &reference::asset(), &reference::market(), &other)
            .unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = quick(3_000);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    mc_option_price(
                        &reference::rate(),
                        &reference::asset(),
                        &reference::market(),
                        &spec,
                    )
                    .unwrap()
                })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn deterministic_limit_follows_the_ode() {
        let rate = RateParams {
            sigma_r: 0.0,
            lambda: 0.0,
            ..reference::rate()
        };
        let asset = AssetParams {
            sigma: 1e-12,
            lambda1: 0.0,
            ..reference::asset()
        };
        let spec = SimSpec {
            n_paths: 1,
            n_steps: 10_000,
            antithetic: false,
            ..SimSpec::default()
        };
        let b = simulate_paths(&rate, &[asset], 0.0, 0.03, &[110.0], 1.0, &spec).unwrap();
        // r' = k(a − r): ∫r = a t + (r₀ − a)(1 − e^{−kt})/k
        let int_r = 0.05 + (0.03 - 0.05) * (1.0 - (-2.0f64).exp()) / 2.0;
        let r_end = 0.05 + (0.03 - 0.05) * (-2.0f64).exp();
        assert!((b.r[0].last().unwrap() - r_end).abs() < 1e-6);
        assert!((b.s[0].last().unwrap() - 110.0 * int_r.exp()).abs() / 110.0 < 1e-6);
    }

    #[test]
    fn compensated_rate_jumps_are_a_martingale_without_drift() {
        // k → 0 removes mean reversion: E[r(T)] = r₀
        let rate = RateParams {
            k: 1e-300,
            sigma_r: 0.0,
            lambda: 3.0,
            x_law: JumpLaw::exponential(100.0),
            ..reference::rate()
        };
        let spec = SimSpec {
            n_paths: 20_000,
            n_steps: 50,
            antithetic: false,
            ..SimSpec::default()
        };
        let b = simulate_paths(&rate, &[reference::asset()], 0.0, 0.03, &[1.0], 1.0, &spec).unwrap();
        let ends: Vec<f64> = b.r.iter().map(|p| *p.last().unwrap()).collect();
        let n = ends.len() as f64;
        let mean = ends.iter().sum::<f64>() / n;
        let var = ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - 0.03).abs() < 4.0 * (var / n).sqrt());
    }

    #[test]
    fn bundle_shapes_and_positive_prices() {
        let spec = SimSpec {
            n_paths: 3,
            n_steps: 5,
            ..SimSpec::default()
        };
        let b = simulate_paths(
            &reference::rate(),
            &[reference::asset(), reference::asset()],
            0.5,
            0.03,
            &[110.0, 90.0],
            1.0,
            &spec,
        )
        .unwrap();
        assert_eq!(b.times.len(), 6);
        assert_eq!(b.r.len(), 3);
        assert!(b.times.windows(2).all(|w| w[1] > w[0]));
        assert!(b.s.iter().flatten().all(|s| *s > 0.0));
        assert_eq!(b.s2.as_ref().unwrap()[0].len(), 6);
        // antithetic partners share their jumps
        assert_eq!(b.jumps[0], b.jumps[1]);
    }

    #[test]
    fn degenerate_geometric_basket_reuses_asset_one_draws() {
        let rate = reference::rate();
        let spec = quick(4_000);
        let basket = BasketParams {
            asset1: reference::asset(),
            asset2: AssetParams {
                sigma: 0.2,
                ..reference::asset()
            },
            rho: 0.3,
            kind: BasketKind::Geometric { alpha: 1.0 },
        };
        let st = BasketState {
            spot: [110.0, 50.0],
            r: 0.03,
            tau: 1.0,
            strike: 100.0,
        };
        let g = mc_basket_price(&rate, &basket, &st, &spec).unwrap();
        let s = mc_option_price(&rate, &reference::asset(), &reference::market(), &spec).unwrap();
        assert_eq!(g, s);
    }

    #[test]
    fn antithetics_do_not_hurt() {
        let on = quick(20_000);
        let off = SimSpec {
            antithetic: false,
            ..on
        };
        let p = |s: &SimSpec| {
            mc_option_price(&reference::rate(), &reference::asset(), &reference::market(), s)
                .unwrap()
                .stderr
                .unwrap()
        };
        assert!(p(&on) <= p(&off));
    }

    #[test]
    fn odd_antithetic_counts_round_up() {
        let s = quick(5);
        assert_eq!(s.effective_paths(), 6);
        assert_eq!(SimSpec { antithetic: false, ..s }.effective_paths(), 5);
    }
}
