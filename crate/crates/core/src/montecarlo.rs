//! Seeded trajectory simulation of the hitting and parity events.
//!
//! Trials are grouped in blocks of [`BLOCK_SIZE`]; block `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. The `streams` setting
//! only decides how blocks are split across worker threads, and tallies are
//! integer counts, so results do not depend on it.
//!
//! Trajectories stop early once they are high enough that returning is
//! negligible. For `x* = argmin g` on `(0, 1]` we have `g(x*) < 1` when the
//! drift is positive, so `x*^{S_n}` is a supermartingale and a walk at level
//! `s` ever reaches `-1` or below with probability at most `x*^{s + 1}`.
//! A trajectory with `x*^{S_n} ≤ escape_tolerance` is therefore decided as
//! "never below again", with a per-trial bias of at most `escape_tolerance`
//! (reported as `escape_bias`). Trajectories still undecided at the horizon
//! are censored and counted as failures, so the truth for every event lies
//! in `[p̂ - escape_bias, p̂ + censored_fraction + escape_bias]`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::IncrementDistribution;
use crate::error::{Error, Result};
use crate::roots::golden_min;
use crate::scalar::Scalar;

pub const BLOCK_SIZE: u64 = 1024;
pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_ESCAPE_TOLERANCE: f64 = 1e-15;
const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    pub streams: usize,
    /// Set to 0 to disable early stopping.
    pub escape_tolerance: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            horizon: DEFAULT_HORIZON,
            seed: 42,
            streams: 1,
            escape_tolerance: DEFAULT_ESCAPE_TOLERANCE,
        }
    }
}

impl SimulationConfig {
    pub fn new(trials: u64, horizon: u64, seed: u64, streams: usize) -> Result<Self> {
        let cfg = Self { trials, horizon, seed, streams, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be >= 1".into()));
        }
        if self.streams == 0 {
            return Err(Error::InvalidConfig("streams must be >= 1".into()));
        }
        if !(0.0..1e-3).contains(&self.escape_tolerance) {
            return Err(Error::InvalidConfig(format!(
                "escape tolerance {} outside [0, 1e-3)",
                self.escape_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Rho,
    RhoOdd,
    Sigma,
    Tau,
    TauOdd,
    PEven(u64),
    POdd(u64),
    PBoth(u64),
    /// `P(S_n < 0 for some n ≥ 1 | S₀ = k)` for a walk of any support.
    Ruin(u64),
}

impl Quantity {
    /// Conditional quantities are estimated on their conditioning subsample.
    pub fn is_conditional(self) -> bool {
        matches!(self, Quantity::RhoOdd | Quantity::TauOdd)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Rho => write!(f, "rho"),
            Quantity::RhoOdd => write!(f, "rho_odd"),
            Quantity::Sigma => write!(f, "sigma"),
            Quantity::Tau => write!(f, "tau"),
            Quantity::TauOdd => write!(f, "tau_odd"),
            Quantity::PEven(k) => write!(f, "p_even({k})"),
            Quantity::POdd(k) => write!(f, "p_odd({k})"),
            Quantity::PBoth(k) => write!(f, "p_both({k})"),
            Quantity::Ruin(k) => write!(f, "ruin({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimate {
    pub quantity: Quantity,
    pub estimate: f64,
    pub std_error: f64,
    /// Wald interval; may spill outside `[0, 1]` for small samples.
    pub ci95: (f64, f64),
    pub ci95_clipped: (f64, f64),
    pub censored_fraction: f64,
    pub escape_bias: f64,
    pub sample_size: u64,
}

impl SimulationEstimate {
    fn from_counts(quantity: Quantity, successes: u64, n: u64, censored: u64, escape_bias: f64) -> Self {
        let (estimate, std_error) = if n == 0 {
            (0.0, 0.5)
        } else {
            let p = successes as f64 / n as f64;
            (p, (p * (1.0 - p) / n as f64).sqrt())
        };
        let ci95 = if n == 0 { (0.0, 1.0) } else { (estimate - Z95 * std_error, estimate + Z95 * std_error) };
        let denom = if quantity.is_conditional() { n + censored } else { n };
        let censored_fraction = if denom == 0 { 0.0 } else { censored as f64 / denom as f64 };
        Self {
            quantity,
            estimate,
            std_error,
            ci95,
            ci95_clipped: (ci95.0.max(0.0), ci95.1.min(1.0)),
            censored_fraction,
            escape_bias,
            sample_size: n,
        }
    }

    /// Interval that contains the truth up to sampling error.
    pub fn censoring_bracket(&self) -> (f64, f64) {
        (self.estimate - self.escape_bias, self.estimate + self.censored_fraction + self.escape_bias)
    }

    /// `|value - estimate| ≤ z · std_error`, with a rounding floor so exact
    /// 0/1 outcomes compare cleanly.
    pub fn agrees_with(&self, value: f64, z: f64) -> bool {
        (value - self.estimate).abs() <= z * self.std_error + 1e-12
    }

    /// Whether `value` lies in the censoring bracket widened by `z` standard errors.
    pub fn bracket_contains(&self, value: f64, z: f64) -> bool {
        let (lo, hi) = self.censoring_bracket();
        let slack = z * self.std_error + 1e-12;
        value >= lo - slack && value <= hi + slack
    }
}

/// Inverse-CDF sampler; the truncation defect goes to the largest support point.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    min_support: i64,
    cdf: Vec<f64>,
    probabilities: Vec<f64>,
}

impl IncrementSampler {
    pub fn new<T: Scalar>(dist: &IncrementDistribution<T>) -> Self {
        let probabilities: Vec<f64> = dist.probabilities().iter().map(|p| p.as_f64()).collect();
        let mut cdf = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for &p in &probabilities {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Self { min_support: dist.min_support(), cdf, probabilities }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        self.min_support + self.cdf.partition_point(|&c| c <= u) as i64
    }

    fn pgf(&self, x: f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| p * x.powi((self.min_support + i as i64) as i32))
            .sum()
    }

    fn drift(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(i, &p)| p * (self.min_support + i as i64) as f64).sum()
    }
}

/// One draw from `dist`. Builds a sampler per call; use [`IncrementSampler`] in loops.
pub fn sample_increment<T: Scalar, R: Rng + ?Sized>(dist: &IncrementDistribution<T>, rng: &mut R) -> i64 {
    IncrementSampler::new(dist).sample(rng)
}

/// Smallest level `s ≥ 1` with `x*^s ≤ tolerance`, or `i64::MAX` when early
/// stopping is disabled or the walk has no usable exponential bound.
pub fn escape_level(sampler: &IncrementSampler, tolerance: f64) -> i64 {
    if tolerance <= 0.0 {
        return i64::MAX;
    }
    let (x, gx) = golden_min(|x| sampler.pgf(x), 1e-6, 1.0, 1e-12);
    if !(gx <= 1.0) || !(x < 1.0) || x <= 0.0 {
        return i64::MAX;
    }
    let level = (tolerance.ln() / x.ln()).ceil();
    if level >= i64::MAX as f64 {
        i64::MAX
    } else {
        (level as i64).max(1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    hit: u64,
    hit_odd: u64,
    hit_censored: u64,
    stay: u64,
    ret: u64,
    ret_odd: u64,
    first_censored: u64,
    even: u64,
    odd: u64,
    both: u64,
    even_censored: u64,
    odd_censored: u64,
    both_censored: u64,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Self) {
        self.hit += o.hit;
        self.hit_odd += o.hit_odd;
        self.hit_censored += o.hit_censored;
        self.stay += o.stay;
        self.ret += o.ret;
        self.ret_odd += o.ret_odd;
        self.first_censored += o.first_censored;
        self.even += o.even;
        self.odd += o.odd;
        self.both += o.both;
        self.even_censored += o.even_censored;
        self.odd_censored += o.odd_censored;
        self.both_censored += o.both_censored;
    }
}

struct Walker<'a> {
    sampler: &'a IncrementSampler,
    horizon: u64,
    level: i64,
}

/// Parity events on one trajectory: (even, odd, decided).
struct ParityRun {
    even: bool,
    odd: bool,
    decided: bool,
}

impl Walker<'_> {
    fn record_parity(&self, tally: &mut Tally, run: &ParityRun) {
        tally.even += run.even as u64;
        tally.odd += run.odd as u64;
        tally.both += (run.even && run.odd) as u64;
        if !run.decided {
            tally.even_censored += !run.even as u64;
            tally.odd_censored += !run.odd as u64;
            tally.both_censored += !(run.even && run.odd) as u64;
        }
    }

    /// Path from 0: first passage to -1, first visit to `(-∞, 0]`, and the
    /// parity events when `track_parity`.
    fn origin(&self, rng: &mut ChaCha8Rng, tally: &mut Tally, track_parity: bool) {
        let mut s = 0i64;
        let mut hit: Option<u64> = None;
        let mut first: Option<(u64, bool)> = None;
        let (mut even, mut odd) = (false, false);
        let mut decided = false;
        for n in 1..=self.horizon {
            s += self.sampler.sample(rng);
            if s <= 0 && first.is_none() {
                first = Some((n, s == 0));
            }
            if s < 0 {
                hit.get_or_insert(n);
                if n % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
            let done = if track_parity { even && odd } else { hit.is_some() };
            if done || s >= self.level {
                decided = true;
                break;
            }
        }
        match hit {
            Some(n) => {
                tally.hit += 1;
                tally.hit_odd += n % 2;
            }
            None if !decided => tally.hit_censored += 1,
            None => {}
        }
        match first {
            Some((n, true)) => {
                tally.ret += 1;
                tally.ret_odd += n % 2;
            }
            Some((_, false)) => {}
            None if decided => tally.stay += 1,
            None => tally.first_censored += 1,
        }
        if track_parity {
            self.record_parity(tally, &ParityRun { even, odd, decided });
        }
    }

    fn parity_from(&self, rng: &mut ChaCha8Rng, start: i64) -> ParityRun {
        let mut s = start;
        let (mut even, mut odd) = (false, false);
        if s >= self.level {
            return ParityRun { even, odd, decided: true };
        }
        for n in 1..=self.horizon {
            s += self.sampler.sample(rng);
            if s < 0 {
                if n % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
                if even && odd {
                    return ParityRun { even, odd, decided: true };
                }
            }
            if s >= self.level {
                return ParityRun { even, odd, decided: true };
            }
        }
        ParityRun { even, odd, decided: false }
    }

    /// `Some(true)` on ruin, `Some(false)` on escape, `None` when censored.
    fn ruin_from(&self, rng: &mut ChaCha8Rng, start: i64) -> Option<bool> {
        let mut s = start;
        if s >= self.level {
            return Some(false);
        }
        for _ in 1..=self.horizon {
            s += self.sampler.sample(rng);
            if s < 0 {
                return Some(true);
            }
            if s >= self.level {
                return Some(false);
            }
        }
        None
    }
}

fn check_start(k: u64) -> Result<i64> {
    i64::try_from(k).map_err(|_| Error::InvalidParameter(format!("start level {k} too large")))
}

fn check_walk<T: Scalar>(dist: &IncrementDistribution<T>) -> Result<()> {
    let drift = dist.drift();
    if !(drift > T::zero()) {
        return Err(Error::NonPositiveDrift { drift: drift.as_f64() });
    }
    Ok(())
}

/// Runs `trial` over every block in parallel and sums the tallies.
fn run_blocks<A, F>(cfg: &SimulationConfig, trial: F) -> A
where
    A: Default + std::ops::AddAssign + Send,
    F: Fn(&mut ChaCha8Rng, &mut A) + Sync,
{
    let blocks = cfg.trials.div_ceil(BLOCK_SIZE);
    let streams = cfg.streams as u64;
    let partials: Vec<A> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut acc = A::default();
            let (first, last) = (blocks * s / streams, blocks * (s + 1) / streams);
            for b in first..last {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(b);
                let size = BLOCK_SIZE.min(cfg.trials - b * BLOCK_SIZE);
                for _ in 0..size {
                    trial(&mut rng, &mut acc);
                }
            }
            acc
        })
        .collect();
    let mut total = A::default();
    for p in partials {
        total += p;
    }
    total
}

/// Estimates `ρ, ρ_odd, σ, τ, τ_odd` from 0 and `P(E), P(O), P(E ∩ O)` from `k`.
///
/// `E` is `S_{2n} < 0` for some `n ≥ 1` and `O` is `S_{2n-1} < 0` for some
/// `n ≥ 1`. For `k > 0` the parity events use a second, independent
/// trajectory started at `k`.
pub fn simulate_summary<T: Scalar>(
    dist: &IncrementDistribution<T>,
    k: u64,
    cfg: &SimulationConfig,
) -> Result<Vec<SimulationEstimate>> {
    cfg.validate()?;
    if dist.min_support() != -1 || dist.p_minus_one() == T::zero() {
        return Err(Error::UnsupportedSupport { min_support: dist.min_support() });
    }
    check_walk(dist)?;
    let start = check_start(k)?;
    let sampler = IncrementSampler::new(dist);
    let walker = Walker { sampler: &sampler, horizon: cfg.horizon, level: escape_level(&sampler, cfg.escape_tolerance) };

    let t: Tally = run_blocks(cfg, |rng, tally: &mut Tally| {
        walker.origin(rng, tally, k == 0);
        if k > 0 {
            let run = walker.parity_from(rng, start);
            walker.record_parity(tally, &run);
        }
    });

    let n = cfg.trials;
    let bias = cfg.escape_tolerance;
    let est = |q, successes, size, censored| SimulationEstimate::from_counts(q, successes, size, censored, bias);
    Ok(vec![
        est(Quantity::Rho, t.hit, n, t.hit_censored),
        est(Quantity::RhoOdd, t.hit_odd, t.hit, t.hit_censored),
        est(Quantity::Sigma, t.stay, n, t.first_censored),
        est(Quantity::Tau, t.ret, n, t.first_censored),
        est(Quantity::TauOdd, t.ret_odd, t.ret, t.first_censored),
        est(Quantity::PEven(k), t.even, n, t.even_censored),
        est(Quantity::POdd(k), t.odd, n, t.odd_censored),
        est(Quantity::PBoth(k), t.both, n, t.both_censored),
    ])
}

#[derive(Debug, Clone, Copy, Default)]
struct RuinTally {
    ruined: u64,
    censored: u64,
}

impl std::ops::AddAssign for RuinTally {
    fn add_assign(&mut self, o: Self) {
        self.ruined += o.ruined;
        self.censored += o.censored;
    }
}

/// Estimates the probability that the walk started at `k` is ever negative.
/// Accepts any finite support, e.g. a convolution with minimum `-2`.
pub fn simulate_ruin<T: Scalar>(
    dist: &IncrementDistribution<T>,
    k: u64,
    cfg: &SimulationConfig,
) -> Result<SimulationEstimate> {
    cfg.validate()?;
    check_walk(dist)?;
    let start = check_start(k)?;
    let sampler = IncrementSampler::new(dist);
    debug_assert!(sampler.drift() > 0.0);
    let walker = Walker { sampler: &sampler, horizon: cfg.horizon, level: escape_level(&sampler, cfg.escape_tolerance) };
    let t: RuinTally = run_blocks(cfg, |rng, tally: &mut RuinTally| match walker.ruin_from(rng, start) {
        Some(true) => tally.ruined += 1,
        Some(false) => {}
        None => tally.censored += 1,
    });
    Ok(SimulationEstimate::from_counts(Quantity::Ruin(k), t.ruined, cfg.trials, t.censored, cfg.escape_tolerance))
}
