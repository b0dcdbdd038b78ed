//! Exact series route to `ρ` and `ρ_odd`, independent of the root finders.
//!
//! For a left-continuous walk the hitting-time theorem gives
//! `P(T₋₁ = n) = P(S_n = -1) / n`, so summing first-passage masses over
//! `n ≤ N` bounds `ρ` (all `n`) and `ρ ρ_odd` (odd `n`) from below. The
//! missing tail is bounded by a Chernoff estimate: for `x ∈ (0, 1)`,
//! `P(S_n ≤ -1) ≤ x g(x)^n`, hence
//! `Σ_{n>N} P(T₋₁ = n) ≤ x g(x)^{N+1} / ((N + 1)(1 - g(x)))` whenever
//! `g(x) < 1`. A geometric envelope fitted to the last terms is reported
//! alongside as a heuristic.

use serde::{Deserialize, Serialize};

use crate::analytic::solve_rho;
use crate::distributions::IncrementDistribution;
use crate::error::{Error, Result};
use crate::roots::golden_min;
use crate::scalar::{powu, Scalar};

/// Series length used when none is given.
pub const DEFAULT_TERMS: usize = 2000;

/// Terms used to fit the heuristic tail envelope.
const FIT_TERMS: usize = 50;

/// Law of `S_n` on a window of the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePmf<T> {
    /// Lattice point of `masses[0]`.
    pub offset: i64,
    pub masses: Vec<T>,
    /// Mass that left the window or was never represented by the increment law.
    pub defect: T,
}

impl<T: Scalar> LatticePmf<T> {
    pub fn mass_at(&self, j: i64) -> T {
        let i = j - self.offset;
        if i < 0 {
            return T::zero();
        }
        self.masses.get(i as usize).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.masses.iter().fold(T::zero(), |a, &m| a + m)
    }

    pub fn mean(&self) -> T {
        self.masses
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (i, &m)| a + m * T::from_int(self.offset + i as i64))
    }
}

/// Two-sided bound on a series whose partial sums are known exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBracket<T> {
    pub lower: T,
    pub upper: T,
    pub terms_used: usize,
    /// Rigorous bound on the omitted tail (before rounding allowance).
    pub tail_bound: T,
    /// Geometric envelope fitted to the last terms; heuristic, `None` when
    /// the fitted ratio is not below one.
    pub fitted_tail: Option<T>,
}

impl<T: Scalar> SeriesBracket<T> {
    pub fn contains(&self, x: T) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// Window `[n·min_support - 1, ⌈n(drift + 6·sd)⌉]`.
pub fn auto_window<T: Scalar>(dist: &IncrementDistribution<T>, n: u64) -> (i64, i64) {
    let lo = n as i64 * dist.min_support() - 1;
    let spread = dist.drift() + T::lit(6.0) * dist.variance().sqrt();
    let hi = (T::from_int(n as i64) * spread).ceil().to_i64().unwrap_or(i64::MAX / 4);
    (lo, hi.max(lo))
}

/// Law of `S_n` from `S_0 = 0`, restricted to `window` (default [`auto_window`]).
///
/// The window must reach down to `n·min_support` so nothing is lost below;
/// mass carried above the upper end is dropped into `defect`. The result is
/// exact when the window also reaches `n·max_support`.
pub fn walk_pmf<T: Scalar>(dist: &IncrementDistribution<T>, n: u64, window: Option<(i64, i64)>) -> Result<LatticePmf<T>> {
    let (lo, hi) = window.unwrap_or_else(|| auto_window(dist, n));
    let reach = n as i64 * dist.min_support();
    if lo > reach.min(0) || hi < lo {
        return Err(Error::WindowTooSmall { lo, hi, n });
    }
    let width = (hi - lo + 1) as usize;
    let mut cur = vec![T::zero(); width];
    let mut defect = T::zero();
    if (lo..=hi).contains(&0) {
        cur[(-lo) as usize] = T::one();
    } else {
        defect = T::one();
    }
    let support = sparse_support(dist);
    let step_defect = dist.truncation_defect();
    let mut next = vec![T::zero(); width];
    for _ in 0..n {
        next.iter_mut().for_each(|m| *m = T::zero());
        for (i, &m) in cur.iter().enumerate() {
            if m == T::zero() {
                continue;
            }
            defect = defect + m * step_defect;
            let base = lo + i as i64;
            for &(s, p) in &support {
                let y = base + s;
                if y > hi {
                    defect = defect + m * p;
                } else if y >= lo {
                    let slot = &mut next[(y - lo) as usize];
                    *slot = *slot + m * p;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(LatticePmf { offset: lo, masses: cur, defect })
}

/// Non-zero `(step, probability)` pairs in increasing step order.
fn sparse_support<T: Scalar>(dist: &IncrementDistribution<T>) -> Vec<(i64, T)> {
    dist.iter().filter(|&(_, p)| p != T::zero()).collect()
}

/// `P(T₋₁ = n)` for `n = 1..=max_terms` (index `n - 1`), via
/// `P(S_n = -1) / n`.
///
/// Positions above `N - m - 1` at step `m` cannot come back to -1 within
/// `N` steps, so dropping them leaves every returned term exact.
pub fn first_passage_terms<T: Scalar>(dist: &IncrementDistribution<T>, max_terms: usize) -> Result<Vec<T>> {
    if dist.min_support() != -1 {
        return Err(Error::UnsupportedSupport { min_support: dist.min_support() });
    }
    let n_max = max_terms as i64;
    let support = sparse_support(dist);
    let k_max = dist.max_support();
    // Positions -n_max..=n_max, index = position + n_max.
    let size = (2 * n_max + 1) as usize;
    let mut cur = vec![T::zero(); size];
    let mut next = vec![T::zero(); size];
    let idx = |pos: i64| (pos + n_max) as usize;
    cur[idx(0)] = T::one();
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut terms = Vec::with_capacity(max_terms);
    for m in 1..=n_max {
        let new_lo = lo - 1;
        let new_hi = (hi + k_max).min(n_max - m - 1).max(new_lo);
        for pos in new_lo..=new_hi {
            next[idx(pos)] = T::zero();
        }
        for pos in lo..=hi {
            let mass = cur[idx(pos)];
            if mass == T::zero() {
                continue;
            }
            for &(s, p) in &support {
                let y = pos + s;
                if y > new_hi {
                    break;
                }
                let slot = &mut next[idx(y)];
                *slot = *slot + mass * p;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi = new_hi;
        let at_minus_one = if (lo..=hi).contains(&-1) { cur[idx(-1)] } else { T::zero() };
        terms.push(at_minus_one / T::from_int(m));
    }
    Ok(terms)
}

/// `P(T₋₁ = n)` by the hitting-time theorem.
pub fn first_passage_pmf<T: Scalar>(dist: &IncrementDistribution<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter("first passage time n must be >= 1".into()));
    }
    Ok(first_passage_terms(dist, n)?[n - 1])
}

/// Chernoff bound on `Σ_{n > N} P(T₋₁ = n)`; 1 when `min g ≥ 1`.
pub fn tail_bound<T: Scalar>(dist: &IncrementDistribution<T>, terms: usize) -> T {
    let p = dist.p_minus_one();
    if p == T::zero() {
        // Monotone walks never reach -1 after time 0.
        return T::zero();
    }
    let (x, gx) = golden_min(|x| dist.pgf_unchecked(x), p * T::lit(0.5), T::one(), T::tol(1e-12));
    if !(gx < T::one()) {
        return T::one();
    }
    let n1 = terms as u64 + 1;
    let bound = x * powu(gx, n1) / (T::from_int(n1 as i64) * (T::one() - gx));
    bound.min(T::one())
}

/// Geometric envelope from the last `2 · FIT_TERMS` terms, compared in blocks
/// so that parity-alternating zeros do not matter.
fn fitted_tail<T: Scalar>(terms: &[T]) -> Option<T> {
    if terms.len() < 2 * FIT_TERMS {
        return None;
    }
    let n = terms.len();
    let last: T = terms[n - FIT_TERMS..].iter().fold(T::zero(), |a, &t| a + t);
    let prev: T = terms[n - 2 * FIT_TERMS..n - FIT_TERMS].iter().fold(T::zero(), |a, &t| a + t);
    if prev == T::zero() {
        return if last == T::zero() { Some(T::zero()) } else { None };
    }
    let ratio = last / prev;
    if ratio >= T::one() {
        return None;
    }
    Some(last * ratio / (T::one() - ratio))
}

fn rounding_allowance<T: Scalar>(sum: T, terms: usize, support: usize) -> T {
    sum * T::epsilon() * T::from_count(terms * (support + 1) + 16)
}

/// Bracket on `ρ = Σ_n P(T₋₁ = n)` from the first `max_terms` terms.
pub fn rho_series<T: Scalar>(dist: &IncrementDistribution<T>, max_terms: usize) -> Result<SeriesBracket<T>> {
    let terms = first_passage_terms(dist, max_terms)?;
    Ok(bracket_from_terms(dist, &terms, |_| true, T::one()))
}

/// Bracket on `ρ_odd = Σ_{n odd} P(T₋₁ = n) / ρ`, with `ρ` from [`solve_rho`].
pub fn rho_odd_series<T: Scalar>(dist: &IncrementDistribution<T>, max_terms: usize) -> Result<SeriesBracket<T>> {
    let rho = solve_rho(dist)?;
    Ok(series_brackets(dist, max_terms, rho)?.1)
}

/// Both brackets from a single pass over the first-passage terms.
pub fn series_brackets<T: Scalar>(
    dist: &IncrementDistribution<T>,
    max_terms: usize,
    rho: T,
) -> Result<(SeriesBracket<T>, SeriesBracket<T>)> {
    let terms = first_passage_terms(dist, max_terms)?;
    let all = bracket_from_terms(dist, &terms, |_| true, T::one());
    let odd = bracket_from_terms(dist, &terms, |n| n % 2 == 1, rho);
    Ok((all, odd))
}

fn bracket_from_terms<T: Scalar>(
    dist: &IncrementDistribution<T>,
    terms: &[T],
    keep: impl Fn(usize) -> bool,
    denominator: T,
) -> SeriesBracket<T> {
    let kept: Vec<T> = terms
        .iter()
        .enumerate()
        .map(|(i, &t)| if keep(i + 1) { t } else { T::zero() })
        .collect();
    let sum = kept.iter().fold(T::zero(), |a, &t| a + t);
    let slack = rounding_allowance(sum, terms.len(), dist.probabilities().len());
    let tail = tail_bound(dist, terms.len());
    // The denominator comes from a root finder; allow for its last digits.
    let rel = T::tol(1e-12);
    let (lo_div, hi_div) = if denominator == T::one() {
        (T::one(), T::one())
    } else {
        (denominator * (T::one() + rel), denominator * (T::one() - rel))
    };
    let lower = ((sum - slack) / lo_div).max(T::zero());
    let upper = ((sum + tail + slack) / hi_div).min(T::one());
    SeriesBracket {
        lower,
        upper: upper.max(lower),
        terms_used: terms.len(),
        tail_bound: tail / denominator,
        fitted_tail: fitted_tail(&kept).map(|t| t / denominator),
    }
}
