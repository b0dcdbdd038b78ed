//! Closed-form hitting probabilities of a left-continuous walk started at 0.
//!
//! With `g` the increment PGF and `p = P(X = -1)`:
//!
//! * `ρ = P(T₋₁ < ∞)` is the root of `g(x) = 1` in `(0, 1)`;
//! * `σ = p(1 - ρ)/ρ` and `τ = 1 - p/ρ`, so that `p + σ + τ = 1`;
//! * `y* = ρ(1 - 2ρ_odd)` is the root of `g(y) = -1` in `[-ρ, 0)`, which
//!   gives `ρ_odd`;
//! * `τ_odd = p(1 - ρ_odd) / (ρτ(2ρ_odd - 1))`.
//!
//! Near `x = p` the expression `1 - p/x` cancels, so the code works with
//! `N(x) = Σ_{k≥0} p_k x^k` instead: `g(x) - 1 = N(x) - (x - p)/x`,
//! `τ = N(ρ)` and `τ(1 - 2τ_odd) = -N(y*)`. These agree with the closed
//! forms above and keep full relative accuracy when `ρ` is close to `p`.
//!
//! `y*` is the value at `s = -1` of `E[s^T₋₁; T₋₁ < ∞]`, the fixed point of
//! `y = -f(y)` with `f(y) = y g(y)` the offspring PGF. That map is a
//! contraction on `[-ρ, ρ]`, so the root is unique there; the grid scan in
//! [`solve_rho_odd`] still checks for extra sign changes and defers to the
//! series oracle if it ever finds one.

use serde::{Deserialize, Serialize};

use crate::distributions::{IncrementDistribution, OffspringDistribution};
use crate::error::{Error, Result};
use crate::oracle;
use crate::roots::{brent, sign_changes};
use crate::scalar::{powu, Scalar};

/// Absolute tolerance on root arguments.
pub const ROOT_XTOL: f64 = 1e-14;
/// Largest accepted `|g(root) ∓ 1|` straight out of the root finder.
pub const ROOT_RESIDUAL: f64 = 1e-12;
/// Tolerance for the identities asserted by [`summarize`].
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Grid points scanned for sign changes of `g(y) + 1`.
pub const GRID_POINTS: usize = 1024;
/// `g(-ρ) + 1` at or below this is treated as a root at the closed end `-ρ`.
const ENDPOINT_SNAP: f64 = 1e-14;

/// The five probabilities of a left-continuous walk from 0, with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSummary<T> {
    /// `P(T₋₁ < ∞)`.
    pub rho: T,
    /// `P(S_n > 0 for all n ≥ 1)`.
    pub sigma: T,
    /// `P(T₀⁺ < T₋₁)`.
    pub tau: T,
    /// `P(T₋₁ odd | T₋₁ < ∞)`.
    pub rho_odd: T,
    /// `P(T₀⁺ odd | T₀⁺ < T₋₁)`.
    pub tau_odd: T,
    /// Root of `g(y) = -1`, equal to `ρ(1 - 2ρ_odd)`.
    pub y_star: T,
    /// `(|g(ρ) - 1|, |g(y*) + 1|)`.
    pub root_residuals: (T, T),
    pub p_minus_one: T,
    pub drift: T,
    pub truncation_defect: T,
    /// More than one sign change of `g + 1` was seen on `[-ρ, 0)`.
    pub multiple_roots: bool,
}

/// Root of `g(y) = -1` and the parity probability it encodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddRoot<T> {
    pub rho_odd: T,
    pub y_star: T,
    pub residual: T,
    /// Number of distinct roots found on `[-ρ, 0)`.
    pub roots_found: usize,
}

/// Extinction probability of a Galton–Watson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extinction<T> {
    pub probability: T,
    /// Mean offspring ≤ 1, so extinction is certain.
    pub subcritical: bool,
}

/// `g(x) - 1` without the cancellation in `p/x - 1`.
fn excess_over_one<T: Scalar>(dist: &IncrementDistribution<T>, x: T) -> T {
    dist.nonnegative_part(x) - (x - dist.p_minus_one()) / x
}

/// `g(y) + 1`, computed as `((y + p) + y N(y)) / y`.
fn excess_over_minus_one<T: Scalar>(dist: &IncrementDistribution<T>, y: T) -> T {
    ((y + dist.p_minus_one()) + y * dist.nonnegative_part(y)) / y
}

/// Smallest value above a positive `x` reachable by adding `x·ε`.
fn just_above<T: Scalar>(x: T) -> T {
    x + x * T::epsilon()
}

fn check_walk<T: Scalar>(dist: &IncrementDistribution<T>) -> Result<()> {
    if dist.min_support() != -1 {
        return Err(Error::UnsupportedSupport { min_support: dist.min_support() });
    }
    if dist.p_minus_one() <= T::zero() {
        return Err(Error::MonotoneWalk);
    }
    let drift = dist.drift();
    if drift <= T::zero() {
        return Err(Error::NonPositiveDrift { drift: drift.as_f64() });
    }
    Ok(())
}

/// Walks `1 - δ` toward 1 until `pred` holds.
fn approach_one<T: Scalar>(start: T, mut pred: impl FnMut(T) -> bool) -> Option<T> {
    let mut delta = (T::one() - start) * T::lit(0.5);
    for _ in 0..200 {
        let x = T::one() - delta;
        if x <= start {
            break;
        }
        if pred(x) {
            return Some(x);
        }
        delta = delta * T::lit(0.5);
    }
    None
}

/// `ρ`, the unique root of `g(x) = 1` in `(0, 1)`.
pub fn solve_rho<T: Scalar>(dist: &IncrementDistribution<T>) -> Result<T> {
    check_walk(dist)?;
    let p = dist.p_minus_one();
    let h = |x: T| excess_over_one(dist, x);
    // g(p) - 1 = N(p) > 0 once any upward mass exists, and ρ > p.
    let lo = p;
    if h(lo) <= T::zero() {
        return Err(Error::RootNotBracketed { lo: lo.as_f64(), hi: 1.0 });
    }
    let hi = approach_one(lo, |x| h(x) < T::zero())
        .ok_or(Error::RootNotBracketed { lo: lo.as_f64(), hi: 1.0 })?;
    let mut rho = brent(h, lo, hi, T::lit(ROOT_XTOL))?;
    if rho <= p {
        // The gap ρ - p is below the argument tolerance.
        rho = just_above(p);
    }
    let residual = h(rho).abs();
    if residual > T::tol(ROOT_RESIDUAL) {
        return Err(Error::RootNotConverged { at: rho.as_f64() });
    }
    Ok(rho)
}

fn rho_residual<T: Scalar>(dist: &IncrementDistribution<T>, rho: T) -> Result<T> {
    if !(rho > T::zero() && rho <= T::one()) {
        return Err(Error::InconsistentRho { rho: rho.as_f64(), residual: f64::INFINITY });
    }
    let residual = excess_over_one(dist, rho).abs();
    if residual > T::tol(1e-8) {
        return Err(Error::InconsistentRho { rho: rho.as_f64(), residual: residual.as_f64() });
    }
    Ok(residual)
}

/// `(σ, τ)` from the closed forms, given `ρ`.
pub fn sigma_tau<T: Scalar>(dist: &IncrementDistribution<T>, rho: T) -> Result<(T, T)> {
    check_walk(dist)?;
    rho_residual(dist, rho)?;
    let p = dist.p_minus_one();
    let sigma = p * (T::one() - rho) / rho;
    // First-step analysis: τ = Σ_{k≥0} p_k ρ^k, which is 1 - p/ρ without the cancellation.
    let tau = dist.nonnegative_part(rho);
    let closed = T::one() - p / rho;
    if (tau - closed).abs() > T::tol(1e-8) {
        return Err(Error::InvariantViolated(format!("tau first-step sum {tau} vs closed form {closed}")));
    }
    let identity = p + tau + sigma - T::one();
    if identity.abs() > T::tol(IDENTITY_TOLERANCE) {
        return Err(Error::InvariantViolated(format!("p + tau + sigma - 1 = {identity}")));
    }
    Ok((sigma, tau))
}

/// `ρ_odd` and `y* = ρ(1 - 2ρ_odd)`, the root of `g(y) = -1` in `[-ρ, 0)`.
pub fn solve_rho_odd<T: Scalar>(dist: &IncrementDistribution<T>, rho: T) -> Result<OddRoot<T>> {
    check_walk(dist)?;
    rho_residual(dist, rho)?;
    let p = dist.p_minus_one();
    let h = |y: T| excess_over_minus_one(dist, y);
    let to_rho_odd = |y: T| (T::one() - y / rho) * T::lit(0.5);

    // |Σ_{k≥0} p_k y^k| ≤ 1 - p, so h(y) ≤ -p < 0 on [-p/2, 0).
    let lo = -rho;
    let hi = -p * T::lit(0.5);
    let h_lo = h(lo);
    let mut roots: Vec<T> = Vec::new();
    if h_lo <= T::tol(ENDPOINT_SNAP) {
        // Closed end: every increment is odd, or the root sits within rounding of -ρ.
        roots.push(lo);
    }
    for (a, b) in sign_changes(h, lo, hi, GRID_POINTS) {
        if a == lo && !roots.is_empty() {
            continue;
        }
        roots.push(brent(h, a, b, T::lit(ROOT_XTOL))?);
    }
    let y_star = match roots.len() {
        0 => return Err(Error::RootNotBracketed { lo: lo.as_f64(), hi: hi.as_f64() }),
        1 => roots[0],
        count => {
            let (_, odd) = oracle::series_brackets(dist, oracle::DEFAULT_TERMS, rho)?;
            select_root(&roots, |y| to_rho_odd(y), odd.lower, odd.upper)
                .ok_or(Error::AmbiguousRoot { count })?
        }
    };
    let residual = h(y_star).abs();
    if residual > T::tol(ROOT_RESIDUAL) {
        return Err(Error::RootNotConverged { at: y_star.as_f64() });
    }
    Ok(OddRoot { rho_odd: to_rho_odd(y_star), y_star, residual, roots_found: roots.len() })
}

/// The single candidate root whose implied `ρ_odd` lies in `[lower, upper]`.
pub(crate) fn select_root<T: Scalar>(candidates: &[T], to_rho_odd: impl Fn(T) -> T, lower: T, upper: T) -> Option<T> {
    let slack = T::tol(1e-8);
    let mut inside = candidates.iter().copied().filter(|&y| {
        let r = to_rho_odd(y);
        r >= lower - slack && r <= upper + slack
    });
    match (inside.next(), inside.next()) {
        (Some(y), None) => Some(y),
        _ => None,
    }
}

/// `τ_odd = p(1 - ρ_odd) / (ρτ(2ρ_odd - 1))`.
pub fn tau_odd<T: Scalar>(dist: &IncrementDistribution<T>, rho: T, tau: T, rho_odd: T) -> Result<T> {
    if tau <= T::zero() {
        return Err(Error::DegenerateExcursion);
    }
    let half = T::lit(0.5);
    if rho_odd <= half || rho_odd > T::one() + T::tol(IDENTITY_TOLERANCE) {
        return Err(Error::OutOfRange { name: "rho_odd", value: rho_odd.as_f64() });
    }
    let value = tau_odd_formula(dist, rho, tau, rho_odd);
    let slack = T::tol(IDENTITY_TOLERANCE);
    if !(value >= -slack && value <= T::one() + slack) {
        return Err(Error::OutOfRange { name: "tau_odd", value: value.as_f64() });
    }
    Ok(value.max(T::zero()).min(T::one()))
}

fn tau_odd_formula<T: Scalar>(dist: &IncrementDistribution<T>, rho: T, tau: T, rho_odd: T) -> T {
    dist.p_minus_one() * (T::one() - rho_odd) / (rho * tau * (T::lit(2.0) * rho_odd - T::one()))
}

/// `τ_odd = (τ + N(y*)) / 2τ`, checked against [`tau_odd`] wherever the
/// latter is well conditioned.
///
/// The closed form divides `p(1 - ρ_odd)` by `ρτ`, so its absolute error is
/// about `ε p / (ρτ)`; the form used here stays accurate for tiny `τ`.
fn stable_tau_odd<T: Scalar>(dist: &IncrementDistribution<T>, rho: T, tau: T, y_star: T, rho_odd: T) -> Result<T> {
    if tau <= T::zero() {
        return Err(Error::DegenerateExcursion);
    }
    let value = (tau + dist.nonnegative_part(y_star)) / (tau * T::lit(2.0));
    // A thousand ulps, which only matters in single precision.
    let slack = T::tol(IDENTITY_TOLERANCE).max(T::epsilon() * T::lit(1e3));
    if !(value >= -slack && value <= T::one() + slack) {
        return Err(Error::OutOfRange { name: "tau_odd", value: value.as_f64() });
    }
    let condition = dist.p_minus_one() / (rho * tau);
    if condition <= T::lit(1e4) {
        let closed = tau_odd_formula(dist, rho, tau, rho_odd);
        if (closed - value).abs() > T::tol(1e-8) * (T::one() + condition) {
            return Err(Error::InvariantViolated(format!("tau_odd {value} vs closed form {closed}")));
        }
    }
    Ok(value.max(T::zero()).min(T::one()))
}

/// `P(Bin(n, p) is even) = (1 + (1 - 2p)^n) / 2`.
pub fn binomial_even_parity<T: Scalar>(n: u64, p: T) -> T {
    (T::one() + powu(T::one() - T::lit(2.0) * p, n)) * T::lit(0.5)
}

/// Smallest fixed point of the offspring PGF on `[0, 1]`.
///
/// Subcritical and critical laws return 1 with `subcritical` set.
pub fn extinction_probability<T: Scalar>(offspring: &OffspringDistribution<T>) -> Result<Extinction<T>> {
    if let Some(c) = offspring.point_mass() {
        return Err(Error::Deterministic(c));
    }
    if offspring.mean() <= T::one() {
        return Ok(Extinction { probability: T::one(), subcritical: true });
    }
    let q0 = offspring.probabilities().first().copied().unwrap_or_else(T::zero);
    if q0 == T::zero() {
        return Ok(Extinction { probability: T::zero(), subcritical: false });
    }
    let h = |s: T| s - offspring.pgf(s);
    let hi = approach_one(T::zero(), |s| h(s) > T::zero())
        .ok_or(Error::RootNotBracketed { lo: 0.0, hi: 1.0 })?;
    let probability = brent(h, T::zero(), hi, T::lit(ROOT_XTOL))?;
    Ok(Extinction { probability, subcritical: false })
}

/// All five probabilities with their invariants checked.
pub fn summarize<T: Scalar>(dist: &IncrementDistribution<T>) -> Result<WalkSummary<T>> {
    let rho = solve_rho(dist)?;
    let (sigma, tau) = sigma_tau(dist, rho)?;
    let odd = solve_rho_odd(dist, rho)?;
    let tau_odd = stable_tau_odd(dist, rho, tau, odd.y_star, odd.rho_odd)?;
    let p = dist.p_minus_one();
    let summary = WalkSummary {
        rho,
        sigma,
        tau,
        rho_odd: odd.rho_odd,
        tau_odd,
        y_star: odd.y_star,
        root_residuals: (excess_over_one(dist, rho).abs(), odd.residual),
        p_minus_one: p,
        drift: dist.drift(),
        truncation_defect: dist.truncation_defect(),
        multiple_roots: odd.roots_found > 1,
    };
    summary.check_invariants()?;
    Ok(summary)
}

impl<T: Scalar> WalkSummary<T> {
    /// Re-derives every invariant from the stored numbers.
    pub fn check_invariants(&self) -> Result<()> {
        let tol = T::tol(IDENTITY_TOLERANCE);
        let fail = |what: String| Err(Error::InvariantViolated(what));
        let identity = self.p_minus_one + self.tau + self.sigma - T::one();
        if identity.abs() > tol {
            return fail(format!("p + tau + sigma - 1 = {identity}"));
        }
        if !(self.rho > self.p_minus_one && self.rho < T::one()) {
            return fail(format!("rho = {} not in (p, 1) with p = {}", self.rho, self.p_minus_one));
        }
        if !(self.rho_odd > T::lit(0.5) && self.rho_odd <= T::one()) {
            return fail(format!("rho_odd = {} not in (1/2, 1]", self.rho_odd));
        }
        if !(self.y_star >= -self.rho && self.y_star < T::zero()) {
            return fail(format!("y* = {} not in [-rho, 0)", self.y_star));
        }
        if !(self.tau_odd >= T::zero() && self.tau_odd <= T::one()) {
            return fail(format!("tau_odd = {} not in [0, 1]", self.tau_odd));
        }
        if self.root_residuals.0 > tol || self.root_residuals.1 > tol {
            return fail(format!("root residuals {:?}", self.root_residuals));
        }
        Ok(())
    }

    /// `1 - τ(1 - τ_odd)`, the common denominator of the parity formulas.
    pub fn excursion_denominator(&self) -> T {
        T::one() - self.tau * (T::one() - self.tau_odd)
    }
}
