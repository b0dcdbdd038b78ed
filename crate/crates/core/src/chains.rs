//! Parity of the first negative time via small absorbing Markov chains.
//!
//! The walk from `S₀ = k` is cut at its visits to `-1`. Transient states are
//! "start" and "at -1 at a time of the wrong parity"; absorbing states are
//! "never (again) below 0" and "negative at a time of the wanted parity".
//! With `q = P(Bin(k + 1, ρ_odd) even)` the chain for even times is
//!
//! ```text
//! Q = [0, ρ^{k+1}(1 - q)]        R = [1 - ρ^{k+1}, ρ^{k+1} q        ]
//!     [0, τ(1 - τ_odd)  ]            [σ,           p + τ τ_odd      ]
//! ```
//!
//! and the odd-time chain swaps `q` and `1 - q`. Entry `(0, 1)` of
//! `B = (I - Q)⁻¹ R` is the probability of interest. The closed forms
//! obtained by solving these systems by hand are evaluated separately and
//! both routes must agree.

use serde::{Deserialize, Serialize};

use crate::analytic::{binomial_even_parity, summarize, WalkSummary};
use crate::distributions::IncrementDistribution;
use crate::error::{Error, Result};
use crate::scalar::{powu, Scalar};

/// Largest supported starting level.
pub const MAX_START: u64 = 1_000_000;
/// Agreement required between the closed form and the chain solve.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;
const ROW_SUM_TOLERANCE: f64 = 1e-12;
const SINGULAR_DET: f64 = 1e-300;

pub type Matrix2<T> = [[T; 2]; 2];

/// Canonical-form blocks of an absorbing chain with two transient and two
/// absorbing states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingChainSpec<T> {
    q: Matrix2<T>,
    r: Matrix2<T>,
}

impl<T: Scalar> AbsorbingChainSpec<T> {
    pub fn new(q: Matrix2<T>, r: Matrix2<T>) -> Result<Self> {
        let tol = T::tol(ROW_SUM_TOLERANCE);
        for row in 0..2 {
            for col in 0..2 {
                for (name, v) in [("Q", q[row][col]), ("R", r[row][col])] {
                    if !(v >= -tol && v <= T::one() + tol) {
                        return Err(Error::InvalidChain(format!("{name}[{row}][{col}] = {v} outside [0, 1]")));
                    }
                }
            }
            let sum = q[row][0] + q[row][1] + r[row][0] + r[row][1];
            if (sum - T::one()).abs() > tol {
                return Err(Error::InvalidChain(format!("row {row} sums to {sum}")));
            }
        }
        // Eigenvalues of a non-negative 2x2 matrix are real.
        let trace = q[0][0] + q[1][1];
        let gap = q[0][0] - q[1][1];
        let disc = gap * gap + T::lit(4.0) * q[0][1] * q[1][0];
        let radius = (trace + disc.max(T::zero()).sqrt()) * T::lit(0.5);
        if radius >= T::one() {
            return Err(Error::InvalidChain(format!("spectral radius of Q is {radius}")));
        }
        Ok(Self { q, r })
    }

    pub fn q(&self) -> &Matrix2<T> {
        &self.q
    }

    pub fn r(&self) -> &Matrix2<T> {
        &self.r
    }

    /// Chain whose second absorbing state is "negative at an even time".
    pub fn even_chain(summary: &WalkSummary<T>, k: u64) -> Result<Self> {
        Self::parity_chain(summary, k, true)
    }

    /// Chain whose second absorbing state is "negative at an odd time".
    pub fn odd_chain(summary: &WalkSummary<T>, k: u64) -> Result<Self> {
        Self::parity_chain(summary, k, false)
    }

    fn parity_chain(s: &WalkSummary<T>, k: u64, even: bool) -> Result<Self> {
        let reach = powu(s.rho, k + 1);
        let q_even = binomial_even_parity(k + 1, s.rho_odd);
        let (stay, absorb) = if even { (T::one() - q_even, q_even) } else { (q_even, T::one() - q_even) };
        let excursion_even = s.tau * (T::one() - s.tau_odd);
        Self::new(
            [[T::zero(), reach * stay], [T::zero(), excursion_even]],
            [[T::one() - reach, reach * absorb], [s.sigma, s.p_minus_one + s.tau * s.tau_odd]],
        )
    }
}

/// Absorption probabilities `B = (I - Q)⁻¹ R` by the 2x2 adjugate.
pub fn absorb<T: Scalar>(spec: &AbsorbingChainSpec<T>) -> Result<Matrix2<T>> {
    let q = spec.q;
    let a = T::one() - q[0][0];
    let b = -q[0][1];
    let c = -q[1][0];
    let d = T::one() - q[1][1];
    let det = a * d - b * c;
    if det.abs() <= T::lit(SINGULAR_DET).max(T::min_positive_value()) {
        return Err(Error::SingularSystem { det: det.as_f64() });
    }
    let n = [[d / det, -b / det], [-c / det, a / det]];
    let r = spec.r;
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = n[i][0] * r[0][j] + n[i][1] * r[1][j];
        }
    }
    let tol = T::tol(CROSS_CHECK_TOLERANCE);
    for (i, row) in out.iter().enumerate() {
        let sum = row[0] + row[1];
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvariantViolated(format!("absorption row {i} sums to {sum}")));
        }
    }
    Ok(out)
}

/// `P(E | S₀ = k)`, `P(O | S₀ = k)` and `P(E ∩ O | S₀ = k)` with
/// `E = {S_{2n} < 0 for some n ≥ 1}` and `O = {S_{2n-1} < 0 for some n ≥ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityProbabilities<T> {
    pub start_k: u64,
    pub p_even: T,
    pub p_odd: T,
    pub p_both: T,
}

/// Closed forms, cross-checked against the absorbing-chain solve.
pub fn prob_negative_parity<T: Scalar>(
    dist: &IncrementDistribution<T>,
    k: u64,
    summary: &WalkSummary<T>,
) -> Result<ParityProbabilities<T>> {
    if k > MAX_START {
        return Err(Error::InvalidParameter(format!("start level {k} exceeds {MAX_START}")));
    }
    if dist.min_support() != -1 {
        return Err(Error::UnsupportedSupport { min_support: dist.min_support() });
    }
    if dist.p_minus_one() != summary.p_minus_one {
        return Err(Error::InvalidParameter("summary was computed for a different distribution".into()));
    }
    let closed = closed_form(summary, k);

    let even = absorb(&AbsorbingChainSpec::even_chain(summary, k)?)?[0][1];
    let odd = absorb(&AbsorbingChainSpec::odd_chain(summary, k)?)?[0][1];
    let reach = powu(summary.rho, k + 1);
    let both = even + odd - reach;

    let tol = T::tol(CROSS_CHECK_TOLERANCE);
    for (quantity, c, m) in [
        ("p_even", closed.p_even, even),
        ("p_odd", closed.p_odd, odd),
        ("p_both", closed.p_both, both),
    ] {
        if (c - m).abs() > tol {
            return Err(Error::ChainMismatch { quantity, closed: c.as_f64(), chain: m.as_f64() });
        }
    }
    if closed.p_both < -tol || closed.p_both > closed.p_even.min(closed.p_odd) + tol {
        return Err(Error::InvariantViolated(format!(
            "p_both = {} outside [0, min(p_even, p_odd)]",
            closed.p_both
        )));
    }
    Ok(closed)
}

fn closed_form<T: Scalar>(s: &WalkSummary<T>, k: u64) -> ParityProbabilities<T> {
    let reach = powu(s.rho, k + 1);
    let alternating = powu(T::one() - T::lit(2.0) * s.rho_odd, k + 1);
    let denom = s.excursion_denominator();
    let half_sigma = s.sigma * T::lit(0.5);
    ParityProbabilities {
        start_k: k,
        p_even: reach * (T::one() - half_sigma * (T::one() - alternating) / denom),
        p_odd: reach * (T::one() - half_sigma * (T::one() + alternating) / denom),
        p_both: reach * (T::one() - s.sigma / denom),
    }
}

/// Ruin probability from `S₀ = k` of the walk with increments `Y₁ + Y₂`,
/// `Y₁, Y₂` i.i.d. with law `y`.
///
/// The walk is the even-time skeleton of the left-continuous walk with
/// increments `y`, so ruin is the event `E` for the latter.
pub fn separable_ruin<T: Scalar>(y: &IncrementDistribution<T>, k: u64) -> Result<T> {
    let summary = summarize(y)?;
    Ok(prob_negative_parity(y, k, &summary)?.p_even)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type Dist = IncrementDistribution<f64>;

    fn simple(p: f64) -> Dist {
        Dist::finite(&[(-1, 1.0 - p), (1, p)]).unwrap()
    }

    // Killed-walk dynamic programming in Python (mpmath for the roots)
    // gave P(E|0) = 0.31676447288785997, P(E|2) = 0.05936900869665329.
    const POISSON_P_EVEN_0: f64 = 0.31676447288785997;
    const POISSON_P_EVEN_2: f64 = 0.05936900869665329;

    #[test]
    fn absorb_without_recurrence_returns_r() {
        let r = [[0.25, 0.75], [0.6, 0.4]];
        let spec = AbsorbingChainSpec::new([[0.0; 2]; 2], r).unwrap();
        let b = absorb(&spec).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(b[i][j], r[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn absorb_poisson_chain() {
        let s = summarize(&Dist::poisson_shifted(1.5).unwrap()).unwrap();
        let b = absorb(&AbsorbingChainSpec::even_chain(&s, 0).unwrap()).unwrap();
        assert_abs_diff_eq!(b[0][1], 0.3168, epsilon = 1e-4);
        assert_abs_diff_eq!(b[0][1], POISSON_P_EVEN_0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_chains_rejected() {
        let bad_row = AbsorbingChainSpec::new([[0.0, 0.5], [0.0, 0.5]], [[0.2, 0.2], [0.25, 0.25]]);
        assert!(matches!(bad_row, Err(Error::InvalidChain(_))));
        let trapped = AbsorbingChainSpec::new([[0.0, 1.0], [0.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]]);
        assert!(matches!(trapped, Err(Error::InvalidChain(_))));
        let negative = AbsorbingChainSpec::new([[0.0, 1.2], [0.0, 0.5]], [[-0.2, 0.0], [0.25, 0.25]]);
        assert!(matches!(negative, Err(Error::InvalidChain(_))));
    }

    #[test]
    fn parity_simple_walk() {
        let d = simple(0.7);
        let s = summarize(&d).unwrap();
        let rho = (1.0 - 0.7) / 0.7;
        let pp = prob_negative_parity(&d, 0, &s).unwrap();
        assert_abs_diff_eq!(pp.p_even, rho * rho, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.p_even, 9.0 / 49.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.p_odd, rho, epsilon = 1e-12);
        assert_abs_diff_eq!(pp.p_both, rho * rho, epsilon = 1e-12);
    }

    #[test]
    fn parity_poisson() {
        let d = Dist::poisson_shifted(1.5).unwrap();
        let s = summarize(&d).unwrap();
        let k0 = prob_negative_parity(&d, 0, &s).unwrap();
        assert_abs_diff_eq!(k0.p_even, 0.3168, epsilon = 1e-4);
        let k2 = prob_negative_parity(&d, 2, &s).unwrap();
        assert_abs_diff_eq!(k2.p_even, 0.059, epsilon = 1e-3);
        assert_abs_diff_eq!(k2.p_even, POISSON_P_EVEN_2, epsilon = 1e-12);
    }

    #[test]
    fn k_zero_matches_single_start_formula() {
        let d = Dist::finite(&[(-1, 0.3), (0, 0.1), (1, 0.2), (3, 0.4)]).unwrap();
        let s = summarize(&d).unwrap();
        let pp = prob_negative_parity(&d, 0, &s).unwrap();
        let denom = s.excursion_denominator();
        assert_abs_diff_eq!(pp.p_even, s.rho * (1.0 - s.sigma * s.rho_odd / denom), epsilon = 1e-14);
        assert_abs_diff_eq!(pp.p_odd, s.rho * (1.0 - s.sigma * (1.0 - s.rho_odd) / denom), epsilon = 1e-14);
        let alt = s.rho * (s.p_minus_one + s.tau * s.tau_odd) / denom;
        assert_abs_diff_eq!(pp.p_both, alt, epsilon = 1e-14);
    }

    #[test]
    fn start_level_cap() {
        let d = simple(0.7);
        let s = summarize(&d).unwrap();
        assert!(prob_negative_parity(&d, MAX_START, &s).is_ok());
        assert!(matches!(prob_negative_parity(&d, MAX_START + 1, &s), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn mismatched_summary_rejected() {
        let s = summarize(&simple(0.7)).unwrap();
        let other = simple(0.8);
        assert!(prob_negative_parity(&other, 0, &s).is_err());
    }

    #[test]
    fn separable_examples() {
        let y = Dist::poisson_shifted(1.5).unwrap();
        assert_abs_diff_eq!(separable_ruin(&y, 0).unwrap(), 0.317, epsilon = 1e-3);
        assert_abs_diff_eq!(separable_ruin(&y, 2).unwrap(), 0.059, epsilon = 1e-3);
        assert_abs_diff_eq!(separable_ruin(&simple(0.7), 0).unwrap(), 9.0 / 49.0, epsilon = 1e-12);
    }
}
