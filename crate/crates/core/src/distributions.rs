//! Increment laws on `{-1, 0, 1, ...}` and the laws derived from them.
//!
//! An [`IncrementDistribution`] stores the probability mass function of one
//! step of the walk, starting at its lowest support point. Parametric
//! families with infinite support are cut where the remaining tail falls
//! below [`TAIL_TOLERANCE`]; the discarded mass is kept as
//! `truncation_defect` rather than renormalized away, so every downstream
//! number can say how much probability it never saw.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{compensated_horner, two_sum, Scalar};

/// Tail mass below which parametric families are truncated.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Largest truncation defect any constructor may leave behind.
pub const MAX_DEFECT: f64 = 1e-12;

/// Tolerance on the input sum accepted by [`IncrementDistribution::finite`].
pub const FINITE_MASS_TOLERANCE: f64 = 1e-9;

/// Invariant tolerance on `Σ p + defect`.
pub const MASS_TOLERANCE: f64 = 1e-12;

// Hand-entered support points beyond this are almost certainly typos.
const MAX_SUPPORT_POINT: i64 = 10_000_000;

/// Where a distribution came from, kept for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Finite,
    PoissonShifted { lambda: f64 },
    GeometricShifted { q: f64 },
    Convolution,
}

/// Law of a single increment `X`, with `P(X = min_support + i) = probabilities[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementDistribution<T> {
    min_support: i64,
    probabilities: Vec<T>,
    truncation_defect: T,
    family: Family,
}

impl<T: Scalar> IncrementDistribution<T> {
    fn from_parts(min_support: i64, mut probabilities: Vec<T>, truncation_defect: T, family: Family) -> Result<Self> {
        while probabilities.len() > 1 && probabilities.last().is_some_and(|p| *p == T::zero()) {
            probabilities.pop();
        }
        for (i, &p) in probabilities.iter().enumerate() {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::NegativeMass { k: min_support + i as i64, p: p.as_f64() });
            }
        }
        if truncation_defect < T::zero() || truncation_defect > T::tol(MAX_DEFECT) {
            return Err(Error::InvalidParameter(format!(
                "truncation defect {truncation_defect} exceeds {MAX_DEFECT:e}"
            )));
        }
        let total = kahan_sum(&probabilities) + truncation_defect;
        if (total - T::one()).abs() > T::tol(MASS_TOLERANCE) {
            return Err(Error::MassNotOne { sum: total.as_f64() });
        }
        Ok(Self { min_support, probabilities, truncation_defect, family })
    }

    /// A finitely supported law from `(k, p)` pairs.
    ///
    /// The input is divided by its own sum, so decimal rounding in
    /// hand-entered probabilities is absorbed exactly.
    pub fn finite(entries: &[(i64, T)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::MassNotOne { sum: 0.0 });
        }
        let mut max_k = -1;
        for (i, &(k, p)) in entries.iter().enumerate() {
            if k < -1 {
                return Err(Error::UnsupportedSupport { min_support: k });
            }
            if k > MAX_SUPPORT_POINT {
                return Err(Error::InvalidParameter(format!("support point {k} exceeds {MAX_SUPPORT_POINT}")));
            }
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::NegativeMass { k, p: p.as_f64() });
            }
            if entries[..i].iter().any(|&(j, _)| j == k) {
                return Err(Error::DuplicateSupportPoint(k));
            }
            max_k = max_k.max(k);
        }
        let sum = kahan_sum(&entries.iter().map(|e| e.1).collect::<Vec<_>>());
        if (sum - T::one()).abs() > T::tol(FINITE_MASS_TOLERANCE) {
            return Err(Error::MassNotOne { sum: sum.as_f64() });
        }
        let mut probabilities = vec![T::zero(); (max_k + 2) as usize];
        for &(k, p) in entries {
            probabilities[(k + 1) as usize] = p / sum;
        }
        Self::from_parts(-1, probabilities, T::zero(), Family::Finite)
    }

    /// Law of `Y - 1` with `Y ~ Poisson(lambda)`.
    pub fn poisson_shifted(lambda: T) -> Result<Self> {
        let (probabilities, defect) = truncated_poisson(lambda)?;
        Self::from_parts(-1, probabilities, defect, Family::PoissonShifted { lambda: lambda.as_f64() })
    }

    /// Law of `G - 1` with `P(G = j) = (1 - q) q^j`, `j >= 0`.
    pub fn geometric_shifted(q: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::InvalidParameter(format!("geometric q = {q} outside (0, 1)")));
        }
        // Tail beyond j = m is q^(m+1).
        let tail_tol = T::lit(TAIL_TOLERANCE);
        let mut probabilities = Vec::new();
        let mut term = T::one() - q;
        let mut tail = q;
        loop {
            probabilities.push(term);
            if tail < tail_tol {
                break;
            }
            term = term * q;
            tail = tail * q;
        }
        Self::from_parts(-1, probabilities, tail, Family::GeometricShifted { q: q.as_f64() })
    }

    pub fn min_support(&self) -> i64 {
        self.min_support
    }

    pub fn max_support(&self) -> i64 {
        self.min_support + self.probabilities.len() as i64 - 1
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn truncation_defect(&self) -> T {
        self.truncation_defect
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `P(X = k)`.
    pub fn p(&self, k: i64) -> T {
        let i = k - self.min_support;
        if i < 0 {
            return T::zero();
        }
        self.probabilities.get(i as usize).copied().unwrap_or_else(T::zero)
    }

    pub fn p_minus_one(&self) -> T {
        self.p(-1)
    }

    /// `(k, P(X = k))` over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.probabilities.iter().enumerate().map(move |(i, &p)| (self.min_support + i as i64, p))
    }

    pub fn is_left_continuous(&self) -> bool {
        self.min_support >= -1
    }

    /// Mean increment over the stored support; the truncated tail contributes nothing.
    pub fn drift(&self) -> T {
        let mut acc = T::zero();
        let mut comp = T::zero();
        for (k, p) in self.iter() {
            let (s, e) = two_sum(acc, T::from_int(k) * p);
            acc = s;
            comp = comp + e;
        }
        acc + comp
    }

    pub fn variance(&self) -> T {
        let mean = self.drift();
        self.iter().fold(T::zero(), |acc, (k, p)| {
            let d = T::from_int(k) - mean;
            acc + p * d * d
        })
    }

    /// `g(x) = Σ p_k x^k` on `[-1, 0) ∪ (0, 1]`.
    pub fn pgf(&self, x: T) -> Result<T> {
        if self.min_support < -1 {
            return Err(Error::UnsupportedSupport { min_support: self.min_support });
        }
        if x == T::zero() || x.abs() > T::one() || x.is_nan() {
            return Err(Error::DomainError { x: x.as_f64() });
        }
        Ok(self.pgf_unchecked(x))
    }

    /// PGF without domain checks; requires `min_support == -1` and `x != 0`.
    pub(crate) fn pgf_unchecked(&self, x: T) -> T {
        debug_assert_eq!(self.min_support, -1);
        let (head, rest) = self.probabilities.split_first().expect("non-empty pmf");
        let poly = compensated_horner(rest, x);
        if *head == T::zero() {
            poly
        } else {
            let (s, e) = two_sum(*head / x, poly);
            s + e
        }
    }

    /// `Σ_{k >= 0} p_k x^k`, the part of the PGF without the pole.
    pub(crate) fn nonnegative_part(&self, x: T) -> T {
        let shift = (-self.min_support) as usize;
        compensated_horner(&self.probabilities[shift.min(self.probabilities.len())..], x)
    }

    /// Law of the branching offspring `ξ = X + 1`.
    pub fn offspring(&self) -> Result<OffspringDistribution<T>> {
        if self.min_support != -1 {
            return Err(Error::UnsupportedSupport { min_support: self.min_support });
        }
        Ok(OffspringDistribution {
            probabilities: self.probabilities.clone(),
            truncation_defect: self.truncation_defect,
        })
    }

    /// Law of `Y₁ + Y₂` for independent `Y₁ ~ self`, `Y₂ ~ other`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        for d in [self, other] {
            if d.min_support != -1 {
                return Err(Error::UnsupportedSupport { min_support: d.min_support });
            }
        }
        let a = &self.probabilities;
        let b = &other.probabilities;
        let mut out = vec![T::zero(); a.len() + b.len() - 1];
        for (i, &pa) in a.iter().enumerate() {
            if pa == T::zero() {
                continue;
            }
            for (j, &pb) in b.iter().enumerate() {
                out[i + j] = out[i + j] + pa * pb;
            }
        }
        Self::from_parts(-2, out, self.truncation_defect + other.truncation_defect, Family::Convolution)
    }
}

/// Law of a Galton–Watson offspring count `ξ` on `{0, 1, 2, ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringDistribution<T> {
    probabilities: Vec<T>,
    truncation_defect: T,
}

impl<T: Scalar> OffspringDistribution<T> {
    /// `probabilities[j] = P(ξ = j)`.
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        for (j, &p) in probabilities.iter().enumerate() {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::NegativeMass { k: j as i64, p: p.as_f64() });
            }
        }
        let sum = kahan_sum(&probabilities);
        if (sum - T::one()).abs() > T::tol(MASS_TOLERANCE) {
            return Err(Error::MassNotOne { sum: sum.as_f64() });
        }
        Ok(Self { probabilities, truncation_defect: T::zero() })
    }

    pub fn poisson(lambda: T) -> Result<Self> {
        let (probabilities, truncation_defect) = truncated_poisson(lambda)?;
        Ok(Self { probabilities, truncation_defect })
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn truncation_defect(&self) -> T {
        self.truncation_defect
    }

    pub fn mean(&self) -> T {
        self.probabilities
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &p)| acc + T::from_count(j) * p)
    }

    /// `f(s) = Σ P(ξ = j) s^j`.
    pub fn pgf(&self, s: T) -> T {
        compensated_horner(&self.probabilities, s)
    }

    /// The value `c` if `ξ = c` almost surely.
    pub fn point_mass(&self) -> Option<usize> {
        let mut nonzero = self.probabilities.iter().enumerate().filter(|(_, p)| **p > T::zero());
        match (nonzero.next(), nonzero.next()) {
            (Some((j, _)), None) => Some(j),
            _ => None,
        }
    }
}

/// Poisson(λ) masses on `0..=m` with `m` the first index whose remaining
/// tail is below [`TAIL_TOLERANCE`], plus that tail.
fn truncated_poisson<T: Scalar>(lambda: T) -> Result<(Vec<T>, T)> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("poisson lambda = {lambda} must be positive")));
    }
    let mode = lambda.floor().to_usize().ok_or_else(|| Error::InvalidParameter(format!("poisson lambda = {lambda} too large")))?;
    let at_mode = poisson_mass(lambda, mode);
    let negligible = T::lit(TAIL_TOLERANCE) * T::lit(1e-6);

    // Downward from the mode: t_{j-1} = t_j * j / λ.
    let mut terms = vec![T::zero(); mode + 1];
    terms[mode] = at_mode;
    for j in (1..=mode).rev() {
        terms[j - 1] = terms[j] * T::from_count(j) / lambda;
    }
    // Upward until terms are negligible even against the tail tolerance.
    let mut j = mode;
    loop {
        let next = terms[j] * lambda / T::from_count(j + 1);
        terms.push(next);
        j += 1;
        if next < negligible {
            break;
        }
    }

    // tail[i] = Σ_{j > i} terms[j], summed from the small end.
    let mut tail = vec![T::zero(); terms.len()];
    for i in (0..terms.len() - 1).rev() {
        tail[i] = tail[i + 1] + terms[i + 1];
    }
    let cut = tail
        .iter()
        .position(|&t| t < T::lit(TAIL_TOLERANCE))
        .expect("last tail entry is zero");
    let defect = tail[cut];
    terms.truncate(cut + 1);
    Ok((terms, defect))
}

/// `e^{-λ} λ^m / m!` without cancellation for large `m`.
fn poisson_mass<T: Scalar>(lambda: T, m: usize) -> T {
    if m < 16 {
        return (1..=m).fold((-lambda).exp(), |acc, i| acc * lambda / T::from_count(i));
    }
    // Stirling: ln m! = m ln m - m + ½ ln(2πm) + 1/(12m) - 1/(360m³) + 1/(1260m⁵) - 1/(1680m⁷)
    let mf = T::from_count(m);
    let inv = mf.recip();
    let inv2 = inv * inv;
    let series = inv
        * (T::lit(1.0 / 12.0)
            - inv2 * (T::lit(1.0 / 360.0) - inv2 * (T::lit(1.0 / 1260.0) - inv2 * T::lit(1.0 / 1680.0))));
    let log_mass = mf * (lambda / mf).ln() + (mf - lambda) - T::lit(0.5) * (T::TAU() * mf).ln() - series;
    log_mass.exp()
}

fn kahan_sum<T: Scalar>(xs: &[T]) -> T {
    let mut s = T::zero();
    let mut c = T::zero();
    for &x in xs {
        let (t, e) = two_sum(s, x);
        s = t;
        c = c + e;
    }
    s + c
}

/// Distribution spec file, e.g. `{"family":"finite","pmf":[[-1,0.3],[2,0.7]]}`
/// or `{"family":"poisson_shifted","lambda":1.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Finite { pmf: Vec<(i64, f64)> },
    PoissonShifted { lambda: f64 },
    GeometricShifted { q: f64 },
}

impl DistributionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build<T: Scalar>(&self) -> Result<IncrementDistribution<T>> {
        match self {
            DistributionSpec::Finite { pmf } => {
                let entries: Vec<(i64, T)> = pmf
                    .iter()
                    .map(|&(k, p)| {
                        T::from_f64(p)
                            .map(|p| (k, p))
                            .ok_or_else(|| Error::Parse(format!("probability {p} not representable")))
                    })
                    .collect::<Result<_>>()?;
                IncrementDistribution::finite(&entries)
            }
            DistributionSpec::PoissonShifted { lambda } => IncrementDistribution::poisson_shifted(T::lit(*lambda)),
            DistributionSpec::GeometricShifted { q } => IncrementDistribution::geometric_shifted(T::lit(*q)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type Dist = IncrementDistribution<f64>;

    fn simple(p: f64) -> Dist {
        Dist::finite(&[(-1, 1.0 - p), (1, p)]).unwrap()
    }

    #[test]
    fn finite_simple_walk() {
        let d = simple(0.7);
        assert_eq!(d.min_support(), -1);
        assert_eq!(d.probabilities(), &[1.0 - 0.7, 0.0, 0.7]);
        assert_eq!(d.truncation_defect(), 0.0);
        assert_eq!(d.family(), &Family::Finite);
    }

    #[test]
    fn finite_echoes_support() {
        let d = Dist::finite(&[(-1, 0.3), (2, 0.7)]).unwrap();
        assert_eq!(d.max_support(), 2);
        assert_eq!(d.iter().filter(|(_, p)| *p > 0.0).map(|(k, _)| k).collect::<Vec<_>>(), vec![-1, 2]);
    }

    #[test]
    fn finite_validation() {
        assert_eq!(Dist::finite(&[(-1, 0.5), (-1, 0.5)]), Err(Error::DuplicateSupportPoint(-1)));
        assert!(matches!(Dist::finite(&[(-1, 0.3), (1, 0.5)]), Err(Error::MassNotOne { .. })));
        assert!(matches!(Dist::finite(&[(-1, -0.1), (1, 1.1)]), Err(Error::NegativeMass { .. })));
        assert!(matches!(Dist::finite(&[(-2, 0.5), (1, 0.5)]), Err(Error::UnsupportedSupport { .. })));
        assert!(matches!(Dist::finite(&[]), Err(Error::MassNotOne { .. })));
    }

    #[test]
    fn finite_renormalizes_rounding() {
        let d = Dist::finite(&[(-1, 0.3333333333), (1, 0.6666666667)]).unwrap();
        assert_abs_diff_eq!(d.probabilities().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn finite_trims_trailing_zeros() {
        let d = Dist::finite(&[(-1, 0.4), (1, 0.6), (5, 0.0)]).unwrap();
        assert_eq!(d.max_support(), 1);
    }

    #[test]
    fn poisson_shifted_values() {
        let d = Dist::poisson_shifted(1.5).unwrap();
        assert_abs_diff_eq!(d.p_minus_one(), (-1.5f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(d.p_minus_one(), 0.223130, epsilon = 1e-6);
        assert_abs_diff_eq!(d.drift(), 0.5, epsilon = 1e-12);
        assert!(d.truncation_defect() < TAIL_TOLERANCE);
        assert!(d.truncation_defect() > 0.0);

        let d3 = Dist::poisson_shifted(3.0).unwrap();
        assert_abs_diff_eq!(d3.p_minus_one(), 0.049787068367863943, epsilon = 1e-17);
    }

    #[test]
    fn poisson_cut_is_smallest_admissible() {
        let d = Dist::poisson_shifted(1.5).unwrap();
        let last = *d.probabilities().last().unwrap();
        // Keeping one entry fewer would leave a tail above the tolerance.
        assert!(d.truncation_defect() + last >= TAIL_TOLERANCE);
    }

    #[test]
    fn poisson_large_lambda_does_not_underflow() {
        let d = Dist::poisson_shifted(800.0).unwrap();
        assert_abs_diff_eq!(d.drift(), 799.0, epsilon = 1e-8);
        assert!((d.probabilities().iter().sum::<f64>() + d.truncation_defect() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_rejects_bad_lambda() {
        assert!(matches!(Dist::poisson_shifted(0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(Dist::poisson_shifted(-1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn geometric_shifted_mean() {
        let d = Dist::geometric_shifted(0.6).unwrap();
        assert_abs_diff_eq!(d.drift(), 0.6 / 0.4 - 1.0, epsilon = 1e-12);
        assert!(d.truncation_defect() < TAIL_TOLERANCE);
    }

    #[test]
    fn pgf_values() {
        let d = simple(0.7);
        assert_eq!(d.pgf(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(d.pgf(3.0 / 7.0).unwrap(), 1.0, epsilon = 1e-15);
        let p = Dist::poisson_shifted(1.5).unwrap();
        assert_abs_diff_eq!(p.pgf(0.417188).unwrap(), 1.0, epsilon = 1e-5);
        // Closed form e^{λ(x-1)}/x.
        for &x in &[-0.9, -0.3, 0.2, 0.8] {
            assert_abs_diff_eq!(p.pgf(x).unwrap(), (1.5 * (x - 1.0)).exp() / x, epsilon = 1e-13);
        }
    }

    #[test]
    fn pgf_domain() {
        let d = simple(0.7);
        assert!(matches!(d.pgf(0.0), Err(Error::DomainError { .. })));
        assert!(matches!(d.pgf(1.5), Err(Error::DomainError { .. })));
        assert!(matches!(d.pgf(-1.01), Err(Error::DomainError { .. })));
        let c = d.convolve(&d).unwrap();
        assert!(matches!(c.pgf(0.5), Err(Error::UnsupportedSupport { min_support: -2 })));
    }

    #[test]
    fn drift_examples() {
        assert_abs_diff_eq!(simple(0.7).drift(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(Dist::finite(&[(-1, 0.3), (2, 0.7)]).unwrap().drift(), 1.1, epsilon = 1e-15);
    }

    #[test]
    fn offspring_shift() {
        let o = simple(0.7).offspring().unwrap();
        assert_eq!(o.probabilities(), &[1.0 - 0.7, 0.0, 0.7]);
        let pm = Dist::finite(&[(-1, 1.0)]).unwrap().offspring().unwrap();
        assert_eq!(pm.point_mass(), Some(0));
        let p = Dist::poisson_shifted(1.5).unwrap().offspring().unwrap();
        assert_abs_diff_eq!(p.probabilities()[3], (-1.5f64).exp() * 1.5f64.powi(3) / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(p.mean(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn convolve_simple_walk() {
        let d = simple(0.7);
        let c = d.convolve(&d).unwrap();
        assert_eq!(c.min_support(), -2);
        assert_abs_diff_eq!(c.p(-2), 0.09, epsilon = 1e-16);
        assert_abs_diff_eq!(c.p(0), 0.42, epsilon = 1e-16);
        assert_abs_diff_eq!(c.p(2), 0.49, epsilon = 1e-16);
        assert_eq!(c.p(-1), 0.0);
        assert_eq!(c.p(1), 0.0);
        assert_eq!(c.family(), &Family::Convolution);
    }

    #[test]
    fn convolve_point_masses() {
        let d = Dist::finite(&[(-1, 1.0)]).unwrap();
        let c = d.convolve(&d).unwrap();
        assert_eq!(c.probabilities(), &[1.0]);
        assert_eq!(c.min_support(), -2);
    }

    #[test]
    fn convolve_poisson_is_poisson() {
        let d = Dist::poisson_shifted(1.5).unwrap();
        let c = d.convolve(&d).unwrap();
        let mut ln_fact = 0.0f64;
        for j in 0..c.probabilities().len() {
            if j > 0 {
                ln_fact += (j as f64).ln();
            }
            let direct = (j as f64 * 3f64.ln() - 3.0 - ln_fact).exp();
            assert_abs_diff_eq!(c.p(j as i64 - 2), direct, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(c.drift(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.truncation_defect(), 2.0 * d.truncation_defect(), epsilon = 1e-30);
    }

    #[test]
    fn single_precision_poisson() {
        let d = IncrementDistribution::<f32>::poisson_shifted(1.5).unwrap();
        assert!((d.pgf(1.0).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DistributionSpec::from_json(r#"{"family":"finite","pmf":[[-1,0.3],[2,0.7]]}"#).unwrap();
        assert_eq!(spec, DistributionSpec::Finite { pmf: vec![(-1, 0.3), (2, 0.7)] });
        let back = DistributionSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let p = DistributionSpec::from_json(r#"{"family":"poisson_shifted","lambda":1.5}"#).unwrap();
        assert_eq!(p.build::<f64>().unwrap().family(), &Family::PoissonShifted { lambda: 1.5 });
        assert!(DistributionSpec::from_json(r#"{"family":"poisson_shifted","lamda":1.5}"#).is_err());
        assert!(DistributionSpec::from_json(r#"{"family":"cauchy"}"#).is_err());
    }
}
