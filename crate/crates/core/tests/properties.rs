use proptest::prelude::*;

use skipfree::analytic::{binomial_even_parity, solve_rho};
use skipfree::chains::absorb;
use skipfree::oracle::{first_passage_terms, walk_pmf};
use skipfree::scalar::powu;
use skipfree::{
    extinction_probability, prob_negative_parity, summarize, AbsorbingChainSpec, IncrementDistribution,
    IncrementDistributionF32,
};

/// Finite laws with `p_{-1} ∈ [0.05, 0.6]`, up to seven further support
/// points in `0..=12` and drift above 1e-3.
fn finite_walk() -> impl Strategy<Value = IncrementDistribution> {
    (0.05f64..=0.6, prop::collection::btree_map(0i64..=12, 0.05f64..1.0, 1..=7))
        .prop_filter_map("needs positive drift", |(p, points)| {
            let total: f64 = points.values().sum();
            let mut pmf = vec![(-1, p)];
            pmf.extend(points.iter().map(|(&k, &w)| (k, (1.0 - p) * w / total)));
            let d = IncrementDistribution::finite(&pmf).ok()?;
            (d.drift() > 1e-3).then_some(d)
        })
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn mass_and_pgf_at_one(d in finite_walk(), lambda in 0.05f64..40.0) {
        let poisson = IncrementDistribution::poisson_shifted(lambda).unwrap();
        for dist in [&d, &poisson] {
            let mass: f64 = dist.probabilities().iter().sum();
            prop_assert!((mass + dist.truncation_defect() - 1.0).abs() <= 1e-12);
            prop_assert!((dist.pgf(1.0).unwrap() - (1.0 - dist.truncation_defect())).abs() <= 1e-12);
        }
    }

    #[test]
    fn pgf_convex_and_dominates_reflection(d in finite_walk(), a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let (x, y) = (a.min(b), a.max(b));
        let mid = d.pgf(0.5 * (x + y)).unwrap();
        prop_assert!(mid <= 0.5 * (d.pgf(x).unwrap() + d.pgf(y).unwrap()) + 1e-12);
        prop_assert!(d.pgf(-y).unwrap().abs() <= d.pgf(y).unwrap() + 1e-12);
    }

    #[test]
    fn convolution_adds_drift(a in finite_walk(), b in finite_walk()) {
        let c = a.convolve(&b).unwrap();
        prop_assert!((c.drift() - a.drift() - b.drift()).abs() <= 1e-12);
        prop_assert_eq!(c.min_support(), -2);
    }

    #[test]
    fn summary_identities(d in finite_walk()) {
        let s = summarize(&d).unwrap();
        let p = d.p_minus_one();
        prop_assert!((p + s.tau + s.sigma - 1.0).abs() <= 1e-10);
        prop_assert!(p < s.rho && s.rho < 1.0);
        prop_assert!(s.rho_odd > 0.5);
        prop_assert!(-s.rho <= s.y_star && s.y_star < 0.0);
        prop_assert!((d.pgf(s.y_star).unwrap() + 1.0).abs() <= 1e-10);
        prop_assert!((0.0..=1.0).contains(&s.tau_odd));
        let q = extinction_probability(&d.offspring().unwrap()).unwrap();
        prop_assert!((q.probability - s.rho).abs() <= 1e-10);
    }

    // Excursions back to 0 have even length when every step is odd. An even
    // step e followed by e unit steps down is an odd excursion, which bounds
    // τ τ_odd from below by p_e p^e.
    #[test]
    fn tau_odd_zero_iff_steps_odd(d in finite_walk()) {
        let s = summarize(&d).unwrap();
        let p = d.p_minus_one();
        let odd_path = d
            .iter()
            .filter(|&(k, _)| k >= 0 && k % 2 == 0)
            .map(|(k, pk)| pk * p.powi(k as i32))
            .fold(0.0f64, f64::max);
        if odd_path == 0.0 {
            prop_assert!(s.tau_odd <= 1e-12);
        } else {
            prop_assert!(s.tau_odd >= 0.5 * odd_path / s.tau - 1e-10, "tau_odd {} below {}", s.tau_odd, odd_path / s.tau);
            prop_assert!(s.tau_odd > 0.0);
        }
    }

    #[test]
    fn parity_chain_agreement_and_monotonicity(d in finite_walk()) {
        let s = summarize(&d).unwrap();
        let mut prev: Option<skipfree::ParityProbabilities> = None;
        for k in 0..=10u64 {
            let pp = prob_negative_parity(&d, k, &s).unwrap();
            let reach = powu(s.rho, k + 1);
            prop_assert!((pp.p_even + pp.p_odd - pp.p_both - reach).abs() <= 1e-10);
            let even = absorb(&AbsorbingChainSpec::even_chain(&s, k).unwrap()).unwrap()[0][1];
            let odd = absorb(&AbsorbingChainSpec::odd_chain(&s, k).unwrap()).unwrap()[0][1];
            prop_assert!((even - pp.p_even).abs() <= 1e-10);
            prop_assert!((odd - pp.p_odd).abs() <= 1e-10);
            let balance = s.sigma * powu(1.0 - 2.0 * s.rho_odd, k + 1) / s.excursion_denominator();
            prop_assert!(((pp.p_even - pp.p_odd) / reach - balance).abs() <= 1e-10);
            if let Some(prev) = prev {
                for (now, before) in [(pp.p_even, prev.p_even), (pp.p_odd, prev.p_odd), (pp.p_both, prev.p_both)] {
                    prop_assert!(now <= before + 1e-12);
                    if s.rho_odd < 1.0 && before > 1e-200 {
                        prop_assert!(now < before);
                    }
                }
            }
            prev = Some(pp);
        }
    }

    #[test]
    fn first_passage_partial_sums(d in finite_walk()) {
        let rho = solve_rho(&d).unwrap();
        let terms = first_passage_terms(&d, 300).unwrap();
        let mut partial = 0.0;
        for (i, &t) in terms.iter().enumerate() {
            prop_assert!(t >= 0.0);
            partial += t;
            prop_assert!(partial <= rho + 1e-10, "partial sum {} after {} terms exceeds rho {}", partial, i + 1, rho);
        }
    }

    #[test]
    fn walk_pmf_mass_and_mean(d in finite_walk(), n in 1u64..40) {
        let window = (-(n as i64), n as i64 * d.max_support());
        let pmf = walk_pmf(&d, n, Some(window)).unwrap();
        prop_assert!((pmf.total() + pmf.defect - 1.0).abs() <= 1e-11);
        prop_assert!((pmf.mean() - n as f64 * d.drift()).abs() <= 1e-9 * (1.0 + n as f64 * d.max_support() as f64));
        let terms = first_passage_terms(&d, n as usize).unwrap();
        prop_assert!(terms[n as usize - 1] <= pmf.mass_at(-1) + 1e-15);
    }

    #[test]
    fn binomial_parity_direct_sum(n in 0u64..=30, p in 0.0f64..=1.0) {
        let mut coeff = 1.0f64;
        let mut even = 0.0;
        for j in 0..=n {
            if j > 0 {
                coeff = coeff * (n - j + 1) as f64 / j as f64;
            }
            if j % 2 == 0 {
                even += coeff * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
            }
        }
        prop_assert!((binomial_even_parity(n, p) - even).abs() <= 1e-12);
    }

    #[test]
    fn single_precision_tracks_double(d in finite_walk()) {
        let pmf: Vec<(i64, f32)> = d.iter().map(|(k, p)| (k, p as f32)).collect();
        let d32 = IncrementDistributionF32::finite(&pmf).unwrap();
        let s = summarize(&d).unwrap();
        let s32 = summarize(&d32).unwrap();
        prop_assert!((s32.rho as f64 - s.rho).abs() <= 1e-4);
        prop_assert!((s32.sigma as f64 - s.sigma).abs() <= 1e-4);
    }
}

#[test]
fn simple_walk_never_first_passes_at_even_times() {
    for p in [0.55, 0.7, 0.9] {
        let d = IncrementDistribution::finite(&[(-1, 1.0 - p), (1, p)]).unwrap();
        let terms = first_passage_terms(&d, 200).unwrap();
        for m in 1..=100 {
            assert_eq!(terms[2 * m - 1], 0.0);
        }
    }
}
