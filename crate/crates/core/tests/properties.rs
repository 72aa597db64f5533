use poisson_approx_core::bounds::{borisov_envelope, magic_bound, triangle_bound};
use poisson_approx_core::dist::convolve;
use poisson_approx_core::distances::tv_finite;
use poisson_approx_core::hypo_tests::{design_left, design_right, design_two_sided, power_curve};
use poisson_approx_core::lambda_opt::{lambda_star, min_tv_value};
use poisson_approx_core::monotonicity::{check_theorem1, exponential_p, mlr_cell, Verdict};
use poisson_approx_core::{
    kolmogorov_binom_poisson, tv_binom_poisson, BinomialParams, FinitePmf, PoissonParams,
};
use proptest::prelude::*;

fn pmf_strategy() -> impl Strategy<Value = FinitePmf> {
    prop::collection::vec(0.0f64..1.0, 1..12).prop_filter_map("positive mass", |w| {
        let total: f64 = w.iter().sum();
        if total <= 1e-3 {
            return None;
        }
        FinitePmf::new(w.iter().map(|x| x / total).collect()).ok()
    })
}

proptest! {
    #[test]
    fn masses_sum_to_one(n in 1u64..300, p in 0.0f64..=1.0) {
        let b = BinomialParams::new(n, p).unwrap();
        let total: f64 = b.pmf_vec().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((b.sf(0) - 1.0).abs() == 0.0);
        prop_assert_eq!(b.sf(n as i64 + 1), 0.0);
    }

    #[test]
    fn tail_complements_cdf(n in 1u64..200, p in 0.0f64..=1.0, m in 0i64..200) {
        let b = BinomialParams::new(n, p).unwrap();
        prop_assert!((b.sf(m) + b.cdf(m - 1) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn poisson_tail_complements_cdf(l in 0.001f64..50.0, m in 0i64..120) {
        let q = PoissonParams::new(l).unwrap();
        prop_assert!((q.sf(m) + q.cdf(m - 1) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tail_monotone_in_p(n in 1u64..150, p in 0.0f64..0.99, dp in 0.001f64..0.01, m in 1i64..150) {
        let lo = BinomialParams::new(n, p).unwrap().sf(m);
        let hi = BinomialParams::new(n, (p + dp).min(1.0)).unwrap().sf(m);
        prop_assert!(hi >= lo - 1e-15);
    }

    #[test]
    fn adding_a_trial_shifts_mass_up(n in 1u64..100, p in 0.0f64..=1.0, k in 0u64..100) {
        // X(n+1,p) = X(n,p) + Bernoulli(p), so P(X(n+1) >= k+1) = P(X(n) >= k+1) + p P(X(n) = k)
        let small = BinomialParams::new(n, p).unwrap();
        let big = BinomialParams::new(n + 1, p).unwrap();
        let lhs = big.sf(k as i64 + 1);
        let rhs = small.sf(k as i64 + 1) + p * small.pmf(k);
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn convolution_commutes_and_keeps_mass(f in pmf_strategy(), g in pmf_strategy()) {
        let a = convolve(&f, &g);
        let b = convolve(&g, &f);
        prop_assert!(tv_finite(&a.pmf, &b.pmf) < 1e-15);
        let total: f64 = a.pmf.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_with_point_mass_shifts(f in pmf_strategy(), s in 0usize..5) {
        let c = convolve(&f, &FinitePmf::point_mass(s));
        for k in 0..f.len() {
            prop_assert_eq!(c.pmf.get(k + s), f.get(k));
        }
    }

    #[test]
    fn tv_is_a_metric(f in pmf_strategy(), g in pmf_strategy(), h in pmf_strategy()) {
        let fg = tv_finite(&f, &g);
        prop_assert!((0.0..=1.0).contains(&fg));
        prop_assert!((fg - tv_finite(&g, &f)).abs() == 0.0);
        prop_assert!(fg <= tv_finite(&f, &h) + tv_finite(&h, &g) + 1e-15);
    }

    #[test]
    fn tv_shrinks_under_convolution(f in pmf_strategy(), g in pmf_strategy(), h in pmf_strategy()) {
        let before = tv_finite(&f, &g);
        let after = tv_finite(&convolve(&f, &h).pmf, &convolve(&g, &h).pmf);
        prop_assert!(after <= before + 1e-14);
    }

    #[test]
    fn kolmogorov_below_tv(n in 1u64..80, p in 0.0f64..=1.0, l in 0.01f64..40.0) {
        let b = BinomialParams::new(n, p).unwrap();
        let q = PoissonParams::new(l).unwrap();
        let tv = tv_binom_poisson(b, q);
        let dk = kolmogorov_binom_poisson(b, q);
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert!(dk <= tv + 1e-13);
    }

    #[test]
    fn bernoulli_minimum_is_global(p in 0.001f64..0.999, l in 0.001f64..8.0) {
        let b = BinomialParams::new(1, p).unwrap();
        let best = min_tv_value(p).unwrap();
        let at_star = tv_binom_poisson(b, PoissonParams::new(lambda_star(p).unwrap()).unwrap());
        prop_assert!((best - at_star).abs() < 1e-13);
        prop_assert!(tv_binom_poisson(b, PoissonParams::new(l).unwrap()) >= best - 1e-13);
    }

    #[test]
    fn magic_bound_holds(n in 1u64..100, p in 0.0001f64..0.5) {
        let b = BinomialParams::new(n, p).unwrap();
        let tv = tv_binom_poisson(b, PoissonParams::new(n as f64 * p).unwrap());
        let m = magic_bound(n, p).unwrap();
        prop_assert!(tv <= m.bound + 1e-12);
        prop_assert!(m.bound <= m.cap + 1e-15);
    }

    #[test]
    fn triangle_bound_holds(n in 2u64..100, p in 0.001f64..0.9, frac in 0.01f64..0.99) {
        let l = frac * n as f64;
        let b = BinomialParams::new(n, p).unwrap();
        let tv = tv_binom_poisson(b, PoissonParams::new(l).unwrap());
        prop_assert!(tv <= triangle_bound(n, p, l).unwrap() + 1e-12);
    }

    #[test]
    fn envelope_contains_tails(n in 1u64..120, p in 0.0f64..0.99, m in 0u64..120) {
        let b = BinomialParams::new(n, p).unwrap();
        let q = if p > 0.0 { PoissonParams::new(n as f64 * p).unwrap().sf(m as i64) } else if m == 0 { 1.0 } else { 0.0 };
        let (lo, hi) = borisov_envelope(n, p, q).unwrap();
        let exact = b.sf(m as i64);
        prop_assert!(lo - 1e-12 <= exact && exact <= hi + 1e-12);
    }

    #[test]
    fn theorem1_prediction_holds(n in 1u64..80, p in 0.01f64..0.99, shrink in 0.0f64..1.0, m_frac in 0.0f64..1.0) {
        let p_next = p * shrink;
        prop_assume!(p_next < p);
        let m = 1 + ((n - 1) as f64 * m_frac) as u64;
        let o = check_theorem1(n, m, p, p_next).unwrap();
        if o.verdict != Verdict::NotApplicable && o.q_n.max(o.q_next) > 1e-250 {
            prop_assert!(o.confirms_prediction() || o.gap.abs() <= 1e-10, "{:?}", o);
        }
    }

    #[test]
    fn mlr_signs_agree(n in 1u64..60, k_frac in 0.0f64..1.0, l in 0.01f64..60.0) {
        let k = ((n as f64) * k_frac) as u64 % n;
        let c = mlr_cell(n, k, l).unwrap();
        prop_assert!(c.sign_consistent(), "{:?}", c);
    }

    #[test]
    fn exponential_sequence_is_stochastically_increasing(l in 0.05f64..10.0, n in 1u64..100, m in 0i64..102) {
        let a = BinomialParams::new(n, exponential_p(l, n)).unwrap().sf(m);
        let b = BinomialParams::new(n + 1, exponential_p(l, n + 1)).unwrap().sf(m);
        prop_assert!(b >= a - 1e-13);
    }

    #[test]
    fn designs_are_conservative(n in 1u64..400, p0 in 0.001f64..0.999, alpha in 0.001f64..=1.0) {
        if let Ok(d) = design_right(n, p0, alpha) {
            prop_assert!(d.poisson_level <= alpha);
            prop_assert!(d.exact_binomial_level <= d.poisson_level + 1e-12);
        }
        if let Ok(d) = design_left(n, p0, alpha) {
            prop_assert!(d.poisson_level <= alpha);
            prop_assert!(d.exact_binomial_level <= d.poisson_level + 1e-12);
        }
        if let Ok(d) = design_two_sided(n, p0, alpha) {
            prop_assert!(d.poisson_level <= alpha + 1e-15);
            prop_assert!(d.exact_binomial_level <= d.poisson_level + 1e-12);
        }
    }

    #[test]
    fn right_power_is_monotone(n in 5u64..200, p0 in 0.01f64..0.3, alpha in 0.01f64..0.2) {
        prop_assume!(design_right(n, p0, alpha).is_ok());
        let d = design_right(n, p0, alpha).unwrap();
        let grid: Vec<f64> = (1..50).map(|i| i as f64 / 50.0).collect();
        let curve = power_curve(&d, &grid).unwrap();
        for w in curve.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }
}
