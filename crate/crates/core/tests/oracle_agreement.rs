use poisson_approx_core::dist::{binom_log_pmf, binom_sf, convolve, poisson_log_pmf, poisson_sf};
use poisson_approx_core::lambda_opt::{breakpoints, min_tv_value};
use poisson_approx_core::monotonicity::{delta_identity, delta_n, exponential_p};
use poisson_approx_core::special::reg_inc_beta;
use poisson_approx_core::{
    kolmogorov_binom_poisson, tv_binom_poisson, BinomialParams, FinitePmf, PoissonParams,
};
use poisson_approx_oracle as oracle;

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn bin(n: u64, p: f64) -> BinomialParams {
    BinomialParams::new(n, p).unwrap()
}

fn pois(l: f64) -> PoissonParams {
    PoissonParams::new(l).unwrap()
}

#[test]
fn binomial_pmf_example() {
    let want = oracle::to_f64(&oracle::binom_pmf(10, &oracle::rational(0.1), 3));
    let got = binom_log_pmf(bin(10, 0.1), 3).exp();
    assert!(rel_err(got, want) < 1e-14, "{got} vs {want}");
}

#[test]
fn binomial_pmf_grid() {
    for n in [1u64, 2, 5, 13, 40, 100] {
        for p in [0.001, 0.03, 0.25, 0.5, 0.77, 0.999] {
            let pq = oracle::rational(p);
            for k in 0..=n {
                let want = oracle::to_f64(&oracle::binom_pmf(n, &pq, k));
                if want < 1e-250 {
                    continue;
                }
                let got = bin(n, p).pmf(k);
                // exponentiating a log of size L costs about L ulps
                let tol = 1e-14 * want.ln().abs().max(10.0);
                assert!(
                    rel_err(got, want) < tol,
                    "n={n} p={p} k={k}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn poisson_pmf_example() {
    let want = oracle::to_f64(&oracle::Poisson::from_f64(5.0).pmf(10));
    let got = poisson_log_pmf(pois(5.0), 10).exp();
    assert!(rel_err(got, want) < 1e-14, "{got} vs {want}");
}

#[test]
fn poisson_pmf_grid() {
    for l in [0.01, 0.5, 1.0, 3.7, 12.0, 30.0] {
        let o = oracle::Poisson::from_f64(l);
        for k in 0..80 {
            let want = oracle::to_f64(&o.pmf(k));
            if want < 1e-250 {
                continue;
            }
            let got = pois(l).pmf(k);
            let tol = 1e-14 * want.ln().abs().max(10.0);
            assert!(rel_err(got, want) < tol, "λ={l} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn binomial_tail_example() {
    let want = oracle::to_f64(&oracle::binom_sf(20, &oracle::rational(0.3), 9));
    let got = binom_sf(bin(20, 0.3), 9);
    assert!((got - want).abs() < 1e-13);
}

#[test]
fn binomial_tails_absolute_and_relative() {
    for n in [1u64, 7, 20, 60] {
        for p in [0.01, 0.2, 0.5, 0.9] {
            let pq = oracle::rational(p);
            for m in -1..=(n as i64 + 1) {
                let want = oracle::to_f64(&oracle::binom_sf(n, &pq, m));
                let got = bin(n, p).sf(m);
                assert!((got - want).abs() < 1e-14, "n={n} p={p} m={m}");
                // the far tail keeps relative accuracy
                if (m as f64) > n as f64 * p && want > 1e-300 {
                    assert!(
                        rel_err(got, want) < 1e-12,
                        "n={n} p={p} m={m}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn binomial_lower_tails_in_log_space() {
    for (n, p) in [(20u64, 0.3), (60, 0.9), (77, 0.865930490742394), (120, 0.5)] {
        let pq = oracle::rational(p);
        for k in -1..=(n as i64) {
            let want = oracle::to_f64(&oracle::binom_cdf(n, &pq, k));
            let got = bin(n, p).ln_cdf(k);
            if want == 0.0 {
                assert_eq!(got, f64::NEG_INFINITY);
            } else if want > 1e-300 {
                let tol = if (k as f64) < n as f64 * p {
                    1e-12
                } else {
                    1e-14
                };
                assert!(rel_err(got.exp(), want) < tol, "n={n} p={p} k={k}");
            }
        }
    }
}

#[test]
fn poisson_tail_example() {
    let want = oracle::to_f64(&oracle::Poisson::from_f64(5.0).sf(10));
    let got = poisson_sf(pois(5.0), 10);
    assert!((got - want).abs() < 1e-12);
    assert!((got - 0.0318281).abs() < 1e-7);
}

#[test]
fn poisson_tails() {
    for l in [0.1, 1.0, 5.0, 17.5] {
        let o = oracle::Poisson::from_f64(l);
        for m in 0..60 {
            let want = oracle::to_f64(&o.sf(m));
            let got = pois(l).sf(m);
            assert!((got - want).abs() < 1e-14, "λ={l} m={m}");
            if (m as f64) > l && want > 1e-300 {
                assert!(rel_err(got, want) < 1e-12, "λ={l} m={m}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn incomplete_beta_example() {
    let want = oracle::to_f64(&oracle::reg_inc_beta_int(7, 4, &oracle::decimal("0.6")));
    let got = reg_inc_beta(7.0, 4.0, 0.6);
    assert!((got - want).abs() < 1e-13, "{got} vs {want}");
}

#[test]
fn incomplete_beta_integer_grid() {
    for a in 1..15u64 {
        for b in 1..15u64 {
            for x in [0.01, 0.2, 0.5, 0.73, 0.99] {
                let want = oracle::to_f64(&oracle::reg_inc_beta_int(a, b, &oracle::rational(x)));
                let got = reg_inc_beta(a as f64, b as f64, x);
                assert!(
                    (got - want).abs() < 1e-13,
                    "a={a} b={b} x={x}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn tail_equals_incomplete_beta_form() {
    for n in 1..=60u64 {
        for p in [0.05, 0.5, 0.93] {
            for m in 1..=n {
                let beta = reg_inc_beta(m as f64, (n - m + 1) as f64, p);
                assert!(
                    (bin(n, p).sf(m as i64) - beta).abs() < 1e-12,
                    "n={n} m={m} p={p}"
                );
            }
        }
    }
}

#[test]
fn convolution_example() {
    let a = FinitePmf::binomial(bin(3, 0.2));
    let b = FinitePmf::binomial(bin(2, 0.2));
    let c = convolve(&a, &b);
    let pq = oracle::rational(0.2);
    assert!(!c.renormalized);
    for k in 0..=5u64 {
        let want = oracle::to_f64(&oracle::binom_pmf(5, &pq, k));
        assert!((c.pmf.get(k as usize) - want).abs() < 1e-14);
    }
}

#[test]
fn distances_against_brute_force() {
    for n in 1..=12u64 {
        for p in [0.05, 0.3, 0.5, 0.8] {
            for l in [0.2, 1.0, 2.5, 6.0] {
                let (pq, lq) = (oracle::rational(p), oracle::rational(l));
                let tv = oracle::to_f64(&oracle::tv_binom_poisson(n, &pq, &lq, 60));
                let dk = oracle::to_f64(&oracle::kolmogorov_binom_poisson(n, &pq, &lq, 60));
                let got = tv_binom_poisson(bin(n, p), pois(l));
                assert!(
                    (got - tv).abs() < 1e-12,
                    "tv n={n} p={p} λ={l}: {got} vs {tv}"
                );
                let got = kolmogorov_binom_poisson(bin(n, p), pois(l));
                assert!(
                    (got - dk).abs() < 1e-12,
                    "dk n={n} p={p} λ={l}: {got} vs {dk}"
                );
            }
        }
    }
}

#[test]
fn kolmogorov_example() {
    let (pq, lq) = (oracle::rational(0.05), oracle::rational(1.0));
    let want = oracle::to_f64(&oracle::kolmogorov_binom_poisson(20, &pq, &lq, 60));
    let got = kolmogorov_binom_poisson(bin(20, 0.05), pois(1.0));
    assert!((got - want).abs() < 1e-13);

    let got = kolmogorov_binom_poisson(bin(1, 0.5), pois(std::f64::consts::LN_2));
    assert!(got <= tv_binom_poisson(bin(1, 0.5), pois(std::f64::consts::LN_2)) + 1e-15);
}

#[test]
fn bernoulli_minimum_values() {
    assert!((min_tv_value(0.3).unwrap() - 0.0503275).abs() < 1e-7);
    assert!((min_tv_value(0.9).unwrap() - 0.5321206).abs() < 1e-7);
    assert!((min_tv_value(0.5).unwrap() - 0.1534264).abs() < 1e-7);
    let edge = 1.0 - (-1.0f64).exp();
    assert!((min_tv_value(edge).unwrap() - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-12);
}

#[test]
fn breakpoint_residuals() {
    let b = breakpoints(0.2).unwrap();
    let (l2, l3) = (b.lambda2.unwrap(), b.lambda3.unwrap());
    assert!((l2 * (-l2).exp() - 0.2).abs() < 1e-12);
    assert!((l3 * (-l3).exp() - 0.2).abs() < 1e-12);
    assert!(b.lambda1 < l2 && l2 <= 1.0 && 1.0 <= l3);
}

#[test]
fn delta_example() {
    // Δ_1 = 2 J_2 - J_1 with J_n over [1 - p_n, 1]
    let j1 = oracle::j_integral(1, 1, &oracle::decimal("0.5"));
    let j2 = oracle::j_integral(2, 1, &oracle::decimal("0.7"));
    let want = oracle::to_f64(&(j2 * oracle::Q::from_integer(2.into()) - j1));
    let got = delta_n(1, 1, 0.5, 0.3).unwrap();
    assert!((got - want).abs() < 1e-15, "{got} vs {want}");
}

#[test]
fn delta_against_exact_integrals() {
    for n in 1..=25u64 {
        for m in 1..=n {
            for (p_n, p_next) in [(0.5, 0.45), (0.2, 0.19), (0.05, 0.049)] {
                let jn = oracle::j_integral(n, m, &oracle::rational(1.0 - p_n));
                let jn1 = oracle::j_integral(n + 1, m, &oracle::rational(1.0 - p_next));
                let want = jn1 * oracle::Q::from_integer((n + 1).into())
                    - jn * oracle::Q::from_integer((n - m + 1).into());
                let want = oracle::to_f64(&want);
                let got = delta_n(n, m, p_n, p_next).unwrap();
                let scale = oracle::to_f64(&oracle::j_integral(n, m, &oracle::rational(1.0 - p_n)));
                assert!(
                    (got - want).abs() <= 1e-12 * scale.max(1e-300),
                    "n={n} m={m}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn tail_difference_identity_up_to_sixty() {
    for n in 1..=60u64 {
        for &l in &[0.5, 2.0, 7.0] {
            let (p_n, p_next) = (exponential_p(l, n), exponential_p(l, n + 1));
            for m in 1..=n {
                let d = delta_identity(n, m, p_n, p_next).unwrap();
                assert!(d.scaled_error() < 1e-11, "n={n} m={m} λ={l}: {d:?}");
                if d.sign_resolvable() {
                    assert!(d.signs_agree(), "n={n} m={m} λ={l}: {d:?}");
                }
            }
        }
    }
}
