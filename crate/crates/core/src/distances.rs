//! Total-variation and Kolmogorov distances between binomial and Poisson laws.

use libm::{exp, fabs};

use crate::dist::{BinomialParams, FinitePmf, PoissonParams};
use crate::error::{Error, Result};
use crate::special::CompensatedSum;

/// Both distances for one (binomial, Poisson) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DistanceReport {
    pub tv: f64,
    pub kolmogorov: f64,
    pub binom: BinomialParams,
    pub poisson: PoissonParams,
}

impl DistanceReport {
    pub fn new(binom: BinomialParams, poisson: PoissonParams) -> Self {
        Self {
            tv: tv_binom_poisson(binom, poisson),
            kolmogorov: kolmogorov_binom_poisson(binom, poisson),
            binom,
            poisson,
        }
    }
}

/// `d_tv(X(n,p), Π(λ))`: half the L1 distance on `0..=n` plus half the
/// Poisson mass above `n`.
pub fn tv_binom_poisson(b: BinomialParams, q: PoissonParams) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 0..=b.n() {
        acc.add(fabs(b.pmf(k) - q.pmf(k)));
    }
    acc.add(q.sf(b.n() as i64 + 1));
    (0.5 * acc.value()).clamp(0.0, 1.0)
}

/// `d_K(X(n,p), Π(λ)) = max_k |P(X <= k) - P(Π <= k)|`.
///
/// Both CDFs jump only at integers. At `k >= n` the difference is the Poisson
/// tail `P(Π > k)`, which is largest at `k = n`, so scanning `0..=n` covers
/// the supremum.
pub fn kolmogorov_binom_poisson(b: BinomialParams, q: PoissonParams) -> f64 {
    let mut diff = CompensatedSum::new();
    let mut best: f64 = 0.0;
    for k in 0..b.n() {
        diff.add(b.pmf(k) - q.pmf(k));
        best = best.max(fabs(diff.value()));
    }
    // at k = n the binomial CDF is exactly one
    best = best.max(q.sf(b.n() as i64 + 1));
    best.clamp(0.0, 1.0)
}

/// `(1/2) Σ |f_k - g_k|`, zero-padding the shorter vector.
pub fn tv_finite(f: &FinitePmf, g: &FinitePmf) -> f64 {
    let len = f.len().max(g.len());
    let mut acc = CompensatedSum::new();
    for k in 0..len {
        acc.add(fabs(f.get(k) - g.get(k)));
    }
    (0.5 * acc.value()).clamp(0.0, 1.0)
}

/// Closed form of `d_tv(X(1,p), Π(λ))`:
/// `(|1-p-e^{-λ}| + |p-λe^{-λ}| + 1 - e^{-λ} - λe^{-λ}) / 2`.
pub fn bernoulli_poisson_tv_closed(p: f64, lambda: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", p, "0 < p < 1"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", lambda, "finite lambda > 0"));
    }
    Ok(bernoulli_poisson_tv_unchecked(p, lambda))
}

pub(crate) fn bernoulli_poisson_tv_unchecked(p: f64, lambda: f64) -> f64 {
    let e = exp(-lambda);
    let le = lambda * e;
    0.5 * (fabs(1.0 - p - e) + fabs(p - le) + (-libm::expm1(-lambda) - le))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bp(n: u64, p: f64) -> BinomialParams {
        BinomialParams::new(n, p).unwrap()
    }

    fn pp(l: f64) -> PoissonParams {
        PoissonParams::new(l).unwrap()
    }

    #[test]
    fn bernoulli_at_lambda_circ() {
        // below p = 1 - 1/e the minimum is p + (1-p) ln(1-p)
        let expected = 0.5 + 0.5 * libm::log(0.5);
        let tv = tv_binom_poisson(bp(1, 0.5), pp(core::f64::consts::LN_2));
        assert!(fabs(tv - expected) < 1e-15, "{tv}");
        assert!(fabs(expected - 0.1534264097200273) < 1e-15);
    }

    #[test]
    fn bernoulli_clamped_branch() {
        let tv = tv_binom_poisson(bp(1, 0.8), pp(1.0));
        assert!(fabs(tv - (0.8 - exp(-1.0))) < 1e-15);
    }

    #[test]
    fn kolmogorov_never_exceeds_tv() {
        for &(n, p, l) in &[
            (1, 0.5, core::f64::consts::LN_2),
            (20, 0.05, 1.0),
            (7, 0.9, 2.0),
            (50, 0.3, 20.0),
        ] {
            let r = DistanceReport::new(bp(n, p), pp(l));
            assert!(r.kolmogorov <= r.tv + 1e-13, "{r:?}");
        }
    }

    #[test]
    fn tv_finite_trivial() {
        let f = FinitePmf::new(vec![0.1, 0.2, 0.7]).unwrap();
        assert_eq!(tv_finite(&f, &f), 0.0);
        assert_eq!(
            tv_finite(&FinitePmf::point_mass(0), &FinitePmf::point_mass(1)),
            1.0
        );
        let a = FinitePmf::bernoulli(0.3).unwrap();
        let b = FinitePmf::bernoulli(0.75).unwrap();
        assert!(fabs(tv_finite(&a, &b) - 0.45) < 1e-15);
    }

    #[test]
    fn closed_form_domain() {
        assert!(bernoulli_poisson_tv_closed(0.0, 1.0).is_err());
        assert!(bernoulli_poisson_tv_closed(1.0, 1.0).is_err());
        assert!(bernoulli_poisson_tv_closed(0.5, 0.0).is_err());
        let v = bernoulli_poisson_tv_closed(0.3, -libm::log(0.7)).unwrap();
        assert!(fabs(v - (0.3 + 0.7 * libm::log(0.7))) < 1e-15);
        assert!(fabs(v - 0.0503275) < 1e-7);
        let v = bernoulli_poisson_tv_closed(0.9, 1.0).unwrap();
        assert!(fabs(v - 0.5321205588285577) < 1e-15);
    }
}
