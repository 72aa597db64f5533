//! Reference values for the test suites.
//!
//! Everything here is computed with exact rational arithmetic. The only
//! approximation is `e^{-λ}`, evaluated as the reciprocal of a truncated
//! Taylor series for `e^{λ}` carried to 1e-45 relative accuracy, so Poisson
//! quantities are "extended precision" rather than exact.
//!
//! None of this code shares an evaluation path with `poisson-approx-core`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// The exact rational value of a finite `f64`.
pub fn rational(x: f64) -> Q {
    assert!(x.is_finite(), "non-finite value {x}");
    if x == 0.0 {
        return Q::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp2) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = BigInt::from(sign) * BigInt::from(mantissa);
    if exp2 >= 0 {
        Q::from_integer(m << exp2 as usize)
    } else {
        Q::new(m, BigInt::one() << (-exp2) as usize)
    }
}

/// Decimal literal such as `"0.05"` as an exact rational.
pub fn decimal(s: &str) -> Q {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal literal");
    Q::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
}

/// Correctly rounded (to within 2^-100 relative before the final rounding)
/// conversion to `f64`.
pub fn to_f64(q: &Q) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let num = q.numer().abs().to_biguint().unwrap();
    let den = q.denom().abs().to_biguint().unwrap();
    // scale so the integer quotient carries ~110 significant bits
    let shift = 110i64 - (num.bits() as i64 - den.bits() as i64);
    let quotient: BigUint = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let top = quotient.bits() as i64;
    let drop = (top - 64).max(0);
    let head = (&quotient >> drop as usize).to_u64().unwrap() as f64;
    // two steps: 2^e alone can leave the f64 range when the product does not
    let e = (drop - shift) as i32;
    let value = head * 2f64.powi(e / 2) * 2f64.powi(e - e / 2);
    if neg {
        -value
    } else {
        value
    }
}

pub fn binomial_coefficient(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn pow(q: &Q, e: u64) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

/// `P(X_{n,p} = k)` exactly.
pub fn binom_pmf(n: u64, p: &Q, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    let q = Q::one() - p;
    Q::from_integer(binomial_coefficient(n, k)) * pow(p, k) * pow(&q, n - k)
}

/// Numerators of `P(X_{n,p} = k)`, `k = 0..=n`, over the common
/// denominator `d^n` where `p = a/d` in lowest terms. Summing integers avoids
/// a gcd per rational addition.
pub fn binom_numerators(n: u64, p: &Q) -> (Vec<BigInt>, BigInt) {
    let a = p.numer().clone();
    let d = p.denom().clone();
    let b = &d - &a;
    let mut b_pows = vec![BigInt::one()];
    for _ in 0..n {
        let next = b_pows.last().unwrap() * &b;
        b_pows.push(next);
    }
    let mut nums = Vec::with_capacity(n as usize + 1);
    let mut a_pow = BigInt::one();
    let mut coef = BigInt::one();
    for k in 0..=n {
        nums.push(&coef * &a_pow * &b_pows[(n - k) as usize]);
        a_pow *= &a;
        coef = coef * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    (nums, pow_int(&d, n))
}

fn pow_int(x: &BigInt, e: u64) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `P(X_{n,p} >= m)` exactly.
pub fn binom_sf(n: u64, p: &Q, m: i64) -> Q {
    if m <= 0 {
        return Q::one();
    }
    if m as u64 > n {
        return Q::zero();
    }
    let (nums, den) = binom_numerators(n, p);
    let top: BigInt = nums[m as usize..].iter().sum();
    Q::new(top, den)
}

/// `P(X_{n,p} <= k)` exactly.
pub fn binom_cdf(n: u64, p: &Q, k: i64) -> Q {
    if k < 0 {
        return Q::zero();
    }
    let (nums, den) = binom_numerators(n, p);
    let top: BigInt = nums[..=(k as u64).min(n) as usize].iter().sum();
    Q::new(top, den)
}

/// Regularized incomplete beta for integer `a, b` via the finite expansion
/// `I_x(a,b) = Σ_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^{a+b-1-j}`.
pub fn reg_inc_beta_int(a: u64, b: u64, x: &Q) -> Q {
    let n = a + b - 1;
    (a..=n)
        .map(|j| binom_pmf(n, x, j))
        .fold(Q::zero(), |s, t| s + t)
}

/// `∫_{lo}^{1} t^{n-m} (1-t)^{m-1} dt` by expanding `(1-t)^{m-1}`.
pub fn j_integral(n: u64, m: u64, lo: &Q) -> Q {
    let mut acc = Q::zero();
    for i in 0..m {
        let coef = Q::from_integer(binomial_coefficient(m - 1, i));
        let power = n - m + i + 1;
        let term = coef * (Q::one() - pow(lo, power)) / Q::from_integer(BigInt::from(power));
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `e^{-λ}` to about 1e-45 relative accuracy (λ must be non-negative).
pub fn exp_neg(lambda: &Q) -> Q {
    assert!(!lambda.is_negative());
    let tol = Q::new(BigInt::one(), BigInt::from(10u32).pow(45));
    let mut sum = Q::one();
    let mut term = Q::one();
    let mut k = 1u64;
    loop {
        term = term * lambda / Q::from_integer(BigInt::from(k));
        sum += &term;
        // remainder after term k is below term * λ/(k+1-λ) once k+1 > 2λ
        if Q::from_integer(BigInt::from(k + 1)) > lambda * Q::from_integer(BigInt::from(2u32))
            && term < &sum * &tol
        {
            break;
        }
        k += 1;
    }
    sum.recip()
}

/// `P(Π_λ = k)` to extended precision, sharing one `e^{-λ}` evaluation.
pub struct Poisson {
    lambda: Q,
    exp_neg: Q,
}

impl Poisson {
    pub fn new(lambda: &Q) -> Self {
        Self {
            lambda: lambda.clone(),
            exp_neg: exp_neg(lambda),
        }
    }

    pub fn from_f64(lambda: f64) -> Self {
        Self::new(&rational(lambda))
    }

    pub fn pmf(&self, k: u64) -> Q {
        let mut term = self.exp_neg.clone();
        for j in 1..=k {
            term = term * &self.lambda / Q::from_integer(BigInt::from(j));
        }
        term
    }

    /// `P(Π_λ <= k)`.
    pub fn cdf(&self, k: i64) -> Q {
        if k < 0 {
            return Q::zero();
        }
        let mut term = self.exp_neg.clone();
        let mut acc = term.clone();
        for j in 1..=k as u64 {
            term = term * &self.lambda / Q::from_integer(BigInt::from(j));
            acc += &term;
        }
        acc
    }

    /// `P(Π_λ >= m)`. Above the mean the tail is summed directly (to 1e-40
    /// relative) so that its relative accuracy survives; `1 - cdf` would only
    /// be accurate to about 1e-45 absolute.
    pub fn sf(&self, m: i64) -> Q {
        if m <= 0 {
            return Q::one();
        }
        if Q::from_integer(BigInt::from(m)) <= self.lambda {
            return Q::one() - self.cdf(m - 1);
        }
        let tol = Q::new(BigInt::one(), BigInt::from(10u32).pow(40));
        let two_lambda = &self.lambda * Q::from_integer(BigInt::from(2u32));
        let mut term = self.pmf(m as u64);
        let mut acc = term.clone();
        let mut k = m as u64;
        loop {
            k += 1;
            term = term * &self.lambda / Q::from_integer(BigInt::from(k));
            acc += &term;
            // past 2λ the remainder is below the current term
            if Q::from_integer(BigInt::from(k)) > two_lambda && term < &acc * &tol {
                break;
            }
        }
        acc
    }
}

/// Binomial and truncated Poisson masses on `0..=truncation` as integer
/// numerators over one shared denominator.
struct Aligned {
    binom: Vec<BigInt>,
    poisson: Vec<BigInt>,
    den: BigInt,
}

fn aligned(n: u64, p: &Q, lambda: &Q, truncation: u64) -> Aligned {
    let (bn, bd) = binom_numerators(n, p);
    // P(Π = k) = e^{-λ} a^k d^{K-k} (K!/k!) / (d^K K!) with λ = a/d, K = truncation
    let e = exp_neg(lambda);
    let (a, d) = (lambda.numer().clone(), lambda.denom().clone());
    let kk = truncation;
    let mut pn = vec![BigInt::zero(); kk as usize + 1];
    // build from k = K downwards: ratio a^k d^{K-k} K!/k!
    let mut d_pows = vec![BigInt::one()];
    for _ in 0..kk {
        let next = d_pows.last().unwrap() * &d;
        d_pows.push(next);
    }
    let mut a_pow = BigInt::one();
    let mut falling = (1..=kk).fold(BigInt::one(), |acc, j| acc * BigInt::from(j)); // K!/0!
    for k in 0..=kk {
        pn[k as usize] = &a_pow * &d_pows[(kk - k) as usize] * &falling;
        a_pow *= &a;
        if k < kk {
            falling /= BigInt::from(k + 1);
        }
    }
    let pd = &d_pows[kk as usize] * (1..=kk).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
    let (en, ed) = (e.numer().clone(), e.denom().clone());
    // common denominator bd * pd * ed
    let bscale = &pd * &ed;
    let pscale = &bd * &en;
    let binom = (0..=kk)
        .map(|k| bn.get(k as usize).map_or(BigInt::zero(), |x| x * &bscale))
        .collect();
    let poisson = pn.iter().map(|x| x * &pscale).collect();
    Aligned {
        binom,
        poisson,
        den: bd * pd * ed,
    }
}

/// Brute-force `d_tv(X_{n,p}, Π_λ)`: half the L1 distance over `0..=truncation`
/// plus half the Poisson mass beyond the truncation point.
pub fn tv_binom_poisson(n: u64, p: &Q, lambda: &Q, truncation: u64) -> Q {
    let al = aligned(n, p, lambda, truncation.max(n));
    let l1: BigInt = al
        .binom
        .iter()
        .zip(&al.poisson)
        .map(|(b, q)| (b - q).abs())
        .sum();
    let tail = Poisson::new(lambda).sf(truncation.max(n) as i64 + 1);
    (Q::new(l1, al.den) + tail) / Q::from_integer(BigInt::from(2u32))
}

/// Brute-force Kolmogorov distance by scanning CDF differences on `0..=truncation`.
pub fn kolmogorov_binom_poisson(n: u64, p: &Q, lambda: &Q, truncation: u64) -> Q {
    let al = aligned(n, p, lambda, truncation.max(n));
    let mut diff = BigInt::zero();
    let mut best = BigInt::zero();
    for (b, q) in al.binom.iter().zip(&al.poisson) {
        diff += b - q;
        if diff.abs() > best {
            best = diff.abs();
        }
    }
    Q::new(best, al.den)
}

pub fn sign(q: &Q) -> Sign {
    q.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_neg_one_matches_known_digits() {
        let v = to_f64(&exp_neg(&Q::one()));
        assert_eq!(v, 0.36787944117144233);
    }

    #[test]
    fn to_f64_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, 5e-324, 0.7] {
            assert_eq!(to_f64(&rational(x)), x);
        }
    }

    #[test]
    fn inc_beta_uniform() {
        assert_eq!(reg_inc_beta_int(1, 1, &decimal("0.3")), decimal("0.3"));
    }

    #[test]
    fn j_integral_matches_beta_total() {
        // lo = 0 gives B(n-m+1, m) = (n-m)!(m-1)!/n!
        let v = j_integral(5, 2, &Q::zero());
        assert_eq!(v, Q::new(BigInt::from(1), BigInt::from(20)));
    }
}
