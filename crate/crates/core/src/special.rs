//! Special functions behind the binomial and Poisson masses.
//!
//! Masses use the saddle-point decomposition of Loader (2000): the log-mass
//! is assembled from the Stirling remainder `stirlerr` and the deviance term
//! `bd0`, both of which are small and well conditioned, so no large
//! log-gamma values are ever subtracted from each other.

use core::f64::consts::PI;

use libm::{exp, fabs, log, log1p};

/// `ln(sqrt(2π))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `stirlerr(k/2)` for `k = 0..=30`, computed at 40 digits.
#[allow(clippy::excessive_precision)]
const STIRLERR_HALVES: [f64; 31] = [
    0.0,
    0.153_426_409_720_027_345_291_4,
    0.081_061_466_795_327_258_219_67,
    0.054_814_121_051_917_653_896_14,
    0.041_340_695_955_409_294_093_82,
    0.033_162_873_519_936_287_485_11,
    0.027_677_925_684_998_339_148_79,
    0.023_746_163_656_297_495_971_33,
    0.020_790_672_103_765_093_111_52,
    0.018_488_450_532_673_185_230_78,
    0.016_644_691_189_821_192_163_19,
    0.015_134_973_221_917_378_873_51,
    0.013_876_128_823_070_747_998_75,
    0.012_810_465_242_920_226_924_25,
    0.011_896_709_945_891_770_095_06,
    0.011_104_559_758_206_917_326_63,
    0.010_411_265_261_972_096_497_48,
    0.009_799_416_126_158_803_298_39,
    0.009_255_462_182_712_732_917_729,
    0.008_768_700_134_139_385_462_955,
    0.008_330_563_433_362_871_256_469,
    0.007_934_114_564_314_020_547_25,
    0.007_573_675_487_951_840_794_972,
    0.007_244_554_301_320_383_179_546,
    0.006_942_840_107_209_529_865_664,
    0.006_665_247_032_707_682_442_356,
    0.006_408_994_188_004_207_068_44,
    0.006_171_712_263_039_457_647_535,
    0.005_951_370_112_758_847_735_624,
    0.005_746_216_513_010_115_682_026,
    0.005_554_733_551_962_801_371_039,
];

const S0: f64 = 1.0 / 12.0;
const S1: f64 = 1.0 / 360.0;
const S2: f64 = 1.0 / 1260.0;
const S3: f64 = 1.0 / 1680.0;
const S4: f64 = 1.0 / 1188.0;

/// Stirling remainder `ln Γ(x+1) - (x + 1/2) ln x + x - ln sqrt(2π)`.
pub fn stirlerr(x: f64) -> f64 {
    if x <= 15.0 {
        let twice = x + x;
        if twice == libm::floor(twice) {
            return STIRLERR_HALVES[twice as usize];
        }
        return ln_gamma(x + 1.0) - (x + 0.5) * log(x) + x - LN_SQRT_2PI;
    }
    let xx = x * x;
    if x > 500.0 {
        (S0 - S1 / xx) / x
    } else if x > 80.0 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if x > 35.0 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Natural log of the gamma function for `x > 0`.
///
/// Arguments below 15 are shifted up with the recurrence `Γ(x+1) = xΓ(x)`
/// and then evaluated by the Stirling series; the absolute error is a few ulp
/// of `max(1, |ln Γ(x)|)`.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < 15.0 {
        prod *= y;
        y += 1.0;
    }
    let tail = (y - 0.5) * log(y) - y + LN_SQRT_2PI + stirlerr(y);
    if prod == 1.0 {
        tail
    } else {
        tail - log(prod)
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x ≈ m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if fabs(x - m) < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1;
        loop {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * log(x / m) + m - x
}

/// Log of `Γ(n+1)/(Γ(x+1)Γ(n-x+1)) p^x q^(n-x)` for real `0 <= x <= n`,
/// with `q = 1 - p` supplied by the caller.
pub fn ln_binom_density(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if x < 0.0 || x > n {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        if n == 0.0 {
            return 0.0;
        }
        return if p < 0.1 {
            -bd0(n, n * q) - n * p
        } else {
            n * log(q)
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(n, n * p) - n * q
        } else {
            n * log(p)
        };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = log(2.0 * PI) + log(x) + log1p(-x / n);
    lc - 0.5 * lf
}

/// Log of `λ^x e^{-λ} / Γ(x+1)` for real `x >= 0`.
pub fn ln_poisson_density(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        return -lambda;
    }
    -stirlerr(x) - bd0(x, lambda) - 0.5 * log(2.0 * PI * x)
}

const BETA_CF_MAX_ITER: usize = 100_000;
const BETA_CF_TINY: f64 = 1e-300;

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Uses the continued fraction of `I_x(a,b)` when `x <= a/(a+b)` and the
/// reflection `1 - I_{1-x}(b,a)` otherwise. The prefactor
/// `x^a (1-x)^b / (a B(a,b))` is evaluated through [`ln_binom_density`].
/// Returns NaN outside `a > 0, b > 0, 0 <= x <= 1`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let value = if x > a / (a + b) {
        1.0 - beta_cf_part(b, a, 1.0 - x, x)
    } else {
        beta_cf_part(a, b, x, 1.0 - x)
    };
    value.clamp(0.0, 1.0)
}

/// `I_x(a,b)` by modified Lentz evaluation; `y = 1 - x`.
fn beta_cf_part(a: f64, b: f64, x: f64, y: f64) -> f64 {
    // x^a y^b / (a B(a,b)) = b/(a+b) * density(a; a+b, x)
    let ln_front = log(b / (a + b)) + ln_binom_density(a, a + b, x, y);
    let front = exp(ln_front);
    if front == 0.0 {
        return 0.0;
    }

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < BETA_CF_TINY {
        d = BETA_CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + even * d;
        if fabs(d) < BETA_CF_TINY {
            d = BETA_CF_TINY;
        }
        c = 1.0 + even / c;
        if fabs(c) < BETA_CF_TINY {
            c = BETA_CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + odd * d;
        if fabs(d) < BETA_CF_TINY {
            d = BETA_CF_TINY;
        }
        c = 1.0 + odd / c;
        if fabs(c) < BETA_CF_TINY {
            c = BETA_CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) <= f64::EPSILON {
            break;
        }
    }
    front * h
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if fabs(self.sum) >= fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Signed `e^{la} - e^{lb}` from two logs, factored as
/// `e^{max}(1 - e^{min - max})` to keep the leading digits.
pub fn exp_diff(la: f64, lb: f64) -> f64 {
    if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY {
        return 0.0;
    }
    if la >= lb {
        -exp(la) * libm::expm1(lb - la)
    } else {
        exp(lb) * libm::expm1(la - lb)
    }
}
