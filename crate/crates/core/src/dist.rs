//! Binomial and Poisson laws: masses, tails and finite probability vectors.

use alloc::vec::Vec;

use libm::{exp, fabs, log};

use crate::config::{MASS_TOL, SERIES_CUTOFF};
use crate::error::{Error, Result};
use crate::special::{ln_binom_density, ln_poisson_density};

/// Binomial law `X(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinomialParams {
    n: u64,
    p: f64,
}

impl BinomialParams {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", 0.0, "n >= 1"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", p, "0 <= p <= 1"));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mean(&self) -> f64 {
        self.n as f64 * self.p
    }

    /// `ln P(X = k)`; `-inf` outside `0..=n`.
    pub fn ln_pmf(&self, k: u64) -> f64 {
        if k > self.n {
            return f64::NEG_INFINITY;
        }
        ln_binom_density(k as f64, self.n as f64, self.p, 1.0 - self.p)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        exp(self.ln_pmf(k))
    }

    /// `P(X >= m)`.
    ///
    /// The tail on the far side of the mean is summed directly, smallest
    /// terms first; the near tail is obtained as a complement.
    pub fn sf(&self, m: i64) -> f64 {
        if m <= 0 {
            return 1.0;
        }
        if m as u64 > self.n {
            return 0.0;
        }
        if let Some(v) = self.degenerate_sf(m as u64) {
            return v;
        }
        if m as f64 > self.mean() {
            self.upper_sum(m as u64)
        } else {
            (1.0 - self.lower_sum(m as u64 - 1)).clamp(0.0, 1.0)
        }
    }

    /// `ln P(X >= m)`, finite even where [`sf`](Self::sf) underflows.
    pub fn ln_sf(&self, m: i64) -> f64 {
        if m <= 0 {
            return 0.0;
        }
        if m as u64 > self.n {
            return f64::NEG_INFINITY;
        }
        if let Some(v) = self.degenerate_sf(m as u64) {
            return log(v);
        }
        let m = m as u64;
        if m as f64 > self.mean() {
            let lead = self.ln_pmf(m);
            lead + log(sum_series((m..=self.n).map(|k| exp(self.ln_pmf(k) - lead))))
        } else {
            libm::log1p(-self.lower_sum(m - 1))
        }
    }

    /// `ln P(X <= k)`, finite even where [`cdf`](Self::cdf) underflows.
    pub fn ln_cdf(&self, k: i64) -> f64 {
        if k < 0 {
            return f64::NEG_INFINITY;
        }
        if k as u64 >= self.n {
            return 0.0;
        }
        let k = k as u64;
        if let Some(v) = self.degenerate_sf(k + 1) {
            return log(1.0 - v);
        }
        if (k + 1) as f64 > self.mean() {
            libm::log1p(-self.upper_sum(k + 1))
        } else {
            let lead = self.ln_pmf(k);
            lead + log(sum_series(
                (0..=k).rev().map(|j| exp(self.ln_pmf(j) - lead)),
            ))
        }
    }

    /// `P(X <= k)`.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        if k as u64 >= self.n {
            return 1.0;
        }
        let k = k as u64;
        if let Some(v) = self.degenerate_sf(k + 1) {
            return 1.0 - v;
        }
        if (k + 1) as f64 > self.mean() {
            (1.0 - self.upper_sum(k + 1)).clamp(0.0, 1.0)
        } else {
            self.lower_sum(k)
        }
    }

    fn degenerate_sf(&self, m: u64) -> Option<f64> {
        if self.p == 0.0 {
            Some(if m == 0 { 1.0 } else { 0.0 })
        } else if self.p == 1.0 {
            Some(if m <= self.n { 1.0 } else { 0.0 })
        } else {
            None
        }
    }

    /// `Σ_{k >= m} P(X = k)` for `m` at or above the mode.
    fn upper_sum(&self, m: u64) -> f64 {
        sum_decreasing((m..=self.n).map(|k| self.pmf(k)))
    }

    /// `Σ_{k <= j} P(X = k)` for `j` below the mode.
    fn lower_sum(&self, j: u64) -> f64 {
        sum_decreasing((0..=j).rev().map(|k| self.pmf(k)))
    }

    /// Mass vector on `0..=n`.
    pub fn pmf_vec(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.pmf(k)).collect()
    }
}

/// Poisson law `Π(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoissonParams {
    lambda: f64,
}

impl PoissonParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", lambda, "finite lambda > 0"));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ln P(Π = k) = -λ + k ln λ - ln Γ(k+1)`.
    pub fn ln_pmf(&self, k: u64) -> f64 {
        ln_poisson_density(k as f64, self.lambda)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        exp(self.ln_pmf(k))
    }

    /// `P(Π >= m)`.
    pub fn sf(&self, m: i64) -> f64 {
        if m <= 0 {
            return 1.0;
        }
        let m = m as u64;
        if m as f64 > self.lambda {
            self.upper_sum(m)
        } else {
            (1.0 - self.lower_sum(m - 1)).clamp(0.0, 1.0)
        }
    }

    /// `P(Π <= k)`.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        let k = k as u64;
        if (k + 1) as f64 > self.lambda {
            (1.0 - self.upper_sum(k + 1)).clamp(0.0, 1.0)
        } else {
            self.lower_sum(k)
        }
    }

    fn upper_sum(&self, m: u64) -> f64 {
        sum_decreasing((m..).map(|k| self.pmf(k)))
    }

    fn lower_sum(&self, j: u64) -> f64 {
        sum_decreasing((0..=j).rev().map(|k| self.pmf(k)))
    }
}

/// Sums a sequence whose terms are (eventually) non-increasing, stopping once
/// a term is negligible against the partial sum, then adds the collected
/// terms back from smallest to largest.
fn sum_series(terms: impl Iterator<Item = f64>) -> f64 {
    let mut collected = Vec::new();
    let mut partial = 0.0;
    for t in terms {
        if t == 0.0 || (partial > 0.0 && t < SERIES_CUTOFF * partial) {
            break;
        }
        partial += t;
        collected.push(t);
    }
    collected.iter().rev().sum::<f64>()
}

/// [`sum_series`] of probabilities, clamped to `[0, 1]`.
fn sum_decreasing(terms: impl Iterator<Item = f64>) -> f64 {
    sum_series(terms).clamp(0.0, 1.0)
}

/// `ln P(X(n,p) = k)`; `-inf` for `k > n`.
pub fn binom_log_pmf(params: BinomialParams, k: u64) -> f64 {
    params.ln_pmf(k)
}

pub fn poisson_log_pmf(params: PoissonParams, k: u64) -> f64 {
    params.ln_pmf(k)
}

/// `P(X(n,p) >= m)`.
pub fn binom_sf(params: BinomialParams, m: i64) -> f64 {
    params.sf(m)
}

/// `P(Π(λ) >= m)`.
pub fn poisson_sf(params: PoissonParams, m: i64) -> f64 {
    params.sf(m)
}

/// Explicit probability vector on `{0, ..., N}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FinitePmf {
    probs: Vec<f64>,
}

impl FinitePmf {
    /// Validates non-negativity and unit mass (within [`MASS_TOL`]).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty"));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf("entries must be finite and non-negative"));
        }
        let mass: f64 = probs.iter().sum();
        if fabs(mass - 1.0) > MASS_TOL {
            return Err(Error::InvalidPmf("entries must sum to 1"));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(at: usize) -> Self {
        let mut probs = alloc::vec![0.0; at + 1];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", p, "0 <= p <= 1"));
        }
        Ok(Self {
            probs: alloc::vec![1.0 - p, p],
        })
    }

    pub fn binomial(params: BinomialParams) -> Self {
        let probs = params.pmf_vec();
        let mass: f64 = probs.iter().sum();
        if fabs(mass - 1.0) > MASS_TOL {
            return Self {
                probs: probs.iter().map(|p| p / mass).collect(),
            };
        }
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mass at `k`, zero beyond the support.
    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }
}

/// Law of an independent sum, and whether it had to be renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub pmf: FinitePmf,
    pub renormalized: bool,
}

/// Law of `X + Z` for independent `X ~ f`, `Z ~ g`.
pub fn convolve(f: &FinitePmf, g: &FinitePmf) -> Convolution {
    let mut out = alloc::vec![0.0; f.len() + g.len() - 1];
    for (i, &a) in f.probs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in g.probs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    let mass: f64 = out.iter().sum();
    let renormalized = fabs(mass - 1.0) > MASS_TOL;
    if renormalized {
        out.iter_mut().for_each(|x| *x /= mass);
    }
    Convolution {
        pmf: FinitePmf { probs: out },
        renormalized,
    }
}
