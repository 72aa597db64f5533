//! Choice of the Poisson rate that best approximates a Bernoulli law in
//! total variation, and the breakpoints of `λ ↦ d_tv(X(1,p), Π(λ))`.

use alloc::vec::Vec;

use libm::{exp, log, log1p};

use crate::config::{BISECTION_TOL, STRICT_MARGIN};
use crate::distances::bernoulli_poisson_tv_unchecked;
use crate::error::{Error, Result};

/// `1 - e^{-1}`: above it the optimal rate is clamped to one.
pub const CLAMP_THRESHOLD: f64 = 0.632_120_558_828_557_7;
/// `e^{-1}`, the maximum of `λ e^{-λ}`.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

fn check_open_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", p, "0 < p < 1"))
    }
}

/// `λ°(p) = -ln(1-p)`, the rate matching `P(Π = 0)` to `1 - p`.
pub fn lambda_circ(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    Ok(-log1p(-p))
}

/// `λ*(p) = min(λ°(p), 1)`.
pub fn lambda_star(p: f64) -> Result<f64> {
    Ok(lambda_circ(p)?.min(1.0))
}

/// `Δ(p) = p + (1-p) ln(1-p)`.
pub fn delta_p(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    Ok(delta_p_unchecked(p))
}

pub(crate) fn delta_p_unchecked(p: f64) -> f64 {
    if p < 1e-3 {
        // p^2/2 + p^3/6 + p^4/12 + ..., the direct form cancels badly here
        let mut term = p * p;
        let mut acc = 0.0;
        let mut k = 2.0;
        while term > 0.0 {
            let t = term / (k * (k - 1.0));
            acc += t;
            if t < 1e-18 * acc {
                break;
            }
            term *= p;
            k += 1.0;
        }
        return acc;
    }
    p + (1.0 - p) * log1p(-p)
}

/// `min_{λ>0} d_tv(X(1,p), Π(λ))`: `Δ(p)` when `p <= 1 - 1/e`, else `p - 1/e`.
pub fn min_tv_value(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    if p <= CLAMP_THRESHOLD {
        Ok(delta_p_unchecked(p))
    } else {
        Ok(p - INV_E)
    }
}

/// `λ1 = λ°(p)` and, when `p <= 1/e`, the two roots `λ2 <= 1 <= λ3` of `λ e^{-λ} = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LambdaBreakpoints {
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
}

impl LambdaBreakpoints {
    /// `0 < λ1 < λ2 <= 1 <= λ3` whenever the roots exist.
    pub fn is_ordered(&self) -> bool {
        match (self.lambda2, self.lambda3) {
            (Some(l2), Some(l3)) => {
                0.0 < self.lambda1 && self.lambda1 < l2 && l2 <= 1.0 && 1.0 <= l3
            }
            (None, None) => self.lambda1 > 0.0,
            _ => false,
        }
    }
}

pub fn breakpoints(p: f64) -> Result<LambdaBreakpoints> {
    let lambda1 = lambda_circ(p)?;
    if p > INV_E {
        return Ok(LambdaBreakpoints {
            lambda1,
            lambda2: None,
            lambda3: None,
        });
    }
    if p == INV_E {
        return Ok(LambdaBreakpoints {
            lambda1,
            lambda2: Some(1.0),
            lambda3: Some(1.0),
        });
    }
    let f = |l: f64| l * exp(-l) - p;
    // f < 0 near 0 and f > 0 at 1
    let lambda2 = bisect(f, 0.0, 1.0);
    // f(1) > 0 and f(3 - 2 ln p) < 0
    let lambda3 = bisect(f, 1.0, 3.0 - 2.0 * log(p));
    Ok(LambdaBreakpoints {
        lambda1,
        lambda2: Some(lambda2),
        lambda3: Some(lambda3),
    })
}

/// Root of `f` in `[lo, hi]` given a sign change, to [`BISECTION_TOL`].
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_negative = f(lo) < 0.0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `d_tv(X(1,p), Π(λ))` for each `λ` of a strictly ascending positive grid.
pub fn tv_profile(p: f64, lambdas: &[f64]) -> Result<Vec<f64>> {
    check_open_unit(p)?;
    validate_grid(lambdas)?;
    Ok(lambdas
        .iter()
        .map(|&l| bernoulli_poisson_tv_unchecked(p, l))
        .collect())
}

fn validate_grid(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidGrid("empty"));
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidGrid("rates must be finite and positive"));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("rates must be strictly ascending"));
    }
    Ok(())
}

/// Shape of a TV profile over a λ grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Unimodality {
    pub p: f64,
    /// Index of the smallest profile value.
    pub argmin: usize,
    /// Number of sign changes in the successive differences.
    pub sign_changes: usize,
    /// The first sign change goes from decreasing to increasing.
    pub down_then_up: bool,
    /// Differences whose magnitude is below the strictness margin.
    pub flat_steps: usize,
    /// Grid interval `[λ_i, λ_{i+2}]` around the sign change, if any.
    pub bracket: Option<(f64, f64)>,
    /// `λ*(p)` lies inside `bracket` (or within one step of the grid end for
    /// a monotone profile).
    pub brackets_lambda_star: bool,
}

impl Unimodality {
    pub fn certified(&self) -> bool {
        self.flat_steps == 0
            && self.sign_changes <= 1
            && self.down_then_up
            && self.brackets_lambda_star
    }
}

/// Checks that the profile decreases then increases, with the turn at `λ*(p)`.
pub fn unimodality(p: f64, lambdas: &[f64]) -> Result<Unimodality> {
    let profile = tv_profile(p, lambdas)?;
    let star = lambda_star(p)?;
    let mut sign_changes = 0;
    let mut flat_steps = 0;
    let mut down_then_up = true;
    let mut bracket = None;
    let mut previous: Option<bool> = None;
    for (i, w) in profile.windows(2).enumerate() {
        let diff = w[1] - w[0];
        if libm::fabs(diff) <= STRICT_MARGIN {
            flat_steps += 1;
            continue;
        }
        let up = diff > 0.0;
        if let Some(prev) = previous {
            if prev != up {
                sign_changes += 1;
                if sign_changes == 1 {
                    down_then_up = !prev && up;
                    bracket = Some((lambdas[i - 1], lambdas[i + 1]));
                }
            }
        }
        previous = Some(up);
    }
    let argmin = profile
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v < profile[best] { i } else { best });
    let brackets_lambda_star = match bracket {
        Some((lo, hi)) => lo <= star && star <= hi,
        None => {
            // monotone over the grid: λ* must sit at the matching end
            let step = if lambdas.len() > 1 {
                lambdas[1] - lambdas[0]
            } else {
                0.0
            };
            match previous {
                Some(true) => star <= lambdas[0] + step,
                Some(false) => star >= lambdas[lambdas.len() - 1] - step,
                None => true,
            }
        }
    };
    Ok(Unimodality {
        p,
        argmin,
        sign_changes,
        down_then_up,
        flat_steps,
        bracket,
        brackets_lambda_star,
    })
}

/// Everything known about the best Poisson rate for a Bernoulli(p) law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalLambda {
    pub p: f64,
    pub lambda_circ: f64,
    pub lambda_star: f64,
    pub min_tv: f64,
    pub delta_p: f64,
    pub breakpoints: LambdaBreakpoints,
}

impl OptimalLambda {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            lambda_circ: lambda_circ(p)?,
            lambda_star: lambda_star(p)?,
            min_tv: min_tv_value(p)?,
            delta_p: delta_p(p)?,
            breakpoints: breakpoints(p)?,
        })
    }
}
