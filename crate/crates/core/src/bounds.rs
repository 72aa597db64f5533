//! Explicit bounds on the binomial-Poisson total-variation distance and on
//! binomial event probabilities, each paired with the exact quantity it bounds.

use alloc::vec::Vec;

use libm::{expm1, fabs};

use crate::dist::{BinomialParams, PoissonParams};
use crate::distances::tv_binom_poisson;
use crate::error::{Error, Result};
use crate::lambda_opt::{delta_p_unchecked, lambda_circ, lambda_star, CLAMP_THRESHOLD, INV_E};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    /// `(1 - e^{-np}) p` on `d_tv(X(n,p), Π(np))`.
    Magic,
    /// `np²` on `d_tv(X(n,p), Π(np))`.
    MagicCap,
    /// `|np - λ| + (1 - e^{-λ}) λ/n` on `d_tv(X(n,p), Π(λ))`.
    Triangle,
    /// `n Δ(p)` on `d_tv(X(n,p), Π(n λ°))`.
    Serfling,
    /// Piecewise bound on `d_tv(X(n,p), Π(n λ*))`.
    Corollary,
    /// `P(Π(np) ∈ A) / (1-p)` above `P(X(n,p) ∈ A)`.
    BorisovUpper,
    /// `(P(Π(np) ∈ A) - p) / (1-p)` below `P(X(n,p) ∈ A)`.
    BorisovLower,
}

impl BoundKind {
    pub fn is_lower(self) -> bool {
        matches!(self, BoundKind::BorisovLower)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Magic => "magic",
            BoundKind::MagicCap => "magic_cap",
            BoundKind::Triangle => "triangle",
            BoundKind::Serfling => "serfling",
            BoundKind::Corollary => "corollary",
            BoundKind::BorisovUpper => "borisov_upper",
            BoundKind::BorisovLower => "borisov_lower",
        }
    }
}

/// A bound next to the exact value it bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub bound_name: BoundKind,
    pub bound_value: f64,
    pub exact_value: f64,
    /// `bound - exact` for upper bounds, `exact - bound` for lower bounds.
    pub slack: f64,
    /// Poisson rate of the approximating law (distance bounds only).
    pub lambda: Option<f64>,
    /// Threshold `m` of the tail event `{X >= m}` (event bounds only).
    pub event_min: Option<u64>,
}

impl BoundReport {
    fn new(kind: BoundKind, bound: f64, exact: f64) -> Self {
        let slack = if kind.is_lower() {
            exact - bound
        } else {
            bound - exact
        };
        Self {
            bound_name: kind,
            bound_value: bound,
            exact_value: exact,
            slack,
            lambda: None,
            event_min: None,
        }
    }

    /// Slack is non-negative up to `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

/// `(1 - e^{-np}) p` and the weaker cap `np²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicBound {
    pub bound: f64,
    pub cap: f64,
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::param("n", 0.0, "n >= 1"))
    } else {
        Ok(())
    }
}

pub fn magic_bound(n: u64, p: f64) -> Result<MagicBound> {
    check_n(n)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param("p", p, "0 <= p < 1"));
    }
    let np = n as f64 * p;
    Ok(MagicBound {
        bound: -expm1(-np) * p,
        cap: np * p,
    })
}

/// `|np - λ| + (1 - e^{-λ}) λ/n`; needs `λ < n` so that `X(n, λ/n)` exists.
pub fn triangle_bound(n: u64, p: f64, lambda: f64) -> Result<f64> {
    check_n(n)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", p, "0 < p < 1"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", lambda, "finite lambda > 0"));
    }
    if lambda >= n as f64 {
        return Err(Error::InvalidIntermediate { n, lambda });
    }
    Ok(fabs(n as f64 * p - lambda) + (-expm1(-lambda)) * lambda / n as f64)
}

/// `n Δ(p)`.
pub fn serfling_bound(n: u64, p: f64) -> Result<f64> {
    check_n(n)?;
    lambda_circ(p)?;
    Ok(n as f64 * delta_p_unchecked(p))
}

/// `n Δ(p)` when `p <= 1 - 1/e`, else `n (p - 1/e)`.
pub fn corollary_bound(n: u64, p: f64) -> Result<f64> {
    check_n(n)?;
    lambda_circ(p)?;
    Ok(if p <= CLAMP_THRESHOLD {
        n as f64 * delta_p_unchecked(p)
    } else {
        n as f64 * (p - INV_E)
    })
}

/// Envelope `[max(0, (q-p)/(1-p)), min(1, q/(1-p))]` for `P(X(n,p) ∈ A)`
/// given `q = P(Π(np) ∈ A)`.
pub fn borisov_envelope(n: u64, p: f64, event_prob_poisson: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param("p", p, "0 <= p < 1"));
    }
    let q = event_prob_poisson;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("event_prob_poisson", q, "0 <= q <= 1"));
    }
    let lower = ((q - p) / (1.0 - p)).max(0.0);
    let upper = (q / (1.0 - p)).min(1.0);
    Ok((lower, upper))
}

/// All distance bounds applicable to `X(n,p)`, each against its exact TV.
/// The triangle bound is included when `lambda` is given and below `n`.
pub fn distance_bound_reports(n: u64, p: f64, lambda: Option<f64>) -> Result<Vec<BoundReport>> {
    let b = BinomialParams::new(n, p)?;
    lambda_circ(p)?;
    let nf = n as f64;
    let mut out = Vec::new();

    let magic = magic_bound(n, p)?;
    let at_mean = PoissonParams::new(nf * p)?;
    let exact_mean = tv_binom_poisson(b, at_mean);
    let with = |mut r: BoundReport, l: f64| {
        r.lambda = Some(l);
        r
    };
    out.push(with(
        BoundReport::new(BoundKind::Magic, magic.bound, exact_mean),
        nf * p,
    ));
    out.push(with(
        BoundReport::new(BoundKind::MagicCap, magic.cap, exact_mean),
        nf * p,
    ));

    if let Some(l) = lambda {
        if l < nf {
            let bound = triangle_bound(n, p, l)?;
            let exact = tv_binom_poisson(b, PoissonParams::new(l)?);
            out.push(with(BoundReport::new(BoundKind::Triangle, bound, exact), l));
        }
    }

    let l_circ = nf * lambda_circ(p)?;
    let exact = tv_binom_poisson(b, PoissonParams::new(l_circ)?);
    out.push(with(
        BoundReport::new(BoundKind::Serfling, serfling_bound(n, p)?, exact),
        l_circ,
    ));

    let l_star = nf * lambda_star(p)?;
    let exact = tv_binom_poisson(b, PoissonParams::new(l_star)?);
    out.push(with(
        BoundReport::new(BoundKind::Corollary, corollary_bound(n, p)?, exact),
        l_star,
    ));
    Ok(out)
}

/// Envelope reports for every upper tail event `{X >= m}`, `m = 0..=n`.
/// `p = 0` is handled exactly (the envelope collapses onto the point mass).
pub fn tail_envelope_reports(n: u64, p: f64) -> Result<Vec<BoundReport>> {
    let b = BinomialParams::new(n, p)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param("p", p, "0 <= p < 1"));
    }
    let mean = n as f64 * p;
    let pois = if mean > 0.0 {
        Some(PoissonParams::new(mean)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(2 * (n as usize + 1));
    for m in 0..=n {
        let q = match pois {
            Some(pp) => pp.sf(m as i64),
            None => {
                if m == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let exact = b.sf(m as i64);
        let (lower, upper) = borisov_envelope(n, p, q)?;
        for (kind, v) in [
            (BoundKind::BorisovUpper, upper),
            (BoundKind::BorisovLower, lower),
        ] {
            let mut r = BoundReport::new(kind, v, exact);
            r.event_min = Some(m);
            out.push(r);
        }
    }
    Ok(out)
}
