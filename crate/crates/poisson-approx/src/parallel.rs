//! Rayon-backed sweeps. Every function evaluates cases independently and
//! merges results in input order, so output does not depend on the number of
//! threads.

use poisson_approx_core::hypo_tests::{check_p_grid, TestDesign};
use poisson_approx_core::monotonicity::{
    theorem1_case_checks, Claim, MonotonicityReport, ReportBuilder, Theorem1Case, Theorem1Part,
};
use poisson_approx_core::Result;
use rayon::prelude::*;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "POISSON_APPROX_THREADS";

/// Runs `f` on a pool with `threads` workers (machine parallelism when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Order-preserving parallel map.
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

pub fn certify_theorem1(
    part: Theorem1Part,
    cases: &[Theorem1Case],
    seed: Option<u64>,
) -> MonotonicityReport {
    let claim = match part {
        Theorem1Part::I => Claim::T1i,
        Theorem1Part::II => Claim::T1ii,
    };
    let pieces = par_map(cases, |c| theorem1_case_checks(part, c));
    let mut all = ReportBuilder::new(claim);
    for piece in pieces {
        all.absorb(piece);
    }
    all.finish(seed)
}

/// [`power_curve`](poisson_approx_core::hypo_tests::power_curve) over grid
/// points in parallel.
pub fn power_curve(design: &TestDesign, p_grid: &[f64]) -> Result<Vec<f64>> {
    design.validate()?;
    check_p_grid(p_grid)?;
    par_map(p_grid, |&p| design.rejection_probability(p))
        .into_iter()
        .collect()
}
