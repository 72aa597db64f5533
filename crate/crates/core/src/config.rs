//! Tolerances and sweep grids shared by every certification routine.

use alloc::vec::Vec;

/// Error budget of every probability-returning operation.
pub const PROB_ABS_TOL: f64 = 1e-12;

/// A strict inequality `a > b` is certified only when the relative gap
/// `(a - b) / max(|a|, |b|)` exceeds this margin; anything smaller is
/// reported as numerically flat.
pub const STRICT_MARGIN: f64 = 1e-10;

/// Allowed drift of a probability vector's total mass.
pub const MASS_TOL: f64 = 1e-12;

/// Tail series stop once a term drops below this fraction of the partial sum.
pub const SERIES_CUTOFF: f64 = 1e-18;

/// Absolute tolerance of the λ breakpoint bisection.
pub const BISECTION_TOL: f64 = 1e-13;

/// `|tilde δ|` above which δ and tilde δ must agree in sign.
pub const MLR_SIGN_THRESHOLD: f64 = 1e-9;

/// δ must fall below `-MLR_VIOLATION_MARGIN` to count as an MLR violation.
pub const MLR_VIOLATION_MARGIN: f64 = 1e-12;

/// Grid resolutions used by the sweeps.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridConfig {
    /// Number of points in the `p` grid `{1/(k+1), ..., k/(k+1)}`; 99 gives step 0.01.
    pub p_points: usize,
    pub lambda_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            p_points: 99,
            lambda_points: 2000,
            lambda_min: 0.001,
            lambda_max: 6.0,
        }
    }
}

impl GridConfig {
    /// `0.01, 0.02, ..., 0.99` for the default configuration.
    pub fn p_grid(&self) -> Vec<f64> {
        let den = (self.p_points + 1) as f64;
        (1..=self.p_points).map(|i| i as f64 / den).collect()
    }

    /// Uniform grid on `[lambda_min, lambda_max]` with `lambda_points` points.
    pub fn lambda_grid(&self) -> Vec<f64> {
        linspace(self.lambda_min, self.lambda_max, self.lambda_points)
    }
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Relative gap `(a - b) / max(|a|, |b|)`, zero when both vanish.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = libm::fmax(libm::fabs(a), libm::fabs(b));
    if scale == 0.0 {
        0.0
    } else {
        (a - b) / scale
    }
}

/// [`relative_gap`] of `e^{la}` and `e^{lb}` computed from the logs.
pub fn relative_gap_ln(la: f64, lb: f64) -> f64 {
    if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY {
        0.0
    } else if la >= lb {
        -libm::expm1(lb - la)
    } else {
        libm::expm1(la - lb)
    }
}
