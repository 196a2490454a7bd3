//! Spine walk quantities for the probability that every car parks.
//!
//! Along the spine of a size-biased tree, the net change in the flux per step
//! is `Y - 1`, where `Y` is the arrivals at a spine vertex plus the overflow
//! from its one attached BGW subtree. All cars park in the limit exactly when
//! this walk never drops below zero; the probability of that is
//! `(1 - E[Y]) / P(Y = 0)`.

use super::{check_alpha, mean_x, prob_all_park_limit, solve_p, AnalyticsError, Regime, P_TOL};

/// Law of the spine increment for one subcritical intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpineStats {
    /// Intensity.
    pub alpha: f64,
    /// `E[Y] = alpha + (E[X] - (1 - p)) / 2`.
    pub mean_y: f64,
    /// `P(Y = 0) = sqrt(p) e^{-alpha / 2}`.
    pub p_y_zero: f64,
    /// `P(X <= 1) = 2 sqrt(p) e^{alpha / 2} - 1`.
    pub rho: f64,
    /// `(1 - E[Y]) / P(Y = 0)`.
    pub prob_all_park: f64,
}

/// Spine statistics. Above criticality `p` comes from the tangency solver,
/// `E[Y]` is infinite and the parking probability is 0.
pub fn spine_stats(alpha: f64) -> Result<SpineStats, AnalyticsError> {
    check_alpha(alpha)?;
    let p = solve_p(alpha, P_TOL)?;
    let sp = libm::sqrt(p);
    let e = libm::exp(alpha / 2.0);
    let p_y_zero = sp / e;
    let rho = 2.0 * sp * e - 1.0;
    let (mean_y, prob_all_park) = match Regime::of(alpha) {
        Regime::Subcritical => {
            let mean_y = alpha + 0.5 * (mean_x(alpha) - (1.0 - p));
            let prob = (1.0 - mean_y) / p_y_zero;
            debug_assert!((prob - prob_all_park_limit(alpha)).abs() < 1e-12);
            (mean_y, prob)
        }
        Regime::Supercritical => (f64::INFINITY, 0.0),
    };
    Ok(SpineStats { alpha, mean_y, p_y_zero, rho, prob_all_park })
}

/// Probability that a walk with steps `W <= 1`, `E[W] = m >= 0` and
/// `P(W = 1) = q > 0` stays nonnegative at every step: `m / q`, clamped to
/// `[0, 1]`.
pub fn ruin_prob(m: f64, q: f64) -> Result<f64, AnalyticsError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(AnalyticsError::InvalidStepLaw("P(W = 1) must lie in (0, 1]"));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(AnalyticsError::InvalidStepLaw("mean step must lie in [0, 1]"));
    }
    Ok((m / q).clamp(0.0, 1.0))
}
