//! Closed forms for parking on BGW(2, 1/2) trees with Po(alpha) arrivals.
//!
//! With `p = P(X = 0)` for the number `X` of cars reaching the root, the
//! generating function `G` of `X` solves
//! `a(s) G^2 + 2 (a(s) b(s) - 2 s^2) G + a(s) b(s)^2 = 0` with
//! `a(s) = e^{alpha (s - 1)}` and `b(s) = s (1 + p) - p`. Its two roots are
//! the branches `Q+` and `Q-`. Up to the critical intensity
//! `alpha_c = 2 - sqrt 2` the pgf stays on `Q+` and `p = 1 - alpha`; above it
//! the pgf switches to `Q-` at a tangency point of
//! `g(s) = s^2 - a(s) b(s)`, which pins `p` (see [`solve_p`]).
//!
//! Note that `b(s)` enters with a minus sign on `p`. Writing it as
//! `p + s (1 + p)` makes `g(1)` negative and breaks `G(1) = 1`.

mod branch;
mod oracle;
mod spine;

use core::f64::consts::SQRT_2;
use core::fmt;

use alloc::vec::Vec;

pub use branch::{
    branch_eval, c_upper, f_quadratic, g, g_prime, pgf_x, s_switch, solve_p, solve_tangency, BranchEval, Pgf,
    TangencySolution,
};
pub use oracle::{default_oracle_cap, oracle_dist_x, TruncatedPmf};
pub use spine::{ruin_prob, spine_stats, SpineStats};

/// Critical intensity `2 - sqrt 2`.
pub const ALPHA_C: f64 = 2.0 - SQRT_2;

/// Slack below zero tolerated for `g` before it is treated as an error.
pub const NUM_SLACK: f64 = 1e-9;

/// Residual tolerance used by [`solve_p`] when callers have no preference.
pub const P_TOL: f64 = 1e-12;

/// Errors from the analytic routines.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticsError {
    /// Intensity outside the domain of the routine.
    InvalidAlpha(f64),
    /// A square root argument is negative beyond [`NUM_SLACK`]; the `(p, alpha)`
    /// pair is inconsistent.
    NegativeDiscriminant {
        /// Offending value.
        value: f64,
    },
    /// The scan over the `p` bracket found no sign change of the tangency
    /// residual. Carries `(p, residual)` for every scanned point.
    NoBracket {
        /// Intensity.
        alpha: f64,
        /// Scanned residuals.
        residuals: Vec<(f64, f64)>,
    },
    /// Bisection converged but the tangency conditions are not met.
    TangencyNotReached {
        /// Intensity.
        alpha: f64,
        /// `|g(s_p)|` at the returned `p`.
        residual: f64,
        /// `|g'(s_p)|` at the returned `p`.
        slope: f64,
    },
    /// The distributional fixed point did not settle.
    NoConvergence {
        /// Iterations performed.
        iterations: usize,
        /// Last total-variation change.
        change: f64,
    },
    /// A random-walk step law cannot satisfy the ruin formula's hypotheses.
    InvalidStepLaw(&'static str),
    /// Some other argument is out of range.
    InvalidArgument(&'static str),
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsError::InvalidAlpha(a) => write!(f, "intensity {a} outside the valid domain"),
            AnalyticsError::NegativeDiscriminant { value } => write!(f, "negative discriminant {value:e}"),
            AnalyticsError::NoBracket { alpha, residuals } => {
                write!(f, "no sign change of the tangency residual at alpha = {alpha}")?;
                if let (Some(first), Some(last)) = (residuals.first(), residuals.last()) {
                    write!(f, " (r({}) = {:e}, r({}) = {:e})", first.0, first.1, last.0, last.1)?;
                }
                Ok(())
            }
            AnalyticsError::TangencyNotReached { alpha, residual, slope } => write!(
                f,
                "tangency not reached at alpha = {alpha}: |g| = {residual:e}, |g'| = {slope:e}"
            ),
            AnalyticsError::NoConvergence { iterations, change } => {
                write!(f, "no convergence after {iterations} iterations (last change {change:e})")
            }
            AnalyticsError::InvalidStepLaw(why) => write!(f, "invalid step law: {why}"),
            AnalyticsError::InvalidArgument(why) => f.write_str(why),
        }
    }
}

impl core::error::Error for AnalyticsError {}

/// Which side of the phase transition an intensity lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `alpha <= 2 - sqrt 2`: finite mean flux, positive parking probability.
    Subcritical,
    /// `alpha > 2 - sqrt 2`: infinite mean flux, parking probability 0.
    Supercritical,
}

impl Regime {
    /// Regime of `alpha`.
    pub fn of(alpha: f64) -> Self {
        if alpha <= ALPHA_C {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }

    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Supercritical => "supercritical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Moments of the arrival and offspring laws for intensity `alpha`.
///
/// Arrivals are Po(alpha), so mean and variance both equal `alpha`. Offspring
/// are Bin(2, 1/2): mean 1, variance 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    alpha: f64,
}

impl ModelParams {
    /// Offspring variance of Bin(2, 1/2).
    pub const OFFSPRING_VARIANCE: f64 = 0.5;

    /// Checks `alpha` is finite and nonnegative.
    pub fn new(alpha: f64) -> Result<Self, AnalyticsError> {
        check_alpha(alpha)?;
        Ok(ModelParams { alpha })
    }

    /// Arrival intensity.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Mean arrivals per vertex.
    pub fn mu(&self) -> f64 {
        self.alpha
    }

    /// Variance of arrivals per vertex.
    pub fn sigma2(&self) -> f64 {
        self.alpha
    }

    /// Regime of this intensity.
    pub fn regime(&self) -> Regime {
        Regime::of(self.alpha)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), AnalyticsError> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticsError::InvalidAlpha(alpha))
    }
}

/// `alpha^2 - 4 alpha + 2`. Near [`ALPHA_C`] it is evaluated in factored form
/// so it vanishes exactly there; below 1/2 the expanded form is exact at 0.
pub fn critical_polynomial(alpha: f64) -> f64 {
    if alpha < 0.5 {
        2.0 - alpha * (4.0 - alpha)
    } else {
        (alpha - ALPHA_C) * (alpha - (2.0 + SQRT_2))
    }
}

/// Flux criterion `(1 - mu)^2 - Sigma^2 (sigma^2 + mu^2 - mu)`. Positive
/// exactly below the critical intensity (for `alpha <= 1`).
pub fn phi_criterion(alpha: f64) -> f64 {
    let m = ModelParams { alpha };
    let (mu, sigma2) = (m.mu(), m.sigma2());
    (1.0 - mu) * (1.0 - mu) - ModelParams::OFFSPRING_VARIANCE * (sigma2 + mu * mu - mu)
}

/// `E[X] = 2 - alpha - sqrt(2 (alpha^2 - 4 alpha + 2))` up to criticality,
/// infinite above.
pub fn mean_x(alpha: f64) -> f64 {
    match Regime::of(alpha) {
        // Rationalised to avoid cancellation at small alpha.
        Regime::Subcritical => {
            alpha * (4.0 - alpha) / (2.0 - alpha + libm::sqrt(2.0 * critical_polynomial(alpha).max(0.0)))
        }
        Regime::Supercritical => f64::INFINITY,
    }
}

/// Limiting probability that all `floor(alpha n)` cars park on a uniform
/// `n`-node tree: `e^{alpha/2} sqrt((alpha^2 - 4 alpha + 2) / (2 (1 - alpha)))`
/// up to criticality, 0 above.
pub fn prob_all_park_limit(alpha: f64) -> f64 {
    match Regime::of(alpha) {
        Regime::Subcritical => {
            libm::exp(alpha / 2.0) * libm::sqrt(critical_polynomial(alpha).max(0.0) / (2.0 * (1.0 - alpha)))
        }
        Regime::Supercritical => 0.0,
    }
}

/// Everything the pgf characterisation says about one intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalQuantities {
    /// Intensity.
    pub alpha: f64,
    /// Flux criterion.
    pub phi: f64,
    /// Side of the transition.
    pub regime: Regime,
    /// `P(X = 0)`.
    pub p: f64,
    /// Branch switch point, supercritical only.
    pub s_p: Option<f64>,
    /// Upper bound on `p`, supercritical only.
    pub c_alpha: Option<f64>,
    /// `E[X]`, infinite above criticality.
    pub mean_x: f64,
}

/// Collects [`CriticalQuantities`] for `alpha`.
pub fn critical_quantities(alpha: f64) -> Result<CriticalQuantities, AnalyticsError> {
    check_alpha(alpha)?;
    let regime = Regime::of(alpha);
    let (p, s_p, c_alpha) = match regime {
        Regime::Subcritical => (1.0 - alpha, None, None),
        Regime::Supercritical => {
            let sol = solve_tangency(alpha, P_TOL)?;
            (sol.p, Some(sol.s_p), Some(c_upper(alpha)?))
        }
    };
    Ok(CriticalQuantities { alpha, phi: phi_criterion(alpha), regime, p, s_p, c_alpha, mean_x: mean_x(alpha) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(phi_criterion(0.0), 1.0);
        assert!(phi_criterion(ALPHA_C).abs() < 1e-15);
        assert!((phi_criterion(1.0) + 0.5).abs() < 1e-15);
        for i in 0..=100 {
            let a = i as f64 / 100.0;
            assert!((phi_criterion(a) - 0.5 * (a * a - 4.0 * a + 2.0)).abs() < 1e-14);
            assert_eq!(phi_criterion(a) > 0.0, a < ALPHA_C, "alpha = {a}");
        }
    }

    #[test]
    fn mean_x_values() {
        assert_eq!(mean_x(0.0), 0.0);
        assert!((mean_x(ALPHA_C) - SQRT_2).abs() <= 2.0 * f64::EPSILON);
        assert!((mean_x(0.3) - (1.7 - libm::sqrt(1.78))).abs() < 1e-15);
        assert!((mean_x(0.3) - 0.365834).abs() < 1e-6);
        assert_eq!(mean_x(0.6), f64::INFINITY);
    }

    #[test]
    fn parking_limit_values() {
        assert_eq!(prob_all_park_limit(0.0), 1.0);
        assert_eq!(prob_all_park_limit(ALPHA_C), 0.0);
        assert!((prob_all_park_limit(0.5) - libm::exp(0.25) / 2.0).abs() < 1e-15);
        assert!((prob_all_park_limit(0.5) - 0.642013).abs() < 1e-6);
        assert_eq!(prob_all_park_limit(0.7), 0.0);
        // Decreasing on the subcritical range.
        let mut last = 1.0;
        for i in 1..=58 {
            let v = prob_all_park_limit(i as f64 / 100.0);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn critical_quantities_bundle() {
        let q = critical_quantities(0.3).unwrap();
        assert_eq!(q.regime, Regime::Subcritical);
        assert_eq!(q.p, 0.7);
        assert!(q.s_p.is_none() && q.c_alpha.is_none() && q.mean_x.is_finite());
        let q = critical_quantities(1.0).unwrap();
        assert_eq!(q.regime, Regime::Supercritical);
        let c = q.c_alpha.unwrap();
        assert!(libm::exp(-1.0) / 4.0 < q.p && q.p < c);
        assert_eq!(q.mean_x, f64::INFINITY);
        let s = q.s_p.unwrap();
        assert!(g(s, q.p, 1.0).abs() < 1e-9 && g_prime(s, q.p, 1.0).abs() < 1e-6);
        assert!(critical_quantities(-0.1).is_err());
        assert!(critical_quantities(f64::NAN).is_err());
    }

    #[test]
    fn regime_boundary() {
        assert_eq!(Regime::of(ALPHA_C), Regime::Subcritical);
        assert_eq!(Regime::of(ALPHA_C + 1e-12), Regime::Supercritical);
        assert_eq!(critical_polynomial(ALPHA_C), 0.0);
    }
}
