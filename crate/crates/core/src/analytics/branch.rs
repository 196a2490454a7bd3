//! Pgf branches, the branch-switch point and the tangency solver for `p`.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use super::{check_alpha, AnalyticsError, Regime, ALPHA_C, NUM_SLACK, P_TOL};

const SCAN_POINTS: usize = 64;
const MAX_BISECTIONS: usize = 400;

/// `g(s) = s^2 - e^{alpha (s - 1)} (s (1 + p) - p)`.
///
/// Evaluated as `(1 - s)(p - s) - (e^{alpha (s - 1)} - 1) b(s)`, so both
/// terms vanish at `s = 1` and `g(1) = 0` exactly.
pub fn g(s: f64, p: f64, alpha: f64) -> f64 {
    (1.0 - s) * (p - s) - libm::expm1(alpha * (s - 1.0)) * b_of(s, p)
}

/// `b(s) = s (1 + p) - p`, written so that `b(1) = 1` exactly.
#[inline]
fn b_of(s: f64, p: f64) -> f64 {
    s - p * (1.0 - s)
}

/// `g'(s) = 2 s - e^{alpha (s - 1)} (alpha (s (1 + p) - p) + 1 + p)`.
pub fn g_prime(s: f64, p: f64, alpha: f64) -> f64 {
    2.0 * s - libm::exp(alpha * (s - 1.0)) * (alpha * b_of(s, p) + 1.0 + p)
}

/// `f(s) = alpha (1 + p) s^2 - (1 + (1 + alpha) p) s + 2 p`, whose roots are
/// the candidates for a common zero of `g` and `g'`.
pub fn f_quadratic(s: f64, p: f64, alpha: f64) -> f64 {
    alpha * (1.0 + p) * s * s - (1.0 + (1.0 + alpha) * p) * s + 2.0 * p
}

/// Both pgf branches and their ingredients at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchEval {
    /// Evaluation point in `[0, 1]`.
    pub s: f64,
    /// `e^{alpha (s - 1)}`.
    pub a: f64,
    /// `s (1 + p) - p`.
    pub b: f64,
    /// `s^2 - a b`, unclamped.
    pub g: f64,
    /// The tangency quadratic at `s`.
    pub f: f64,
    /// `(2 s^2 - a b + 2 s sqrt g) / a`.
    pub q_plus: f64,
    /// `(2 s^2 - a b - 2 s sqrt g) / a`.
    pub q_minus: f64,
}

/// Evaluates the branches `Q+` and `Q-` at `s`. A `g` within [`NUM_SLACK`]
/// below zero is clamped to zero before taking the square root.
pub fn branch_eval(s: f64, p: f64, alpha: f64) -> Result<BranchEval, AnalyticsError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(AnalyticsError::InvalidArgument("s must lie in [0, 1]"));
    }
    let a = libm::exp(alpha * (s - 1.0));
    let b = b_of(s, p);
    let g = g(s, p, alpha);
    if g < -NUM_SLACK {
        return Err(AnalyticsError::NegativeDiscriminant { value: g });
    }
    let root = 2.0 * s * libm::sqrt(g.max(0.0));
    let centre = s * s + g;
    Ok(BranchEval {
        s,
        a,
        b,
        g,
        f: f_quadratic(s, p, alpha),
        q_plus: (centre + root) / a,
        q_minus: (centre - root) / a,
    })
}

const UPPER_ROOT: f64 = 3.0 + 2.0 * SQRT_2;
const LOWER_ROOT: f64 = 3.0 - 2.0 * SQRT_2;

/// Upper bound `c(alpha)` on `p` above criticality: the larger value of `p`
/// at which the tangency quadratic has a double root.
///
/// Numerator and denominator of `((3 - 2 sqrt 2) alpha - 1) / (alpha^2 - 6 alpha + 1)`
/// share the factor `alpha - (3 + 2 sqrt 2)`; cancelling it leaves
/// `(3 - 2 sqrt 2) / (alpha - 3 + 2 sqrt 2)`, which is also the value
/// `(3 sqrt 2 - 4) / 8` at the removable point.
pub fn c_upper(alpha: f64) -> Result<f64, AnalyticsError> {
    if !(alpha.is_finite() && alpha > ALPHA_C) {
        return Err(AnalyticsError::InvalidAlpha(alpha));
    }
    if alpha == UPPER_ROOT {
        return Ok((3.0 * SQRT_2 - 4.0) / 8.0);
    }
    Ok(LOWER_ROOT / (alpha - LOWER_ROOT))
}

/// Discriminant `(1 + (1 + alpha) p)^2 - 8 alpha p (1 + p)` of the tangency
/// quadratic. Away from `alpha = 3 + 2 sqrt 2` it is evaluated through its
/// roots in `p`, so it vanishes exactly at `p = c(alpha)`.
fn tangency_discriminant(alpha: f64, p: f64) -> f64 {
    if (alpha - UPPER_ROOT).abs() > 1e-6 {
        let lead = (alpha - UPPER_ROOT) * (alpha - LOWER_ROOT);
        let p_minus = LOWER_ROOT / (alpha - LOWER_ROOT);
        let p_plus = UPPER_ROOT / (alpha - UPPER_ROOT);
        lead * (p - p_plus) * (p - p_minus)
    } else {
        let b = 1.0 + (1.0 + alpha) * p;
        b * b - 8.0 * alpha * p * (1.0 + p)
    }
}

/// Smaller root of the tangency quadratic, the point where the pgf leaves
/// `Q+` for `Q-`.
pub fn s_switch(alpha: f64, p: f64) -> Result<f64, AnalyticsError> {
    if !(alpha.is_finite() && alpha > ALPHA_C) {
        return Err(AnalyticsError::InvalidAlpha(alpha));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(AnalyticsError::InvalidArgument("p must be positive"));
    }
    let b = 1.0 + (1.0 + alpha) * p;
    let d = tangency_discriminant(alpha, p);
    if d < -1e-12 * b * b {
        return Err(AnalyticsError::NegativeDiscriminant { value: d });
    }
    // (b - sqrt d) / (2 alpha (1 + p)) rewritten to avoid cancellation.
    Ok(4.0 * p / (b + libm::sqrt(d.max(0.0))))
}

/// Result of the tangency solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangencySolution {
    /// `P(X = 0)`.
    pub p: f64,
    /// Branch switch point.
    pub s_p: f64,
    /// `g(s_p)`.
    pub residual: f64,
    /// `g'(s_p)`.
    pub slope: f64,
    /// Bisection steps taken.
    pub bisections: usize,
}

/// Solves `g(s_p(p)) = 0` for `p` above criticality.
///
/// The residual is scanned on a 65-point grid spanning
/// `[max(e^{-alpha}/4, 1 - alpha), c(alpha)]`, the first sign change is
/// bisected to floating-point resolution, and the result is accepted when
/// `|g(s_p)| < tol` and `|g'(s_p)| < sqrt(tol)`.
pub fn solve_tangency(alpha: f64, tol: f64) -> Result<TangencySolution, AnalyticsError> {
    check_alpha(alpha)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(AnalyticsError::InvalidArgument("tolerance must be positive"));
    }
    if Regime::of(alpha) == Regime::Subcritical {
        return Err(AnalyticsError::InvalidAlpha(alpha));
    }
    let residual = |p: f64| s_switch(alpha, p).map(|s| g(s, p, alpha));
    let lo = (libm::exp(-alpha) / 4.0).max(1.0 - alpha);
    let hi = c_upper(alpha)?;
    let mut scan = Vec::with_capacity(SCAN_POINTS + 1);
    for i in 0..=SCAN_POINTS {
        let p = if i == SCAN_POINTS { hi } else { lo + (hi - lo) * i as f64 / SCAN_POINTS as f64 };
        scan.push((p, residual(p)?));
    }
    let bracket = scan.windows(2).find(|w| w[0].1 == 0.0 || (w[0].1 < 0.0) != (w[1].1 < 0.0));
    let Some(&[(mut left, mut r_left), (mut right, mut r_right)]) = bracket else {
        return Err(AnalyticsError::NoBracket { alpha, residuals: scan });
    };
    let mut bisections = 0;
    while r_left != 0.0 && bisections < MAX_BISECTIONS {
        let mid = 0.5 * (left + right);
        if mid <= left || mid >= right {
            break;
        }
        let r_mid = residual(mid)?;
        bisections += 1;
        if (r_mid < 0.0) == (r_left < 0.0) {
            left = mid;
            r_left = r_mid;
        } else {
            right = mid;
            r_right = r_mid;
        }
    }
    let (p, r) = if r_left.abs() <= r_right.abs() { (left, r_left) } else { (right, r_right) };
    let s_p = s_switch(alpha, p)?;
    let slope = g_prime(s_p, p, alpha);
    if !(r.abs() < tol && slope.abs() < libm::sqrt(tol)) {
        return Err(AnalyticsError::TangencyNotReached { alpha, residual: r.abs(), slope: slope.abs() });
    }
    Ok(TangencySolution { p, s_p, residual: r, slope, bisections })
}

/// `p = P(X = 0)`: exactly `1 - alpha` up to criticality, the tangency
/// solution above.
pub fn solve_p(alpha: f64, tol: f64) -> Result<f64, AnalyticsError> {
    check_alpha(alpha)?;
    match Regime::of(alpha) {
        Regime::Subcritical => Ok(1.0 - alpha),
        Regime::Supercritical => solve_tangency(alpha, tol).map(|s| s.p),
    }
}

/// Generating function of the root visits `X` for one intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pgf {
    alpha: f64,
    p: f64,
    s_p: Option<f64>,
}

impl Pgf {
    /// Solves for `p` (and `s_p` above criticality) once.
    pub fn new(alpha: f64) -> Result<Self, AnalyticsError> {
        check_alpha(alpha)?;
        match Regime::of(alpha) {
            Regime::Subcritical => Ok(Pgf { alpha, p: 1.0 - alpha, s_p: None }),
            Regime::Supercritical => {
                let sol = solve_tangency(alpha, P_TOL)?;
                Ok(Pgf { alpha, p: sol.p, s_p: Some(sol.s_p) })
            }
        }
    }

    /// Intensity.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `G(0) = P(X = 0)`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Branch switch point, if the pgf switches.
    pub fn s_p(&self) -> Option<f64> {
        self.s_p
    }

    /// `G(s)`: `Q+` up to `s_p`, `Q-` after it.
    pub fn eval(&self, s: f64) -> Result<f64, AnalyticsError> {
        let be = branch_eval(s, self.p, self.alpha)?;
        Ok(match self.s_p {
            Some(t) if s > t => be.q_minus,
            _ => be.q_plus,
        })
    }
}

/// `G(s)` for intensity `alpha`. Builds a [`Pgf`] per call; reuse one for many
/// points above criticality.
pub fn pgf_x(s: f64, alpha: f64) -> Result<f64, AnalyticsError> {
    Pgf::new(alpha)?.eval(s)
}
