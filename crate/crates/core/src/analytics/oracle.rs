//! Distribution of `X` by iterating its fixed-point equation on a truncated
//! support.
//!
//! `X` solves `X = A + sum over children (X_c - 1)^+` with `A ~ Po(alpha)` and
//! each of the two child slots filled with probability 1/2. Starting from a
//! point mass at 0 the iterates are the laws of `X` on trees cut at growing
//! depth, which increase stochastically to the law of `X`. Mass that would
//! land above the cap is dropped and reported as overflow.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_alpha, AnalyticsError, Regime};

const MAX_ITERATIONS: usize = 100_000;

/// Probability mass on `0..=cap` plus the mass beyond it.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPmf {
    mass: Vec<f64>,
    overflow: f64,
}

impl TruncatedPmf {
    /// Checks masses are nonnegative and sum to one with the overflow.
    pub fn new(mass: Vec<f64>, overflow: f64) -> Result<Self, AnalyticsError> {
        if mass.is_empty() {
            return Err(AnalyticsError::InvalidArgument("pmf needs at least one bin"));
        }
        if mass.iter().chain(core::iter::once(&overflow)).any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(AnalyticsError::InvalidArgument("pmf masses must be finite and nonnegative"));
        }
        let total: f64 = mass.iter().sum::<f64>() + overflow;
        if (total - 1.0).abs() > 1e-9 {
            return Err(AnalyticsError::InvalidArgument("pmf masses must sum to one"));
        }
        Ok(TruncatedPmf { mass, overflow })
    }

    /// Empirical pmf from bin counts and a count of values above the last bin.
    pub fn from_counts(counts: &[u64], above: u64) -> Result<Self, AnalyticsError> {
        let total = counts.iter().sum::<u64>() + above;
        if counts.is_empty() || total == 0 {
            return Err(AnalyticsError::InvalidArgument("no observations"));
        }
        let t = total as f64;
        Ok(TruncatedPmf { mass: counts.iter().map(|&c| c as f64 / t).collect(), overflow: above as f64 / t })
    }

    /// Largest represented value.
    pub fn cap(&self) -> usize {
        self.mass.len() - 1
    }

    /// Masses on `0..=cap`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Mass above `cap`.
    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    /// `sum_k mass[k] s^k`, ignoring the overflow.
    pub fn pgf(&self, s: f64) -> f64 {
        self.mass.iter().rev().fold(0.0, |acc, &m| acc * s + m)
    }

    /// Bounds on the untruncated pgf at `s` in `[0, 1]`: the overflow mass can
    /// contribute anything between 0 and `overflow * s^(cap + 1)`.
    pub fn pgf_bounds(&self, s: f64) -> (f64, f64) {
        let lo = self.pgf(s);
        (lo, lo + self.overflow * libm::pow(s, (self.cap() + 1) as f64))
    }

    /// Mean of the represented part.
    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(k, &m)| k as f64 * m).sum()
    }

    /// Total variation distance, with the two overflow bins compared as one
    /// more atom.
    pub fn tv_distance(&self, other: &TruncatedPmf) -> f64 {
        let n = self.mass.len().max(other.mass.len());
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let body: f64 = (0..n).map(|k| (at(&self.mass, k) - at(&other.mass, k)).abs()).sum();
        0.5 * (body + (self.overflow - other.overflow).abs())
    }
}

/// Po(alpha) masses on `0..=cap` by the stable recurrence.
fn poisson_masses(alpha: f64, cap: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(cap + 1);
    let mut m = libm::exp(-alpha);
    for k in 0..=cap {
        out.push(m);
        m *= alpha / (k as f64 + 1.0);
    }
    out
}

/// `(u * v)[0..len]`.
fn convolve_into(u: &[f64], v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate().take(out.len() - i) {
            out[i + j] += ui * vj;
        }
    }
}

/// Law of `X` for intensity `alpha`, tabulated on `0..=cap`.
///
/// Iterates until successive iterates are within `tol` in total variation.
/// `cap` must be at least 50; 200 suffices below criticality, where the tail
/// is geometric. Above it the tail is heavy and a cap of 400 or more keeps the
/// overflow at a few percent.
pub fn oracle_dist_x(alpha: f64, cap: usize, tol: f64) -> Result<TruncatedPmf, AnalyticsError> {
    check_alpha(alpha)?;
    if cap < 50 {
        return Err(AnalyticsError::InvalidArgument("cap must be at least 50"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(AnalyticsError::InvalidArgument("tolerance must be positive"));
    }
    let len = cap + 1;
    let po = poisson_masses(alpha, cap);
    let mut x = vec![0.0; len];
    x[0] = 1.0;
    let mut z = vec![0.0; len];
    let mut zz = vec![0.0; len];
    let mut s = vec![0.0; len];
    let mut next = vec![0.0; len];
    let mut change = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // z: law of (X - 1)^+.
        z[0] = x[0] + x.get(1).copied().unwrap_or(0.0);
        z[1..cap].copy_from_slice(&x[2..=cap]);
        z[cap] = 0.0;
        // s: contribution of the two child slots.
        convolve_into(&z, &z, &mut zz);
        for k in 0..len {
            s[k] = 0.5 * z[k] + 0.25 * zz[k];
        }
        s[0] += 0.25;
        convolve_into(&po, &s, &mut next);
        change = 0.5 * x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>();
        core::mem::swap(&mut x, &mut next);
        if change < tol {
            let overflow = (1.0 - x.iter().sum::<f64>()).max(0.0);
            return Ok(TruncatedPmf { mass: x, overflow });
        }
    }
    Err(AnalyticsError::NoConvergence { iterations: MAX_ITERATIONS, change })
}

/// Support cap for [`oracle_dist_x`]: 200 below criticality, 400 above.
pub fn default_oracle_cap(alpha: f64) -> usize {
    match Regime::of(alpha) {
        Regime::Subcritical => 200,
        Regime::Supercritical => 400,
    }
}
