//! Multi-threaded drivers for the core estimators.
//!
//! Trials `0..trials` are cut into contiguous ranges, one per worker, and the
//! per-range tallies are merged in range order. Every trial draws from its
//! own counter-based stream, so results are bit-identical for any number of
//! workers.

use std::ops::Range;
use std::thread;

use treepark_core::montecarlo::{
    flux_tally, parking_finite_tally, spine_tally, walk_tally, Estimate, FluxPmf, FluxTally, McError, RootVisitSource,
    SpineEstimate, SpineTally, StepLaw, Tally, FLUX_MAX_NODES,
};
use treepark_core::SamplerConfig;

/// Splits `0..trials` into at most `workers` contiguous nonempty ranges.
pub fn split(trials: u64, workers: usize) -> Vec<Range<u64>> {
    let workers = (workers.max(1) as u64).min(trials.max(1));
    let base = trials / workers;
    let extra = trials % workers;
    let mut start = 0;
    (0..workers)
        .map(|w| {
            let len = base + u64::from(w < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .filter(|r| !r.is_empty())
        .collect()
}

/// Runs `f` on each range of [`split`] on its own thread and returns the
/// results in range order.
pub fn map_ranges<T, F>(trials: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let ranges = split(trials, workers);
    if ranges.len() <= 1 {
        return ranges.into_iter().map(&f).collect();
    }
    thread::scope(|scope| {
        let handles: Vec<_> = ranges.into_iter().map(|r| scope.spawn(|| f(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Worker count when none is given: the available parallelism.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

fn check_trials(trials: u64) -> Result<(), McError> {
    if trials == 0 {
        Err(McError::InvalidArgument("trials must be at least 1"))
    } else {
        Ok(())
    }
}

/// Parallel `estimate_parking_prob_finite`.
pub fn parking_prob_finite(n: usize, alpha: f64, trials: u64, seed: u64, workers: usize) -> Result<Estimate, McError> {
    check_trials(trials)?;
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    let parts = map_ranges(trials, workers, |r| parking_finite_tally(n, alpha, &cfg, r));
    let mut total = Tally::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total.estimate(seed))
}

/// Parallel `estimate_flux_pmf` with an explicit size cap.
pub fn flux_pmf(
    alpha: f64,
    trials: u64,
    seed: u64,
    kmax: usize,
    max_nodes: usize,
    workers: usize,
) -> Result<FluxPmf, McError> {
    check_trials(trials)?;
    let cfg = SamplerConfig { seed, max_nodes, ..SamplerConfig::default() };
    let parts = map_ranges(trials, workers, |r| flux_tally(alpha, kmax, &cfg, r));
    let mut total = FluxTally::new(kmax);
    for p in parts {
        total = total.merge(&p?);
    }
    Ok(total.pmf(seed))
}

/// Parallel `estimate_flux_pmf` with the core's default size cap.
pub fn flux_pmf_default(alpha: f64, trials: u64, seed: u64, kmax: usize, workers: usize) -> Result<FluxPmf, McError> {
    flux_pmf(alpha, trials, seed, kmax, FLUX_MAX_NODES, workers)
}

/// Parallel `estimate_spine_survival`.
pub fn spine_survival(
    alpha: f64,
    depth: u64,
    trials: u64,
    seed: u64,
    source: &RootVisitSource,
    workers: usize,
) -> Result<SpineEstimate, McError> {
    check_trials(trials)?;
    let parts = map_ranges(trials, workers, |r| spine_tally(alpha, depth, source, seed, r));
    let mut total = SpineTally::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total.summary(depth, seed))
}

/// Parallel `estimate_walk_survival`.
pub fn walk_survival(law: &StepLaw, depth: u64, trials: u64, seed: u64, workers: usize) -> Result<Estimate, McError> {
    check_trials(trials)?;
    let parts = map_ranges(trials, workers, |r| walk_tally(law, depth, seed, r));
    Ok(parts.into_iter().fold(Tally::default(), Tally::merge).estimate(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_the_range() {
        for trials in [1u64, 7, 100, 101] {
            for workers in [1usize, 2, 3, 8, 200] {
                let parts = split(trials, workers);
                assert_eq!(parts.first().unwrap().start, 0);
                assert_eq!(parts.last().unwrap().end, trials);
                assert!(parts.windows(2).all(|w| w[0].end == w[1].start));
                assert!(parts.len() <= workers);
            }
        }
    }

    #[test]
    fn map_ranges_keeps_order() {
        let out = map_ranges(10, 4, |r| r.start);
        assert_eq!(out, vec![0, 3, 6, 8]);
    }
}
