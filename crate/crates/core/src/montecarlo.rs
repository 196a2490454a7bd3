//! Monte Carlo estimators.
//!
//! Trial `i` of every estimator draws from streams keyed by `(seed, i)` (see
//! [`crate::rng`]). Estimators are written over a range of trial indices and
//! return a [`Tally`]-like monoid, so any split of the range over workers
//! merges to the same result.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore};

use crate::analytics::{AnalyticsError, TruncatedPmf};
use crate::parking::{compute_flux, multinomial_arrivals, ParkingError, PoissonSampler};
use crate::rng::{stream, stream_pair};
use crate::tree::{draw_slots, sample_uniform_tree, SamplerConfig, TreeError, Truncated};

/// Errors from the estimators.
#[derive(Clone, Debug, PartialEq)]
pub enum McError {
    /// Tree sampling failed for a reason other than a size or rejection cap.
    Tree(TreeError),
    /// Arrival or flux computation failed.
    Parking(ParkingError),
    /// Analytic input (a pmf) was invalid.
    Analytics(AnalyticsError),
    /// Argument out of range.
    InvalidArgument(&'static str),
}

impl fmt::Display for McError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McError::Tree(e) => write!(f, "tree sampling: {e}"),
            McError::Parking(e) => write!(f, "parking: {e}"),
            McError::Analytics(e) => write!(f, "analytics: {e}"),
            McError::InvalidArgument(why) => f.write_str(why),
        }
    }
}

impl core::error::Error for McError {}

impl From<TreeError> for McError {
    fn from(e: TreeError) -> Self {
        McError::Tree(e)
    }
}

impl From<ParkingError> for McError {
    fn from(e: ParkingError) -> Self {
        McError::Parking(e)
    }
}

impl From<AnalyticsError> for McError {
    fn from(e: AnalyticsError) -> Self {
        McError::Analytics(e)
    }
}

/// A Bernoulli frequency with its binomial standard error.
///
/// `trials` counts completed trials only; trials abandoned at a size or
/// rejection cap are reported in `truncated_trials` and excluded from the
/// frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    /// `successes / trials`.
    pub value: f64,
    /// `sqrt(value (1 - value) / trials)`.
    pub stderr: f64,
    /// Completed trials.
    pub trials: u64,
    /// Successful trials.
    pub successes: u64,
    /// Run seed.
    pub seed: u64,
    /// Trials discarded at a cap.
    pub truncated_trials: u64,
}

impl Estimate {
    /// Frequency `successes / trials`; NaN when no trial completed.
    pub fn bernoulli(successes: u64, trials: u64, truncated_trials: u64, seed: u64) -> Self {
        let (value, stderr) = if trials == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let v = successes as f64 / trials as f64;
            (v, libm::sqrt(v * (1.0 - v) / trials as f64))
        };
        Estimate { value, stderr, trials, successes, seed, truncated_trials }
    }

    /// `|value - target| <= max(floor, k * stderr)`.
    pub fn within(&self, target: f64, k: f64, floor: f64) -> bool {
        (self.value - target).abs() <= floor.max(k * self.stderr)
    }
}

/// Success counts over a range of trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    /// Successful trials.
    pub successes: u64,
    /// Completed trials.
    pub trials: u64,
    /// Trials discarded at a cap.
    pub truncated: u64,
}

impl Tally {
    /// Pointwise sum.
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            successes: self.successes + other.successes,
            trials: self.trials + other.trials,
            truncated: self.truncated + other.truncated,
        }
    }

    /// Records one completed trial.
    pub fn record(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }

    /// Estimate for run seed `seed`.
    pub fn estimate(&self, seed: u64) -> Estimate {
        Estimate::bernoulli(self.successes, self.trials, self.truncated, seed)
    }
}

fn check_trials(trials: u64) -> Result<(), McError> {
    if trials == 0 {
        Err(McError::InvalidArgument("trials must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<(), McError> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(McError::Parking(ParkingError::InvalidAlpha(alpha)))
    }
}

// ---------------------------------------------------------------------------
// Finite trees.

/// Number of cars `floor(alpha n)` for a tree of `n` nodes. A relative slack
/// of `1e-9` absorbs products such as `0.3 * 10` landing just below an
/// integer.
pub fn cars_for(n: usize, alpha: f64) -> u64 {
    libm::floor(alpha * n as f64 + 1e-9) as u64
}

/// Tally of the event that all `floor(alpha n)` cars park on a uniform
/// `n`-node tree, over trials in `range`.
pub fn parking_finite_tally(
    n: usize,
    alpha: f64,
    cfg: &SamplerConfig,
    range: Range<u64>,
) -> Result<Tally, McError> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(McError::Tree(TreeError::InvalidSize { n }));
    }
    cfg.validate()?;
    let m = cars_for(n, alpha);
    let mut tally = Tally::default();
    for i in range {
        let mut rng = stream(cfg.seed, i);
        let tree = match sample_uniform_tree(n, cfg, &mut rng) {
            Ok(t) => t,
            Err(TreeError::RejectionLimitExceeded { .. }) => {
                tally.truncated += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let arrivals = multinomial_arrivals(&tree, m, &mut rng);
        tally.record(compute_flux(&tree, &arrivals)?.exited == 0);
    }
    Ok(tally)
}

/// Probability that all `floor(alpha n)` cars park on a uniform `n`-node tree.
pub fn estimate_parking_prob_finite(n: usize, alpha: f64, trials: u64, seed: u64) -> Result<Estimate, McError> {
    check_trials(trials)?;
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    Ok(parking_finite_tally(n, alpha, &cfg, 0..trials)?.estimate(seed))
}

// ---------------------------------------------------------------------------
// Root visits on unconditioned trees.

#[derive(Clone, Copy)]
struct Frame {
    visits: u64,
    right_pending: bool,
}

/// Reusable state for [`FluxKernel::root_visits`].
pub struct FluxKernel {
    law: PoissonSampler,
    max_nodes: usize,
    stack: Vec<Frame>,
}

impl FluxKernel {
    /// Kernel for Po(alpha) arrivals on BGW trees of at most `max_nodes` nodes.
    pub fn new(alpha: f64, max_nodes: usize) -> Result<Self, McError> {
        if max_nodes == 0 {
            return Err(McError::InvalidArgument("max_nodes must be positive"));
        }
        Ok(FluxKernel { law: PoissonSampler::new(alpha)?, max_nodes, stack: Vec::new() })
    }

    /// Root visits `X` of one BGW(2, 1/2) tree with Po(alpha) arrivals,
    /// computed during a depth-first generation without storing the tree.
    ///
    /// Consumes `shape` exactly as `sample_bgw_tree` does and `cars` exactly
    /// as `poisson_arrivals` does on the resulting tree, so the result equals
    /// `compute_flux(..).root_visits` for the same two streams.
    pub fn root_visits<S, A>(&mut self, shape: &mut S, cars: &mut A) -> Result<u64, Truncated>
    where
        S: RngCore + ?Sized,
        A: RngCore + ?Sized,
    {
        let stack = &mut self.stack;
        stack.clear();
        let mut nodes = 0usize;
        'node: loop {
            if nodes >= self.max_nodes {
                return Err(Truncated { max_nodes: self.max_nodes });
            }
            nodes += 1;
            let (left, right) = draw_slots(shape);
            stack.push(Frame { visits: self.law.sample(cars), right_pending: right });
            if left {
                continue 'node;
            }
            loop {
                let top = stack.last_mut().expect("stack holds the current node");
                if top.right_pending {
                    top.right_pending = false;
                    continue 'node;
                }
                let done = stack.pop().expect("nonempty").visits;
                match stack.last_mut() {
                    None => return Ok(done),
                    Some(parent) => parent.visits = parent.visits.saturating_add(done.saturating_sub(1)),
                }
            }
        }
    }
}

/// Counts of `X = k` for `k <= kmax`, of `X > kmax`, and of truncated trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxTally {
    /// `bins[k]` counts trials with `X = k`.
    pub bins: Vec<u64>,
    /// Trials with `X > kmax`.
    pub above: u64,
    /// Trials discarded at the size cap.
    pub truncated: u64,
}

impl FluxTally {
    /// Empty tally with bins `0..=kmax`.
    pub fn new(kmax: usize) -> Self {
        FluxTally { bins: vec![0; kmax + 1], above: 0, truncated: 0 }
    }

    /// Completed trials.
    pub fn trials(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.above
    }

    /// Pointwise sum. Both tallies must share `kmax`.
    pub fn merge(mut self, other: &FluxTally) -> FluxTally {
        assert_eq!(self.bins.len(), other.bins.len(), "merging tallies with different kmax");
        self.bins.iter_mut().zip(&other.bins).for_each(|(a, b)| *a += b);
        self.above += other.above;
        self.truncated += other.truncated;
        self
    }

    /// Per-bin estimates.
    pub fn pmf(&self, seed: u64) -> FluxPmf {
        let trials = self.trials();
        FluxPmf {
            bins: self.bins.iter().map(|&c| Estimate::bernoulli(c, trials, self.truncated, seed)).collect(),
            tail: Estimate::bernoulli(self.above, trials, self.truncated, seed),
        }
    }
}

/// Empirical law of `X` with one estimate per bin.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxPmf {
    /// `bins[k]` estimates `P(X = k)`.
    pub bins: Vec<Estimate>,
    /// Estimates `P(X > kmax)`.
    pub tail: Estimate,
}

/// Tally of root visits over trials in `range`; trial `i` draws its shape
/// and arrivals from the pair of streams for `i`.
pub fn flux_tally(alpha: f64, kmax: usize, cfg: &SamplerConfig, range: Range<u64>) -> Result<FluxTally, McError> {
    check_alpha(alpha)?;
    cfg.validate()?;
    let mut kernel = FluxKernel::new(alpha, cfg.max_nodes)?;
    let mut tally = FluxTally::new(kmax);
    for i in range {
        let (mut shape, mut cars) = stream_pair(cfg.seed, i);
        match kernel.root_visits(&mut shape, &mut cars) {
            Ok(x) => match tally.bins.get_mut(x as usize) {
                Some(b) if x <= kmax as u64 => *b += 1,
                _ => tally.above += 1,
            },
            Err(_) => tally.truncated += 1,
        }
    }
    Ok(tally)
}

/// Size cap used by [`estimate_flux_pmf`]. Trees at criticality have a
/// `k^{-1/2}` size tail, so this discards about 0.1% of trials.
pub const FLUX_MAX_NODES: usize = 1 << 20;

/// Empirical law of the root visits on BGW(2, 1/2) trees with Po(alpha)
/// arrivals, with bins `0..=kmax`.
pub fn estimate_flux_pmf(alpha: f64, trials: u64, seed: u64, kmax: usize) -> Result<FluxPmf, McError> {
    check_trials(trials)?;
    let cfg = SamplerConfig { seed, max_nodes: FLUX_MAX_NODES, ..SamplerConfig::default() };
    Ok(flux_tally(alpha, kmax, &cfg, 0..trials)?.pmf(seed))
}

// ---------------------------------------------------------------------------
// Walks.

/// Position of the walk `C_n = n - sum_{i <= n} Y_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkState {
    /// `C_n`.
    pub position: i64,
    /// `n`.
    pub steps_taken: u64,
}

impl WalkState {
    /// Applies one increment `1 - y`.
    #[inline]
    pub fn step(&mut self, y: u64) {
        let y = i64::try_from(y).unwrap_or(i64::MAX);
        self.position = self.position.saturating_add(1).saturating_sub(y);
        self.steps_taken += 1;
    }

    /// `C_n >= 0`.
    pub fn alive(&self) -> bool {
        self.position >= 0
    }
}

/// Whether `C_k >= 0` for every prefix of `ys`. For the `Y` sequence of a
/// spine segment read from the root outward, this is the event that no car
/// leaves through the root.
pub fn walk_survives(ys: &[u64]) -> bool {
    let mut w = WalkState::default();
    ys.iter().all(|&y| {
        w.step(y);
        w.alive()
    })
}

/// Value returned for a draw in the overflow bin of a tabulated law: larger
/// than any walk can absorb.
pub const OVERFLOW_VISITS: u64 = u64::MAX >> 2;

/// Where spine increments get their root-visit samples from.
#[derive(Clone, Debug, PartialEq)]
pub enum RootVisitSource {
    /// Inverse-CDF draws from a tabulated law. Overflow mass maps to
    /// [`OVERFLOW_VISITS`].
    Tabulated(TruncatedPmf),
    /// Fresh BGW trees with their own arrivals, capped at `max_nodes`.
    Trees {
        /// Size cap per attached tree.
        max_nodes: usize,
    },
}

enum Draw<'a> {
    Table(&'a [f64]),
    Trees { kernel: FluxKernel, shape: crate::rng::TrialRng, cars: crate::rng::TrialRng },
}

impl Draw<'_> {
    #[inline]
    fn root_visits<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<u64, Truncated> {
        match self {
            Draw::Table(cdf) => {
                let u: f64 = rng.random();
                let k = cdf.partition_point(|&c| c <= u);
                Ok(if k == cdf.len() { OVERFLOW_VISITS } else { k as u64 })
            }
            Draw::Trees { kernel, shape, cars } => kernel.root_visits(shape, cars),
        }
    }
}

/// One spine increment `Y = P + B (X - 1)^+` with `P ~ Po(alpha)`,
/// `B ~ Bernoulli(1/2)` the number of attached trees and `X` their root
/// visits.
#[inline]
fn spine_increment<R: RngCore + ?Sized>(
    law: &PoissonSampler,
    draw: &mut Draw<'_>,
    rng: &mut R,
) -> Result<u64, Truncated> {
    let direct = law.sample(rng);
    if rng.random::<bool>() {
        let x = draw.root_visits(rng)?;
        Ok(direct.saturating_add(x.saturating_sub(1)))
    } else {
        Ok(direct)
    }
}

fn cumulative(pmf: &TruncatedPmf) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.mass()
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect()
}

/// Counts from spine walks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpineTally {
    /// Trials alive through `depth` steps.
    pub alive_at_depth: u64,
    /// Trials alive through `2 depth` steps.
    pub alive_at_double: u64,
    /// Completed trials.
    pub trials: u64,
    /// Trials abandoned at a tree size cap.
    pub truncated: u64,
    /// Increments drawn.
    pub y_count: u64,
    /// Increments equal to zero.
    pub y_zero: u64,
    /// Increments in the overflow bin, left out of the sums.
    pub y_overflow: u64,
    /// Sum of the other increments, saturating.
    pub y_sum: u64,
    /// Sum of their squares, saturating.
    pub y_sum_sq: u64,
}

impl SpineTally {
    /// Pointwise sum.
    pub fn merge(self, o: SpineTally) -> SpineTally {
        SpineTally {
            alive_at_depth: self.alive_at_depth + o.alive_at_depth,
            alive_at_double: self.alive_at_double + o.alive_at_double,
            trials: self.trials + o.trials,
            truncated: self.truncated + o.truncated,
            y_count: self.y_count + o.y_count,
            y_zero: self.y_zero + o.y_zero,
            y_overflow: self.y_overflow + o.y_overflow,
            y_sum: self.y_sum.saturating_add(o.y_sum),
            y_sum_sq: self.y_sum_sq.saturating_add(o.y_sum_sq),
        }
    }

    fn record_y(&mut self, y: u64) {
        self.y_count += 1;
        if y == 0 {
            self.y_zero += 1;
        } else if y >= OVERFLOW_VISITS {
            self.y_overflow += 1;
        } else {
            self.y_sum = self.y_sum.saturating_add(y);
            self.y_sum_sq = self.y_sum_sq.saturating_add(y.saturating_mul(y));
        }
    }

    /// Summary for a run at `depth` with seed `seed`.
    pub fn summary(&self, depth: u64, seed: u64) -> SpineEstimate {
        let n = (self.y_count - self.y_overflow) as f64;
        let mean = self.y_sum as f64 / n;
        let var = (self.y_sum_sq as f64 / n - mean * mean).max(0.0);
        SpineEstimate {
            depth,
            at_depth: Estimate::bernoulli(self.alive_at_depth, self.trials, self.truncated, seed),
            at_double: Estimate::bernoulli(self.alive_at_double, self.trials, self.truncated, seed),
            p_y_zero: Estimate::bernoulli(self.y_zero, self.y_count, 0, seed),
            mean_y: mean,
            mean_y_stderr: libm::sqrt(var / n),
            y_samples: self.y_count,
        }
    }
}

/// Spine survival with its depth-doubling diagnostic and increment statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpineEstimate {
    /// Walk length for `at_depth`.
    pub depth: u64,
    /// Frequency of `C_k >= 0` for all `k <= depth`.
    pub at_depth: Estimate,
    /// Same for `k <= 2 depth`; the gap to `at_depth` bounds the visible
    /// truncation bias.
    pub at_double: Estimate,
    /// Frequency of `Y = 0` over all increments drawn.
    pub p_y_zero: Estimate,
    /// Mean of the increments drawn, overflow draws excluded.
    pub mean_y: f64,
    /// Standard error of `mean_y`.
    pub mean_y_stderr: f64,
    /// Increments drawn.
    pub y_samples: u64,
}

impl SpineEstimate {
    /// `at_depth - at_double`, nonnegative by construction.
    pub fn doubling_gap(&self) -> f64 {
        self.at_depth.value - self.at_double.value
    }
}

/// Tally of spine walks over trials in `range`.
///
/// Trial `i` walks on stream `3i`; with [`RootVisitSource::Trees`] the
/// attached trees draw shape and arrivals from streams `3i + 1` and `3i + 2`.
/// Walks that survive `depth` steps continue to `2 depth`.
pub fn spine_tally(
    alpha: f64,
    depth: u64,
    source: &RootVisitSource,
    seed: u64,
    range: Range<u64>,
) -> Result<SpineTally, McError> {
    check_alpha(alpha)?;
    if depth == 0 {
        return Err(McError::InvalidArgument("depth must be at least 1"));
    }
    let law = PoissonSampler::new(alpha)?;
    let cdf;
    let mut draw = match source {
        RootVisitSource::Tabulated(pmf) => {
            cdf = cumulative(pmf);
            Draw::Table(&cdf)
        }
        RootVisitSource::Trees { max_nodes } => Draw::Trees {
            kernel: FluxKernel::new(alpha, *max_nodes)?,
            shape: stream(seed, 0),
            cars: stream(seed, 0),
        },
    };
    let mut tally = SpineTally::default();
    'trial: for i in range {
        let mut rng = stream(seed, 3 * i);
        if let Draw::Trees { shape, cars, .. } = &mut draw {
            *shape = stream(seed, 3 * i + 1);
            *cars = stream(seed, 3 * i + 2);
        }
        let mut walk = WalkState::default();
        let mut local = SpineTally::default();
        while walk.steps_taken < 2 * depth {
            let Ok(y) = spine_increment(&law, &mut draw, &mut rng) else {
                tally.truncated += 1;
                continue 'trial;
            };
            local.record_y(y);
            walk.step(y);
            if !walk.alive() {
                break;
            }
        }
        local.trials = 1;
        let reached = if walk.alive() { walk.steps_taken } else { walk.steps_taken - 1 };
        local.alive_at_depth = u64::from(reached >= depth);
        local.alive_at_double = u64::from(reached >= 2 * depth);
        tally = tally.merge(local);
    }
    Ok(tally)
}

/// Frequency of spine walks with `C_k >= 0` for all `k <= depth`, an upward
/// biased estimate of the limiting probability that all cars park.
pub fn estimate_spine_survival(
    alpha: f64,
    depth: u64,
    trials: u64,
    seed: u64,
    source: &RootVisitSource,
) -> Result<SpineEstimate, McError> {
    check_trials(trials)?;
    Ok(spine_tally(alpha, depth, source, seed, 0..trials)?.summary(depth, seed))
}

/// Increment statistics from `samples` independent spine increments.
pub fn estimate_spine_increments(
    alpha: f64,
    samples: u64,
    seed: u64,
    source: &RootVisitSource,
) -> Result<SpineEstimate, McError> {
    check_trials(samples)?;
    check_alpha(alpha)?;
    let law = PoissonSampler::new(alpha)?;
    let cdf;
    let mut draw = match source {
        RootVisitSource::Tabulated(pmf) => {
            cdf = cumulative(pmf);
            Draw::Table(&cdf)
        }
        RootVisitSource::Trees { max_nodes } => Draw::Trees {
            kernel: FluxKernel::new(alpha, *max_nodes)?,
            shape: stream(seed, 1),
            cars: stream(seed, 2),
        },
    };
    let mut rng = stream(seed, 0);
    let mut tally = SpineTally::default();
    for _ in 0..samples {
        match spine_increment(&law, &mut draw, &mut rng) {
            Ok(y) => tally.record_y(y),
            Err(_) => tally.truncated += 1,
        }
    }
    Ok(tally.summary(1, seed))
}

/// A step law on integers at most 1 with positive mass at 1.
#[derive(Clone, Debug)]
pub struct StepLaw {
    steps: Vec<i64>,
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl StepLaw {
    /// Steps with probabilities summing to one.
    pub fn new(law: &[(i64, f64)]) -> Result<Self, McError> {
        if law.iter().any(|&(s, w)| s > 1 || !(w.is_finite() && w >= 0.0)) {
            return Err(AnalyticsError::InvalidStepLaw("steps must be at most 1 with nonnegative weight").into());
        }
        let total: f64 = law.iter().map(|l| l.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(AnalyticsError::InvalidStepLaw("probabilities must sum to one").into());
        }
        let law = StepLaw {
            steps: law.iter().map(|l| l.0).collect(),
            probs: law.iter().map(|l| l.1).collect(),
            index: WeightedIndex::new(law.iter().map(|l| l.1))
                .map_err(|_| AnalyticsError::InvalidStepLaw("no positive weight"))?,
        };
        if law.q() == 0.0 {
            return Err(AnalyticsError::InvalidStepLaw("P(W = 1) must be positive").into());
        }
        Ok(law)
    }

    /// `E[W]`.
    pub fn mean(&self) -> f64 {
        self.steps.iter().zip(&self.probs).map(|(&s, &p)| s as f64 * p).sum()
    }

    /// `P(W = 1)`.
    pub fn q(&self) -> f64 {
        self.steps.iter().zip(&self.probs).filter(|(&s, _)| s == 1).map(|(_, &p)| p).sum()
    }

    /// One step.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        self.steps[self.index.sample(rng)]
    }
}

/// Tally of walks `R_n = W_1 + ... + W_n` with `R_n >= 0` for all
/// `n <= depth`, over trials in `range`.
pub fn walk_tally(law: &StepLaw, depth: u64, seed: u64, range: Range<u64>) -> Tally {
    let mut tally = Tally::default();
    for i in range {
        let mut rng = stream(seed, i);
        let mut r = 0i64;
        let mut ok = true;
        for _ in 0..depth {
            r += law.sample(&mut rng);
            if r < 0 {
                ok = false;
                break;
            }
        }
        tally.record(ok);
    }
    tally
}

/// Frequency of walks staying nonnegative for `depth` steps.
pub fn estimate_walk_survival(law: &StepLaw, depth: u64, trials: u64, seed: u64) -> Result<Estimate, McError> {
    check_trials(trials)?;
    Ok(walk_tally(law, depth, seed, 0..trials).estimate(seed))
}
