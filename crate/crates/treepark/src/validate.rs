//! Invariant suites run by `treepark validate`, sized to finish in minutes.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use treepark_core::analytics::{
    default_oracle_cap, mean_x, oracle_dist_x, solve_p, spine_stats, Pgf, Regime, ALPHA_C, P_TOL,
};
use treepark_core::montecarlo::{RootVisitSource, StepLaw};
use treepark_core::parking::{
    arrivals_from_prefs, compute_flux, count_line_parking_functions, is_line_parking_function, simulate_sequential,
};
use treepark_core::rng::stream;
use treepark_core::tree::{enumerate_trees, lukasiewicz_rotation, sample_uniform_tree};
use treepark_core::{Arrivals, BinaryTree, SamplerConfig};

use crate::parallel;

/// A group of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    /// Samplers and enumeration.
    Tree,
    /// Flux engine and parking functions.
    Parking,
    /// Closed forms against the oracle.
    Analytics,
    /// Estimators against closed forms.
    Montecarlo,
}

impl Suite {
    /// All suites in run order.
    pub const ALL: [Suite; 4] = [Suite::Tree, Suite::Parking, Suite::Analytics, Suite::Montecarlo];

    /// Lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Tree => "tree",
            Suite::Parking => "parking",
            Suite::Analytics => "analytics",
            Suite::Montecarlo => "montecarlo",
        }
    }
}

/// One check.
#[derive(Clone, Debug)]
pub struct Check {
    /// Short name.
    pub name: String,
    /// Outcome.
    pub passed: bool,
    /// Measured values.
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Checks of one suite with wall time.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    /// Which suite.
    pub suite: Suite,
    /// Its checks.
    pub checks: Vec<Check>,
    /// Wall time.
    pub elapsed: Duration,
}

impl SuiteReport {
    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Inputs to [`run`].
#[derive(Clone, Debug)]
pub struct ValidateConfig {
    /// Suites to run; empty means all.
    pub suites: Vec<Suite>,
    /// Restricts intensity-dependent checks to this value.
    pub alpha: Option<f64>,
    /// Base seed.
    pub seed: u64,
    /// Worker threads.
    pub workers: usize,
}

/// Runs the selected suites in order.
pub fn run(cfg: &ValidateConfig) -> Vec<SuiteReport> {
    let suites: Vec<Suite> = if cfg.suites.is_empty() { Suite::ALL.to_vec() } else { cfg.suites.clone() };
    suites
        .into_iter()
        .map(|suite| {
            let start = Instant::now();
            let checks = match suite {
                Suite::Tree => tree_suite(cfg),
                Suite::Parking => parking_suite(),
                Suite::Analytics => analytics_suite(cfg),
                Suite::Montecarlo => montecarlo_suite(cfg),
            };
            SuiteReport { suite, checks, elapsed: start.elapsed() }
        })
        .collect()
}

// ---------------------------------------------------------------------------

/// Chi-square statistic and 1% critical value of `samples` uniform trees of
/// size `n` against the uniform law on all `Catalan(n)` shapes.
pub fn uniformity_chi_square(n: usize, samples: u64, seed: u64, workers: usize) -> (f64, f64) {
    let index: HashMap<String, usize> =
        enumerate_trees(n).expect("small n").iter().enumerate().map(|(i, (t, _))| (t.shape_code(), i)).collect();
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    let parts = parallel::map_ranges(samples, workers, |r| {
        let mut counts = vec![0u64; index.len()];
        for i in r {
            let t = sample_uniform_tree(n, &cfg, &mut stream(seed, i)).expect("uniform sampler");
            counts[index[&t.shape_code()]] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; index.len()];
    for p in parts {
        counts.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    let expected = samples as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64).expect("dof >= 1").inverse_cdf(0.99);
    (stat, critical)
}

fn tree_suite(cfg: &ValidateConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for n in [3usize, 4, 5] {
        let (stat, crit) = uniformity_chi_square(n, 100_000, cfg.seed.wrapping_add(n as u64), cfg.workers);
        out.push(Check::new(format!("uniform n={n}"), stat < crit, format!("chi2 {stat:.2} < {crit:.2}")));
    }
    // Cycle lemma: exactly one valid rotation for random offspring sequences.
    let mut bad = 0;
    let mut rng = stream(cfg.seed, 1 << 40);
    for _ in 0..2000 {
        let n = rng.random_range(1..30usize);
        let tree = sample_uniform_tree(n, &SamplerConfig::default(), &mut rng).expect("uniform sampler");
        // Preorder offspring sequence of a tree, then a random cyclic shift.
        let order = preorder(&tree);
        let counts: Vec<u8> = order.iter().map(|&v| tree.child_count(v) as u8).collect();
        let k = rng.random_range(0..n);
        let shifted: Vec<u8> = counts[k..].iter().chain(&counts[..k]).copied().collect();
        let valid = (0..n).filter(|&j| is_lukasiewicz(&rotate(&shifted, j))).collect::<Vec<_>>();
        if valid != [lukasiewicz_rotation(&shifted)] {
            bad += 1;
        }
    }
    out.push(Check::new("cycle lemma", bad == 0, format!("{bad} of 2000 sequences without a unique rotation")));
    out
}

fn preorder(tree: &BinaryTree) -> Vec<treepark_core::NodeId> {
    let mut out = Vec::with_capacity(tree.len());
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        out.push(v);
        let node = tree.node(v);
        stack.extend(node.right());
        stack.extend(node.left());
    }
    out
}

fn rotate(c: &[u8], k: usize) -> Vec<u8> {
    c[k..].iter().chain(&c[..k]).copied().collect()
}

fn is_lukasiewicz(counts: &[u8]) -> bool {
    let mut s = 0i64;
    for (j, &c) in counts.iter().enumerate() {
        s += i64::from(c) - 1;
        if s < 0 {
            return j + 1 == counts.len();
        }
    }
    false
}

// ---------------------------------------------------------------------------

/// Every vector of `n` counts with sum at most `total`.
pub fn arrival_vectors(n: usize, total: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in arrival_vectors(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Checks every car ordering against the flux engine on all trees with at
/// most `max_nodes` nodes and arrivals totalling at most `max_total`.
/// Returns (instances, orderings, mismatches).
pub fn order_invariance(max_nodes: usize, max_total: u64) -> (u64, u64, u64) {
    let (mut instances, mut orders, mut bad) = (0, 0, 0);
    for n in 1..=max_nodes {
        for (tree, _) in enumerate_trees(n).expect("small n") {
            for counts in arrival_vectors(n, max_total) {
                let arrivals = Arrivals::new(counts);
                let expected = compute_flux(&tree, &arrivals).expect("sized arrivals");
                let starts: Vec<_> = arrivals.car_list().into_iter().map(|(_, v)| v).collect();
                instances += 1;
                for order in starts.iter().copied().permutations(starts.len()).unique() {
                    orders += 1;
                    let cars: Vec<_> = order.into_iter().enumerate().map(|(i, v)| (i as u64, v)).collect();
                    if simulate_sequential(&tree, &cars).expect("valid nodes").0 != expected {
                        bad += 1;
                    }
                }
            }
        }
    }
    (instances, orders, bad)
}

/// `(n, m, brute, formula)` for every `1 <= m <= n <= max_n` where the two
/// counts differ.
pub fn konheim_weiss_mismatches(max_n: usize) -> Vec<(usize, usize, u64, u64)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for m in 1..=n {
            let (brute, formula) = count_line_parking_functions(n, m).expect("n within bounds");
            if brute != formula {
                out.push((n, m, brute, formula));
            }
        }
    }
    out
}

fn parking_suite() -> Vec<Check> {
    let (instances, orders, bad) = order_invariance(5, 4);
    let mut out =
        vec![Check::new("order invariance", bad == 0, format!("{orders} orderings of {instances} instances, {bad} mismatches"))];
    let mism = konheim_weiss_mismatches(6);
    out.push(Check::new("Konheim-Weiss", mism.is_empty(), format!("{} mismatches for m <= n <= 6", mism.len())));
    let mut bad = 0;
    for n in 1..=5usize {
        let path = BinaryTree::path(n).expect("n >= 1");
        for m in 0..=n + 1 {
            for prefs in (0..m).map(|_| 1..=n).multi_cartesian_product() {
                let arr = arrivals_from_prefs(&prefs, n).expect("prefs in range");
                let flux = compute_flux(&path, &arr).expect("sized");
                if flux.all_parked() != is_line_parking_function(&prefs, n).expect("prefs in range") {
                    bad += 1;
                }
            }
        }
    }
    out.push(Check::new("path vs line parking", bad == 0, format!("{bad} mismatches for n <= 5")));
    out
}

// ---------------------------------------------------------------------------

/// `sup_s |pgf(s) - oracle pgf(s)|` over 101 grid points.
pub fn pgf_oracle_sup_error(alpha: f64) -> Result<f64, String> {
    let pgf = Pgf::new(alpha).map_err(|e| e.to_string())?;
    let pmf = oracle_dist_x(alpha, default_oracle_cap(alpha), 1e-14).map_err(|e| e.to_string())?;
    let mut sup = 0.0f64;
    for i in 0..=100 {
        let s = i as f64 / 100.0;
        sup = sup.max((pgf.eval(s).map_err(|e| e.to_string())? - pmf.pgf(s)).abs());
    }
    Ok(sup)
}

/// `max_s |a G^2 + 2 (a b - 2 s^2) G + a b^2|` over 101 grid points.
pub fn quadratic_identity_residual(alpha: f64) -> Result<f64, String> {
    let pgf = Pgf::new(alpha).map_err(|e| e.to_string())?;
    let p = pgf.p();
    let mut worst = 0.0f64;
    for i in 0..=100 {
        let s = i as f64 / 100.0;
        let g = pgf.eval(s).map_err(|e| e.to_string())?;
        let a = (alpha * (s - 1.0)).exp();
        let b = s * (1.0 + p) - p;
        worst = worst.max((a * g * g + 2.0 * (a * b - 2.0 * s * s) * g + a * b * b).abs());
    }
    Ok(worst)
}

/// `(1 - G(1 - h)) / h` with `h = 1e-5`.
pub fn pgf_slope_at_one(alpha: f64) -> Result<f64, String> {
    let pgf = Pgf::new(alpha).map_err(|e| e.to_string())?;
    let h = 1e-5;
    Ok((1.0 - pgf.eval(1.0 - h).map_err(|e| e.to_string())?) / h)
}

fn analytics_suite(cfg: &ValidateConfig) -> Vec<Check> {
    let alphas = cfg.alpha.map_or_else(|| vec![0.1, 0.3, 0.5, 0.8, 1.5], |a| vec![a]);
    let mut out = Vec::new();
    for &alpha in &alphas {
        match quadratic_identity_residual(alpha) {
            Ok(r) => out.push(Check::new(format!("quadratic identity alpha={alpha}"), r < 1e-9, format!("max residual {r:.3e}"))),
            Err(e) => out.push(Check::new(format!("quadratic identity alpha={alpha}"), false, e)),
        }
        match Regime::of(alpha) {
            Regime::Subcritical => {
                match pgf_oracle_sup_error(alpha) {
                    Ok(e) => out.push(Check::new(format!("pgf vs oracle alpha={alpha}"), e < 1e-6, format!("sup error {e:.3e}"))),
                    Err(e) => out.push(Check::new(format!("pgf vs oracle alpha={alpha}"), false, e)),
                }
                if let Ok(d) = pgf_slope_at_one(alpha) {
                    let m = mean_x(alpha);
                    let ok = alpha >= ALPHA_C - 0.05 || (d - m).abs() < 1e-2;
                    out.push(Check::new(format!("pgf slope alpha={alpha}"), ok, format!("slope {d:.6} vs mean {m:.6}")));
                }
            }
            Regime::Supercritical => {
                let check = solve_p(alpha, P_TOL).map_err(|e| e.to_string()).and_then(|p| {
                    let pmf = oracle_dist_x(alpha, default_oracle_cap(alpha), 1e-12).map_err(|e| e.to_string())?;
                    Ok((p, pmf.mass()[0], pmf.overflow()))
                });
                match check {
                    Ok((p, m0, over)) => out.push(Check::new(
                        format!("p vs oracle alpha={alpha}"),
                        (p - m0).abs() < 1e-4,
                        format!("solver {p:.8}, oracle {m0:.8}, overflow {over:.2e}"),
                    )),
                    Err(e) => out.push(Check::new(format!("p vs oracle alpha={alpha}"), false, e)),
                }
            }
        }
    }
    let m = mean_x(ALPHA_C);
    out.push(Check::new("mean at criticality", (m - std::f64::consts::SQRT_2).abs() <= 2.0 * f64::EPSILON, format!("{m}")));
    out
}

// ---------------------------------------------------------------------------

fn montecarlo_suite(cfg: &ValidateConfig) -> Vec<Check> {
    let alpha = cfg.alpha.unwrap_or(0.3);
    let mut out = Vec::new();
    let seed = cfg.seed;
    match solve_p(alpha, P_TOL).map_err(|e| e.to_string()).and_then(|p| {
        parallel::flux_pmf(alpha, 100_000, seed, 4, 1 << 18, cfg.workers).map(|pmf| (p, pmf.bins[0])).map_err(|e| e.to_string())
    }) {
        Ok((p, e)) => out.push(Check::new(
            format!("P(X=0) alpha={alpha}"),
            e.within(p, 4.0, 0.0),
            format!("{:.5} +- {:.5} vs {p:.5} ({} truncated)", e.value, e.stderr, e.truncated_trials),
        )),
        Err(e) => out.push(Check::new("P(X=0)", false, e)),
    }
    let theory = treepark_core::analytics::prob_all_park_limit(alpha);
    match parallel::parking_prob_finite(1000, alpha, 2000, seed, cfg.workers) {
        Ok(e) => {
            let ok = if Regime::of(alpha) == Regime::Subcritical { e.within(theory, 4.0, 0.03) } else { e.value < 0.1 };
            out.push(Check::new(format!("finite parking n=1000 alpha={alpha}"), ok, format!("{:.4} +- {:.4} vs {theory:.4}", e.value, e.stderr)));
        }
        Err(e) => out.push(Check::new("finite parking", false, e.to_string())),
    }
    let spine = oracle_dist_x(alpha, default_oracle_cap(alpha), 1e-13)
        .map_err(|e| e.to_string())
        .and_then(|pmf| {
            parallel::spine_survival(alpha, 1000, 2000, seed, &RootVisitSource::Tabulated(pmf), cfg.workers)
                .map_err(|e| e.to_string())
        });
    match (spine, spine_stats(alpha)) {
        (Ok(e), Ok(s)) => {
            let ok = if Regime::of(alpha) == Regime::Subcritical {
                e.at_depth.within(s.prob_all_park, 4.0, 0.02)
            } else {
                e.at_depth.value < 0.05
            };
            out.push(Check::new(
                format!("spine survival alpha={alpha}"),
                ok,
                format!("{:.4} +- {:.4} vs {:.4}, doubling gap {:.4}", e.at_depth.value, e.at_depth.stderr, s.prob_all_park, e.doubling_gap()),
            ));
        }
        (Err(e), _) => out.push(Check::new("spine survival", false, e)),
        (_, Err(e)) => out.push(Check::new("spine survival", false, e.to_string())),
    }
    let law = StepLaw::new(&[(1, 0.7), (-1, 0.3)]).expect("valid law");
    match parallel::walk_survival(&law, 1000, 20_000, seed, cfg.workers) {
        Ok(e) => out.push(Check::new(
            "ruin walk",
            e.within(4.0 / 7.0, 4.0, 0.0),
            format!("{:.4} +- {:.4} vs {:.4}", e.value, e.stderr, 4.0 / 7.0),
        )),
        Err(e) => out.push(Check::new("ruin walk", false, e.to_string())),
    }
    out
}
