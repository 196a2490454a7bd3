//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use treepark::parallel::{self, default_workers};
use treepark::validate::{
    konheim_weiss_mismatches, order_invariance, pgf_oracle_sup_error, pgf_slope_at_one, quadratic_identity_residual,
    uniformity_chi_square,
};
use treepark_core::analytics::{mean_x, oracle_dist_x, prob_all_park_limit, solve_p, spine_stats, ALPHA_C, P_TOL};
use treepark_core::montecarlo::{RootVisitSource, StepLaw, FLUX_MAX_NODES};

const SEED: u64 = 0x7ee_9a2c;

type Outcome = Result<(bool, String), String>;

fn phase_curve(workers: usize) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let e = parallel::parking_prob_finite(2000, alpha, 10_000, SEED, workers).map_err(|e| e.to_string())?;
        let limit = prob_all_park_limit(alpha);
        ok &= e.within(limit, 4.0, 0.03);
        detail.push(format!("{alpha}: {:.4}+-{:.4} vs {limit:.4}", e.value, e.stderr));
    }
    for alpha in [0.7, 1.0] {
        let e = parallel::parking_prob_finite(2000, alpha, 10_000, SEED, workers).map_err(|e| e.to_string())?;
        ok &= e.value < 0.05;
        detail.push(format!("{alpha}: {:.4} < 0.05", e.value));
    }
    Ok((ok, detail.join("; ")))
}

fn subcritical_p(workers: usize) -> Outcome {
    let pmf = parallel::flux_pmf(0.3, 1_000_000, SEED, 4, FLUX_MAX_NODES, workers).map_err(|e| e.to_string())?;
    let e = pmf.bins[0];
    Ok((
        e.within(0.7, 4.0, 0.0),
        format!("P(X=0) = {:.5} +- {:.5} over {} trees, {} truncated", e.value, e.stderr, e.trials, e.truncated_trials),
    ))
}

fn supercritical_p() -> Outcome {
    let p = solve_p(1.0, P_TOL).map_err(|e| e.to_string())?;
    let oracle = oracle_dist_x(1.0, 400, 1e-12).map_err(|e| e.to_string())?.mass()[0];
    let (lo, hi) = ((-1f64).exp() / 4.0, (SQRT_2 - 1.0) / 2.0);
    let inside = |x: f64| lo < x && x < hi;
    Ok((
        (p - oracle).abs() < 1e-4 && inside(p) && inside(oracle),
        format!("solver {p:.10}, oracle {oracle:.10}, bracket ({lo:.6}, {hi:.6})"),
    ))
}

fn pgf_equivalence() -> Outcome {
    let sup = pgf_oracle_sup_error(0.3)?;
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.3, 0.5, 0.8, 1.5] {
        worst = worst.max(quadratic_identity_residual(alpha)?);
    }
    Ok((sup < 1e-6 && worst < 1e-9, format!("sup error {sup:.3e}, identity residual {worst:.3e}")))
}

fn mean_flux() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.1, 0.3, 0.5] {
        let d = pgf_slope_at_one(alpha)?;
        let m = mean_x(alpha);
        ok &= (d - m).abs() < 1e-2;
        detail.push(format!("{alpha}: {d:.6} vs {m:.6}"));
    }
    let at_c = mean_x(ALPHA_C);
    ok &= (at_c - SQRT_2).abs() <= 2.0 * f64::EPSILON;
    detail.push(format!("mean at criticality {at_c:.17}"));
    Ok((ok, detail.join("; ")))
}

fn konheim_weiss() -> Outcome {
    let bad = konheim_weiss_mismatches(6);
    Ok((bad.is_empty(), format!("{} mismatches over 1 <= m <= n <= 6", bad.len())))
}

fn order() -> Outcome {
    let (instances, orders, bad) = order_invariance(5, 4);
    Ok((bad == 0, format!("{orders} orderings of {instances} instances, {bad} mismatches")))
}

fn spine(workers: usize) -> Outcome {
    let stats = spine_stats(0.3).map_err(|e| e.to_string())?;
    let pmf = oracle_dist_x(0.3, 200, 1e-14).map_err(|e| e.to_string())?;
    let e = parallel::spine_survival(0.3, 10_000, 10_000, SEED, &RootVisitSource::Tabulated(pmf), workers)
        .map_err(|e| e.to_string())?;
    let s = e.at_depth;
    let y0 = e.p_y_zero;
    Ok((
        s.within(stats.prob_all_park, 4.0, 0.02) && y0.within(stats.p_y_zero, 4.0, 0.0),
        format!(
            "survival {:.4}+-{:.4} vs {:.6} (doubling gap {:.4}); P(Y=0) {:.5}+-{:.5} vs {:.6}",
            s.value,
            s.stderr,
            stats.prob_all_park,
            e.doubling_gap(),
            y0.value,
            y0.stderr,
            stats.p_y_zero
        ),
    ))
}

fn ruin(workers: usize) -> Outcome {
    let law = StepLaw::new(&[(1, 0.7), (-1, 0.3)]).map_err(|e| e.to_string())?;
    let e = parallel::walk_survival(&law, 10_000, 100_000, SEED, workers).map_err(|e| e.to_string())?;
    let target = 4.0 / 7.0;
    Ok(((e.value - target).abs() <= 4.0 * e.stderr + 0.01, format!("{:.5}+-{:.5} vs {target:.5}", e.value, e.stderr)))
}

fn uniformity(workers: usize) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [3usize, 4, 5] {
        let (stat, crit) = uniformity_chi_square(n, 100_000, SEED + n as u64, workers);
        ok &= stat < crit;
        detail.push(format!("n={n}: {stat:.2} < {crit:.2}"));
    }
    Ok((ok, detail.join("; ")))
}

fn main() -> ExitCode {
    let workers = default_workers();
    let criteria: [(&str, &dyn Fn() -> Outcome); 10] = [
        ("phase-transition curve", &|| phase_curve(workers)),
        ("subcritical p", &|| subcritical_p(workers)),
        ("supercritical p", &supercritical_p),
        ("pgf equivalence", &pgf_equivalence),
        ("mean flux", &mean_flux),
        ("Konheim-Weiss", &konheim_weiss),
        ("order invariance", &order),
        ("spine consistency", &|| spine(workers)),
        ("ruin walk", &|| ruin(workers)),
        ("uniformity", &|| uniformity(workers)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += usize::from(!passed);
        println!(
            "{} {:>2} {name}: {detail} [{:.1} s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
