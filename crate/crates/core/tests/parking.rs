use itertools::Itertools;
use proptest::prelude::*;
use treepark_core::parking::{
    arrivals_from_prefs, compute_flux, count_line_parking_functions, is_line_parking_function,
    line_parking_formula, multinomial_arrivals, poisson_arrivals, simulate_sequential,
};
use treepark_core::rng::stream;
use treepark_core::tree::{enumerate_trees, sample_uniform_tree};
use treepark_core::{Arrivals, BinaryTree, NodeId, SamplerConfig};

/// Every vector of `n` counts with sum at most `total`.
fn arrival_vectors(n: usize, total: u64) -> Vec<Vec<u64>> {
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

fn check_order_invariance(max_nodes: usize, max_total: u64) -> usize {
    let mut runs = 0;
    for n in 1..=max_nodes {
        for (tree, _) in enumerate_trees(n).unwrap() {
            for counts in arrival_vectors(n, max_total) {
                let arrivals = Arrivals::new(counts);
                let expected = compute_flux(&tree, &arrivals).unwrap();
                let cars = arrivals.car_list();
                for order in cars.iter().copied().permutations(cars.len()).unique() {
                    let (got, records) = simulate_sequential(&tree, &order).unwrap();
                    assert_eq!(got, expected, "tree {} arrivals {:?}", tree.shape_code(), arrivals.counts());
                    assert_eq!(records.len(), cars.len());
                    runs += 1;
                }
            }
        }
    }
    runs
}

#[test]
fn every_car_order_gives_the_same_outcome() {
    assert!(check_order_invariance(6, 5) > 100_000);
}

#[test]
fn root_visits_are_monotone_in_arrivals() {
    for n in 1..=5 {
        for (tree, _) in enumerate_trees(n).unwrap() {
            for counts in arrival_vectors(n, 3) {
                let base = compute_flux(&tree, &Arrivals::new(counts.clone())).unwrap();
                for v in 0..n {
                    let mut more = Arrivals::new(counts.clone());
                    more.add(NodeId::new(v));
                    let bumped = compute_flux(&tree, &more).unwrap();
                    assert!(bumped.root_visits >= base.root_visits);
                    assert!(bumped.parked >= base.parked && bumped.exited >= base.exited);
                    assert_eq!(bumped.parked + bumped.exited, base.parked + base.exited + 1);
                }
            }
        }
    }
}

#[test]
fn konheim_weiss_counts() {
    for n in 1..=7 {
        for m in 1..=n {
            let (brute, formula) = count_line_parking_functions(n, m).unwrap();
            assert_eq!(brute, formula, "n = {n}, m = {m}");
            assert_eq!(formula, line_parking_formula(n as u64, m as u64));
        }
    }
    assert_eq!(count_line_parking_functions(3, 3).unwrap(), (16, 16));
    assert!(count_line_parking_functions(8, 2).is_err());
}

#[test]
fn path_engine_agrees_with_line_parking() {
    for n in 1..=5usize {
        let path = BinaryTree::path(n).unwrap();
        for m in 0..=n + 1 {
            for prefs in (0..m).map(|_| 1..=n).multi_cartesian_product() {
                let arrivals = arrivals_from_prefs(&prefs, n).unwrap();
                let flux = compute_flux(&path, &arrivals).unwrap();
                assert_eq!(flux.all_parked(), is_line_parking_function(&prefs, n).unwrap(), "{prefs:?}");
            }
        }
    }
}

fn tree_and_arrivals() -> impl Strategy<Value = (BinaryTree, Arrivals)> {
    (1usize..200, any::<u64>(), 0u64..400).prop_map(|(n, seed, m)| {
        let mut rng = stream(seed, 0);
        let tree = sample_uniform_tree(n, &SamplerConfig::default(), &mut rng).unwrap();
        let arrivals = multinomial_arrivals(&tree, m, &mut rng);
        (tree, arrivals)
    })
}

proptest! {
    #[test]
    fn flux_invariants((tree, arrivals) in tree_and_arrivals()) {
        let r = compute_flux(&tree, &arrivals).unwrap();
        prop_assert_eq!(r.parked + r.exited, arrivals.total());
        prop_assert_eq!(r.exited, r.flux);
        prop_assert_eq!(r.flux, r.root_visits.saturating_sub(1));
        prop_assert_eq!(r.parked, r.occupancy.iter().filter(|&&o| o).count() as u64);
        prop_assert_eq!(r.all_parked(), r.root_visits <= 1);
    }

    #[test]
    fn sequential_matches_flux_on_random_trees((tree, arrivals) in tree_and_arrivals(), seed in any::<u64>()) {
        let mut cars = arrivals.car_list();
        // A pseudo-random order from the seed.
        let mut rng = stream(seed, 1);
        for i in (1..cars.len()).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            cars.swap(i, j);
        }
        let (seq, records) = simulate_sequential(&tree, &cars).unwrap();
        prop_assert_eq!(seq, compute_flux(&tree, &arrivals).unwrap());
        // A parked car sits on the path from its start to the root.
        for rec in records {
            if let treepark_core::parking::CarOutcome::Parked(at) = rec.outcome {
                let mut v = Some(rec.start);
                while v.is_some() && v != Some(at) {
                    v = tree.parent(v.unwrap());
                }
                prop_assert_eq!(v, Some(at));
            }
        }
    }
}

#[test]
fn poisson_arrival_moments() {
    let tree = BinaryTree::path(1000).unwrap();
    let (mut total, mut zeros, mut draws) = (0u64, 0u64, 0u64);
    for i in 0..1000 {
        let a = poisson_arrivals(&tree, 0.3, &mut stream(8, i)).unwrap();
        total += a.total();
        zeros += a.counts().iter().filter(|&&c| c == 0).count() as u64;
        draws += a.len() as u64;
    }
    let d = draws as f64;
    assert!((total as f64 / d - 0.3).abs() < 3.0 * (0.3 / d).sqrt());
    let p0 = (-0.3f64).exp();
    let f0 = zeros as f64 / d;
    assert!((f0 - p0).abs() < 3.0 * (p0 * (1.0 - p0) / d).sqrt(), "{f0}");
    assert_eq!(poisson_arrivals(&tree, 0.0, &mut stream(8, 0)).unwrap().total(), 0);
}

#[test]
fn multinomial_arrival_frequencies() {
    let two = BinaryTree::path(2).unwrap();
    let trials = 100_000u64;
    let mut first = 0u64;
    for i in 0..trials {
        let a = multinomial_arrivals(&two, 1, &mut stream(6, i));
        assert_eq!(a.total(), 1);
        first += a.counts()[0];
    }
    let f = first as f64 / trials as f64;
    assert!((f - 0.5).abs() < 3.0 * (0.25 / trials as f64).sqrt());
    let one = BinaryTree::leaf();
    assert_eq!(multinomial_arrivals(&one, 5, &mut stream(6, 0)).counts(), &[5]);
    assert_eq!(multinomial_arrivals(&two, 0, &mut stream(6, 0)).total(), 0);
}
