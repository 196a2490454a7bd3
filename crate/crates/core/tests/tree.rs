use std::collections::HashMap;

use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use treepark_core::rng::stream;
use treepark_core::tree::{
    build_spine_segment, enumerate_trees, lukasiewicz_rotation, sample_bgw_tree, sample_uniform_tree,
};
use treepark_core::SamplerConfig;

fn catalan(n: u64) -> u64 {
    (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// Valid Łukasiewicz path: partial sums of `c - 1` stay >= 0 before the end.
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

fn counts_with_sum() -> impl Strategy<Value = Vec<u8>> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::vec(0u8..=2, n).prop_filter("sum n - 1", move |c| {
            c.iter().map(|&x| usize::from(x)).sum::<usize>() + 1 == n
        })
    })
}

proptest! {
    #[test]
    fn exactly_one_rotation_is_a_tree(counts in counts_with_sum()) {
        let n = counts.len();
        let valid: Vec<usize> = (0..n)
            .filter(|&k| {
                let rotated: Vec<u8> = counts[k..].iter().chain(&counts[..k]).copied().collect();
                is_lukasiewicz(&rotated)
            })
            .collect();
        prop_assert_eq!(valid, vec![lukasiewicz_rotation(&counts)]);
    }

    #[test]
    fn uniform_trees_are_well_formed(n in 1usize..300, seed in any::<u64>()) {
        let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
        let tree = sample_uniform_tree(n, &cfg, &mut stream(seed, 0)).unwrap();
        prop_assert_eq!(tree.len(), n);
        prop_assert!(tree.validate().is_ok());
    }

    #[test]
    fn bgw_trees_are_well_formed(seed in any::<u64>()) {
        let cfg = SamplerConfig { seed, max_nodes: 100_000, ..SamplerConfig::default() };
        if let Ok(tree) = sample_bgw_tree(&cfg, &mut stream(seed, 0)) {
            prop_assert!(tree.validate().is_ok());
            prop_assert!(tree.nodes().iter().all(|n| n.child_count() <= 2));
        }
    }
}

#[test]
fn enumeration_counts_and_weights() {
    assert_eq!(enumerate_trees(1).unwrap().len(), 1);
    assert_eq!(enumerate_trees(2).unwrap().len(), 2);
    for n in 1..=8 {
        let all = enumerate_trees(n).unwrap();
        assert_eq!(all.len() as u64, catalan(n as u64));
        let w = num_rational::Ratio::new(1u64, 4u64.pow(n as u32));
        assert!(all.iter().all(|(t, weight)| *weight == w && t.validate().is_ok()));
    }
    assert!(enumerate_trees(13).is_err());
}

fn chi_square_uniform(n: usize, samples: u64, seed: u64) -> (f64, f64) {
    let shapes: HashMap<String, usize> =
        enumerate_trees(n).unwrap().iter().enumerate().map(|(i, (t, _))| (t.shape_code(), i)).collect();
    let mut counts = vec![0u64; shapes.len()];
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    for i in 0..samples {
        let t = sample_uniform_tree(n, &cfg, &mut stream(seed, i)).unwrap();
        counts[shapes[&t.shape_code()]] += 1;
    }
    let expected = samples as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    (stat, critical)
}

#[test]
fn uniform_sampler_is_uniform_up_to_six_nodes() {
    for n in 2..=6 {
        let (stat, critical) = chi_square_uniform(n, 100_000, 40 + n as u64);
        assert!(stat < critical, "n = {n}: chi-square {stat} >= {critical}");
    }
}

#[test]
fn two_node_trees_split_evenly() {
    let cfg = SamplerConfig::default();
    let trials = 100_000u64;
    let left = (0..trials)
        .filter(|&i| sample_uniform_tree(2, &cfg, &mut stream(3, i)).unwrap().shape_code() == "L0")
        .count() as f64;
    let se = (0.25 / trials as f64).sqrt();
    assert!((left / trials as f64 - 0.5).abs() < 3.0 * se);
}

#[test]
fn bgw_offspring_and_size_laws() {
    let cfg = SamplerConfig { seed: 5, max_nodes: 1 << 20, ..SamplerConfig::default() };
    let trials = 100_000u64;
    let mut root_slots = [0u64; 4];
    let mut sizes = [0u64; 7];
    let mut completed = 0u64;
    for i in 0..trials {
        let Ok(tree) = sample_bgw_tree(&cfg, &mut stream(5, i)) else { continue };
        completed += 1;
        if tree.len() <= 6 {
            sizes[tree.len()] += 1;
        }
        let root = tree.node(tree.root());
        root_slots[usize::from(root.left().is_some()) + 2 * usize::from(root.right().is_some())] += 1;
    }
    // The root's draw is the only one not conditioned on the tree completing.
    // Slot patterns (none, left, right, both) are equally likely.
    for (k, &c) in root_slots.iter().enumerate() {
        let f = c as f64 / completed as f64;
        let se = (0.1875 / completed as f64).sqrt();
        assert!((f - 0.25).abs() < 3.0 * se, "slots {k}: {f}");
    }
    // P(size = k) = Catalan(k) / 4^k.
    for k in 1..=6 {
        let p = catalan(k as u64) as f64 / 4f64.powi(k as i32);
        let f = sizes[k] as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() < 3.0 * se, "size {k}: {f} vs {p}");
    }
    assert!(completed > trials * 998 / 1000);
}

#[test]
fn spine_attachments_are_fair_coins() {
    let cfg = SamplerConfig { seed: 2, max_nodes: 1 << 20, ..SamplerConfig::default() };
    let (mut vertices, mut attached) = (0u64, 0u64);
    let mut i = 0;
    while vertices < 100_000 {
        i += 1;
        let Ok(seg) = build_spine_segment(1, &cfg, &mut stream(2, i)) else { continue };
        assert_eq!(seg.spine().len(), 2);
        for h in 0..=seg.depth() {
            vertices += 1;
            if let Some(t) = seg.attached_tree(h) {
                attached += 1;
                assert!(t.validate().is_ok());
            }
        }
    }
    // Mean of the size-biased offspring law, 1/2.
    let f = attached as f64 / vertices as f64;
    let se = (0.25 / vertices as f64).sqrt();
    // Segments with a truncated attachment (about 0.1%) are discarded.
    assert!((f - 0.5).abs() < 3.0 * se, "{f}");
}
