//! The parking process.
//!
//! [`compute_flux`] is the engine: one post-order pass applying
//! `visits(v) = A_v + sum over children c of (visits(c) - 1)^+`.
//! [`simulate_sequential`] drives cars one at a time and only exists to check
//! the engine; the final occupied set and the flux do not depend on the order
//! in which cars arrive.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Poisson};

use crate::tree::{BinaryTree, NodeId};

/// Largest path length accepted by [`count_line_parking_functions`].
pub const MAX_LINE_LENGTH: usize = 7;

/// Errors from the parking routines.
#[derive(Clone, Debug, PartialEq)]
pub enum ParkingError {
    /// Arrival vector and tree disagree on the number of nodes.
    SizeMismatch {
        /// Length of the arrival vector.
        arrivals: usize,
        /// Node count of the tree.
        nodes: usize,
    },
    /// A car starts at a node that does not exist.
    InvalidNode {
        /// Offending car.
        car: u64,
        /// Its start index.
        node: usize,
    },
    /// A line preference is outside `1..=n`.
    PrefOutOfRange {
        /// The preference.
        pref: usize,
        /// Path length.
        n: usize,
    },
    /// Brute-force counting was asked for too long a path.
    SizeTooLarge {
        /// Requested length.
        n: usize,
        /// Supported maximum.
        max: usize,
    },
    /// Intensity is negative or not finite.
    InvalidAlpha(f64),
    /// Some other argument is out of range.
    InvalidArgument(&'static str),
}

impl fmt::Display for ParkingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParkingError::SizeMismatch { arrivals, nodes } => {
                write!(f, "{arrivals} arrival counts for a tree with {nodes} nodes")
            }
            ParkingError::InvalidNode { car, node } => write!(f, "car {car} starts at missing node {node}"),
            ParkingError::PrefOutOfRange { pref, n } => write!(f, "preference {pref} outside 1..={n}"),
            ParkingError::SizeTooLarge { n, max } => write!(f, "path length {n} exceeds {max}"),
            ParkingError::InvalidAlpha(a) => write!(f, "arrival intensity {a} must be finite and >= 0"),
            ParkingError::InvalidArgument(what) => f.write_str(what),
        }
    }
}

impl core::error::Error for ParkingError {}

/// Number of cars arriving at each node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrivals {
    counts: Vec<u64>,
    total: u64,
}

impl Arrivals {
    /// Wraps per-node counts, indexed like the tree's node list.
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Arrivals { counts, total }
    }

    /// No cars on `n` nodes.
    pub fn zeros(n: usize) -> Self {
        Arrivals { counts: vec![0; n], total: 0 }
    }

    /// Per-node counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count at one node.
    pub fn get(&self, id: NodeId) -> u64 {
        self.counts[id.index()]
    }

    /// Adds one car at `id`.
    pub fn add(&mut self, id: NodeId) {
        self.counts[id.index()] += 1;
        self.total += 1;
    }

    /// Total number of cars.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of nodes covered.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    /// True when there are no nodes.
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// One `(car id, start node)` entry per car, grouped by node in index
    /// order. Input for [`simulate_sequential`].
    pub fn car_list(&self) -> Vec<(u64, NodeId)> {
        let mut cars = Vec::with_capacity(self.total as usize);
        for (i, &c) in self.counts.iter().enumerate() {
            for _ in 0..c {
                cars.push((cars.len() as u64, NodeId::new(i)));
            }
        }
        cars
    }
}

/// Po(alpha) sampler that accepts `alpha = 0`.
#[derive(Clone, Copy, Debug)]
pub struct PoissonSampler(Option<Poisson<f64>>);

impl PoissonSampler {
    /// Sampler for intensity `alpha`.
    pub fn new(alpha: f64) -> Result<Self, ParkingError> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(ParkingError::InvalidAlpha(alpha));
        }
        if alpha == 0.0 {
            return Ok(PoissonSampler(None));
        }
        Poisson::new(alpha).map(|p| PoissonSampler(Some(p))).map_err(|_| ParkingError::InvalidAlpha(alpha))
    }

    /// One draw.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.0 {
            None => 0,
            Some(p) => p.sample(rng) as u64,
        }
    }
}

/// I.i.d. Po(alpha) arrivals at every node, drawn in node-index order.
pub fn poisson_arrivals<R: RngCore + ?Sized>(
    tree: &BinaryTree,
    alpha: f64,
    rng: &mut R,
) -> Result<Arrivals, ParkingError> {
    let law = PoissonSampler::new(alpha)?;
    Ok(Arrivals::new((0..tree.len()).map(|_| law.sample(rng)).collect()))
}

/// `m` cars, each at an independent uniform node.
pub fn multinomial_arrivals<R: RngCore + ?Sized>(tree: &BinaryTree, m: u64, rng: &mut R) -> Arrivals {
    let n = tree.len();
    let mut counts = vec![0u64; n];
    for _ in 0..m {
        counts[rng.random_range(0..n)] += 1;
    }
    Arrivals { counts, total: m }
}

/// Outcome of parking every car on a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxResult {
    /// Cars that reach the root, `X`.
    pub root_visits: u64,
    /// Cars leaving through the root, `(X - 1)^+`.
    pub flux: u64,
    /// Cars that found a space.
    pub parked: u64,
    /// Cars that left the tree; equal to `flux`.
    pub exited: u64,
    /// Occupied flag per node.
    pub occupancy: Vec<bool>,
}

impl FluxResult {
    /// Whether every car parked.
    pub fn all_parked(&self) -> bool {
        self.exited == 0
    }
}

/// Runs the parking process by the root-visit recursion in O(n).
pub fn compute_flux(tree: &BinaryTree, arrivals: &Arrivals) -> Result<FluxResult, ParkingError> {
    if arrivals.len() != tree.len() {
        return Err(ParkingError::SizeMismatch { arrivals: arrivals.len(), nodes: tree.len() });
    }
    let mut visits = arrivals.counts.clone();
    for v in tree.post_order() {
        let overflow = visits[v.index()].saturating_sub(1);
        if let Some(p) = tree.parent(v) {
            visits[p.index()] += overflow;
        }
    }
    let occupancy: Vec<bool> = visits.iter().map(|&x| x >= 1).collect();
    let parked = occupancy.iter().filter(|&&o| o).count() as u64;
    let root_visits = visits[tree.root().index()];
    let flux = root_visits.saturating_sub(1);
    Ok(FluxResult { root_visits, flux, parked, exited: flux, occupancy })
}

/// Where a car ended up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarOutcome {
    /// Parked at this node.
    Parked(NodeId),
    /// Left through the root.
    Exited,
}

/// One car's journey.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CarRecord {
    /// Car id as given.
    pub car: u64,
    /// Node the car arrived at.
    pub start: NodeId,
    /// Final position.
    pub outcome: CarOutcome,
}

/// Parks cars strictly in list order: each walks from its start node towards
/// the root and takes the first free node, or exits.
pub fn simulate_sequential(
    tree: &BinaryTree,
    cars: &[(u64, NodeId)],
) -> Result<(FluxResult, Vec<CarRecord>), ParkingError> {
    let n = tree.len();
    if let Some(&(car, node)) = cars.iter().find(|(_, node)| node.index() >= n) {
        return Err(ParkingError::InvalidNode { car, node: node.index() });
    }
    let root = tree.root();
    let mut occupancy = vec![false; n];
    let mut records = Vec::with_capacity(cars.len());
    let (mut root_visits, mut parked, mut exited) = (0u64, 0u64, 0u64);
    for &(car, start) in cars {
        let mut at = Some(start);
        let outcome = loop {
            match at {
                None => break CarOutcome::Exited,
                Some(v) => {
                    if v == root {
                        root_visits += 1;
                    }
                    if !occupancy[v.index()] {
                        occupancy[v.index()] = true;
                        break CarOutcome::Parked(v);
                    }
                    at = tree.parent(v);
                }
            }
        };
        match outcome {
            CarOutcome::Parked(_) => parked += 1,
            CarOutcome::Exited => exited += 1,
        }
        records.push(CarRecord { car, start, outcome });
    }
    let result = FluxResult { root_visits, flux: exited, parked, exited, occupancy };
    Ok((result, records))
}

/// Whether cars with preferred spaces `prefs` (in arrival order) all park on
/// the path `1..=n` with edges directed towards space 1. A car preferring `i`
/// tries `i, i - 1, ..., 1` and leaves if all are taken.
pub fn is_line_parking_function(prefs: &[usize], n: usize) -> Result<bool, ParkingError> {
    if n == 0 {
        return Err(ParkingError::InvalidArgument("path length must be positive"));
    }
    if let Some(&pref) = prefs.iter().find(|&&p| p == 0 || p > n) {
        return Err(ParkingError::PrefOutOfRange { pref, n });
    }
    let mut taken = vec![false; n + 1];
    for &p in prefs {
        match (1..=p).rev().find(|&s| !taken[s]) {
            Some(s) => taken[s] = true,
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Arrivals on [`BinaryTree::path`]`(n)` for line preferences: space `i` is
/// node `i - 1`.
pub fn arrivals_from_prefs(prefs: &[usize], n: usize) -> Result<Arrivals, ParkingError> {
    let mut counts = vec![0u64; n];
    for &p in prefs {
        if p == 0 || p > n {
            return Err(ParkingError::PrefOutOfRange { pref: p, n });
        }
        counts[p - 1] += 1;
    }
    Ok(Arrivals::new(counts))
}

/// Konheim-Weiss count `(n + 1 - m)(n + 1)^(m - 1)` of parking functions of
/// `m` cars on `n` spaces.
pub fn line_parking_formula(n: u64, m: u64) -> u64 {
    (n + 1 - m) * (n + 1).pow(m as u32 - 1)
}

/// Counts parking functions of `m` cars on `n` spaces twice: by running all
/// `n^m` preference sequences through [`is_line_parking_function`], and by
/// [`line_parking_formula`]. Returns `(brute_count, formula_count)`.
pub fn count_line_parking_functions(n: usize, m: usize) -> Result<(u64, u64), ParkingError> {
    if n > MAX_LINE_LENGTH {
        return Err(ParkingError::SizeTooLarge { n, max: MAX_LINE_LENGTH });
    }
    if m == 0 || m > n {
        return Err(ParkingError::InvalidArgument("need 1 <= m <= n"));
    }
    let mut prefs = vec![1usize; m];
    let mut brute = 0u64;
    loop {
        if is_line_parking_function(&prefs, n)? {
            brute += 1;
        }
        // Odometer over {1..n}^m.
        let mut i = 0;
        loop {
            if i == m {
                return Ok((brute, line_parking_formula(n as u64, m as u64)));
            }
            if prefs[i] < n {
                prefs[i] += 1;
                break;
            }
            prefs[i] = 1;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::tree::{sample_uniform_tree, SamplerConfig};

    fn cherry() -> BinaryTree {
        BinaryTree::from_preorder_slots(&[(true, true), (false, false), (false, false)]).unwrap()
    }

    #[test]
    fn single_node_cases() {
        let leaf = BinaryTree::leaf();
        let r = compute_flux(&leaf, &Arrivals::new(vec![0])).unwrap();
        assert_eq!((r.root_visits, r.flux, r.parked), (0, 0, 0));
        let r = compute_flux(&leaf, &Arrivals::new(vec![3])).unwrap();
        assert_eq!((r.root_visits, r.flux, r.parked, r.exited), (3, 2, 1, 2));
    }

    #[test]
    fn cherry_instance() {
        // Node 0 root, node 1 left leaf, node 2 right leaf.
        let t = cherry();
        let a = Arrivals::new(vec![1, 2, 0]);
        let r = compute_flux(&t, &a).unwrap();
        assert_eq!((r.root_visits, r.flux, r.parked), (2, 1, 2));
        assert_eq!(r.occupancy, vec![true, true, false]);
        let (s, _) = simulate_sequential(&t, &a.car_list()).unwrap();
        assert_eq!(s, r);
    }

    #[test]
    fn path_instance_parks_three() {
        // Root with a left child which has a left child; cars (root:1, mid:2, leaf:0).
        let t = BinaryTree::path(3).unwrap();
        let r = compute_flux(&t, &Arrivals::new(vec![1, 2, 0])).unwrap();
        assert_eq!((r.root_visits, r.flux, r.parked), (2, 1, 2));
        let r = compute_flux(&t, &Arrivals::new(vec![1, 0, 2])).unwrap();
        assert_eq!((r.root_visits, r.flux, r.parked), (1, 0, 3));
    }

    #[test]
    fn sequential_small_cases() {
        let leaf = BinaryTree::leaf();
        let (r, rec) = simulate_sequential(&leaf, &[(9, leaf.root())]).unwrap();
        assert_eq!((r.flux, r.parked), (0, 1));
        assert_eq!(rec[0].outcome, CarOutcome::Parked(leaf.root()));
        let t = BinaryTree::path(2).unwrap();
        let leaf_node = NodeId::new(1);
        let (r, rec) = simulate_sequential(&t, &[(0, leaf_node), (1, leaf_node)]).unwrap();
        assert_eq!((r.flux, r.parked), (0, 2));
        assert_eq!(rec[0].outcome, CarOutcome::Parked(leaf_node));
        assert_eq!(rec[1].outcome, CarOutcome::Parked(t.root()));
        assert_eq!(
            simulate_sequential(&t, &[(4, NodeId::new(2))]).unwrap_err(),
            ParkingError::InvalidNode { car: 4, node: 2 }
        );
    }

    #[test]
    fn every_order_of_the_cherry_instance_agrees() {
        let t = cherry();
        let expected = compute_flux(&t, &Arrivals::new(vec![1, 2, 0])).unwrap();
        let cars = [(0, NodeId::new(0)), (1, NodeId::new(1)), (2, NodeId::new(1))];
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let list: Vec<_> = order.iter().map(|&i| cars[i]).collect();
            let (r, records) = simulate_sequential(&t, &list).unwrap();
            assert_eq!(r, expected);
            for rec in records {
                if let CarOutcome::Parked(v) = rec.outcome {
                    // Parked node lies on the start-to-root path.
                    let mut u = Some(rec.start);
                    while u != Some(v) {
                        u = t.parent(u.unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn size_mismatch() {
        assert_eq!(
            compute_flux(&BinaryTree::leaf(), &Arrivals::zeros(2)).unwrap_err(),
            ParkingError::SizeMismatch { arrivals: 2, nodes: 1 }
        );
    }

    #[test]
    fn line_parking_functions() {
        assert!(is_line_parking_function(&[1], 1).unwrap());
        assert!(is_line_parking_function(&[2, 2], 2).unwrap());
        assert!(!is_line_parking_function(&[2, 2, 2], 2).unwrap());
        assert!(!is_line_parking_function(&[1, 1], 2).unwrap());
        assert_eq!(
            is_line_parking_function(&[3], 2).unwrap_err(),
            ParkingError::PrefOutOfRange { pref: 3, n: 2 }
        );
        assert!(is_line_parking_function(&[0], 2).is_err());
    }

    #[test]
    fn konheim_weiss_examples() {
        assert_eq!(count_line_parking_functions(1, 1).unwrap(), (1, 1));
        assert_eq!(count_line_parking_functions(2, 2).unwrap(), (3, 3));
        assert_eq!(count_line_parking_functions(3, 3).unwrap(), (16, 16));
        assert!(matches!(count_line_parking_functions(8, 2), Err(ParkingError::SizeTooLarge { .. })));
        assert!(count_line_parking_functions(3, 4).is_err());
    }

    #[test]
    fn path_engine_matches_line_parking() {
        for n in 1..=4usize {
            let t = BinaryTree::path(n).unwrap();
            for m in 0..=n + 1 {
                let total = n.pow(m as u32);
                for code in 0..total {
                    let prefs: Vec<usize> = (0..m).map(|k| (code / n.pow(k as u32)) % n + 1).collect();
                    let a = arrivals_from_prefs(&prefs, n).unwrap();
                    let all = compute_flux(&t, &a).unwrap().all_parked();
                    assert_eq!(all, is_line_parking_function(&prefs, n).unwrap(), "{prefs:?}");
                }
            }
        }
    }

    #[test]
    fn arrival_samplers() {
        let mut r = rng::stream(2, 0);
        let t = sample_uniform_tree(50, &SamplerConfig::default(), &mut r).unwrap();
        let a = poisson_arrivals(&t, 0.0, &mut r).unwrap();
        assert_eq!(a.total(), 0);
        assert!(poisson_arrivals(&t, -1.0, &mut r).is_err());
        assert_eq!(multinomial_arrivals(&t, 0, &mut r).total(), 0);
        let a = multinomial_arrivals(&BinaryTree::leaf(), 5, &mut r);
        assert_eq!(a.counts(), &[5]);
        let a = multinomial_arrivals(&t, 77, &mut r);
        assert_eq!(a.total(), 77);
        assert_eq!(a.counts().iter().sum::<u64>(), 77);
    }
}
