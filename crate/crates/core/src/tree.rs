//! Rooted binary trees with positioned children, and the random tree models
//! the parking process runs on.
//!
//! A node has a left and a right slot. Under BGW(2, 1/2) each slot is filled
//! independently with probability 1/2, so every positioned tree with `n`
//! nodes has probability `4^-n` and conditioning on size gives the uniform
//! law over the `Catalan(n)` positioned trees.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use rand::seq::index;
use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution};

/// Largest size accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_SIZE: usize = 12;

const NONE: u32 = u32::MAX;

/// Index of a node in a [`BinaryTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    /// Wraps a raw index.
    pub fn new(index: usize) -> Self {
        assert!(index < NONE as usize, "node index out of range");
        NodeId(index as u32)
    }

    /// Position in the node list.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Child slot of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// First slot.
    Left,
    /// Second slot.
    Right,
}

/// Links of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    parent: u32,
    left: u32,
    right: u32,
}

fn link(raw: u32) -> Option<NodeId> {
    (raw != NONE).then_some(NodeId(raw))
}

fn raw(link: Option<NodeId>) -> u32 {
    link.map_or(NONE, |id| id.0)
}

impl Node {
    /// Node with the given links.
    pub fn new(parent: Option<NodeId>, left: Option<NodeId>, right: Option<NodeId>) -> Self {
        Node { parent: raw(parent), left: raw(left), right: raw(right) }
    }

    /// Parent, `None` for the root.
    pub fn parent(&self) -> Option<NodeId> {
        link(self.parent)
    }

    /// Left child.
    pub fn left(&self) -> Option<NodeId> {
        link(self.left)
    }

    /// Right child.
    pub fn right(&self) -> Option<NodeId> {
        link(self.right)
    }

    /// Number of children, between 0 and 2.
    pub fn child_count(&self) -> usize {
        usize::from(self.left != NONE) + usize::from(self.right != NONE)
    }
}

/// Errors raised by the tree constructors and samplers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeError {
    /// A configuration field is out of range.
    InvalidConfig(&'static str),
    /// Trees must have at least one node.
    InvalidSize {
        /// Requested size.
        n: usize,
    },
    /// Enumeration was asked for more nodes than it supports.
    SizeTooLarge {
        /// Requested size.
        n: usize,
        /// Supported maximum.
        max: usize,
    },
    /// The sum-conditioning loop of the uniform sampler gave up.
    RejectionLimitExceeded {
        /// Number of attempts made.
        limit: u64,
    },
    /// An unconditioned tree outgrew the node cap.
    Truncated(Truncated),
    /// A link structure violates the tree invariants.
    Malformed(String),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::InvalidConfig(what) => write!(f, "invalid sampler config: {what}"),
            TreeError::InvalidSize { n } => write!(f, "invalid tree size {n}"),
            TreeError::SizeTooLarge { n, max } => {
                write!(f, "tree size {n} exceeds the enumeration limit {max}")
            }
            TreeError::RejectionLimitExceeded { limit } => {
                write!(f, "offspring-sum rejection exceeded {limit} attempts")
            }
            TreeError::Truncated(t) => t.fmt(f),
            TreeError::Malformed(why) => write!(f, "malformed tree: {why}"),
        }
    }
}

impl core::error::Error for TreeError {}

/// Marker returned when a Galton-Watson tree exceeds `max_nodes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncated {
    /// Cap that was hit.
    pub max_nodes: usize,
}

impl fmt::Display for Truncated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tree truncated at {} nodes", self.max_nodes)
    }
}

impl From<Truncated> for TreeError {
    fn from(t: Truncated) -> Self {
        TreeError::Truncated(t)
    }
}

/// Sampler settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Seed recorded alongside results; samplers read randomness only from the
    /// generator they are handed.
    pub seed: u64,
    /// Node cap for unconditioned growth.
    pub max_nodes: usize,
    /// Attempts allowed for the offspring-sum rejection loop.
    pub rejection_limit: u64,
}

impl SamplerConfig {
    /// Default node cap for unconditioned trees.
    pub const DEFAULT_MAX_NODES: usize = 10_000_000;
    /// Default attempt budget for conditioned sampling.
    pub const DEFAULT_REJECTION_LIMIT: u64 = 1_000_000;

    /// Validated config.
    pub fn new(seed: u64, max_nodes: usize, rejection_limit: u64) -> Result<Self, TreeError> {
        let cfg = SamplerConfig { seed, max_nodes, rejection_limit };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks `max_nodes >= 1` and `rejection_limit >= 1`.
    pub fn validate(&self) -> Result<(), TreeError> {
        if self.max_nodes == 0 {
            return Err(TreeError::InvalidConfig("max_nodes must be at least 1"));
        }
        if self.max_nodes >= NONE as usize {
            return Err(TreeError::InvalidConfig("max_nodes must fit in 32-bit indices"));
        }
        if self.rejection_limit == 0 {
            return Err(TreeError::InvalidConfig("rejection_limit must be at least 1"));
        }
        Ok(())
    }

    /// Same config with a different node cap.
    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            max_nodes: Self::DEFAULT_MAX_NODES,
            rejection_limit: Self::DEFAULT_REJECTION_LIMIT,
        }
    }
}

/// Rooted binary tree stored as a flat node list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTree {
    nodes: Vec<Node>,
    root: NodeId,
}

impl BinaryTree {
    /// The one-node tree.
    pub fn leaf() -> Self {
        BinaryTree { nodes: vec![Node::new(None, None, None)], root: NodeId(0) }
    }

    /// Path on `n` nodes where node `i + 1` is the left child of node `i`.
    /// Node 0 is the root, so cars drive from high indices towards 0.
    pub fn path(n: usize) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::InvalidSize { n });
        }
        let slots: Vec<(bool, bool)> = (0..n).map(|i| (i + 1 < n, false)).collect();
        Self::from_preorder_slots(&slots)
    }

    /// Builds a tree from explicit links, checking every invariant.
    pub fn from_links(nodes: Vec<Node>, root: NodeId) -> Result<Self, TreeError> {
        let tree = BinaryTree { nodes, root };
        tree.validate()?;
        Ok(tree)
    }

    /// Builds a tree from its preorder (left before right) sequence of
    /// filled child slots. Node `i` of the result is the `i`-th entry.
    pub fn from_preorder_slots(slots: &[(bool, bool)]) -> Result<Self, TreeError> {
        if slots.is_empty() {
            return Err(TreeError::InvalidSize { n: 0 });
        }
        let mut nodes = Vec::with_capacity(slots.len());
        let mut pending: Vec<(u32, Side)> = Vec::new();
        for (i, &(left, right)) in slots.iter().enumerate() {
            let id = i as u32;
            let parent = if i == 0 {
                NONE
            } else {
                let (parent, side) = pending.pop().ok_or_else(|| {
                    TreeError::Malformed(alloc::format!("slot sequence closes before entry {i}"))
                })?;
                let p: &mut Node = &mut nodes[parent as usize];
                match side {
                    Side::Left => p.left = id,
                    Side::Right => p.right = id,
                }
                parent
            };
            nodes.push(Node { parent, left: NONE, right: NONE });
            if right {
                pending.push((id, Side::Right));
            }
            if left {
                pending.push((id, Side::Left));
            }
        }
        if !pending.is_empty() {
            return Err(TreeError::Malformed(alloc::format!(
                "{} child slots left unfilled",
                pending.len()
            )));
        }
        Ok(BinaryTree { nodes, root: NodeId(0) })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; a tree has a root.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The root.
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Node record.
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    /// All node records, indexed by [`NodeId::index`].
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Parent of `id`.
    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).parent()
    }

    /// Children of `id`, left first.
    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let n = self.node(id);
        n.left().into_iter().chain(n.right())
    }

    /// Child count of `id`.
    pub fn child_count(&self, id: NodeId) -> usize {
        self.node(id).child_count()
    }

    /// Nodes in post-order, children before parents. Iterative, so deep
    /// trees do not exhaust the call stack.
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend(self.children(id));
        }
        // Reversed root-first order lists every child before its parent.
        order.reverse();
        order
    }

    /// Depth of every node, root at 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            for c in self.children(id) {
                depth[c.index()] = depth[id.index()] + 1;
                stack.push(c);
            }
        }
        depth
    }

    /// Preorder shape code, one character per node: `0` leaf, `L` left child
    /// only, `R` right child only, `B` both. Two trees are equal as positioned
    /// shapes exactly when their codes agree.
    pub fn shape_code(&self) -> String {
        let mut code = String::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            code.push(match (n.left(), n.right()) {
                (None, None) => '0',
                (Some(_), None) => 'L',
                (None, Some(_)) => 'R',
                (Some(_), Some(_)) => 'B',
            });
            stack.extend(n.right());
            stack.extend(n.left());
        }
        code
    }

    /// Checks the structural invariants: a unique parentless root, parent and
    /// child links that agree, and every node reachable from the root.
    pub fn validate(&self) -> Result<(), TreeError> {
        let n = self.nodes.len();
        let bad = |why: String| Err(TreeError::Malformed(why));
        if n == 0 {
            return bad("no nodes".into());
        }
        if n >= NONE as usize {
            return bad("too many nodes for 32-bit indices".into());
        }
        if self.root.index() >= n {
            return bad(alloc::format!("root {} out of range", self.root));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let id = i as u32;
            match node.parent {
                NONE if id != self.root.0 => {
                    return bad(alloc::format!("node {i} has no parent but is not the root"))
                }
                NONE => {}
                p if p as usize >= n => return bad(alloc::format!("node {i} parent out of range")),
                p => {
                    let pn = &self.nodes[p as usize];
                    if pn.left != id && pn.right != id {
                        return bad(alloc::format!("node {i} is not a child of its parent {p}"));
                    }
                }
            }
            if id == self.root.0 && node.parent != NONE {
                return bad("root has a parent".into());
            }
            for c in [node.left, node.right] {
                if c == NONE {
                    continue;
                }
                if c as usize >= n {
                    return bad(alloc::format!("node {i} child out of range"));
                }
                if self.nodes[c as usize].parent != id {
                    return bad(alloc::format!("child {c} of node {i} points elsewhere"));
                }
            }
            if node.left != NONE && node.left == node.right {
                return bad(alloc::format!("node {i} uses one child for both slots"));
            }
        }
        // Links agree locally; reachability rules out cycles detached from the root.
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        let mut count = 0usize;
        while let Some(id) = stack.pop() {
            if core::mem::replace(&mut seen[id.index()], true) {
                return bad(alloc::format!("node {id} reached twice"));
            }
            count += 1;
            stack.extend(self.children(id));
        }
        if count != n {
            return bad(alloc::format!("{} nodes unreachable from the root", n - count));
        }
        Ok(())
    }

    fn push(&mut self, parent: NodeId, side: Side) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { parent: parent.0, left: NONE, right: NONE });
        let p = &mut self.nodes[parent.index()];
        match side {
            Side::Left => p.left = id.0,
            Side::Right => p.right = id.0,
        }
        id
    }

    /// Copies `sub` into this tree, hanging its root from `parent`'s `side`
    /// slot. Returns the new id of `sub`'s root.
    fn graft(&mut self, parent: NodeId, side: Side, sub: &BinaryTree) -> NodeId {
        let offset = self.nodes.len() as u32;
        let shift = |raw: u32| if raw == NONE { NONE } else { raw + offset };
        self.nodes.extend(sub.nodes.iter().map(|n| Node {
            parent: shift(n.parent),
            left: shift(n.left),
            right: shift(n.right),
        }));
        let new_root = NodeId(sub.root.0 + offset);
        self.nodes[new_root.index()].parent = parent.0;
        let p = &mut self.nodes[parent.index()];
        match side {
            Side::Left => p.left = new_root.0,
            Side::Right => p.right = new_root.0,
        }
        new_root
    }
}

/// Draws the two child slots of a BGW(2, 1/2) node: each filled independently
/// with probability 1/2, giving Bin(2, 1/2) children with a uniformly placed
/// single child.
#[inline]
pub(crate) fn draw_slots<R: RngCore + ?Sized>(rng: &mut R) -> (bool, bool) {
    let bits = rng.next_u32();
    (bits & 1 != 0, bits & 2 != 0)
}

/// Samples an unconditioned BGW(2, 1/2) tree, nodes numbered in preorder.
///
/// Returns [`Truncated`] as soon as the tree would need more than
/// `cfg.max_nodes` nodes.
pub fn sample_bgw_tree<R: RngCore + ?Sized>(
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<BinaryTree, Truncated> {
    let cap = cfg.max_nodes;
    let mut tree = BinaryTree::leaf();
    let mut pending: Vec<(NodeId, Side)> = Vec::new();
    let (l, r) = draw_slots(rng);
    if r {
        pending.push((tree.root, Side::Right));
    }
    if l {
        pending.push((tree.root, Side::Left));
    }
    while let Some((parent, side)) = pending.pop() {
        if tree.len() >= cap {
            return Err(Truncated { max_nodes: cap });
        }
        let id = tree.push(parent, side);
        let (l, r) = draw_slots(rng);
        if r {
            pending.push((id, Side::Right));
        }
        if l {
            pending.push((id, Side::Left));
        }
    }
    Ok(tree)
}

/// Index of the unique cyclic shift of an offspring sequence that is a valid
/// Łukasiewicz path (partial sums of `c_i - 1` stay nonnegative until the last
/// step). The counts must sum to `len - 1`.
///
/// It is the first position where the prefix sums reach their minimum.
pub fn lukasiewicz_rotation(counts: &[u8]) -> usize {
    let mut sum = 0i64;
    let mut min = 0i64;
    let mut at = 0usize;
    // Prefix sum S_{j+1} after consuming counts[j]; S_n = -1 is never a start.
    for (j, &c) in counts.iter().enumerate().take(counts.len().saturating_sub(1)) {
        sum += i64::from(c) - 1;
        if sum < min {
            min = sum;
            at = j + 1;
        }
    }
    at
}

/// Samples a uniform positioned binary tree with exactly `n` nodes.
///
/// The `2n` child slots of `n` BGW(2, 1/2) nodes are i.i.d. fair coins, so
/// conditioning the offspring sum on `n - 1` makes the set of filled slots a
/// uniform `(n - 1)`-subset. The sum is drawn and rejected until it hits
/// `n - 1`, the slots are drawn given the sum, and the cycle lemma picks the
/// rotation that encodes a tree.
pub fn sample_uniform_tree<R: RngCore + ?Sized>(
    n: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<BinaryTree, TreeError> {
    if n == 0 {
        return Err(TreeError::InvalidSize { n });
    }
    cfg.validate()?;
    let slots_total = 2 * n as u64;
    let sum_law = Binomial::new(slots_total, 0.5).expect("p = 1/2 is a valid binomial parameter");
    let mut attempts = 0u64;
    loop {
        if attempts == cfg.rejection_limit {
            return Err(TreeError::RejectionLimitExceeded { limit: cfg.rejection_limit });
        }
        attempts += 1;
        if sum_law.sample(rng) == n as u64 - 1 {
            break;
        }
    }
    let mut filled = vec![false; 2 * n];
    for i in index::sample(rng, 2 * n, n - 1) {
        filled[i] = true;
    }
    let counts: Vec<u8> =
        filled.chunks_exact(2).map(|s| u8::from(s[0]) + u8::from(s[1])).collect();
    let start = lukasiewicz_rotation(&counts);
    let slots: Vec<(bool, bool)> =
        (0..n).map(|i| (start + i) % n).map(|j| (filled[2 * j], filled[2 * j + 1])).collect();
    let tree = BinaryTree::from_preorder_slots(&slots);
    Ok(tree.expect("cycle-lemma rotation must encode a tree"))
}

/// All positioned binary trees with `n` nodes, each paired with its
/// BGW(2, 1/2) probability `4^-n`. Trees come in a fixed canonical order and
/// are pairwise distinct.
pub fn enumerate_trees(n: usize) -> Result<Vec<(BinaryTree, Ratio<u64>)>, TreeError> {
    if n == 0 {
        return Err(TreeError::InvalidSize { n });
    }
    if n > MAX_ENUMERATION_SIZE {
        return Err(TreeError::SizeTooLarge { n, max: MAX_ENUMERATION_SIZE });
    }
    // by_size[m] holds the preorder slot sequences of all m-node trees.
    let mut by_size: Vec<Vec<Vec<(bool, bool)>>> = vec![vec![Vec::new()]];
    for m in 1..=n {
        let mut shapes = Vec::new();
        for left in 0..m {
            let right = m - 1 - left;
            for l in &by_size[left] {
                for r in &by_size[right] {
                    let mut seq = Vec::with_capacity(m);
                    seq.push((left > 0, right > 0));
                    seq.extend_from_slice(l);
                    seq.extend_from_slice(r);
                    shapes.push(seq);
                }
            }
        }
        by_size.push(shapes);
    }
    let weight = Ratio::new(1u64, 4u64.pow(n as u32));
    by_size[n]
        .iter()
        .map(|seq| BinaryTree::from_preorder_slots(seq).map(|t| (t, weight)))
        .collect()
}

/// Truncated spine of the infinite local limit: a path `S_0 .. S_H` rooted at
/// `S_0` where each spine vertex carries zero or one independent BGW(2, 1/2)
/// tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineSegment {
    tree: BinaryTree,
    spine: Vec<NodeId>,
    attached: Vec<Option<NodeId>>,
}

impl SpineSegment {
    /// Spine depth `H`; the spine has `H + 1` vertices.
    pub fn depth(&self) -> usize {
        self.spine.len() - 1
    }

    /// Spine vertices, root first.
    pub fn spine(&self) -> &[NodeId] {
        &self.spine
    }

    /// Root of the tree attached to spine vertex `h`, if any.
    pub fn attached(&self, h: usize) -> Option<NodeId> {
        self.attached[h]
    }

    /// Spine and attached trees as one tree. `S_{h+1}` is the left child of
    /// `S_h`; an attached tree hangs from the right slot.
    pub fn tree(&self) -> &BinaryTree {
        &self.tree
    }

    /// The attached tree at `h` as a standalone tree.
    pub fn attached_tree(&self, h: usize) -> Option<BinaryTree> {
        let root = self.attached[h]?;
        let mut slots = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let n = self.tree.node(id);
            slots.push((n.left().is_some(), n.right().is_some()));
            stack.extend(n.right());
            stack.extend(n.left());
        }
        Some(BinaryTree::from_preorder_slots(&slots).expect("subtree of a valid tree"))
    }
}

/// Builds a spine segment of depth `depth`. Each spine vertex independently
/// receives a size-biased offspring count in {0, 1} with probability 1/2 each,
/// and each such offspring roots a fresh BGW(2, 1/2) tree.
pub fn build_spine_segment<R: RngCore + ?Sized>(
    depth: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<SpineSegment, TreeError> {
    if depth == 0 {
        return Err(TreeError::InvalidSize { n: 0 });
    }
    let mut tree = BinaryTree::leaf();
    let mut spine = Vec::with_capacity(depth + 1);
    spine.push(tree.root);
    for h in 1..=depth {
        let id = tree.push(spine[h - 1], Side::Left);
        spine.push(id);
    }
    let mut attached = Vec::with_capacity(depth + 1);
    for &s in &spine {
        let root = if rng.random::<bool>() {
            let sub = sample_bgw_tree(cfg, rng)?;
            Some(tree.graft(s, Side::Right, &sub))
        } else {
            None
        };
        attached.push(root);
    }
    Ok(SpineSegment { tree, spine, attached })
}
