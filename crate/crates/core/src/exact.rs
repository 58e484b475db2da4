//! Exact freshness of node sets on arbitrary networks.
//!
//! The freshness of a set `S` (fresh while any member is fresh) satisfies
//!
//! ```text
//!            λs(S) + Σ_{i ∈ N(S)} λi(S) · F(S ∪ {i})
//!   F(S) = ------------------------------------------
//!            λe + λs(S) + Σ_{i ∈ N(S)} λi(S)
//! ```
//!
//! Every set on the right is a strict superset of `S`, so the dependencies
//! form a DAG rooted at `S` and ending at sets with no updating neighbors.
//! Evaluation is depth-first with memoization; only supersets reachable from
//! the query by adding updating neighbors are ever visited.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::network::{GossipNetwork, NodeId, NodeSet};

/// Long-run average binary freshness, a probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Freshness(f64);

impl Freshness {
    pub(crate) fn new(value: f64) -> Self {
        debug_assert!(
            (0.0..=1.0).contains(&value),
            "freshness {value} out of range"
        );
        Freshness(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 / F`; infinite for a node that is never fresh.
    pub fn inverse(self) -> f64 {
        1.0 / self.0
    }
}

impl From<Freshness> for f64 {
    fn from(f: Freshness) -> f64 {
        f.0
    }
}

impl fmt::Display for Freshness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Memo table for one network's set freshness values.
///
/// A cache must only ever be used with the network it was first filled from.
#[derive(Debug, Clone)]
pub struct RecursionCache {
    values: BTreeMap<NodeSet, f64>,
    max_nodes: usize,
}

impl Default for RecursionCache {
    fn default() -> Self {
        Self::new()
    }
}

impl RecursionCache {
    pub const DEFAULT_MAX_NODES: usize = 24;

    pub fn new() -> Self {
        Self::with_max_nodes(Self::DEFAULT_MAX_NODES)
    }

    /// A cache that accepts networks of up to `max_nodes` nodes (at most
    /// [`NodeSet::CAPACITY`]).
    pub fn with_max_nodes(max_nodes: usize) -> Self {
        RecursionCache {
            values: BTreeMap::new(),
            max_nodes: max_nodes.min(NodeSet::CAPACITY),
        }
    }

    pub fn max_nodes(&self) -> usize {
        self.max_nodes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, set: NodeSet) -> Option<Freshness> {
        self.values.get(&set).copied().map(Freshness)
    }

    pub fn clear(&mut self) {
        self.values.clear();
    }

    /// Cached `(set, freshness)` pairs in bitmask order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeSet, Freshness)> + '_ {
        self.values.iter().map(|(&s, &v)| (s, Freshness(v)))
    }
}

/// Exact freshness of `set`, memoized in `cache`.
pub fn freshness_of_set(
    net: &GossipNetwork,
    set: NodeSet,
    cache: &mut RecursionCache,
) -> Result<Freshness> {
    let n = net.node_count();
    if n > cache.max_nodes {
        return Err(Error::TooManyNodes {
            n,
            cap: cache.max_nodes,
        });
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(node) = set.max_member().filter(|&m| m >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    Ok(Freshness::new(descend(net, set, &mut cache.values)))
}

// Depth is bounded by the node count, which the cap keeps small.
fn descend(net: &GossipNetwork, set: NodeSet, memo: &mut BTreeMap<NodeSet, f64>) -> f64 {
    if let Some(&v) = memo.get(&set) {
        return v;
    }
    let from_source: f64 = set.iter().map(|j| net.source_rates()[j]).sum();
    let neighbors = net.neighbor_rates(set).expect("set validated by caller");
    let mut numerator = from_source;
    let mut denominator = net.lambda_e() + from_source;
    for (i, rate) in neighbors {
        numerator += rate * descend(net, set.with(i), memo);
        denominator += rate;
    }
    // λs(S) = 0 with no neighbors gives exactly 0 / λe = 0
    let value = numerator / denominator;
    memo.insert(set, value);
    value
}

/// Freshness of every node, sharing one cache across the singleton queries.
pub fn freshness_all_nodes(net: &GossipNetwork) -> Result<Vec<Freshness>> {
    freshness_all_nodes_with(net, &mut RecursionCache::new())
}

pub fn freshness_all_nodes_with(
    net: &GossipNetwork,
    cache: &mut RecursionCache,
) -> Result<Vec<Freshness>> {
    (0..net.node_count())
        .map(|j| freshness_of_set(net, NodeSet::singleton(j), cache))
        .collect()
}

/// Freshness of a single node.
pub fn freshness_of_node(
    net: &GossipNetwork,
    node: NodeId,
    cache: &mut RecursionCache,
) -> Result<Freshness> {
    let n = net.node_count();
    if node.0 >= n {
        return Err(Error::NodeOutOfRange { node: node.0, n });
    }
    freshness_of_set(net, NodeSet::singleton(node.0), cache)
}
