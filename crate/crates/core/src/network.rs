//! Gossip network model: a source, `n` end-nodes and the Poisson rates between
//! them, plus the set quantities the freshness recursion is written in.
//!
//! For a node set `S` the model exposes the total source rate into `S`, the
//! total rate from an outside node `i` into `S`, and the updating neighbors of
//! `S` (outside nodes with positive rate into it).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Index of an end-node, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(index: usize) -> Self {
        NodeId(index)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of end-nodes stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeSet(u128);

impl NodeSet {
    pub const CAPACITY: usize = 128;

    pub const fn empty() -> Self {
        NodeSet(0)
    }

    pub const fn from_bits(bits: u128) -> Self {
        NodeSet(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    /// # Panics
    /// If `node >= NodeSet::CAPACITY`.
    pub fn singleton(node: usize) -> Self {
        assert!(node < Self::CAPACITY, "node {node} exceeds set capacity");
        NodeSet(1 << node)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= Self::CAPACITY, "{n} nodes exceed set capacity");
        if n == Self::CAPACITY {
            NodeSet(u128::MAX)
        } else {
            NodeSet((1u128 << n) - 1)
        }
    }

    pub fn contains(self, node: usize) -> bool {
        node < Self::CAPACITY && self.0 >> node & 1 == 1
    }

    #[must_use]
    pub fn with(self, node: usize) -> Self {
        self | NodeSet::singleton(node)
    }

    pub fn insert(&mut self, node: usize) {
        *self = self.with(node);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement relative to `{0, .., n-1}`.
    #[must_use]
    pub fn complement(self, n: usize) -> Self {
        NodeSet(!self.0 & NodeSet::full(n).0)
    }

    /// Largest member, if any.
    pub fn max_member(self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every superset of `self` inside `{0, .., n-1}`, largest first.
    ///
    /// Ordering by decreasing bitmask puts each set after all of its supersets,
    /// the order in which the superset recursion can be filled bottom-up.
    pub fn supersets(self, n: usize) -> Supersets {
        let free = self.complement(n).0;
        Supersets {
            base: self.0,
            free,
            cursor: Some(free),
        }
    }
}

impl core::ops::BitOr for NodeSet {
    type Output = NodeSet;
    fn bitor(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 | rhs.0)
    }
}

impl core::ops::BitAnd for NodeSet {
    type Output = NodeSet;
    fn bitand(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 & rhs.0)
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(NodeSet::empty(), NodeSet::with)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Members(u128);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let low = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(low)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Enumerates `base | sub` for every `sub` of `free`, walking `sub` downward.
pub struct Supersets {
    base: u128,
    free: u128,
    cursor: Option<u128>,
}

impl Iterator for Supersets {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        let sub = self.cursor?;
        self.cursor = (sub != 0).then(|| (sub - 1) & self.free);
        Some(NodeSet(self.base | sub))
    }
}

/// A directed gossip edge `from -> to` with its Poisson rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// Validated, immutable gossip network.
///
/// Rates are kept exactly as given. Zero-rate edges are retained in
/// [`GossipNetwork::edges`] but left out of the adjacency lists, so they never
/// make a node an updating neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct GossipNetwork {
    lambda_e: f64,
    source_rates: Vec<f64>,
    edges: Vec<Edge>,
    // (target, rate), sorted by target, positive rates only
    out_adj: Vec<Vec<(usize, f64)>>,
    // (origin, rate), sorted by origin, positive rates only
    in_adj: Vec<Vec<(usize, f64)>>,
}

fn check_rate(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidRate { what, value })
    }
}

impl GossipNetwork {
    /// Validates and builds a network.
    ///
    /// `source_rates[j]` is the rate at which the source pushes to node `j`;
    /// `edges` holds `(from, to, rate)` triples of node-to-node gossip.
    pub fn new(
        n: usize,
        lambda_e: f64,
        source_rates: &[f64],
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        if !(lambda_e.is_finite() && lambda_e > 0.0) {
            return Err(Error::NonPositiveSourceRate(lambda_e));
        }
        if source_rates.len() != n {
            return Err(Error::InvalidParameter(
                "source rate list length must equal the node count",
            ));
        }
        for &rate in source_rates {
            check_rate("source rate", rate)?;
        }

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut seen = alloc::collections::BTreeSet::new();
        let mut stored = Vec::with_capacity(edges.len());
        for &(from, to, rate) in edges {
            for node in [from, to] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if from == to {
                return Err(Error::SelfLoop(from));
            }
            check_rate("gossip rate", rate)?;
            if !seen.insert((from, to)) {
                return Err(Error::DuplicateEdge { from, to });
            }
            stored.push(Edge { from, to, rate });
            if rate > 0.0 {
                out_adj[from].push((to, rate));
                in_adj[to].push((from, rate));
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|&(node, _)| node);
        }

        Ok(GossipNetwork {
            lambda_e,
            source_rates: source_rates.to_vec(),
            edges: stored,
            out_adj,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.source_rates.len()
    }

    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }

    pub fn source_rates(&self) -> &[f64] {
        &self.source_rates
    }

    /// Edges in the order they were supplied, zero-rate ones included.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Positive-rate out-edges of `node` as `(target, rate)`, sorted by target.
    pub fn out_edges(&self, node: NodeId) -> &[(usize, f64)] {
        &self.out_adj[node.0]
    }

    /// Positive-rate in-edges of `node` as `(origin, rate)`, sorted by origin.
    pub fn in_edges(&self, node: NodeId) -> &[(usize, f64)] {
        &self.in_adj[node.0]
    }

    /// Gossip rate `from -> to`, zero when there is no edge.
    pub fn gossip_rate(&self, from: NodeId, to: NodeId) -> f64 {
        self.out_adj[from.0]
            .binary_search_by_key(&to.0, |&(t, _)| t)
            .map_or(0.0, |at| self.out_adj[from.0][at].1)
    }

    /// True when no node receives anything from the source; every freshness is 0.
    pub fn is_degenerate(&self) -> bool {
        self.source_rates.iter().all(|&r| r == 0.0)
    }

    /// The same topology with every rate (including `lambda_e`) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter("scale factor must be positive"));
        }
        let sources: Vec<f64> = self.source_rates.iter().map(|r| r * factor).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.from, e.to, e.rate * factor))
            .collect();
        GossipNetwork::new(self.node_count(), self.lambda_e * factor, &sources, &edges)
    }

    fn check_set(&self, set: NodeSet) -> Result<()> {
        let n = self.node_count();
        match set.max_member() {
            None => Err(Error::EmptySet),
            Some(node) if node >= n => Err(Error::NodeOutOfRange { node, n }),
            Some(_) => Ok(()),
        }
    }

    /// Total rate from the source into `set`.
    pub fn source_rate_into_set(&self, set: NodeSet) -> Result<f64> {
        self.check_set(set)?;
        Ok(set.iter().map(|j| self.source_rates[j]).sum())
    }

    /// Total gossip rate from `node` into `set`; `node` must lie outside `set`.
    pub fn node_rate_into_set(&self, node: NodeId, set: NodeSet) -> Result<f64> {
        self.check_set(set)?;
        let n = self.node_count();
        if node.0 >= n {
            return Err(Error::NodeOutOfRange { node: node.0, n });
        }
        if set.contains(node.0) {
            return Err(Error::NodeInSet(node.0));
        }
        Ok(self.out_adj[node.0]
            .iter()
            .filter(|&&(to, _)| set.contains(to))
            .map(|&(_, rate)| rate)
            .sum())
    }

    /// Outside nodes with positive rate into `set`.
    pub fn updating_neighbors(&self, set: NodeSet) -> Result<NodeSet> {
        Ok(self
            .neighbor_rates(set)?
            .into_iter()
            .map(|(i, _)| i)
            .collect())
    }

    /// `(i, rate of i into set)` for every updating neighbor `i`, sorted by `i`.
    ///
    /// Sums are accumulated in the same order as [`node_rate_into_set`], so the
    /// two agree bit for bit.
    ///
    /// [`node_rate_into_set`]: GossipNetwork::node_rate_into_set
    pub fn neighbor_rates(&self, set: NodeSet) -> Result<Vec<(usize, f64)>> {
        self.check_set(set)?;
        let mut acc: Vec<(usize, f64)> = Vec::new();
        for j in set.iter() {
            for &(i, rate) in &self.in_adj[j] {
                if set.contains(i) {
                    continue;
                }
                match acc.binary_search_by_key(&i, |&(k, _)| k) {
                    Ok(at) => acc[at].1 += rate,
                    Err(at) => acc.insert(at, (i, rate)),
                }
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn ring6() -> GossipNetwork {
        let mut edges = Vec::new();
        for i in 0..6 {
            edges.push((i, (i + 1) % 6, 0.5));
            edges.push((i, (i + 5) % 6, 0.5));
        }
        GossipNetwork::new(6, 1.0, &[1.0 / 6.0; 6], &edges).unwrap()
    }

    #[test]
    fn minimal_network() {
        let net = GossipNetwork::new(1, 1.0, &[1.0], &[]).unwrap();
        assert_eq!(net.node_count(), 1);
        assert!(!net.is_degenerate());
    }

    #[test]
    fn build_errors() {
        let e = GossipNetwork::new(2, 1.0, &[1.0, 1.0], &[(0, 0, 1.0)]);
        assert_eq!(e, Err(Error::SelfLoop(0)));
        let e = GossipNetwork::new(2, 1.0, &[1.0, 1.0], &[(0, 2, 1.0)]);
        assert_eq!(e, Err(Error::NodeOutOfRange { node: 2, n: 2 }));
        let e = GossipNetwork::new(2, 1.0, &[1.0, 1.0], &[(0, 1, 1.0), (0, 1, 2.0)]);
        assert_eq!(e, Err(Error::DuplicateEdge { from: 0, to: 1 }));
        assert!(matches!(
            GossipNetwork::new(2, 1.0, &[1.0, -1.0], &[]),
            Err(Error::InvalidRate { .. })
        ));
        assert!(matches!(
            GossipNetwork::new(2, 1.0, &[1.0, 1.0], &[(0, 1, f64::NAN)]),
            Err(Error::InvalidRate { .. })
        ));
        assert!(matches!(
            GossipNetwork::new(2, 1.0, &[1.0, 1.0], &[(0, 1, f64::INFINITY)]),
            Err(Error::InvalidRate { .. })
        ));
        assert_eq!(
            GossipNetwork::new(1, 0.0, &[1.0], &[]),
            Err(Error::NonPositiveSourceRate(0.0))
        );
        assert_eq!(
            GossipNetwork::new(0, 1.0, &[], &[]),
            Err(Error::EmptyNetwork)
        );
    }

    #[test]
    fn zero_rate_edges_are_kept_but_pruned() {
        let net = GossipNetwork::new(2, 1.0, &[1.0, 0.0], &[(0, 1, 0.0)]).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert!(net
            .updating_neighbors(NodeSet::singleton(1))
            .unwrap()
            .is_empty());
        assert_eq!(net.gossip_rate(NodeId(0), NodeId(1)), 0.0);
    }

    #[test]
    fn source_rates_add_up() {
        let net = GossipNetwork::new(2, 1.0, &[0.2, 0.3], &[]).unwrap();
        let s: NodeSet = [0, 1].into_iter().collect();
        assert_eq!(net.source_rate_into_set(s).unwrap(), 0.5);
        assert_eq!(
            net.source_rate_into_set(NodeSet::empty()),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn ring_rates_and_neighbors() {
        let net = ring6();
        let s: NodeSet = [0, 1, 2].into_iter().collect();
        assert_eq!(net.node_rate_into_set(NodeId(3), s).unwrap(), 0.5);
        assert_eq!(net.node_rate_into_set(NodeId(4), s).unwrap(), 0.0);
        assert_eq!(
            net.node_rate_into_set(NodeId(1), s),
            Err(Error::NodeInSet(1))
        );
        // contiguous {0,1,2} is updated by its two boundary neighbors
        let nb = net.updating_neighbors(s).unwrap();
        assert_eq!(nb.iter().collect::<Vec<_>>(), vec![3, 5]);
        assert!(net.updating_neighbors(NodeSet::full(6)).unwrap().is_empty());
    }

    #[test]
    fn node_set_basics() {
        let s: NodeSet = [1, 3, 100].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert!(s.contains(100) && !s.contains(2) && !s.contains(500));
        assert_eq!(s.max_member(), Some(100));
        assert_eq!(NodeSet::full(128).len(), 128);
        assert_eq!(NodeSet::full(4).complement(4), NodeSet::empty());
        assert_eq!(format!("{:?}", s), "{1, 3, 100}");
    }

    #[test]
    fn supersets_enumerated_largest_first() {
        let base = NodeSet::singleton(1);
        let all: Vec<_> = base.supersets(3).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], NodeSet::full(3));
        assert_eq!(*all.last().unwrap(), base);
        for (pos, set) in all.iter().enumerate() {
            assert!(base.is_subset(*set));
            // no later set is a strict superset of an earlier one
            for later in &all[pos + 1..] {
                assert!(!(set.is_subset(*later) && set != later));
            }
        }
    }

    #[test]
    fn scaling_multiplies_every_rate() {
        let net = ring6().scaled(2.0).unwrap();
        assert_eq!(net.lambda_e(), 2.0);
        assert_eq!(net.gossip_rate(NodeId(0), NodeId(1)), 1.0);
        assert_eq!(net.source_rates()[0], 2.0 / 6.0);
    }
}
