//! Clustered networks: `n = k·m` end-nodes split into `m` clusters of `k`.
//!
//! The source feeds each cluster head at `λs/m`; a head feeds each node of its
//! cluster at `λc/k`; nodes gossip inside their cluster (disconnected, ring or
//! fully connected) with total per-node rate `λ`. Heads do not gossip.
//!
//! A node can only be fresh if its head is, so a set that contains the head
//! has the head's freshness `Fc = λs/(λs + mλe)`. The recursion inside one
//! cluster is therefore the general set recursion with the source replaced by
//! a head of freshness `Fc`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::Freshness;
use crate::network::{GossipNetwork, NodeId, NodeSet};
use crate::structured::TopologyKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub kind: TopologyKind,
    /// Total end-nodes.
    pub n: usize,
    /// Nodes per cluster.
    pub k: usize,
    /// Total source rate into all heads.
    pub lambda_s: f64,
    /// Total rate from a head into its cluster.
    pub lambda_c: f64,
    /// Per-node gossip rate.
    pub lambda: f64,
    pub lambda_e: f64,
}

impl ClusterSpec {
    pub fn new(
        kind: TopologyKind,
        n: usize,
        k: usize,
        lambda_s: f64,
        lambda_c: f64,
        lambda: f64,
        lambda_e: f64,
    ) -> Result<Self> {
        let spec = ClusterSpec {
            kind,
            n,
            k,
            lambda_s,
            lambda_c,
            lambda,
            lambda_e,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::InvalidParameter("n and k must be at least 1"));
        }
        if !self.n.is_multiple_of(self.k) {
            return Err(Error::ClusterSizeMismatch {
                n: self.n,
                k: self.k,
            });
        }
        check_rates(self.lambda_s, self.lambda_c, self.lambda, self.lambda_e)
    }

    /// Number of clusters.
    pub fn m(&self) -> usize {
        self.n / self.k
    }

    /// Topology actually used inside a cluster; a single node has no partner.
    pub fn effective_kind(&self) -> TopologyKind {
        if self.k == 1 {
            TopologyKind::Disconnected
        } else {
            self.kind
        }
    }

    /// Freshness of every cluster head.
    pub fn head_freshness(&self) -> f64 {
        self.lambda_s / (self.lambda_s + self.m() as f64 * self.lambda_e)
    }

    /// Node index of member `idx` of cluster `cluster` in [`build_clustered`].
    pub fn end_node(&self, cluster: usize, idx: usize) -> NodeId {
        NodeId(self.m() + cluster * self.k + idx)
    }
}

fn check_rates(lambda_s: f64, lambda_c: f64, lambda: f64, lambda_e: f64) -> Result<()> {
    let ok = |x: f64| x.is_finite() && x > 0.0;
    if !ok(lambda_e) {
        return Err(Error::NonPositiveSourceRate(lambda_e));
    }
    if ok(lambda_s) && ok(lambda_c) && ok(lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("cluster rates must be positive"))
    }
}

/// `λs / (λs + mλe)`.
pub fn cluster_head_freshness(lambda_s: f64, m: usize, lambda_e: f64) -> Result<Freshness> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1"));
    }
    check_rates(lambda_s, 1.0, 1.0, lambda_e)?;
    Ok(Freshness::new(lambda_s / (lambda_s + m as f64 * lambda_e)))
}

// Gossip rate into S_j from the rest of its cluster.
fn cluster_inflow(kind: TopologyKind, k: usize, j: usize, lambda: f64) -> f64 {
    match kind {
        TopologyKind::Disconnected => 0.0,
        TopologyKind::Ring => lambda,
        TopologyKind::Full => (j * (k - j)) as f64 * lambda / (k - 1) as f64,
    }
}

/// `[F(S_1), .., F(S_k)]` for sets of `j` nodes inside one cluster (contiguous
/// for rings).
pub fn cluster_chain(spec: &ClusterSpec) -> Result<Vec<Freshness>> {
    spec.validate()?;
    let k = spec.k;
    let fc = spec.head_freshness();
    let (lc, le) = (spec.lambda_c, spec.lambda_e);
    let kind = spec.effective_kind();

    let mut chain = vec![0.0; k];
    chain[k - 1] = lc / (lc + le) * fc;
    for j in (1..k).rev() {
        let from_head = j as f64 * lc / k as f64;
        let gossip = cluster_inflow(kind, k, j, spec.lambda);
        chain[j - 1] = if gossip == 0.0 {
            // disconnected: the head is the only updater of any set
            from_head * fc / (le + from_head)
        } else {
            (from_head * fc + gossip * chain[j]) / (le + from_head + gossip)
        };
    }
    Ok(chain.into_iter().map(Freshness::new).collect())
}

/// Freshness of one end-node.
pub fn clustered_freshness(spec: &ClusterSpec) -> Result<Freshness> {
    spec.validate()?;
    if spec.effective_kind() == TopologyKind::Disconnected {
        let (lc, le) = (spec.lambda_c, spec.lambda_e);
        return Ok(Freshness::new(
            lc / (lc + spec.k as f64 * le) * spec.head_freshness(),
        ));
    }
    Ok(cluster_chain(spec)?[0])
}

fn cluster_edges(
    kind: TopologyKind,
    k: usize,
    lambda: f64,
    offset: usize,
    edges: &mut Vec<(usize, usize, f64)>,
) {
    match kind {
        _ if k == 1 => {}
        TopologyKind::Disconnected => {}
        TopologyKind::Ring if k == 2 => {
            edges.push((offset, offset + 1, lambda));
            edges.push((offset + 1, offset, lambda));
        }
        TopologyKind::Ring => {
            for i in 0..k {
                let (prev, next) = ((i + k - 1) % k, (i + 1) % k);
                let (lo, hi) = if prev < next {
                    (prev, next)
                } else {
                    (next, prev)
                };
                edges.push((offset + i, offset + lo, lambda / 2.0));
                edges.push((offset + i, offset + hi, lambda / 2.0));
            }
        }
        TopologyKind::Full => {
            let rate = lambda / (k - 1) as f64;
            for i in 0..k {
                edges.extend(
                    (0..k)
                        .filter(|&j| j != i)
                        .map(|j| (offset + i, offset + j, rate)),
                );
            }
        }
    }
}

/// The full clustered network: heads are nodes `0..m`, end-nodes follow
/// cluster by cluster (see [`ClusterSpec::end_node`]).
pub fn build_clustered(spec: &ClusterSpec) -> Result<GossipNetwork> {
    spec.validate()?;
    let (m, k) = (spec.m(), spec.k);
    let total = m + spec.n;
    let mut sources = vec![0.0; total];
    let mut edges = Vec::new();
    for (head, rate) in sources.iter_mut().take(m).enumerate() {
        *rate = spec.lambda_s / m as f64;
        let offset = spec.end_node(head, 0).0;
        edges.extend((0..k).map(|i| (head, offset + i, spec.lambda_c / k as f64)));
        cluster_edges(spec.kind, k, spec.lambda, offset, &mut edges);
    }
    GossipNetwork::new(total, spec.lambda_e, &sources, &edges)
}

/// Freshness of an arbitrary set of nodes inside one cluster (indices `0..k`),
/// by the set recursion with the head as the updater of freshness `Fc`.
pub fn cluster_set_freshness(spec: &ClusterSpec, set: NodeSet) -> Result<Freshness> {
    spec.validate()?;
    let k = spec.k;
    if k > crate::exact::RecursionCache::DEFAULT_MAX_NODES {
        return Err(Error::TooManyNodes {
            n: k,
            cap: crate::exact::RecursionCache::DEFAULT_MAX_NODES,
        });
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(node) = set.max_member().filter(|&x| x >= k) {
        return Err(Error::NodeOutOfRange { node, n: k });
    }
    // one cluster, with the head's per-node rate standing in for the source
    let mut edges = Vec::new();
    cluster_edges(spec.kind, k, spec.lambda, 0, &mut edges);
    let cluster = GossipNetwork::new(k, spec.lambda_e, &vec![spec.lambda_c / k as f64; k], &edges)?;
    let mut memo = BTreeMap::new();
    Ok(Freshness::new(head_recursion(
        &cluster,
        spec.head_freshness(),
        set,
        &mut memo,
    )))
}

fn head_recursion(
    cluster: &GossipNetwork,
    fc: f64,
    set: NodeSet,
    memo: &mut BTreeMap<NodeSet, f64>,
) -> f64 {
    if let Some(&v) = memo.get(&set) {
        return v;
    }
    let from_head = cluster.source_rate_into_set(set).expect("nonempty set");
    let mut numerator = from_head * fc;
    let mut denominator = cluster.lambda_e() + from_head;
    for (i, rate) in cluster.neighbor_rates(set).expect("nonempty set") {
        numerator += rate * head_recursion(cluster, fc, set.with(i), memo);
        denominator += rate;
    }
    let value = numerator / denominator;
    memo.insert(set, value);
    value
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            low.push(d);
            if d * d != n {
                high.push(n / d);
            }
        }
        d += 1;
    }
    low.extend(high.into_iter().rev());
    low
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSweepRow {
    pub k: usize,
    pub m: usize,
    pub freshness: Freshness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Every cluster size within [`TIE_TOLERANCE`] of the best freshness.
    pub best_k: Vec<usize>,
    pub best_freshness: Freshness,
    /// One row per divisor of `n`, by increasing `k`.
    pub sweep: Vec<ClusterSweepRow>,
}

pub const TIE_TOLERANCE: f64 = 1e-12;

/// Evaluates every cluster size dividing `n` and reports the maximizers.
pub fn optimize_cluster_size(
    kind: TopologyKind,
    n: usize,
    lambda_s: f64,
    lambda_c: f64,
    lambda: f64,
    lambda_e: f64,
) -> Result<OptimizationResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    check_rates(lambda_s, lambda_c, lambda, lambda_e)?;
    let sweep = divisors(n)
        .into_iter()
        .map(|k| {
            let spec = ClusterSpec::new(kind, n, k, lambda_s, lambda_c, lambda, lambda_e)?;
            Ok(ClusterSweepRow {
                k,
                m: n / k,
                freshness: clustered_freshness(&spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = sweep
        .iter()
        .map(|row| row.freshness.value())
        .fold(f64::NEG_INFINITY, f64::max);
    let best_k = sweep
        .iter()
        .filter(|row| best - row.freshness.value() <= TIE_TOLERANCE)
        .map(|row| row.k)
        .collect();
    Ok(OptimizationResult {
        best_k,
        best_freshness: Freshness::new(best),
        sweep,
    })
}

/// Leading-order freshness `(λc·λs/λe²)/n` of a disconnected clustered
/// network at its freshness-maximizing cluster size.
pub fn clustered_disconnected_asymptotic(
    n: usize,
    lambda_s: f64,
    lambda_c: f64,
    lambda_e: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    check_rates(lambda_s, lambda_c, 1.0, lambda_e)?;
    Ok(lambda_c * lambda_s / (lambda_e * lambda_e) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{freshness_of_set, RecursionCache};

    fn spec(kind: TopologyKind, n: usize, k: usize) -> ClusterSpec {
        ClusterSpec::new(kind, n, k, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn head_freshness_values() {
        assert!((cluster_head_freshness(1.0, 2, 1.0).unwrap().value() - 1.0 / 3.0).abs() < 1e-15);
        assert!(
            (cluster_head_freshness(10.0, 12, 1.0).unwrap().value() - 10.0 / 22.0).abs() < 1e-15
        );
        assert!(cluster_head_freshness(1e12, 5, 1.0).unwrap().value() > 1.0 - 1e-10);
        assert!(cluster_head_freshness(1.0, 0, 1.0).is_err());
        assert!(cluster_head_freshness(0.0, 1, 1.0).is_err());
    }

    #[test]
    fn disconnected_tie_at_ten_and_twelve() {
        let a = clustered_freshness(&spec(TopologyKind::Disconnected, 120, 10))
            .unwrap()
            .value();
        let b = clustered_freshness(&spec(TopologyKind::Disconnected, 120, 12))
            .unwrap()
            .value();
        assert!((a - 1.0 / 143.0).abs() < 1e-15);
        assert!((a - b).abs() <= TIE_TOLERANCE);
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            ClusterSpec::new(TopologyKind::Ring, 10, 3, 1.0, 1.0, 1.0, 1.0),
            Err(Error::ClusterSizeMismatch { n: 10, k: 3 })
        );
        assert!(ClusterSpec::new(TopologyKind::Ring, 10, 0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ClusterSpec::new(TopologyKind::Ring, 10, 5, 1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn builder_shape() {
        let s = spec(TopologyKind::Ring, 6, 3);
        let net = build_clustered(&s).unwrap();
        assert_eq!(net.node_count(), 8);
        for head in 0..2 {
            let out = net.out_edges(NodeId(head));
            assert_eq!(out.len(), 3);
            assert!(out.iter().all(|&(_, r)| r == 1.0 / 3.0));
            assert!(net.in_edges(NodeId(head)).is_empty());
        }
        let single = build_clustered(&spec(TopologyKind::Full, 4, 1)).unwrap();
        assert_eq!(single.edges().len(), 4);
        let disc = build_clustered(&spec(TopologyKind::Disconnected, 6, 3)).unwrap();
        for j in 2..8 {
            assert!(disc.out_edges(NodeId(j)).is_empty());
        }
    }

    #[test]
    fn small_clusters_match_general_solver() {
        for kind in TopologyKind::ALL {
            let s = ClusterSpec::new(kind, 6, 3, 1.7, 0.6, 2.2, 0.9).unwrap();
            let net = build_clustered(&s).unwrap();
            let exact = freshness_of_set(
                &net,
                NodeSet::singleton(s.end_node(1, 2).0),
                &mut RecursionCache::new(),
            )
            .unwrap()
            .value();
            let chain = clustered_freshness(&s).unwrap().value();
            assert!((exact - chain).abs() < 1e-12, "{kind}: {exact} vs {chain}");
        }
    }

    #[test]
    fn set_recursion_reproduces_chain() {
        for kind in [TopologyKind::Ring, TopologyKind::Full] {
            let s = ClusterSpec::new(kind, 12, 6, 2.0, 3.0, 1.5, 0.8).unwrap();
            let chain = cluster_chain(&s).unwrap();
            for j in 1..=6 {
                let set: NodeSet = (0..j).collect();
                let v = cluster_set_freshness(&s, set).unwrap().value();
                assert!((v - chain[j - 1].value()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_cluster_terminal_is_two_hop() {
        let s = ClusterSpec::new(TopologyKind::Full, 5, 5, 2.0, 3.0, 1.0, 1.0).unwrap();
        let chain = cluster_chain(&s).unwrap();
        let two_hop = 3.0 / 4.0 * (2.0 / 3.0);
        assert!((chain[4].value() - two_hop).abs() < 1e-15);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), [1]);
        assert_eq!(divisors(120).len(), 16);
        assert_eq!(divisors(36), [1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn optimizer_matches_known_optima() {
        let r = optimize_cluster_size(TopologyKind::Full, 120, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(r.best_k, [40]);
        assert_eq!(r.sweep.len(), 16);
        let r =
            optimize_cluster_size(TopologyKind::Disconnected, 120, 10.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(r.best_k, [3, 4]);
        let r = optimize_cluster_size(TopologyKind::Ring, 120, 10.0, 10.0, 1.0, 1.0).unwrap();
        assert_eq!(r.best_k, [15]);
    }

    #[test]
    fn asymptotic_predictor() {
        let p = clustered_disconnected_asymptotic(1_000_000, 3.0, 2.0, 1.0).unwrap();
        assert!((p - 6e-6).abs() < 1e-18);
        assert!(clustered_disconnected_asymptotic(0, 1.0, 1.0, 1.0).is_err());
    }
}
