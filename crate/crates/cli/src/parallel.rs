//! Replications spread over the rayon pool.
//!
//! Each replication owns its RNG stream and results are collected back in
//! replication order, so the estimates equal the sequential ones bit for bit.

use gossip_freshness::sim::{run_replication, EventTable, SimConfig, SimEstimate};
use gossip_freshness::{Error, GossipNetwork, NodeSet, Result};
use rayon::prelude::*;

fn replicate(net: &GossipNetwork, cfg: &SimConfig, set: Option<NodeSet>) -> Result<SimEstimate> {
    cfg.validate()?;
    let table = EventTable::new(net)?;
    let samples: Vec<Vec<f64>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| {
            let out = run_replication(net, &table, cfg, r, set);
            match out.set_mean {
                Some(v) => vec![v],
                None => out.node_means,
            }
        })
        .collect();
    Ok(SimEstimate::from_replications(&samples))
}

pub fn simulate(net: &GossipNetwork, cfg: &SimConfig) -> Result<SimEstimate> {
    replicate(net, cfg, None)
}

pub fn simulate_set(net: &GossipNetwork, set: NodeSet, cfg: &SimConfig) -> Result<SimEstimate> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = net.node_count();
    if let Some(node) = set.max_member().filter(|&m| m >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    replicate(net, cfg, Some(set))
}
