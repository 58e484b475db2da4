//! Closed-form freshness of three small cache networks, and builders for the
//! same networks so the general solver can be checked against them.
//!
//! In each builder node 0 is the user whose freshness the closed form gives.

use crate::error::{Error, Result};
use crate::exact::Freshness;
use crate::network::{GossipNetwork, NodeId};

fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidRate { what, value })
    }
}

/// Source -> cache (`lambda_d`) -> user (`lambda_c`).
pub fn serial_line_freshness(lambda_e: f64, lambda_d: f64, lambda_c: f64) -> Result<Freshness> {
    let le = positive("lambda_e", lambda_e)?;
    let ld = positive("lambda_d", lambda_d)?;
    let lc = positive("lambda_c", lambda_c)?;
    Ok(Freshness::new(lc / (lc + le) * (ld / (ld + le))))
}

/// Source feeds caches C1, C2 (`lambda_d1`, `lambda_d2`); both feed the user
/// (`lambda_c1`, `lambda_c2`).
pub fn parallel_cache_freshness(
    lambda_e: f64,
    lambda_d1: f64,
    lambda_d2: f64,
    lambda_c1: f64,
    lambda_c2: f64,
) -> Result<Freshness> {
    let le = positive("lambda_e", lambda_e)?;
    let d1 = positive("lambda_d1", lambda_d1)?;
    let d2 = positive("lambda_d2", lambda_d2)?;
    let c1 = positive("lambda_c1", lambda_c1)?;
    let c2 = positive("lambda_c2", lambda_c2)?;

    let hop_d = le + d1 + d2;
    let hop_c = le + c1 + c2;
    let both = (d1 + d2) * (c1 + c2) / (hop_d * hop_c);
    let cross = c2 * d1 / (le + c1 + d2) + c1 * d2 / (le + c2 + d1);
    Ok(Freshness::new(both - le / (hop_d * hop_c) * cross))
}

/// Source -> cache C (`lambda_d`); C feeds node 1 (`lambda_c1`) and node 2
/// (`lambda_c2`); node 2 gossips to node 1 at `lambda`.
///
/// `lambda = 0` is accepted and cuts node 2 off from node 1.
pub fn mixed_example_freshness(
    lambda_e: f64,
    lambda_d: f64,
    lambda_c1: f64,
    lambda_c2: f64,
    lambda: f64,
) -> Result<Freshness> {
    let le = positive("lambda_e", lambda_e)?;
    let ld = positive("lambda_d", lambda_d)?;
    let c1 = positive("lambda_c1", lambda_c1)?;
    let c2 = positive("lambda_c2", lambda_c2)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidRate {
            what: "lambda",
            value: lambda,
        });
    }
    let l = lambda;

    let cache = ld / (ld + le);
    let first = c1 / (le + c1 + l) * ((ld + l * cache) / (le + ld + l));
    let second = l / (le + c1 + l) * ((c1 + c2) * cache / (le + c1 + c2));
    Ok(Freshness::new(first + second))
}

/// Nodes: 0 user, 1 cache.
pub fn serial_line_network(
    lambda_e: f64,
    lambda_d: f64,
    lambda_c: f64,
) -> Result<(GossipNetwork, NodeId)> {
    let net = GossipNetwork::new(2, lambda_e, &[0.0, lambda_d], &[(1, 0, lambda_c)])?;
    Ok((net, NodeId(0)))
}

/// Nodes: 0 user, 1 cache C1, 2 cache C2.
pub fn parallel_cache_network(
    lambda_e: f64,
    lambda_d1: f64,
    lambda_d2: f64,
    lambda_c1: f64,
    lambda_c2: f64,
) -> Result<(GossipNetwork, NodeId)> {
    let net = GossipNetwork::new(
        3,
        lambda_e,
        &[0.0, lambda_d1, lambda_d2],
        &[(1, 0, lambda_c1), (2, 0, lambda_c2)],
    )?;
    Ok((net, NodeId(0)))
}

/// Nodes: 0 node 1, 1 node 2, 2 cache C.
pub fn mixed_network(
    lambda_e: f64,
    lambda_d: f64,
    lambda_c1: f64,
    lambda_c2: f64,
    lambda: f64,
) -> Result<(GossipNetwork, NodeId)> {
    let net = GossipNetwork::new(
        3,
        lambda_e,
        &[0.0, 0.0, lambda_d],
        &[(2, 0, lambda_c1), (2, 1, lambda_c2), (1, 0, lambda)],
    )?;
    Ok((net, NodeId(0)))
}
