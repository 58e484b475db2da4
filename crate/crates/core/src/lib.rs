//! Long-run binary freshness of gossip networks.
//!
//! A single source whose content changes as a Poisson process (rate `lambda_e`)
//! pushes updates to end-nodes, which relay whatever version they hold to their
//! neighbors. A node is *fresh* while it holds the source's current version.
//! This crate computes the time-averaged freshness of nodes and node sets three
//! ways:
//!
//! * [`exact`]: the superset recursion over node sets, valid on any graph;
//! * [`structured`] and [`clustered`]: O(n) recursions, series forms and
//!   asymptotics for disconnected, ring and fully connected topologies, flat or
//!   organised in clusters below cluster heads;
//! * [`sim`]: continuous-time Monte Carlo of the underlying jump process.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, tables and the
//! command-line front end live in the companion `gossip-freshness-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod closed_form;
pub mod clustered;
mod error;
pub mod exact;
pub mod network;
pub mod sim;
pub mod structured;

pub use error::{Error, Result};
pub use exact::{freshness_all_nodes, freshness_of_set, Freshness, RecursionCache};
pub use network::{GossipNetwork, NodeId, NodeSet};
