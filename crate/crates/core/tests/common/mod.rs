//! Test-only oracles that share no code path with the library solvers.
#![allow(dead_code)]

use gossip_freshness::network::{GossipNetwork, NodeId, NodeSet};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Draws(ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Draws(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Log-uniform on [lo, hi].
    pub fn rate(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.unit() * (hi.ln() - lo.ln())).exp()
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Stationary distribution of the full freshness-bit Markov chain, found by
/// Gaussian elimination on `πQ = 0`, `Σπ = 1`. Exponential in `n`.
pub fn stationary(net: &GossipNetwork) -> Vec<f64> {
    let n = net.node_count();
    assert!(n <= 10, "brute-force chain is 2^n states");
    let states = 1usize << n;
    // q[to][from] layout for the transposed system Q^T π = 0
    let mut a = vec![vec![0.0f64; states]; states];
    let mut add = |from: usize, to: usize, rate: f64| {
        if from != to && rate > 0.0 {
            a[to][from] += rate;
            a[from][from] -= rate;
        }
    };
    for s in 0..states {
        add(s, 0, net.lambda_e());
        for j in 0..n {
            add(s, s | 1 << j, net.source_rates()[j]);
        }
        for i in 0..n {
            for &(j, rate) in net.out_edges(NodeId(i)) {
                let next = if s >> i & 1 == 1 { s | 1 << j } else { s };
                add(s, next, rate);
            }
        }
    }
    let mut b = vec![0.0; states];
    a[0] = vec![1.0; states];
    b[0] = 1.0;
    solve(a, b)
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * y;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Long-run probability that some member of `set` is fresh.
pub fn chain_set_freshness(net: &GossipNetwork, set: NodeSet) -> f64 {
    let pi = stationary(net);
    let mask = set.bits() as usize;
    pi.iter()
        .enumerate()
        .filter(|(s, _)| s & mask != 0)
        .map(|(_, p)| p)
        .sum()
}

/// Random network on `n` nodes: each ordered pair is an edge with
/// probability `density`, each node gets a source link with probability 1/2.
pub fn random_network(draws: &mut Draws, n: usize, density: f64) -> GossipNetwork {
    let sources: Vec<f64> = (0..n)
        .map(|_| {
            if draws.unit() < 0.5 {
                draws.rate(0.05, 5.0)
            } else {
                0.0
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && draws.unit() < density {
                edges.push((i, j, draws.rate(0.05, 5.0)));
            }
        }
    }
    GossipNetwork::new(n, draws.rate(0.1, 5.0), &sources, &edges).unwrap()
}
