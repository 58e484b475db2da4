//! Flat structured topologies: disconnected, ring and fully connected.
//!
//! The source pushes to every node at `λ/n`; each node spreads a total rate
//! `λ` evenly over its neighbors. All freshness values depend only on `n` and
//! `ρ = λe/λ`, so the evaluators below take `(n, rho)`.
//!
//! For ring and full networks, `S_j` denotes a set of `j` nodes that is
//! contiguous (ring) or arbitrary (full). Its freshness obeys a chain
//! recursion from `F(S_n) = 1/(1+ρ)` down to `F(S_1)`, the freshness of one
//! node. The same chain can be unrolled into a sum of products; the products
//! are accumulated as sums of logs so they stay representable at `n ≈ 10^5`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::Freshness;
use crate::network::GossipNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyKind {
    Disconnected,
    Ring,
    Full,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 3] = [
        TopologyKind::Disconnected,
        TopologyKind::Ring,
        TopologyKind::Full,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Disconnected => "disconnected",
            TopologyKind::Ring => "ring",
            TopologyKind::Full => "full",
        }
    }

    fn min_nodes(self) -> usize {
        match self {
            TopologyKind::Disconnected => 1,
            TopologyKind::Ring | TopologyKind::Full => 2,
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disconnected" => Ok(TopologyKind::Disconnected),
            "ring" => Ok(TopologyKind::Ring),
            "full" | "fully-connected" => Ok(TopologyKind::Full),
            _ => Err(Error::InvalidParameter(
                "topology must be one of disconnected, ring, full",
            )),
        }
    }
}

/// A flat structured network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub n: usize,
    /// Total per-node gossip rate; also the total source rate into the network.
    pub lambda: f64,
    pub lambda_e: f64,
}

impl TopologySpec {
    pub fn new(kind: TopologyKind, n: usize, lambda: f64, lambda_e: f64) -> Result<Self> {
        let spec = TopologySpec {
            kind,
            n,
            lambda,
            lambda_e,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_nodes(self.kind, self.n)?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be positive"));
        }
        if !(self.lambda_e.is_finite() && self.lambda_e > 0.0) {
            return Err(Error::NonPositiveSourceRate(self.lambda_e));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.lambda_e / self.lambda
    }

    /// Exact single-node freshness from the specialized recursion.
    pub fn freshness(&self) -> Result<Freshness> {
        self.validate()?;
        structured_freshness(self.kind, self.n, self.rho())
    }
}

fn check_nodes(kind: TopologyKind, n: usize) -> Result<()> {
    if n < kind.min_nodes() {
        return Err(Error::InvalidParameter(match kind {
            TopologyKind::Disconnected => "disconnected topology needs n >= 1",
            TopologyKind::Ring => "ring topology needs n >= 2",
            TopologyKind::Full => "fully connected topology needs n >= 2",
        }));
    }
    Ok(())
}

fn check(kind: TopologyKind, n: usize, rho: f64) -> Result<()> {
    check_nodes(kind, n)?;
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("rho must be positive"))
    }
}

/// Builds the network described by `spec`.
///
/// A ring of two nodes is a single mutual edge of rate `λ`: both half-rate
/// ring edges of a node point at the same neighbor.
pub fn build_structured(spec: &TopologySpec) -> Result<GossipNetwork> {
    spec.validate()?;
    let n = spec.n;
    let lambda = spec.lambda;
    let mut edges = Vec::new();
    match spec.kind {
        TopologyKind::Disconnected => {}
        TopologyKind::Ring if n == 2 => {
            edges.push((0, 1, lambda));
            edges.push((1, 0, lambda));
        }
        TopologyKind::Ring => {
            for i in 0..n {
                let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
                let (lo, hi) = if prev < next {
                    (prev, next)
                } else {
                    (next, prev)
                };
                edges.push((i, lo, lambda / 2.0));
                edges.push((i, hi, lambda / 2.0));
            }
        }
        TopologyKind::Full => {
            let rate = lambda / (n - 1) as f64;
            for i in 0..n {
                edges.extend((0..n).filter(|&j| j != i).map(|j| (i, j, rate)));
            }
        }
    }
    GossipNetwork::new(n, spec.lambda_e, &vec![lambda / n as f64; n], &edges)
}

/// `1 / (1 + nρ)`.
pub fn disconnected_freshness(n: usize, rho: f64) -> Result<Freshness> {
    check(TopologyKind::Disconnected, n, rho)?;
    Ok(Freshness::new(1.0 / (1.0 + n as f64 * rho)))
}

// Gossip rate into S_j from outside, in units of λ.
fn chain_inflow(kind: TopologyKind, n: usize, j: usize) -> f64 {
    match kind {
        TopologyKind::Disconnected => 0.0,
        TopologyKind::Ring => 1.0,
        TopologyKind::Full => (j * (n - j)) as f64 / (n - 1) as f64,
    }
}

fn chain_step(kind: TopologyKind, n: usize, rho: f64, j: usize, upper: f64) -> f64 {
    let source = j as f64 / n as f64;
    let gossip = chain_inflow(kind, n, j);
    (source + gossip * upper) / (rho + source + gossip)
}

fn chain_bottom(kind: TopologyKind, n: usize, rho: f64) -> f64 {
    (1..n).rev().fold(1.0 / (1.0 + rho), |upper, j| {
        chain_step(kind, n, rho, j, upper)
    })
}

/// Freshness of one node in a ring, by the chain recursion.
pub fn ring_freshness(n: usize, rho: f64) -> Result<Freshness> {
    check(TopologyKind::Ring, n, rho)?;
    Ok(Freshness::new(chain_bottom(TopologyKind::Ring, n, rho)))
}

/// Freshness of one node in a fully connected network, by the chain recursion.
pub fn full_freshness(n: usize, rho: f64) -> Result<Freshness> {
    check(TopologyKind::Full, n, rho)?;
    Ok(Freshness::new(chain_bottom(TopologyKind::Full, n, rho)))
}

/// `[F(S_1), .., F(S_n)]` for a ring or fully connected network.
pub fn chain_values(kind: TopologyKind, n: usize, rho: f64) -> Result<Vec<Freshness>> {
    if kind == TopologyKind::Disconnected {
        return Err(Error::InvalidParameter(
            "disconnected networks have no set chain",
        ));
    }
    check(kind, n, rho)?;
    let mut out = vec![0.0; n];
    out[n - 1] = 1.0 / (1.0 + rho);
    for j in (1..n).rev() {
        out[j - 1] = chain_step(kind, n, rho, j, out[j]);
    }
    Ok(out.into_iter().map(Freshness::new).collect())
}

/// Exact single-node freshness for any structured kind.
pub fn structured_freshness(kind: TopologyKind, n: usize, rho: f64) -> Result<Freshness> {
    match kind {
        TopologyKind::Disconnected => disconnected_freshness(n, rho),
        TopologyKind::Ring => ring_freshness(n, rho),
        TopologyKind::Full => full_freshness(n, rho),
    }
}

/// One term of the unrolled chain, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub index: usize,
    pub ln_value: f64,
}

impl SeriesTerm {
    /// May underflow to 0 for far-out terms even though the term is positive.
    pub fn value(&self) -> f64 {
        libm::exp(self.ln_value)
    }
}

/// Terms `a_1 .. a_{n-1}` of the ring series,
/// `a_i = (i/n) Π_{j=1..i} 1/(1+ρ+j/n)`.
pub fn ring_series_terms(n: usize, rho: f64) -> Result<impl Iterator<Item = SeriesTerm>> {
    check(TopologyKind::Ring, n, rho)?;
    let nf = n as f64;
    let mut ln_prod = 0.0;
    Ok((1..n).map(move |i| {
        let x = i as f64 / nf;
        ln_prod -= libm::log(1.0 + rho + x);
        SeriesTerm {
            index: i,
            ln_value: libm::log(x) + ln_prod,
        }
    }))
}

/// Terms `b_1 .. b_{n-1}` of the fully connected series,
/// `b_i = 1/(1 + nρ/i + n(n-i)/(n-1)) · Π_{j<i} 1/(1 + (n-1)ρ/((n-j)j) + (n-1)/(n(n-j)))`.
pub fn full_series_terms(n: usize, rho: f64) -> Result<impl Iterator<Item = SeriesTerm>> {
    check(TopologyKind::Full, n, rho)?;
    let nf = n as f64;
    let mut ln_prod = 0.0;
    Ok((1..n).map(move |i| {
        let fi = i as f64;
        if i > 1 {
            let j = (i - 1) as f64;
            let rest = nf - j;
            ln_prod -= libm::log1p((nf - 1.0) * rho / (rest * j) + (nf - 1.0) / (nf * rest));
        }
        let head = libm::log1p(nf * rho / fi + nf * (nf - fi) / (nf - 1.0));
        SeriesTerm {
            index: i,
            ln_value: ln_prod - head,
        }
    }))
}

// Neumaier summation; the series has up to 10^5 terms of very different size.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn series_total(terms: impl Iterator<Item = SeriesTerm>, n: usize, rho: f64) -> f64 {
    let mut last = 0.0;
    let sum = compensated_sum(terms.map(|t| {
        last = t.ln_value;
        t.value()
    }));
    let nf = n as f64;
    let boundary = libm::exp(last + libm::log(nf / (nf - 1.0)) - libm::log1p(rho));
    sum + boundary
}

/// Ring freshness from `Σ a_i + n/(n-1) · a_{n-1} · F(S_n)`.
pub fn ring_freshness_series(n: usize, rho: f64) -> Result<Freshness> {
    let terms = ring_series_terms(n, rho)?;
    Ok(Freshness::new(series_total(terms, n, rho)))
}

/// Fully connected freshness from `Σ b_i + n/(n-1) · b_{n-1} · F(S_n)`.
pub fn full_freshness_series(n: usize, rho: f64) -> Result<Freshness> {
    let terms = full_series_terms(n, rho)?;
    Ok(Freshness::new(series_total(terms, n, rho)))
}

/// Leading-order large-`n` freshness of one node.
///
/// Disconnected `(1/ρ)/n`; ring `(1/ρ + 1/ρ²)/n`; fully connected `n^-ρ`
/// for `ρ < 1`, `ln(n)/n` at `ρ = 1` and `1/n` for `ρ > 1`. The fully connected
/// forms hold up to a bounded constant factor, which is taken as 1.
pub fn asymptotic_freshness(kind: TopologyKind, n: usize, rho: f64) -> Result<f64> {
    check(kind, n, rho)?;
    if n < 2 {
        return Err(Error::InvalidParameter("asymptotics need n >= 2"));
    }
    let nf = n as f64;
    Ok(match kind {
        TopologyKind::Disconnected => 1.0 / (rho * nf),
        TopologyKind::Ring => (1.0 / rho + 1.0 / (rho * rho)) / nf,
        TopologyKind::Full if rho < 1.0 => libm::pow(nf, -rho),
        TopologyKind::Full if rho == 1.0 => libm::log(nf) / nf,
        TopologyKind::Full => 1.0 / nf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub freshness: Freshness,
    pub inverse: f64,
}

/// Exact single-node freshness and its inverse for each `n`, sorted by `n`.
pub fn scaling_sweep(kind: TopologyKind, n_values: &[usize], rho: f64) -> Result<Vec<ScalingRow>> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.into_iter()
        .map(|n| {
            if n < 2 {
                return Err(Error::InvalidParameter("scaling sweeps need n >= 2"));
            }
            let freshness = structured_freshness(kind, n, rho)?;
            Ok(ScalingRow {
                n,
                freshness,
                inverse: freshness.inverse(),
            })
        })
        .collect()
}
