//! Data behind the scaling and cluster-size plots.

use std::fmt;
use std::str::FromStr;

use gossip_freshness::clustered::optimize_cluster_size;
use gossip_freshness::structured::{scaling_sweep, TopologyKind};
use gossip_freshness::{Error, Result};

use crate::table::ResultTable;

pub const FIGURE4_N_MIN: usize = 500;
pub const FIGURE4_N_MAX: usize = 100_000;

/// (topology, ρ) pairs plotted by default.
pub const FIGURE4_SERIES: [(TopologyKind, f64); 5] = [
    (TopologyKind::Disconnected, 2.0),
    (TopologyKind::Ring, 2.0),
    (TopologyKind::Full, 0.5),
    (TopologyKind::Full, 1.0),
    (TopologyKind::Full, 2.0),
];

/// `points` sizes spaced evenly in log scale over `[lo, hi]`, deduplicated.
pub fn log_grid(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    if points < 2 || lo >= hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut ns: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    ns.dedup();
    ns
}

pub fn figure4_sizes() -> Vec<usize> {
    log_grid(FIGURE4_N_MIN, FIGURE4_N_MAX, 25)
}

/// Columns `topology, rho, n, F, invF`, one block per series, rows by `n`.
pub fn scaling_table(series: &[(TopologyKind, f64)], n_values: &[usize]) -> Result<ResultTable> {
    if n_values.is_empty() {
        return Err(Error::InvalidParameter("no sizes to sweep"));
    }
    let mut table = ResultTable::new(["topology", "rho", "n", "F", "invF"]);
    for &(kind, rho) in series {
        for row in scaling_sweep(kind, n_values, rho)? {
            table
                .push(vec![
                    kind.as_str().into(),
                    rho.into(),
                    row.n.into(),
                    row.freshness.value().into(),
                    row.inverse.into(),
                ])
                .expect("five columns");
        }
    }
    Ok(table)
}

/// [`scaling_table`] restricted to sizes the plot covers.
pub fn emit_figure4_data(
    series: &[(TopologyKind, f64)],
    n_values: &[usize],
) -> Result<ResultTable> {
    if n_values.iter().any(|&n| !(2..=FIGURE4_N_MAX).contains(&n)) {
        return Err(Error::InvalidParameter("sizes must lie in 2..=100000"));
    }
    scaling_table(series, n_values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure5Setting {
    A,
    B,
    C,
    D,
}

impl Figure5Setting {
    pub const ALL: [Figure5Setting; 4] = [Self::A, Self::B, Self::C, Self::D];
    pub const N: usize = 120;
    pub const LAMBDA_E: f64 = 1.0;

    /// `(λs, λc, λ)`.
    pub fn rates(self) -> (f64, f64, f64) {
        match self {
            Self::A => (1.0, 1.0, 1.0),
            Self::B => (10.0, 1.0, 1.0),
            Self::C => (10.0, 10.0, 1.0),
            Self::D => (10.0, 1.0, 2.0),
        }
    }
}

impl fmt::Display for Figure5Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
        })
    }
}

impl FromStr for Figure5Setting {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            "d" => Ok(Self::D),
            _ => Err(format!("unknown setting `{s}`, expected a, b, c or d")),
        }
    }
}

/// Columns `topology, k, m, F` over every divisor `k` of 120.
pub fn emit_figure5_data(setting: Figure5Setting) -> Result<ResultTable> {
    let (lambda_s, lambda_c, lambda) = setting.rates();
    let mut table = ResultTable::new(["topology", "k", "m", "F"]);
    for kind in TopologyKind::ALL {
        let opt = optimize_cluster_size(
            kind,
            Figure5Setting::N,
            lambda_s,
            lambda_c,
            lambda,
            Figure5Setting::LAMBDA_E,
        )?;
        for row in opt.sweep {
            table
                .push(vec![
                    kind.as_str().into(),
                    row.k.into(),
                    row.m.into(),
                    row.freshness.value().into(),
                ])
                .expect("four columns");
        }
    }
    Ok(table)
}
