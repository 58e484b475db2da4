//! Line-oriented text format for gossip networks.
//!
//! ```text
//! # comments run to end of line
//! net <n> <lambda_e>
//! src <j> <rate>
//! edge <i> <j> <rate>
//! ```
//!
//! `net` must be the first directive. Nodes without a `src` line get source
//! rate 0. Rates are written in shortest round-trip form, so
//! `parse(&write(net)) == net` exactly.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use gossip_freshness::GossipNetwork;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `net` header")]
    MissingHeader,
    #[error("invalid network: {0}")]
    Model(#[from] gossip_freshness::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> GraphFileError {
    GraphFileError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, what: &str, token: &str) -> Result<T, GraphFileError> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("malformed {what} `{token}`")))
}

fn rate(line: usize, token: &str) -> Result<f64, GraphFileError> {
    let value: f64 = field(line, "rate", token)?;
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(syntax(
            line,
            format!("rate `{token}` must be finite and nonnegative"),
        ))
    }
}

pub fn parse(text: &str) -> Result<GossipNetwork, GraphFileError> {
    let mut header: Option<(usize, f64)> = None;
    let mut sources: Vec<f64> = Vec::new();
    let mut seen_src = BTreeSet::new();
    let mut seen_edge = BTreeSet::new();
    let mut edges = Vec::new();

    for (at, raw) in text.lines().enumerate() {
        let line = at + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let arity = |want: usize| {
            if args.len() == want {
                Ok(())
            } else {
                Err(syntax(
                    line,
                    format!("`{keyword}` takes {want} fields, found {}", args.len()),
                ))
            }
        };
        let node = |token: &str, n: usize| -> Result<usize, GraphFileError> {
            let id: usize = field(line, "node id", token)?;
            if id < n {
                Ok(id)
            } else {
                Err(syntax(
                    line,
                    format!("node {id} out of range for {n} nodes"),
                ))
            }
        };

        match (keyword, header) {
            ("net", None) => {
                arity(2)?;
                let n: usize = field(line, "node count", args[0])?;
                if n == 0 {
                    return Err(syntax(line, "node count must be at least 1"));
                }
                let lambda_e = rate(line, args[1])?;
                if lambda_e == 0.0 {
                    return Err(syntax(line, "lambda_e must be positive"));
                }
                header = Some((n, lambda_e));
                sources = vec![0.0; n];
            }
            ("net", Some(_)) => return Err(syntax(line, "duplicate `net` header")),
            ("src" | "edge", None) => {
                return Err(syntax(line, format!("`{keyword}` before `net` header")))
            }
            ("src", Some((n, _))) => {
                arity(2)?;
                let j = node(args[0], n)?;
                if !seen_src.insert(j) {
                    return Err(syntax(line, format!("duplicate `src {j}`")));
                }
                sources[j] = rate(line, args[1])?;
            }
            ("edge", Some((n, _))) => {
                arity(3)?;
                let i = node(args[0], n)?;
                let j = node(args[1], n)?;
                if i == j {
                    return Err(syntax(line, format!("self-loop on node {i}")));
                }
                if !seen_edge.insert((i, j)) {
                    return Err(syntax(line, format!("duplicate `edge {i} {j}`")));
                }
                edges.push((i, j, rate(line, args[2])?));
            }
            (other, _) => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let (n, lambda_e) = header.ok_or(GraphFileError::MissingHeader)?;
    Ok(GossipNetwork::new(n, lambda_e, &sources, &edges)?)
}

/// Renders `net`; every `src` line is written, zero rates included.
pub fn write(net: &GossipNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {} {}", net.node_count(), net.lambda_e());
    for (j, r) in net.source_rates().iter().enumerate() {
        let _ = writeln!(out, "src {j} {r}");
    }
    for e in net.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.from, e.to, e.rate);
    }
    out
}
