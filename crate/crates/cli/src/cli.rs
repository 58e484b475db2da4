//! Argument parsing and subcommand dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use gossip_freshness::clustered::{clustered_freshness, optimize_cluster_size, ClusterSpec};
use gossip_freshness::sim::SimConfig;
use gossip_freshness::structured::{structured_freshness, TopologyKind, TopologySpec};
use gossip_freshness::{freshness_of_set, GossipNetwork, NodeSet, RecursionCache};
use thiserror::Error;

use crate::figures::{self, Figure5Setting};
use crate::graph_file::{self, GraphFileError};
use crate::parallel;
use crate::table::{Cell, ResultTable, TableError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        source: GraphFileError,
    },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] gossip_freshness::Error),
    #[error(transparent)]
    Table(#[from] TableError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gossip-freshness",
    version,
    about = "Freshness of nodes in gossip networks"
)]
struct Cli {
    /// Write the table here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit a JSON array of records instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact freshness of nodes or a node set in a graph file.
    Solve(SolveArgs),
    /// Freshness of one node in a flat structured network.
    Structured(StructuredArgs),
    /// Freshness of one end-node in a clustered network.
    Clustered(ClusteredArgs),
    /// Monte Carlo estimate for a graph file.
    Simulate(SimulateArgs),
    /// Inverse freshness against network size.
    Scaling(ScalingArgs),
    /// Cluster size maximizing end-node freshness.
    OptimizeCluster(OptimizeArgs),
}

#[derive(Debug, Args)]
struct Target {
    /// Comma-separated node ids; every node when neither this nor --set is given.
    #[arg(long, value_delimiter = ',', conflicts_with = "set")]
    node: Vec<usize>,
    /// Comma-separated node ids treated as one set.
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[command(flatten)]
    target: Target,
}

#[derive(Debug, Args)]
struct StructuredArgs {
    #[arg(long, value_parser = parse_topology)]
    topology: TopologyKind,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// lambda_e / lambda.
    #[arg(long, conflicts_with_all = ["lambda", "lambda_e"], required_unless_present = "lambda")]
    rho: Option<f64>,
    #[arg(long, requires = "lambda_e")]
    lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    lambda_e: Option<f64>,
}

#[derive(Debug, Args)]
struct ClusteredArgs {
    #[arg(long, value_parser = parse_topology)]
    topology: TopologyKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    lambda_s: f64,
    #[arg(long)]
    lambda_c: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    lambda_e: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, default_value_t = 1e4)]
    horizon: f64,
    #[arg(long, default_value_t = 1e2)]
    warmup: f64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    target: Target,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    #[arg(long, value_parser = parse_topology, required_unless_present = "figure4")]
    topology: Option<TopologyKind>,
    #[arg(long, required_unless_present = "figure4")]
    rho: Option<f64>,
    /// Comma-separated sizes; a log grid over 500..=100000 for --figure4.
    #[arg(long, value_delimiter = ',', required_unless_present = "figure4")]
    n: Vec<usize>,
    /// Every series of the scaling plot.
    #[arg(long, conflicts_with_all = ["topology", "rho"])]
    figure4: bool,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long, value_parser = parse_topology, required_unless_present = "figure5")]
    topology: Option<TopologyKind>,
    #[arg(long, required_unless_present = "figure5")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "figure5")]
    lambda_s: Option<f64>,
    #[arg(long, required_unless_present = "figure5")]
    lambda_c: Option<f64>,
    #[arg(long, required_unless_present = "figure5")]
    lambda: Option<f64>,
    #[arg(long, required_unless_present = "figure5")]
    lambda_e: Option<f64>,
    /// Print every divisor instead of only the best cluster sizes.
    #[arg(long)]
    sweep: bool,
    /// Full sweep of one cluster-size plot setting (a, b, c or d), n = 120.
    #[arg(
        long,
        value_name = "SETTING",
        conflicts_with_all = ["topology", "n", "lambda_s", "lambda_c", "lambda", "lambda_e", "sweep"]
    )]
    figure5: Option<Figure5Setting>,
}

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    s.parse()
        .map_err(|_| format!("unknown topology `{s}`, expected disconnected, ring or full"))
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code: 0 on success, 1 on computation or IO errors, 2 on usage errors.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    match execute(&cli).and_then(|table| emit(&cli, &table, stdout)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, table: &ResultTable, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = if cli.json {
        table.to_json()
    } else {
        table.to_csv()
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<ResultTable, CliError> {
    match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Structured(args) => structured(args),
        Command::Clustered(args) => clustered(args),
        Command::Simulate(args) => simulate(args),
        Command::Scaling(args) => scaling(args),
        Command::OptimizeCluster(args) => optimize(args),
    }
}

fn load_graph(path: &Path) -> Result<GossipNetwork, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    graph_file::parse(&text).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

enum Query {
    Nodes(Vec<usize>),
    Set(NodeSet),
}

fn resolve(target: &Target, n: usize) -> Result<Query, CliError> {
    let check = |ids: &[usize]| match ids.iter().find(|&&j| j >= n) {
        Some(j) => Err(CliError::Usage(format!(
            "node {j} out of range for {n} nodes"
        ))),
        None => Ok(()),
    };
    if !target.set.is_empty() {
        check(&target.set)?;
        if target.set.len() > 128 {
            return Err(CliError::Usage("sets hold at most 128 nodes".into()));
        }
        return Ok(Query::Set(target.set.iter().copied().collect()));
    }
    check(&target.node)?;
    Ok(Query::Nodes(if target.node.is_empty() {
        (0..n).collect()
    } else {
        target.node.clone()
    }))
}

fn set_label(set: NodeSet) -> String {
    set.iter()
        .map(|j| j.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn solve(args: &SolveArgs) -> Result<ResultTable, CliError> {
    let net = load_graph(&args.graph)?;
    let mut cache = RecursionCache::new();
    match resolve(&args.target, net.node_count())? {
        Query::Nodes(nodes) => {
            let mut table = ResultTable::new(["node", "F"]);
            for j in nodes {
                let f = freshness_of_set(&net, NodeSet::singleton(j), &mut cache)?;
                table.push(vec![j.into(), f.value().into()])?;
            }
            Ok(table)
        }
        Query::Set(set) => {
            let f = freshness_of_set(&net, set, &mut cache)?;
            let mut table = ResultTable::new(["set", "F"]);
            table.push(vec![set_label(set).into(), f.value().into()])?;
            Ok(table)
        }
    }
}

fn structured(args: &StructuredArgs) -> Result<ResultTable, CliError> {
    let mut table = ResultTable::new(["topology", "n", "rho", "F", "invF"]);
    for &n in &args.n {
        let (rho, f) = match (args.rho, args.lambda, args.lambda_e) {
            (Some(rho), _, _) => (rho, structured_freshness(args.topology, n, rho)?),
            (None, Some(lambda), Some(lambda_e)) => {
                let spec = TopologySpec::new(args.topology, n, lambda, lambda_e)?;
                (spec.rho(), spec.freshness()?)
            }
            _ => {
                return Err(CliError::Usage(
                    "give --rho or both --lambda and --lambda-e".into(),
                ))
            }
        };
        table.push(vec![
            args.topology.as_str().into(),
            n.into(),
            rho.into(),
            f.value().into(),
            f.inverse().into(),
        ])?;
    }
    Ok(table)
}

fn clustered(args: &ClusteredArgs) -> Result<ResultTable, CliError> {
    let spec = ClusterSpec::new(
        args.topology,
        args.n,
        args.k,
        args.lambda_s,
        args.lambda_c,
        args.lambda,
        args.lambda_e,
    )?;
    let f = clustered_freshness(&spec)?;
    let mut table = ResultTable::new(["topology", "n", "k", "m", "Fc", "F"]);
    table.push(vec![
        args.topology.as_str().into(),
        spec.n.into(),
        spec.k.into(),
        spec.m().into(),
        spec.head_freshness().into(),
        f.value().into(),
    ])?;
    Ok(table)
}

fn simulate(args: &SimulateArgs) -> Result<ResultTable, CliError> {
    let net = load_graph(&args.graph)?;
    let cfg = SimConfig {
        horizon: args.horizon,
        warmup: args.warmup,
        replications: args.reps,
        seed: args.seed,
    };
    cfg.validate()?;
    match resolve(&args.target, net.node_count())? {
        Query::Nodes(nodes) => {
            let est = parallel::simulate(&net, &cfg)?;
            let mut table = ResultTable::new(["node", "F", "se"]);
            for j in nodes {
                table.push(vec![j.into(), est.means[j].into(), est.std_error(j).into()])?;
            }
            Ok(table)
        }
        Query::Set(set) => {
            let est = parallel::simulate_set(&net, set, &cfg)?;
            let mut table = ResultTable::new(["set", "F", "se"]);
            table.push(vec![
                set_label(set).into(),
                est.means[0].into(),
                est.std_error(0).into(),
            ])?;
            Ok(table)
        }
    }
}

fn scaling(args: &ScalingArgs) -> Result<ResultTable, CliError> {
    if args.figure4 {
        let sizes = if args.n.is_empty() {
            figures::figure4_sizes()
        } else {
            args.n.clone()
        };
        return Ok(figures::emit_figure4_data(
            &figures::FIGURE4_SERIES,
            &sizes,
        )?);
    }
    let (Some(kind), Some(rho)) = (args.topology, args.rho) else {
        return Err(CliError::Usage(
            "give --topology and --rho, or --figure4".into(),
        ));
    };
    Ok(figures::scaling_table(&[(kind, rho)], &args.n)?)
}

fn optimize(args: &OptimizeArgs) -> Result<ResultTable, CliError> {
    if let Some(setting) = args.figure5 {
        return Ok(figures::emit_figure5_data(setting)?);
    }
    let (Some(kind), Some(n), Some(ls), Some(lc), Some(l), Some(le)) = (
        args.topology,
        args.n,
        args.lambda_s,
        args.lambda_c,
        args.lambda,
        args.lambda_e,
    ) else {
        return Err(CliError::Usage("missing cluster parameters".into()));
    };
    let opt = optimize_cluster_size(kind, n, ls, lc, l, le)?;
    let mut table = if args.sweep {
        ResultTable::new(["topology", "n", "k", "m", "F", "best"])
    } else {
        ResultTable::new(["topology", "n", "k", "m", "F"])
    };
    for row in &opt.sweep {
        let best = opt.best_k.contains(&row.k);
        if !(best || args.sweep) {
            continue;
        }
        let mut cells: Vec<Cell> = vec![
            kind.as_str().into(),
            n.into(),
            row.k.into(),
            row.m.into(),
            row.freshness.value().into(),
        ];
        if args.sweep {
            cells.push(Cell::Int(best as i64));
        }
        table.push(cells)?;
    }
    Ok(table)
}
