//! File formats, result tables and the command-line front end for
//! [`gossip_freshness`].

pub mod cli;
pub mod figures;
pub mod graph_file;
pub mod parallel;
pub mod table;

pub use cli::{run, CliError};
pub use table::{Cell, ResultTable};
