//! Command-line front end for the `specpow-core` pipeline.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod source;

use args::{Cli, Command};
use error::CliResult;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Cluster(a) => commands::cmd_cluster(a),
        Command::SweepP(a) => commands::cmd_sweep_p(a),
        Command::BoundCheck(a) => commands::cmd_bound_check(a),
        Command::FxPlot(a) => commands::cmd_fx_plot(a),
        Command::Nmi(a) => commands::cmd_nmi(a).map(|_| ()),
        Command::Gen(a) => commands::cmd_gen(a),
    }
}
