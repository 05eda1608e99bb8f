use clap::Parser;

use greenride_cli::cli::{Cli, Command};
use greenride_cli::commands;

/// Exit codes: 0 success, 1 data or runtime failure, 2 bad invocation
/// (clap reports its own usage errors with code 2 as well).
fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Oracle(a) => commands::cmd_oracle(a),
        Command::InjectEv(a) => commands::cmd_inject_ev(a),
        Command::GenSynth(a) => commands::cmd_gen_synth(a),
        Command::Augment(a) => commands::cmd_augment(a),
        Command::RoutesGen(a) => commands::cmd_routes_gen(a),
        Command::RoutesCheck(a) => commands::cmd_routes_check(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(e.exit_code());
    }
}
