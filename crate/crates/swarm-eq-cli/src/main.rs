use clap::Parser;
use swarm_eq_cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
