use clap::Parser;

use hadamard_kernel::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
