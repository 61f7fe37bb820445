use clap::Parser;

use bloch_bohr::cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    std::process::exit(emit(cli.out.as_deref(), &outcome));
}
