use clap::Parser;

use edge2node::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(1);
    }
}
