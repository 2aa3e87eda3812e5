use clap::Parser;
use strainlim::cli::Cli;

fn main() {
    std::process::exit(Cli::parse().execute());
}
