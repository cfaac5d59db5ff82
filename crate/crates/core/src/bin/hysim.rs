use clap::Parser;

fn main() {
    std::process::exit(hysim::cli::main_with(hysim::cli::Cli::parse()));
}
