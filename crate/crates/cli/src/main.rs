use clap::Parser;
use mprk_cli::cli::Cli;
use mprk_cli::commands;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = commands::run(&cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
