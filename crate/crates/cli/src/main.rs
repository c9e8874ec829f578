use clap::Parser;

use hidden_single_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = hidden_single_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
