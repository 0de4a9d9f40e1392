use chandet_cli::cli;
use clap::Parser;

fn main() {
    let args = cli::Cli::parse();
    if let Err(err) = cli::run(args) {
        eprintln!("error: {err:#}");
        std::process::exit(cli::exit_code_for(&err));
    }
}
