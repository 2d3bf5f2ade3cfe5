use clap::Parser;
use mana::cli::Cli;
use mana::{commands, config};

fn main() {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(commands::exit::IO);
        }
    };
    let cli = Cli::parse_from(argv);
    let code = match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            commands::exit_code(&e)
        }
    };
    std::process::exit(code);
}
