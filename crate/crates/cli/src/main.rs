use clap::Parser;

use casimir_cli::args::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = casimir_cli::run(&cli) {
        eprintln!("casimir: {e}");
        std::process::exit(e.exit_code());
    }
}
