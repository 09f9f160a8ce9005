use clap::Parser;

use infodom::cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(cli).and_then(|(outcome, out)| emit(&outcome, out.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
