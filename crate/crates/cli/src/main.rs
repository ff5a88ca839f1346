use clap::Parser;
use ctau_cli::{exit, run, Cli};

fn main() {
    // clap reports usage errors with exit code 2, matching the parse-error code
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("ctau: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(exit::OK);
}
