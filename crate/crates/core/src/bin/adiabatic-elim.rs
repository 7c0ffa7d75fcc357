use clap::Parser;

use adiabatic_elim::cli::{run, Cli, DT_ENV};

fn main() {
    let cli = Cli::parse();
    let env_dt = std::env::var(DT_ENV).ok();
    let code = run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock(), env_dt.as_deref());
    std::process::exit(code);
}
