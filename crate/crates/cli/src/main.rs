use clap::Parser;
use ecnf2mip_cli::{log_level, stdio_run, Cli};

fn main() {
    let level = log_level(std::env::var("ECNF2MIP_LOG").ok().as_deref());
    env_logger::Builder::new().filter_level(level).init();
    std::process::exit(stdio_run(Cli::parse()));
}
