mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;
use nftgraph::ingest::ParseMode;
use tracing_subscriber::EnvFilter;

use args::{Cli, Command};
use commands::Ctx;
use config::{DEFAULT_OUT, FileConfig};
use error::CliError;

fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(jobs) = cli.common.jobs.or(cfg.jobs) {
        if jobs == 0 {
            return Err(CliError::config("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let strict = cli.common.strict || cfg.strict.unwrap_or(false);
    let ctx = Ctx {
        out: cli.common.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| DEFAULT_OUT.into()),
        mode: if strict { ParseMode::Strict } else { ParseMode::Lenient },
        seed: cli.common.seed.or(cfg.seed),
        cfg,
    };
    match &cli.command {
        Command::Fetch(a) => commands::fetch(&ctx, a),
        Command::Parse(a) => commands::parse(&ctx, a),
        Command::Graph(a) => commands::graph(&ctx, a),
        Command::Stats(a) => commands::stats(&ctx, a),
        Command::Indicators(a) => commands::indicators(&ctx, a),
        Command::Detect(a) => commands::detect(&ctx, a),
        Command::Gen => commands::gen_fixture(&ctx),
        Command::Compare(a) => commands::compare(&ctx, a),
    }
}

fn main() -> ExitCode {
    let filter = EnvFilter::try_from_env("NFTGRAPH_LOG").unwrap_or_else(|_| EnvFilter::new("warn"));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
