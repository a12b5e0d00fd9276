// Copyright 2026 qstirling contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qstirling_cli::run::{run, Command, Request, Status, DEFAULT_R_HI, DEFAULT_R_LO};
use qstirling_cli::WORKERS_ENV;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// One cycle at the configured r.
    Cycle,
    /// One cycle per r at the configured sigma.
    SweepR,
    /// Maximum-power search per sigma.
    SweepSigma,
    /// Every (sigma, r) pair.
    Contour,
}

/// Finite-time quantum Stirling engine simulator.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    command: Cmd,
    /// Configuration file (`key = value [unit]` lines); defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated r values (ascending).
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    /// Comma-separated sigma values.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    /// Lower end of the power-search bracket.
    #[arg(long, default_value_t = DEFAULT_R_LO)]
    r_lo: u32,
    /// Upper end of the power-search bracket.
    #[arg(long, default_value_t = DEFAULT_R_HI)]
    r_hi: u32,
    /// Allow sigma < 4, which needs very large r.
    #[arg(long)]
    allow_long_running: bool,
    /// Largest r evaluated for sigma < 4.
    #[arg(long, default_value_t = qstirling::sweep::DEFAULT_LONG_RUNNING_R_CAP)]
    r_cap: u32,
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot start {n} workers: {e}"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if let Err(msg) = configure_workers() {
        eprintln!("qstirling: {msg}");
        return ExitCode::from(Status::Parse.code() as u8);
    }
    let request = Request {
        command: match args.command {
            Cmd::Cycle => Command::Cycle,
            Cmd::SweepR => Command::SweepR,
            Cmd::SweepSigma => Command::SweepSigma,
            Cmd::Contour => Command::Contour,
        },
        config: args.config,
        out: args.out,
        manifest: args.manifest,
        r_values: args.r,
        sigma_values: args.sigma,
        r_lo: args.r_lo,
        r_hi: args.r_hi,
        allow_long_running: args.allow_long_running,
        r_cap: args.r_cap,
    };
    let outcome = run(&request);
    if outcome.status == Status::Success {
        log::info!("{}", outcome.message);
    } else {
        eprintln!("qstirling: {}", outcome.message);
    }
    ExitCode::from(outcome.status.code() as u8)
}
