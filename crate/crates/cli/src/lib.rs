//! The `deepfuse` command-line tool as a library, so that tests can drive
//! it in-process.

pub mod cli;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod fixtures;
pub mod manifest;

use std::ffi::OsString;

use clap::Parser;

use crate::cli::{Cli, Command, GenFixturesArgs};
use crate::config::RunConfig;
use crate::error::Result;
use crate::manifest::ManifestBuilder;

pub use error::CliError;

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("DEEPFUSE_LOG")
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn gen_fixtures(args: &GenFixturesArgs, cfg: &RunConfig) -> Result<()> {
    let set = fixtures::generate(&args.out, args.videos, args.clips, cfg.seed)?;
    let mut manifest = ManifestBuilder::new("gen-fixtures", cfg, &args.out);
    manifest.option("videos", args.videos);
    manifest.option("clips", args.clips);
    for f in &set.files {
        manifest.output(f);
    }
    manifest.finish()?;
    log::info!("{} labelled items written to {}", set.labels.len(), args.out.display());
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.global.verbose, cli.global.quiet);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let mut overrides = g.overrides.clone();
    if let Some(s) = g.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(j) = g.jobs {
        overrides.push(("jobs".into(), j.to_string()));
    }
    let cfg = RunConfig::load(g.config.as_deref(), &overrides)?;
    match &cli.command {
        Command::ExtractVideo(a) => commands::extract_video(a, &cfg),
        Command::ExtractAudio(a) => commands::extract_audio(a, &cfg),
        Command::Train(a) => commands::train(a, &cfg),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Assemble(a) => commands::assemble(a, &cfg),
        Command::Fuse(a) => commands::fuse(a, &cfg),
        Command::Importance(a) => commands::importance(a, &cfg),
        Command::GenFixtures(a) => gen_fixtures(a, &cfg),
    }
}
