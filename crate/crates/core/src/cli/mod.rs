//! Batch front-end: configuration, seeded parallel runs and artifacts.
//!
//! A run validates its configuration, executes one experiment on a rayon
//! pool of `workers` threads and writes `manifest.json`, `summary.json`, the
//! raw CSV tables and optional SVG plots into the output directory.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{Command, ConfigError, ExperimentConfig};
pub use output::{Check, ExperimentOutput, RunReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "rwrs", version, about = "Random walks in random scenery: batch experiments")]
pub struct Args {
    /// Experiment to run; may instead come from the `command` key of the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat `key = value` configuration file.
    #[arg(long, env = "RWRS_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "RWRS_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "RWRS_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, env = "RWRS_OUT")]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when any acceptance statistic fails.
    #[arg(long, env = "RWRS_STRICT")]
    pub strict: bool,
    /// Override a config key, e.g. `--set replicas=100`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Print the resolved canonical configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl Args {
    /// Resolves the configuration: defaults, then the file, then `--set`,
    /// then the dedicated flags (or their environment variables).
    pub fn resolve(&self) -> Result<(Command, ExperimentConfig), ConfigError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for a in &self.set {
            cfg.apply_assignment(a)?;
        }
        if let Some(c) = self.command {
            cfg.command = Some(c);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if self.strict {
            cfg.strict = true;
        }
        let command = cfg
            .command
            .ok_or_else(|| ConfigError::new("no command given on the command line or in the config"))?;
        Ok((command, cfg))
    }
}

/// Validates, runs `command` on a pool of `config.workers` threads and
/// writes the artifacts.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate(command)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let output = pool.install(|| experiments::execute(command, config))?;
    Ok(output::write_artifacts(config, &output)?)
}

/// Entry point of the `rwrs` binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (command, cfg) = match args.resolve() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if args.print_config {
        print!("{}", cfg.canonical());
        return EXIT_PASS;
    }
    match run(command, &cfg) {
        Ok(report) => {
            if let Some(checks) = report.summary["checks"].as_array() {
                for c in checks {
                    let ok = c["passed"].as_bool().unwrap_or(false);
                    println!(
                        "{} {} = {}",
                        if ok { "PASS" } else { "FAIL" },
                        c["name"].as_str().unwrap_or("?"),
                        c["value"]
                    );
                }
            }
            println!("wrote {} files to {}", report.files.len() + 1, report.out_dir.display());
            if cfg.strict && !report.passed {
                EXIT_FAILED
            } else {
                EXIT_PASS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
