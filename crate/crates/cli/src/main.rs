mod config;
mod error;
mod experiments;
mod svg;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;
use sha2::{Digest, Sha256};

use config::{ExperimentConfig, Format};
use error::CliError;
use experiments::{Ctx, REGISTRY};
use table::write_atomic;

const THREADS_ENV: &str = "CIRCUITLAB_THREADS";

/// Random-circuit experiments driven by TOML configs.
#[derive(Debug, Parser)]
#[command(name = "circuitlab", version, about)]
struct Cli {
    /// Experiment to run, or `list` to show them all.
    experiment: String,
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `sampling.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides the CIRCUITLAB_THREADS environment variable.
    #[arg(long)]
    threads: Option<usize>,
}

fn version() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), env!("CIRCUITLAB_GIT_REV"))
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a thread count")))?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    Ok(n)
}

fn read_config(path: &Path) -> Result<(ExperimentConfig, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
    Ok((ExperimentConfig::parse(text)?, bytes))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.experiment == "list" {
        let width = REGISTRY.iter().map(|e| e.name.len()).max().unwrap_or(0);
        for e in REGISTRY {
            println!("{:width$}  {}", e.name, e.about);
        }
        return Ok(());
    }
    let exp = experiments::find(&cli.experiment)
        .ok_or_else(|| CliError::Config(format!("unknown experiment `{}`; try `circuitlab list`", cli.experiment)))?;
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let (cfg, bytes) = read_config(&path)?;
    if let Some(name) = cfg.experiment.as_deref().filter(|n| *n != exp.name) {
        return Err(CliError::Config(format!("config is for `{name}`, not `{}`", exp.name)));
    }
    let seed = cli.seed.unwrap_or(cfg.sampling.seed);
    let out_dir = cli.out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads(cli.threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let output = (exp.run)(&Ctx { cfg: &cfg, seed, pool: &pool })?;
    let wall = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&out_dir)
        .map_err(|source| CliError::Io { path: out_dir.display().to_string(), source })?;
    let wants = |f: Format| cfg.output.formats.contains(&f);
    if wants(Format::Csv) {
        write_atomic(&out_dir.join(format!("{}.csv", exp.name)), &output.table.to_csv())?;
    }
    if wants(Format::Json) {
        let summary = json!({
            "experiment": exp.name,
            "metadata": {
                "config_sha256": format!("{:x}", Sha256::digest(&bytes)),
                "seed": seed,
                "version": version(),
                "wall_time_s": wall,
                "threads": pool.current_num_threads(),
                "rows": output.table.rows.len(),
                "columns": output.table.columns(),
            },
            "results": output.summary,
        });
        let mut text = serde_json::to_string_pretty(&summary).expect("plain data");
        text.push('\n');
        write_atomic(&out_dir.join(format!("{}.summary.json", exp.name)), text.as_bytes())?;
    }
    if wants(Format::Svg) {
        write_atomic(&out_dir.join(format!("{}.svg", exp.name)), output.plot.render().as_bytes())?;
    }
    eprintln!("{}: {} rows in {wall:.1} s -> {}", exp.name, output.table.rows.len(), out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
