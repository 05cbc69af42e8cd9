use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qboltz_cli::config::RunConfig;
use qboltz_cli::error::CliError;
use qboltz_cli::run;

/// Exact entropy and decoherence experiments: config in, artifacts out.
#[derive(Parser, Debug)]
#[command(name = "qboltz", version, about)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for the data-parallel kernels; default uses all cores.
    #[arg(long)]
    workers: Option<usize>,

    /// Largest chain half-length the dense oracle is built for; overrides the
    /// config's `dense_cap`.
    #[arg(long)]
    dense_cap: Option<usize>,

    /// Validate the config and print diagnostics without running.
    #[arg(long)]
    validate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match try_main(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn try_main(cli: &Cli) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(out) = &cli.out {
        config.output_dir = out.display().to_string();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(cap) = cli.dense_cap {
        config.dense_cap = cap;
    }

    if cli.validate {
        let diagnostics = config.validate();
        if diagnostics.is_empty() {
            println!("config ok: {} run into {}", config.experiment.name(), config.output_dir);
            return Ok(ExitCode::SUCCESS);
        }
        for d in &diagnostics {
            println!("{d}");
        }
        return Ok(ExitCode::from(qboltz_cli::error::EXIT_CONFIG));
    }

    if let Some(workers) = cli.workers {
        // A second initialization in the same process is harmless: the pool
        // keeps its first size and the run proceeds.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }

    let manifest = run::execute(&config)?;
    println!(
        "{}: {} artifacts in {} ({} ms)",
        manifest.experiment,
        manifest.artifacts.len(),
        config.output_dir,
        manifest.wall_time_ms
    );
    for artifact in &manifest.artifacts {
        println!("  {}  {}", artifact.sha256, artifact.file);
    }
    Ok(ExitCode::SUCCESS)
}
