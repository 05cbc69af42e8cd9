//! Run orchestration: validate, dispatch to the experiment runner, and land a
//! digest manifest next to the artifacts.

use std::path::Path;
use std::time::Instant;

use crate::artifacts::{ArtifactSink, RunManifest, ToolInfo};
use crate::config::{Experiment, RunConfig};
use crate::error::{CliError, Result};
use crate::experiments;

/// Executes one validated run; the manifest is written even when a numerical
/// contract fails, so findings ship with their evidence.
///
/// Fails with a config error (no files written) when validation rejects the
/// config, and with a contract error (files already written) when the run
/// completes but a numerical invariant is violated.
pub fn execute(config: &RunConfig) -> Result<RunManifest> {
    let diagnostics = config.validate();
    if !diagnostics.is_empty() {
        return Err(CliError::Config(diagnostics.join("\n")));
    }

    let started = Instant::now();
    let mut sink = ArtifactSink::new(Path::new(&config.output_dir))?;
    let outcome = match &config.experiment {
        Experiment::EntropySuite(p) => experiments::entropy_suite::run(p, config.seed, &mut sink)?,
        Experiment::ColemanHepp(p) => {
            experiments::coleman_hepp::run(p, config.dense_cap, &mut sink)?
        }
        Experiment::Avalanche(p) => experiments::avalanche::run(p, &mut sink)?,
        Experiment::Anosov(p) => experiments::anosov::run(p, &mut sink)?,
        Experiment::Histories(p) => experiments::histories::run(p, config.seed, &mut sink)?,
    };

    let manifest = RunManifest {
        tool: ToolInfo::current(),
        experiment: config.experiment.name().to_string(),
        config: serde_json::to_value(config)?,
        engines: outcome.engines,
        artifacts: sink.records().to_vec(),
        violations: outcome.violations.clone(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(sink.dir().join("manifest.json"), text + "\n")?;

    if outcome.violations.is_empty() {
        Ok(manifest)
    } else {
        Err(CliError::Contract(outcome.violations.join("\n")))
    }
}
