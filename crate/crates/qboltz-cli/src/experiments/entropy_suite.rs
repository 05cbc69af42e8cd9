//! Randomized second-law and relative-entropy sweeps, exported as CSV plus a
//! JSON summary of the worst cases seen.

use qboltz::suites::{
    relative_entropy_suite, second_law_suite, RelativeEntropyConfig, SecondLawConfig, LEMMA_TOL,
    SECOND_LAW_GAP_TOL,
};
use serde::Serialize;

use crate::artifacts::{fmt_f64, ArtifactSink};
use crate::config::EntropySuiteParams;
use crate::error::{CliError, Result};
use crate::experiments::Outcome;

#[derive(Serialize)]
struct SecondLawSummary {
    dims: Vec<usize>,
    trials_per_dim: usize,
    min_gap: f64,
    gap_tolerance: f64,
    violations: usize,
}

#[derive(Serialize)]
struct LemmaSummary {
    name: String,
    worst_excess: f64,
}

#[derive(Serialize)]
struct Report {
    second_law: SecondLawSummary,
    lemma_dim: usize,
    lemma_trials: usize,
    lemma_tolerance: f64,
    lemma_worst_excess: f64,
    lemmas: Vec<LemmaSummary>,
}

/// Runs both suites and writes `second_law.csv`, `lemmas.csv`, `report.json`.
pub fn run(params: &EntropySuiteParams, seed: u64, sink: &mut ArtifactSink) -> Result<Outcome> {
    let second = second_law_suite(&SecondLawConfig {
        dims: params.dims.clone(),
        trials_per_dim: params.trials_per_dim,
        seed,
    })
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut rows = Vec::new();
    for t in &second.trials {
        rows.push(vec![
            t.dim.to_string(),
            t.trial.to_string(),
            t.cells.to_string(),
            fmt_f64(t.s_qb_initial),
            fmt_f64(t.s_qb_final),
            fmt_f64(t.gap),
        ]);
    }
    sink.write_csv(
        "second_law.csv",
        &["dim", "trial", "cells", "s_qb_initial", "s_qb_final", "gap"],
        &rows,
    )?;

    let lemmas = relative_entropy_suite(&RelativeEntropyConfig {
        dim: params.lemma_dim,
        trials_per_part: params.lemma_trials,
        seed,
    })
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut rows = Vec::new();
    for part in &lemmas.parts {
        for (i, excess) in part.excesses.iter().enumerate() {
            rows.push(vec![part.name.to_string(), i.to_string(), fmt_f64(*excess)]);
        }
    }
    sink.write_csv("lemmas.csv", &["part", "trial", "excess"], &rows)?;

    let report = Report {
        second_law: SecondLawSummary {
            dims: params.dims.clone(),
            trials_per_dim: params.trials_per_dim,
            min_gap: second.min_gap,
            gap_tolerance: SECOND_LAW_GAP_TOL,
            violations: second.violations,
        },
        lemma_dim: params.lemma_dim,
        lemma_trials: params.lemma_trials,
        lemma_tolerance: LEMMA_TOL,
        lemma_worst_excess: lemmas.worst_excess,
        lemmas: lemmas
            .parts
            .iter()
            .map(|p| LemmaSummary {
                name: p.name.to_string(),
                worst_excess: p.worst_excess,
            })
            .collect(),
    };
    sink.write_json("report.json", &report)?;

    let mut outcome = Outcome {
        engines: vec!["randomized-entropy-suite".to_string()],
        violations: Vec::new(),
    };
    if second.violations > 0 {
        outcome.violations.push(format!(
            "second-law gap fell below -{SECOND_LAW_GAP_TOL:e} in {} of {} trials (min gap {:e})",
            second.violations,
            second.trials.len(),
            second.min_gap,
        ));
    }
    if lemmas.worst_excess > LEMMA_TOL {
        outcome.violations.push(format!(
            "relative-entropy inequality violated by {:e} (tolerance {LEMMA_TOL:e})",
            lemmas.worst_excess,
        ));
    }
    Ok(outcome)
}
