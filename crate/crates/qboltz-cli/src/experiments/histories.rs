//! Randomized history-functional run: draw a state and a chain of
//! (unitary, cell family) events, then export the full functional and its
//! diagonal branch weights.

use qboltz::histories::{
    decoherence_functional, decoheres, history_probabilities, HistorySpec,
};
use qboltz::qstate::hermiticity_deviation;
use qboltz::random::{random_density_matrix, random_projector_family, random_unitary};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::artifacts::{fmt_f64, ArtifactSink};
use crate::config::HistoriesParams;
use crate::error::{CliError, Result};
use crate::experiments::Outcome;

/// Branch weights must sum to one within this much.
const WEIGHT_SUM_TOL: f64 = 1e-10;

/// The functional must be Hermitian within this much.
const HERMITICITY_TOL: f64 = 1e-12;

/// The functional's eigenvalues may dip below zero by at most this much.
const PSD_TOL: f64 = 1e-10;

/// Decoherence verdict reported at this off-diagonal magnitude.
const DECOHERENCE_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct Report {
    dim: usize,
    events: usize,
    cells: usize,
    shape: Vec<usize>,
    branches: usize,
    weight_sum: f64,
    weight_sum_tolerance: f64,
    max_offdiagonal: f64,
    hermiticity_deviation: f64,
    hermiticity_tolerance: f64,
    min_eigenvalue: f64,
    psd_tolerance: f64,
    decoheres_at_tolerance: bool,
    decoherence_tolerance: f64,
}

fn dash_label(label: &[usize]) -> String {
    label.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
}

/// Runs one randomized history draw and writes `functional.csv`,
/// `weights.csv`, `report.json`.
pub fn run(params: &HistoriesParams, seed: u64, sink: &mut ArtifactSink) -> Result<Outcome> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let rho0 = random_density_matrix(&mut rng, params.dim);
    let events = (0..params.events)
        .map(|_| {
            let u = random_unitary(&mut rng, params.dim);
            let cells = random_projector_family(&mut rng, params.dim, params.cells);
            (u, cells)
        })
        .collect();
    let spec = HistorySpec::new(events).map_err(|e| CliError::Config(e.to_string()))?;
    let functional =
        decoherence_functional(&rho0, &spec).map_err(|e| CliError::Config(e.to_string()))?;

    let m = functional.matrix();
    let mut rows = Vec::new();
    for row in 0..functional.len() {
        for col in 0..functional.len() {
            rows.push(vec![
                row.to_string(),
                col.to_string(),
                dash_label(&functional.label_of_index(row)),
                dash_label(&functional.label_of_index(col)),
                fmt_f64(m[(row, col)].re),
                fmt_f64(m[(row, col)].im),
            ]);
        }
    }
    sink.write_csv(
        "functional.csv",
        &["row", "col", "row_label", "col_label", "re", "im"],
        &rows,
    )?;

    let weights = history_probabilities(&functional);
    let mut rows = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            dash_label(&functional.label_of_index(i)),
            fmt_f64(*w),
        ]);
    }
    sink.write_csv("weights.csv", &["index", "label", "weight"], &rows)?;

    let weight_sum: f64 = weights.iter().sum();
    let herm = hermiticity_deviation(m);
    let min_eigenvalue = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));

    let mut outcome = Outcome {
        engines: vec!["chain-operator-functional".to_string()],
        violations: Vec::new(),
    };
    if (weight_sum - 1.0).abs() > WEIGHT_SUM_TOL {
        outcome.violations.push(format!(
            "branch weights sum to {weight_sum} (tolerance {WEIGHT_SUM_TOL:e} around 1)",
        ));
    }
    if herm > HERMITICITY_TOL {
        outcome.violations.push(format!(
            "functional deviates from Hermitian by {herm:e} (tolerance {HERMITICITY_TOL:e})",
        ));
    }
    if min_eigenvalue < -PSD_TOL {
        outcome.violations.push(format!(
            "functional has eigenvalue {min_eigenvalue:e} (tolerance -{PSD_TOL:e})",
        ));
    }

    sink.write_json(
        "report.json",
        &Report {
            dim: params.dim,
            events: params.events,
            cells: params.cells,
            shape: functional.shape().to_vec(),
            branches: functional.len(),
            weight_sum,
            weight_sum_tolerance: WEIGHT_SUM_TOL,
            max_offdiagonal: functional.max_offdiagonal(),
            hermiticity_deviation: herm,
            hermiticity_tolerance: HERMITICITY_TOL,
            min_eigenvalue,
            psd_tolerance: PSD_TOL,
            decoheres_at_tolerance: decoheres(&functional, DECOHERENCE_TOL),
            decoherence_tolerance: DECOHERENCE_TOL,
        },
    )?;
    Ok(outcome)
}
