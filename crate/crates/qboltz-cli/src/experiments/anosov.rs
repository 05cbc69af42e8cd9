//! Hyperbolic single-particle sweep: the branch displacement, the branch
//! overlap on a time grid, and the threshold report with its exact oracle.

use qboltz::anosov::{
    decoherence_time_case_a, decoherence_time_case_b, overlap, support_clearing_time,
    translation_magnitude, AnosovParams, CaseB, WavePacket,
};
use serde::Serialize;

use crate::artifacts::{fmt_f64, ArtifactSink};
use crate::config::AnosovParamsConfig;
use crate::error::{CliError, Result};
use crate::experiments::Outcome;

/// Overlap magnitude the contract allows after the displacement has cleared
/// both branch supports.
const CLEARED_OVERLAP_TOL: f64 = 1e-8;

#[derive(Serialize)]
struct CaseBOut {
    a2: f64,
    t02: f64,
    decoheres: bool,
    decoherence_time: Option<f64>,
}

#[derive(Serialize)]
struct Report {
    lyapunov: f64,
    coupling: f64,
    support_radius: f64,
    a1: f64,
    t01: f64,
    a1_below_one: bool,
    clears: bool,
    clearing_time: Option<f64>,
    max_overlap_past_clearing: Option<f64>,
    cleared_overlap_tolerance: f64,
    case_b: Option<CaseBOut>,
    grid_points: usize,
    points_per_unit: f64,
}

/// Sweeps the overlap over the time grid and writes `overlap.csv`, `report.json`.
pub fn run(params: &AnosovParamsConfig, sink: &mut ArtifactSink) -> Result<Outcome> {
    let mut model =
        AnosovParams::new(params.lyapunov, params.coupling, params.support_radius)
            .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(cb) = &params.case_b {
        model = model
            .with_case_b(CaseB { re_lambda2: cb.re_lambda2, alpha_p2: cb.alpha_p2, t0: cb.t0 })
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let phi = WavePacket::bump(params.support_radius, params.grid_points)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let case_a = decoherence_time_case_a(&model);
    let clearing = support_clearing_time(&model);

    let mut rows = Vec::new();
    let mut max_past_clearing = clearing.time().map(|_| 0.0f64);
    for k in 0..params.t_steps {
        let t = params.t_max * k as f64 / (params.t_steps - 1) as f64;
        let s = translation_magnitude(t, &model);
        let ov = overlap(t, &phi, &model)
            .map_err(|e| CliError::Config(e.to_string()))?
            .norm();
        let cleared = clearing.time().is_some_and(|tc| t >= tc);
        if cleared {
            max_past_clearing = Some(max_past_clearing.unwrap_or(0.0).max(ov));
        }
        rows.push(vec![
            fmt_f64(t),
            fmt_f64(s),
            fmt_f64(ov),
            cleared.to_string(),
            (t >= case_a.t01).to_string(),
        ]);
    }
    sink.write_csv(
        "overlap.csv",
        &["t", "translation", "abs_overlap", "cleared", "past_nominal_half_life"],
        &rows,
    )?;

    let mut outcome = Outcome {
        engines: vec!["bump-packet-quadrature".to_string()],
        violations: Vec::new(),
    };
    if let Some(worst) = max_past_clearing {
        if worst > CLEARED_OVERLAP_TOL {
            outcome.violations.push(format!(
                "overlap stays at {worst:e} past the support-clearing time \
                 (tolerance {CLEARED_OVERLAP_TOL:e})",
            ));
        }
    }

    let case_b = if model.case_b.is_some() {
        let cb = decoherence_time_case_b(&model).map_err(|e| CliError::Config(e.to_string()))?;
        Some(CaseBOut {
            a2: cb.a2,
            t02: cb.t02,
            decoheres: !cb.decoherence.is_never(),
            decoherence_time: cb.decoherence.time(),
        })
    } else {
        None
    };
    sink.write_json(
        "report.json",
        &Report {
            lyapunov: params.lyapunov,
            coupling: params.coupling,
            support_radius: params.support_radius,
            a1: case_a.a1,
            t01: case_a.t01,
            a1_below_one: case_a.a1_below_one,
            clears: !clearing.is_never(),
            clearing_time: clearing.time(),
            max_overlap_past_clearing: max_past_clearing,
            cleared_overlap_tolerance: CLEARED_OVERLAP_TOL,
            case_b,
            grid_points: params.grid_points,
            points_per_unit: phi.points_per_unit(),
        },
    )?;
    Ok(outcome)
}
