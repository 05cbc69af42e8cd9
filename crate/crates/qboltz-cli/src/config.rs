//! Run configuration: a single JSON document selecting an experiment, its
//! parameters, a seed, and where artifacts land.
//!
//! Two field types need care so that configs and echoes stay lossless:
//! amplitudes travel as `[re, im]` pairs, and couplings accept the string
//! `"inf"` for the fully polarized limit that JSON numbers cannot express.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Complex amplitude serialized as a two-element `[re, im]` array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amp(pub Complex64);

impl Amp {
    pub fn new(re: f64, im: f64) -> Self {
        Amp(Complex64::new(re, im))
    }
}

impl Serialize for Amp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Amp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct AmpVisitor;
        impl<'de> Visitor<'de> for AmpVisitor {
            type Value = Amp;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a `[re, im]` pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Amp, A::Error> {
                let re: f64 =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Amp::new(re, im))
            }
        }
        deserializer.deserialize_seq(AmpVisitor)
    }
}

/// Coupling that is a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling(pub f64);

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CouplingVisitor;
        impl Visitor<'_> for CouplingVisitor {
            type Value = Coupling;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Coupling, E> {
                Ok(Coupling(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Coupling, E> {
                Ok(Coupling(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Coupling, E> {
                Ok(Coupling(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Coupling, E> {
                match v {
                    "inf" | "infinity" => Ok(Coupling(f64::INFINITY)),
                    other => Err(de::Error::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        deserializer.deserialize_any(CouplingVisitor)
    }
}

fn balanced() -> Amp {
    Amp::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// Parameters of the randomized entropy suites.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EntropySuiteParams {
    /// Dimensions swept by the second-law suite.
    pub dims: Vec<usize>,
    /// Randomized triples per dimension.
    pub trials_per_dim: usize,
    /// Dimension of the relative-entropy lemma suite (even, so the partial
    /// trace can split it into two factors).
    pub lemma_dim: usize,
    /// Randomized trials per lemma part.
    pub lemma_trials: usize,
}

impl Default for EntropySuiteParams {
    fn default() -> Self {
        Self { dims: vec![4, 8], trials_per_dim: 64, lemma_dim: 6, lemma_trials: 40 }
    }
}

/// Parameters of the spin-chain measurement sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ColemanHeppParams {
    /// Chain half-length `L` (the chain has `N = 2L + 1` sites); ignored when
    /// `n_sites` is given.
    pub half_length: usize,
    /// Explicit site count; must be odd so the polarization sign never
    /// vanishes.
    pub n_sites: Option<usize>,
    /// Qubit-up amplitude as `[re, im]`.
    pub c_plus: Amp,
    /// Qubit-down amplitude as `[re, im]`.
    pub c_minus: Amp,
    /// Chain preparation coupling `beta * B`; `"inf"` polarizes fully.
    pub beta_b: Coupling,
    /// Initial polarization sign of the chain.
    pub sign: i8,
}

impl Default for ColemanHeppParams {
    fn default() -> Self {
        Self {
            half_length: 2,
            n_sites: None,
            c_plus: balanced(),
            c_minus: balanced(),
            beta_b: Coupling(f64::INFINITY),
            sign: 1,
        }
    }
}

impl ColemanHeppParams {
    /// Half-length resolved from `n_sites` when given; errors stay in
    /// `validate`, so an even request resolves to its floor here.
    pub fn resolved_half_length(&self) -> usize {
        match self.n_sites {
            Some(n) => n.saturating_sub(1) / 2,
            None => self.half_length,
        }
    }
}

/// Parameters of the avalanche register run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AvalancheParamsConfig {
    /// Even number of register spins.
    pub n_sites: usize,
    /// One-line image list of the movement stage; omitted means cyclic.
    pub permutation: Option<Vec<usize>>,
    /// Steps the entropy trace covers; omitted means one full orbit.
    pub steps: Option<usize>,
    /// Frozen-branch amplitude as `[re, im]`.
    pub c_plus: Amp,
    /// Avalanche-branch amplitude as `[re, im]`.
    pub c_minus: Amp,
}

impl Default for AvalancheParamsConfig {
    fn default() -> Self {
        Self { n_sites: 4, permutation: None, steps: None, c_plus: balanced(), c_minus: balanced() }
    }
}

/// Optional second-threshold inputs of the hyperbolic model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CaseBConfig {
    /// Real part of the second contraction rate (positive).
    pub re_lambda2: f64,
    /// Second-direction packet width parameter (nonzero).
    pub alpha_p2: f64,
    /// Onset time of the second contraction (nonnegative).
    pub t0: f64,
}

/// Parameters of the hyperbolic single-particle run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AnosovParamsConfig {
    /// Lyapunov rate (nonzero; negative contracts the translation).
    pub lyapunov: f64,
    /// Kick strength `mu` (positive).
    pub coupling: f64,
    /// Packet support half-width `S0` (positive).
    pub support_radius: f64,
    /// Sample count of the packet grid.
    pub grid_points: usize,
    /// Last time of the overlap sweep.
    pub t_max: f64,
    /// Number of sweep points including both ends.
    pub t_steps: usize,
    /// Second-threshold inputs, when the run should evaluate them.
    pub case_b: Option<CaseBConfig>,
}

impl Default for AnosovParamsConfig {
    fn default() -> Self {
        Self {
            lyapunov: 1.0,
            coupling: 1.0,
            support_radius: 0.25,
            grid_points: 1025,
            t_max: 3.0,
            t_steps: 121,
            case_b: None,
        }
    }
}

/// Parameters of the randomized history-functional run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct HistoriesParams {
    /// Hilbert-space dimension.
    pub dim: usize,
    /// Number of (unitary, family) events.
    pub events: usize,
    /// Cells per event family.
    pub cells: usize,
}

impl Default for HistoriesParams {
    fn default() -> Self {
        Self { dim: 8, events: 2, cells: 2 }
    }
}

/// Experiment selector plus its parameter record.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "experiment", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    EntropySuite(EntropySuiteParams),
    ColemanHepp(ColemanHeppParams),
    Avalanche(AvalancheParamsConfig),
    Anosov(AnosovParamsConfig),
    Histories(HistoriesParams),
}

impl Experiment {
    /// Kebab-case name used in artifacts and manifests.
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::EntropySuite(_) => "entropy-suite",
            Experiment::ColemanHepp(_) => "coleman-hepp",
            Experiment::Avalanche(_) => "avalanche",
            Experiment::Anosov(_) => "anosov",
            Experiment::Histories(_) => "histories",
        }
    }
}

/// One parsed run: experiment, seed, output directory, dense-oracle cap.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    /// Master seed; every randomized quantity derives from it.
    pub seed: u64,
    /// Directory artifacts land in; a CLI flag may override it.
    pub output_dir: String,
    /// Largest half-length the dense cross-check oracle is built for.
    pub dense_cap: usize,
}

fn default_output_dir() -> String {
    "out".to_string()
}

fn default_dense_cap() -> usize {
    qboltz::coleman_hepp::DEFAULT_DENSE_CAP
}

impl RunConfig {
    /// Parses a JSON config document; `params` may be omitted for defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            experiment: String,
            #[serde(default)]
            params: Option<serde_json::Value>,
            #[serde(default)]
            seed: u64,
            #[serde(default = "default_output_dir")]
            output_dir: String,
            #[serde(default = "default_dense_cap")]
            dense_cap: usize,
        }
        fn params<T: serde::de::DeserializeOwned>(v: Option<serde_json::Value>) -> Result<T> {
            let v = v.unwrap_or(serde_json::Value::Object(serde_json::Map::new()));
            serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let experiment = match raw.experiment.as_str() {
            "entropy-suite" => Experiment::EntropySuite(params(raw.params)?),
            "coleman-hepp" => Experiment::ColemanHepp(params(raw.params)?),
            "avalanche" => Experiment::Avalanche(params(raw.params)?),
            "anosov" => Experiment::Anosov(params(raw.params)?),
            "histories" => Experiment::Histories(params(raw.params)?),
            other => {
                return Err(CliError::Config(format!(
                    "unknown experiment {other:?}; expected one of entropy-suite, \
                     coleman-hepp, avalanche, anosov, histories"
                )))
            }
        };
        Ok(Self {
            experiment,
            seed: raw.seed,
            output_dir: raw.output_dir,
            dense_cap: raw.dense_cap,
        })
    }

    /// Diagnostics for every violated invariant; empty means runnable.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.output_dir.is_empty() {
            out.push("output_dir must not be empty".to_string());
        }
        if self.dense_cap == 0 {
            out.push("dense_cap must be at least 1".to_string());
        }
        match &self.experiment {
            Experiment::EntropySuite(p) => {
                if p.dims.is_empty() {
                    out.push("entropy-suite needs at least one dimension".to_string());
                }
                for &d in &p.dims {
                    if !(2..=64).contains(&d) {
                        out.push(format!("second-law dimension {d} is outside 2..=64"));
                    }
                }
                if p.trials_per_dim == 0 || p.lemma_trials == 0 {
                    out.push("trial counts must be positive".to_string());
                }
                if !(4..=64).contains(&p.lemma_dim) || p.lemma_dim % 2 != 0 {
                    out.push(format!(
                        "lemma dimension {} must be even and within 4..=64 so the partial \
                         trace can split it",
                        p.lemma_dim
                    ));
                }
            }
            Experiment::ColemanHepp(p) => {
                if let Some(n) = p.n_sites {
                    if n % 2 == 0 {
                        out.push(format!(
                            "chain site count must be odd (N = 2L + 1) so the polarization \
                             sign never vanishes; got N = {n}"
                        ));
                    }
                    if n == 0 {
                        out.push("chain site count must be positive".to_string());
                    }
                }
                check_amplitudes(&mut out, p.c_plus, p.c_minus);
                if p.beta_b.0.is_nan() || p.beta_b.0 < 0.0 {
                    out.push(format!("coupling beta*B must be nonnegative, got {}", p.beta_b.0));
                }
                if p.sign != 1 && p.sign != -1 {
                    out.push(format!("polarization sign must be +1 or -1, got {}", p.sign));
                }
                if p.resolved_half_length() > qboltz::coleman_hepp::ENUMERATION_CAP {
                    out.push(format!(
                        "half-length {} exceeds the enumeration cap of {}",
                        p.resolved_half_length(),
                        qboltz::coleman_hepp::ENUMERATION_CAP
                    ));
                }
            }
            Experiment::Avalanche(p) => {
                if p.n_sites == 0
                    || p.n_sites % 2 != 0
                    || p.n_sites > qboltz::avalanche::ORBIT_CAP_SITES
                {
                    out.push(format!(
                        "avalanche register needs an even site count within 2..={}, got {}",
                        qboltz::avalanche::ORBIT_CAP_SITES,
                        p.n_sites
                    ));
                }
                if let Some(perm) = &p.permutation {
                    let mut images = perm.clone();
                    images.sort_unstable();
                    if images != (1..=p.n_sites).collect::<Vec<_>>() {
                        out.push(format!(
                            "movement list must permute 1..={}, got {perm:?}",
                            p.n_sites
                        ));
                    }
                }
                if p.steps == Some(0) {
                    out.push("steps must be positive when given".to_string());
                }
                check_amplitudes(&mut out, p.c_plus, p.c_minus);
            }
            Experiment::Anosov(p) => {
                if p.lyapunov == 0.0 || !p.lyapunov.is_finite() {
                    out.push(format!("lyapunov rate must be finite and nonzero, got {}", p.lyapunov));
                }
                if !(p.coupling > 0.0) || !p.coupling.is_finite() {
                    out.push(format!("coupling must be positive, got {}", p.coupling));
                }
                if !(p.support_radius > 0.0) || !p.support_radius.is_finite() {
                    out.push(format!("support radius must be positive, got {}", p.support_radius));
                }
                if p.grid_points < 4 {
                    out.push(format!("grid needs at least 4 points, got {}", p.grid_points));
                } else if p.support_radius > 0.0 {
                    let per_unit = p.grid_points as f64 / (2.0 * p.support_radius);
                    if per_unit < qboltz::anosov::MIN_POINTS_PER_UNIT {
                        out.push(format!(
                            "grid resolves only {per_unit:.1} points per unit length, \
                             below the minimum of {}",
                            qboltz::anosov::MIN_POINTS_PER_UNIT
                        ));
                    }
                }
                if !(p.t_max > 0.0) {
                    out.push(format!("sweep end must be positive, got {}", p.t_max));
                }
                if p.t_steps < 2 {
                    out.push(format!("sweep needs at least 2 points, got {}", p.t_steps));
                }
                if let Some(cb) = &p.case_b {
                    if !(cb.re_lambda2 > 0.0) {
                        out.push(format!(
                            "second contraction rate must be positive, got {}",
                            cb.re_lambda2
                        ));
                    }
                    if cb.alpha_p2 == 0.0 {
                        out.push("second-direction width must be nonzero".to_string());
                    }
                    if cb.t0 < 0.0 {
                        out.push(format!("onset time must be nonnegative, got {}", cb.t0));
                    }
                }
            }
            Experiment::Histories(p) => {
                if !(2..=16).contains(&p.dim) {
                    out.push(format!("history dimension {} is outside 2..=16", p.dim));
                }
                if !(1..=6).contains(&p.events) {
                    out.push(format!("event count {} is outside 1..=6", p.events));
                }
                if p.cells < 2 || p.cells > p.dim.max(2) {
                    out.push(format!("cells per event {} is outside 2..=dim", p.cells));
                }
                let total = p.cells.checked_pow(p.events as u32);
                if total.is_none_or(|t| t > 4096) {
                    out.push("the history tree exceeds 4096 branches".to_string());
                }
            }
        }
        out
    }
}

fn check_amplitudes(out: &mut Vec<String>, c_plus: Amp, c_minus: Amp) {
    let norm_sq = c_plus.0.norm_sqr() + c_minus.0.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-12 {
        out.push(format!(
            "amplitudes violate the normalization |c_plus|^2 + |c_minus|^2 = 1 (got {norm_sq})"
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults_and_validates() {
        let cfg = RunConfig::from_json(r#"{"experiment": "avalanche"}"#).expect("parses");
        assert_eq!(cfg.experiment.name(), "avalanche");
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.output_dir, "out");
        assert!(cfg.validate().is_empty(), "defaults must validate clean");
    }

    #[test]
    fn unknown_experiment_is_a_parse_error() {
        let err = RunConfig::from_json(r#"{"experiment": "warp-drive"}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn unnormalized_amplitudes_get_a_diagnostic() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "coleman-hepp",
                "params": {"c_plus": [1.0, 0.0], "c_minus": [0.45, 0.0]}}"#,
        )
        .expect("parses");
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("normalization"), "diagnostic names the invariant: {diags:?}");
    }

    #[test]
    fn even_chain_request_cites_the_odd_requirement() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "coleman-hepp", "params": {"n_sites": 4}}"#,
        )
        .expect("parses");
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("odd"), "diagnostic cites oddness: {diags:?}");
    }

    #[test]
    fn coupling_round_trips_infinity_as_text() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "coleman-hepp", "params": {"beta_b": "inf"}}"#,
        )
        .expect("parses");
        let echoed = serde_json::to_string(&cfg).expect("serializes");
        assert!(echoed.contains("\"inf\""), "infinite coupling echoes as text: {echoed}");
        let back = RunConfig::from_json(&echoed).expect("round trip");
        assert_eq!(cfg, back);
    }

    #[test]
    fn amplitudes_round_trip_as_pairs() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "avalanche", "params": {"c_plus": [0.6, 0.0], "c_minus": [0.0, 0.8]}}"#,
        )
        .expect("parses");
        assert!(cfg.validate().is_empty());
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).expect("serializes"))
            .expect("round trip");
        assert_eq!(cfg, back);
    }
}
