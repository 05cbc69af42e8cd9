//! One runner per experiment; each writes its artifacts through the shared
//! sink and reports which engines ran and which contracts, if any, failed.

pub mod anosov;
pub mod avalanche;
pub mod coleman_hepp;
pub mod entropy_suite;
pub mod histories;

/// What a runner hands back besides its artifacts.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Engines the run exercised, for the manifest.
    pub engines: Vec<String>,
    /// Numerical-contract findings; empty on a clean run.
    pub violations: Vec<String>,
}
