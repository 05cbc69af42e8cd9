//! Experiment runner around the `qboltz` library: one JSON config in, CSV
//! and JSON artifacts plus a sha256 digest manifest out.
//!
//! Exit codes separate the three failure families: `2` for a config the
//! validator rejects (nothing is written), `3` for a run whose numerical
//! contracts fail (artifacts and manifest are written first, since a genuine
//! violation is a reportable finding), `1` for environment errors.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
