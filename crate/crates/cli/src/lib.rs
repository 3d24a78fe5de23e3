//! Scenario runner for the fockmod verification suites.
//!
//! A scenario is a JSON document (schema `fockmod/1`) describing a grid, a
//! σ kernel, Weyl generators, named test vectors and the checks to run. The
//! runner builds the model, evaluates the checks with per-check seeds and
//! emits a deterministic report.

pub mod config;
pub mod report;
pub mod run;
pub mod scenarios;

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use report::{emit, Format, Report};
pub use run::{run, Overrides, Selection};
