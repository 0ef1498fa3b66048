//! Scenario runner for `liedeg-core`: JSON configs, end-to-end degree and
//! spectral pipelines, report/CSV/SVG emission, and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod scenario;
pub mod series;

pub use config::{ScenarioConfig, ScenarioName};
pub use error::{LabError, LabResult};
pub use scenario::{scenario_run, RunOutput, RunReport};
