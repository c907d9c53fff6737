//! Figure reproduction and parameter sweeps on top of `rabi-core`, writing
//! CSV datasets, a JSON metadata sidecar and optional SVG plots.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod runners;

pub use config::{Config, ConfigValue, ExperimentKind, ExperimentSpec};
pub use error::{ExperimentError, Result};
pub use runners::run;
