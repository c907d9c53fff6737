//! Quantum and classical Fisher information about the slope g.

pub mod closed_form;
pub mod jintegrals;
pub mod nopro;
pub mod pipeline;
pub mod record;
pub mod search;

pub use closed_form::{cfi_ideal_nopro, cfi_ideal_pro, qfi_ideal, theta_max_ideal};
pub use jintegrals::{j_integrals, qfi_doppler, resonant_delta0, JIntegrals, JIntegrator, QfiDoppler};
pub use nopro::{cfi_doppler_nopro, CfiResult};
pub use pipeline::{
    cfi_pipeline, qfi_overlap_oracle, CfiEvaluator, GMode, Pipeline, PipelineExtent, Readout,
    Scenario, StepPolicy,
};
pub use record::{FisherRecord, Method};
pub use search::{find_theta_max, ThetaSearch};
