//! Scenario synthesis, single trials and Monte Carlo sweeps.

mod config;
mod experiment;
mod report;
mod scenario;
mod trial;

pub use config::{ArraySize, BeamMode, ExperimentConfig, GridPoint, PlaneKind, SamplingBox};
pub use experiment::{
    mean_distance_error, percentile, run_experiment, run_experiment_with, PointReport, Summary,
};
pub use report::{write_curve_csv, write_raw_csv, CurveWriter, CURVE_HEADER, RAW_HEADER};
pub use scenario::{synthesize_observations, BoxSampler, Scenario, ScenarioSampler};
pub use trial::{run_trial, PointSetup, TrialResult, TrialStatus, TrialStreams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid `{field}`: {message}")]
    InvalidConfig { field: &'static str, message: String },
    #[error("no successful trial to average")]
    EmptyInput,
    #[error("scenario sampler gave up after {0} rejected draws")]
    SamplerExhausted(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        SimError::InvalidConfig {
            field,
            message: message.into(),
        }
    }
}
