//! Black-box models and labeling functions.
//!
//! A model maps the alternating input/output history plus the current input
//! to the next output. Models never see monitor state. Every call carries a
//! [`SampleParams`] whose seed fully determines a stochastic model's draw, so
//! independent samples are obtained by varying the seed.

mod accuracy;
mod endpoint;
mod labelers;
mod scripted;

pub use accuracy::{
    measure_labeler_accuracy, proportion_ci, AccuracyError, AccuracyReport, PropAccuracy,
};
pub use endpoint::{EndpointConfig, EndpointModel};
pub use labelers::{EndpointLabeler, MatchField, Matcher, Rule, RuleLabeler};
pub use scripted::{Categorical, ScriptedModel, DEFAULT_STOP_TOKEN};

use thiserror::Error;

use crate::trace::StepRecord;

/// Sampling temperature for primary action generation.
pub const ACTION_TEMPERATURE: f64 = 0.2;
/// Sampling temperature for predictive samples and resampling candidates.
pub const SAMPLING_TEMPERATURE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleParams {
    pub temperature: f64,
    pub seed: u64,
}

impl SampleParams {
    pub fn new(temperature: f64, seed: u64) -> Self {
        SampleParams { temperature, seed }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("endpoint returned HTTP {status}: {body}")]
    HttpStatus { status: u16, body: String },
    #[error("malformed response body: {0}")]
    Malformed(String),
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("environment variable `{0}` holding the API key is not set")]
    MissingApiKey(String),
    #[error("model call budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("invalid model configuration: {0}")]
    Config(String),
}

pub trait BlackBoxModel: Send + Sync {
    fn name(&self) -> &str;

    /// `history` holds the completed steps; `input` is the current input
    /// (empty for autoregressive continuation).
    fn next_output(
        &self,
        history: &[StepRecord],
        input: &str,
        params: &SampleParams,
    ) -> Result<String, ModelError>;
}

impl<M: BlackBoxModel + ?Sized> BlackBoxModel for std::sync::Arc<M> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn next_output(
        &self,
        history: &[StepRecord],
        input: &str,
        params: &SampleParams,
    ) -> Result<String, ModelError> {
        (**self).next_output(history, input, params)
    }
}

impl<M: BlackBoxModel + ?Sized> BlackBoxModel for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn next_output(
        &self,
        history: &[StepRecord],
        input: &str,
        params: &SampleParams,
    ) -> Result<String, ModelError> {
        (**self).next_output(history, input, params)
    }
}
