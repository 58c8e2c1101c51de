//! Runtime monitoring of black-box sequential systems against LTL constraints.
//!
//! Outputs of a model are labeled with atomic propositions, checked step by
//! step by formula progression, and optionally guarded: continuations are
//! sampled to estimate the risk of a future violation, and risky steps are
//! resampled, re-prompted or handed to a substitute model.

pub mod intervention;
pub mod ltl;
pub mod models;
pub mod monitor;
pub mod predictive;
pub mod prompts;
pub mod seed;
pub mod synth;
pub mod trace;

pub use intervention::{
    run_guarded, run_unguarded, GuardError, GuardRun, GuardSession, GuardedStepOutcome,
    InputScript, InterventionPolicy, Strategy,
};
pub use ltl::{
    evaluate_lasso, parse, progress, render, simplify, verdict_of, Formula, ParseError, Style,
    TruthAssignment, Verdict,
};
pub use models::{BlackBoxModel, ModelError, SampleParams};
pub use monitor::{
    audit_log, run_monitor, score_f1, Constraint, F1Report, F1Score, Mode, Monitor, MonitorError,
    MonitorState,
};
pub use predictive::{
    estimate_risk, MonitoringPattern, PatternRegistry, PredictError, Predictor, RiskEstimate,
};
pub use trace::{
    LabelError, LabelingFunction, StepRecord, Trace, TraceError, VerdictReport, Witness,
    WitnessEntry,
};
