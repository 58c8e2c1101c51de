//! Guarded execution: predict risk before each step and intervene when it
//! crosses a threshold.
//!
//! Per step `t` with input `i_t`:
//!
//! 1. estimate per-constraint risk from `m` sampled continuations of `i_t`;
//! 2. obtain `o_t` from the primary model;
//! 3. if any risk is at least `tau`, apply the policy's strategy, which
//!    either rewrites the input and regenerates (`inject`) or replaces the
//!    output (`resample`, `switch`);
//! 4. label the final pair, progress every monitor and reset on terminal
//!    verdicts.
//!
//! Every random draw is seeded from the session seed, the step index and a
//! purpose tag, so runs are reproducible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{render, Formula, Style, Verdict};
use crate::models::{
    BlackBoxModel, ModelError, SampleParams, ACTION_TEMPERATURE, SAMPLING_TEMPERATURE,
};
use crate::monitor::{run_monitor, Constraint, Mode, Monitor, MonitorError, MonitorState};
use crate::predictive::{
    MonitoringPattern, PatternRegistry, PredictError, Predictor, RiskEstimate,
};
use crate::prompts;
use crate::seed;
use crate::trace::{label_checked, LabelError, LabelingFunction, StepRecord, Trace, VerdictReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    None,
    Resample,
    Inject,
    Switch,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Strategy::None),
            "resample" => Ok(Strategy::Resample),
            "inject" => Ok(Strategy::Inject),
            "switch" => Ok(Strategy::Switch),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

fn default_tau() -> f64 {
    0.5
}
fn default_n() -> usize {
    5
}
fn default_k() -> usize {
    3
}
fn default_m() -> usize {
    5
}
fn default_pattern() -> String {
    "contains_violated".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionPolicy {
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Candidates for best-of-n resampling.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_pattern")]
    pub pattern: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitute_model: Option<String>,
    /// File holding the injection template; read by the caller into `template`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_path: Option<std::path::PathBuf>,
    /// Injection template with a `{Constraints}` placeholder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    /// Maximum model calls per risk estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl Default for InterventionPolicy {
    fn default() -> Self {
        InterventionPolicy {
            strategy: Strategy::None,
            tau: default_tau(),
            n: default_n(),
            k: default_k(),
            m: default_m(),
            pattern: default_pattern(),
            substitute_model: None,
            template_path: None,
            template: None,
            budget: None,
        }
    }
}

impl InterventionPolicy {
    pub fn new(strategy: Strategy, tau: f64) -> Self {
        InterventionPolicy {
            strategy,
            tau,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), GuardError> {
        let bad = |m: String| Err(GuardError::Config(m));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau = {} is outside [0, 1]", self.tau));
        }
        if self.n == 0 || self.k == 0 || self.m == 0 {
            return bad(format!(
                "n, k and m must be at least 1 (got {}, {}, {})",
                self.n, self.k, self.m
            ));
        }
        if self.strategy == Strategy::Switch && self.substitute_model.is_none() {
            return bad("strategy `switch` needs a substitute_model".into());
        }
        if let Some(t) = &self.template {
            if !t.contains("{Constraints}") {
                return bad("injection template lacks a {Constraints} placeholder".into());
            }
        }
        Ok(())
    }

    pub fn template(&self) -> &str {
        self.template.as_deref().unwrap_or(prompts::INJECT_TEMPLATE)
    }
}

#[derive(Debug, Error)]
pub enum GuardError {
    #[error("invalid guard configuration: {0}")]
    Config(String),
    #[error("model call failed at step {t}: {source}")]
    Model { t: usize, source: ModelError },
    #[error("labeling failed at step {t}: {source}")]
    Label { t: usize, source: LabelError },
    #[error("risk estimation failed at step {t}: {source}")]
    Predict { t: usize, source: PredictError },
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

/// Record of one guarded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardedStepOutcome {
    pub t: usize,
    pub input: String,
    /// Input after rewriting; equal to `input` unless injection happened.
    pub final_input: String,
    pub original_output: String,
    pub final_output: String,
    pub intervened: bool,
    pub strategy: Strategy,
    /// Estimates made before the output was generated.
    pub risks: Vec<RiskEstimate>,
    /// Largest estimated risk across constraints.
    pub risk_before: f64,
    /// On intervened steps: the risk given the original output, and given
    /// the final one, estimated on the same samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_original: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_after: Option<f64>,
    /// Whether the final output's risk is at most the original's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract_held: Option<bool>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// Residual per constraint after the step, ascii.
    pub residuals: BTreeMap<String, String>,
}

/// Inputs fed to the primary model: `initial` at step 1, then
/// `subsequent[t - 2]`, then the empty input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputScript {
    #[serde(default)]
    pub initial: String,
    #[serde(default)]
    pub subsequent: Vec<String>,
}

impl InputScript {
    pub fn new(initial: impl Into<String>) -> Self {
        InputScript {
            initial: initial.into(),
            subsequent: Vec::new(),
        }
    }

    pub fn input_at(&self, t: usize) -> &str {
        match t {
            0 | 1 => &self.initial,
            _ => self.subsequent.get(t - 2).map_or("", String::as_str),
        }
    }
}

fn primary_seed(base: u64, t: usize) -> u64 {
    seed::derive(base, &[t as u64, seed::tag("primary")])
}

/// Appends the template, filled with the English rendering of each
/// residual, to `input`. Residuals are taken in the given order.
pub fn apply_inject(input: &str, residuals: &[&Formula], template: &str) -> String {
    let lines: Vec<String> = residuals
        .iter()
        .map(|f| render(f, Style::English))
        .collect();
    prompts::inject(input, template, &lines)
}

/// Index of the lowest score; the earliest wins ties.
pub fn select_best(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if best.is_none_or(|b| *s < scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// Rules shown to a substitute model: each constraint's gloss, or its
/// English rendering.
pub fn rules_text(constraints: &[Constraint]) -> Vec<String> {
    constraints
        .iter()
        .map(|c| {
            c.gloss
                .clone()
                .unwrap_or_else(|| render(&c.formula, Style::English))
        })
        .collect()
}

pub struct GuardSession<'a> {
    model: &'a dyn BlackBoxModel,
    substitute: Option<&'a dyn BlackBoxModel>,
    labeler: &'a dyn LabelingFunction,
    policy: InterventionPolicy,
    pattern: MonitoringPattern,
    constraints: Vec<Constraint>,
    monitor: Monitor,
    history: Vec<StepRecord>,
    seed: u64,
}

impl<'a> GuardSession<'a> {
    pub fn new(
        model: &'a dyn BlackBoxModel,
        substitute: Option<&'a dyn BlackBoxModel>,
        labeler: &'a dyn LabelingFunction,
        constraints: &[Constraint],
        policy: InterventionPolicy,
        mode: Mode,
        seed: u64,
    ) -> Result<Self, GuardError> {
        Self::with_patterns(
            model,
            substitute,
            labeler,
            constraints,
            policy,
            mode,
            seed,
            &PatternRegistry::default(),
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_patterns(
        model: &'a dyn BlackBoxModel,
        substitute: Option<&'a dyn BlackBoxModel>,
        labeler: &'a dyn LabelingFunction,
        constraints: &[Constraint],
        policy: InterventionPolicy,
        mode: Mode,
        seed: u64,
        patterns: &PatternRegistry,
    ) -> Result<Self, GuardError> {
        policy.validate()?;
        if policy.strategy == Strategy::Switch && substitute.is_none() {
            return Err(GuardError::Config(
                "strategy `switch` needs a substitute model".into(),
            ));
        }
        let pattern = patterns
            .get(&policy.pattern)
            .map_err(|e| GuardError::Config(e.to_string()))?;
        let monitor = Monitor::new(constraints, mode)?;
        let mut constraints = constraints.to_vec();
        constraints.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(GuardSession {
            model,
            substitute,
            labeler,
            policy,
            pattern,
            constraints,
            monitor,
            history: Vec::new(),
            seed,
        })
    }

    pub fn history(&self) -> &[StepRecord] {
        &self.history
    }

    pub fn states(&self) -> &[MonitorState] {
        self.monitor.states()
    }

    pub fn policy(&self) -> &InterventionPolicy {
        &self.policy
    }

    pub fn reports(&self) -> Vec<VerdictReport> {
        self.monitor.reports()
    }

    pub fn trace(&self) -> Trace {
        Trace::new(self.history.clone())
    }

    fn predictor(&self) -> Predictor<'a> {
        let mut p = Predictor::new(self.model, self.labeler, self.policy.k, self.policy.m);
        p.budget = self.policy.budget;
        p
    }

    /// Runs one step. On error the session is left as it was before the call.
    pub fn guard_step(&mut self, input: &str) -> Result<GuardedStepOutcome, GuardError> {
        let t = self.history.len() + 1;
        let predict_err = |source| GuardError::Predict { t, source };
        let model_err = |source| GuardError::Model { t, source };
        let predictor = self.predictor();
        let active = self.policy.strategy != Strategy::None;

        let risks = if active {
            let s = seed::derive(self.seed, &[t as u64, seed::tag("estimate")]);
            predictor
                .estimate(
                    self.monitor.states(),
                    &self.history,
                    input,
                    &self.pattern,
                    s,
                )
                .map_err(predict_err)?
        } else {
            Vec::new()
        };
        let risk_before = risks.iter().map(|r| r.probability).fold(0.0, f64::max);

        let primary = SampleParams::new(ACTION_TEMPERATURE, primary_seed(self.seed, t));
        let original = self
            .model
            .next_output(&self.history, input, &primary)
            .map_err(model_err)?;
        let intervened = active && risks.iter().any(|r| r.probability >= self.policy.tau);

        let mut final_input = input.to_string();
        let mut final_output = original.clone();
        if intervened {
            match self.policy.strategy {
                Strategy::None => unreachable!("inactive policy never intervenes"),
                Strategy::Resample => final_output = self.apply_resample(t, input)?,
                Strategy::Inject => {
                    let at_risk: Vec<&Formula> = self
                        .monitor
                        .states()
                        .iter()
                        .zip(&risks)
                        .filter(|(_, r)| r.probability >= self.policy.tau)
                        .map(|(s, _)| s.residual())
                        .collect();
                    final_input = apply_inject(input, &at_risk, self.policy.template());
                    final_output = self
                        .model
                        .next_output(&self.history, &final_input, &primary)
                        .map_err(model_err)?;
                }
                Strategy::Switch => final_output = self.apply_switch(t)?,
            }
        }

        let (risk_original, risk_after, contract_held) = if intervened {
            let s = seed::derive(self.seed, &[t as u64, seed::tag("contract")]);
            let max_risk = |i: &str, o: &str| -> Result<f64, GuardError> {
                Ok(predictor
                    .estimate_for_output(
                        self.monitor.states(),
                        &self.history,
                        i,
                        o,
                        &self.pattern,
                        s,
                    )
                    .map_err(predict_err)?
                    .iter()
                    .map(|r| r.probability)
                    .fold(0.0, f64::max))
            };
            let before = max_risk(input, &original)?;
            let after = max_risk(&final_input, &final_output)?;
            (Some(before), Some(after), Some(after <= before))
        } else {
            (None, None, None)
        };

        let mut step = StepRecord::new(t, final_input.clone(), final_output.clone());
        self.history.push(step.clone());
        let labels = label_checked(self.labeler, &self.history);
        self.history.pop();
        let labels = labels.map_err(|source| GuardError::Label { t, source })?;
        step.labels = Some(labels.clone());
        let verdicts = self.monitor.step_with(&labels, &step);
        self.history.push(step);

        let states = self.monitor.states();
        Ok(GuardedStepOutcome {
            t,
            input: input.to_string(),
            final_input,
            original_output: original,
            final_output,
            intervened,
            strategy: if intervened {
                self.policy.strategy
            } else {
                Strategy::None
            },
            risks,
            risk_before,
            risk_original,
            risk_after,
            contract_held,
            verdicts: states
                .iter()
                .zip(verdicts)
                .map(|(s, v)| (s.id().to_string(), v))
                .collect(),
            residuals: states
                .iter()
                .map(|s| (s.id().to_string(), render(s.residual(), Style::Ascii)))
                .collect(),
        })
    }

    /// Best of `n` fresh candidates by expected violations over the horizon.
    /// Stops early at a candidate with no expected violations.
    pub fn apply_resample(&self, t: usize, input: &str) -> Result<String, GuardError> {
        let predictor = self.predictor();
        let score_seed = seed::derive(self.seed, &[t as u64, seed::tag("score")]);
        let mut candidates = Vec::with_capacity(self.policy.n);
        let mut scores = Vec::with_capacity(self.policy.n);
        for i in 0..self.policy.n {
            let params = SampleParams::new(
                SAMPLING_TEMPERATURE,
                seed::derive(self.seed, &[t as u64, seed::tag("resample"), i as u64]),
            );
            let c = self
                .model
                .next_output(&self.history, input, &params)
                .map_err(|source| GuardError::Model { t, source })?;
            let s = predictor
                .predicted_violations(self.monitor.states(), &self.history, input, &c, score_seed)
                .map_err(|source| GuardError::Predict { t, source })?;
            candidates.push(c);
            scores.push(s);
            if s == 0.0 {
                break;
            }
        }
        let best = select_best(&scores).expect("n >= 1");
        Ok(candidates.swap_remove(best))
    }

    /// Output of the substitute model, prompted with past outputs and the rules.
    pub fn apply_switch(&self, t: usize) -> Result<String, GuardError> {
        let substitute = self
            .substitute
            .ok_or_else(|| GuardError::Config("no substitute model".into()))?;
        let past: Vec<&str> = self.history.iter().map(|s| s.output.as_str()).collect();
        let prompt = prompts::switch_prompt(&past, &rules_text(&self.constraints));
        let params = SampleParams::new(
            ACTION_TEMPERATURE,
            seed::derive(self.seed, &[t as u64, seed::tag("switch")]),
        );
        substitute
            .next_output(&[], &prompt, &params)
            .map_err(|source| GuardError::Model { t, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardRun {
    pub trace: Trace,
    pub outcomes: Vec<GuardedStepOutcome>,
    pub reports: Vec<VerdictReport>,
    pub interventions: usize,
    /// Violations summed over constraints, divided by steps.
    pub violation_rate: f64,
}

fn violation_rate(reports: &[VerdictReport], steps: usize) -> f64 {
    if steps == 0 {
        return 0.0;
    }
    reports.iter().map(|r| r.violations).sum::<usize>() as f64 / steps as f64
}

/// Runs the closed loop for at most `max_steps`, stopping after the step
/// whose final output equals `stop_token`.
pub fn run_guarded(
    session: &mut GuardSession<'_>,
    inputs: &InputScript,
    max_steps: usize,
    stop_token: &str,
) -> Result<GuardRun, GuardError> {
    let mut outcomes = Vec::new();
    for _ in 0..max_steps {
        let t = session.history().len() + 1;
        let outcome = session.guard_step(inputs.input_at(t))?;
        let done = outcome.final_output == stop_token;
        outcomes.push(outcome);
        if done {
            break;
        }
    }
    let reports = session.reports();
    Ok(GuardRun {
        interventions: outcomes.iter().filter(|o| o.intervened).count(),
        violation_rate: violation_rate(&reports, outcomes.len()),
        trace: session.trace(),
        outcomes,
        reports,
    })
}

/// The same loop without prediction or intervention, for baselines.
#[allow(clippy::too_many_arguments)]
pub fn run_unguarded(
    model: &dyn BlackBoxModel,
    labeler: &dyn LabelingFunction,
    constraints: &[Constraint],
    inputs: &InputScript,
    max_steps: usize,
    stop_token: &str,
    mode: Mode,
    seed: u64,
) -> Result<(Trace, Vec<VerdictReport>, f64), GuardError> {
    let mut steps: Vec<StepRecord> = Vec::new();
    for t in 1..=max_steps {
        let input = inputs.input_at(t);
        let params = SampleParams::new(ACTION_TEMPERATURE, primary_seed(seed, t));
        let output = model
            .next_output(&steps, input, &params)
            .map_err(|source| GuardError::Model { t, source })?;
        steps.push(StepRecord::new(t, input, output));
        let labels =
            label_checked(labeler, &steps).map_err(|source| GuardError::Label { t, source })?;
        let last = steps.last_mut().expect("just pushed");
        last.labels = Some(labels);
        if last.output == stop_token {
            break;
        }
    }
    let trace = Trace::new(steps);
    let reports = run_monitor(&trace, constraints, mode)?;
    let rate = violation_rate(&reports, trace.len());
    Ok((trace, reports, rate))
}
