//! Sampling-based risk estimation.
//!
//! The probability that a verdict pattern shows up within the next `k` steps
//! is estimated from `m` continuations sampled from the model. The first
//! sampled step receives the pending input; later steps receive the empty
//! input, so the estimate assumes no further outside input over the horizon.
//! Sampled steps are labeled with the session's labeler and progressed on
//! copies of the monitor states; nothing is written back.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::Verdict;
use crate::models::{BlackBoxModel, ModelError, SampleParams, SAMPLING_TEMPERATURE};
use crate::monitor::MonitorState;
use crate::seed;
use crate::trace::{label_checked, LabelError, LabelingFunction, StepRecord};

type Predicate = Arc<dyn Fn(&[Verdict]) -> bool + Send + Sync>;

/// A predicate over nonempty verdict sequences.
#[derive(Clone)]
pub struct MonitoringPattern {
    name: String,
    predicate: Predicate,
}

impl MonitoringPattern {
    pub fn new(
        name: impl Into<String>,
        predicate: impl Fn(&[Verdict]) -> bool + Send + Sync + 'static,
    ) -> Self {
        MonitoringPattern {
            name: name.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn contains_violated() -> Self {
        Self::new("contains_violated", |v| v.contains(&Verdict::Violated))
    }

    pub fn contains_satisfied() -> Self {
        Self::new("contains_satisfied", |v| v.contains(&Verdict::Satisfied))
    }

    pub fn ends_violated() -> Self {
        Self::new("ends_violated", |v| v.last() == Some(&Verdict::Violated))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matches(&self, verdicts: &[Verdict]) -> bool {
        (self.predicate)(verdicts)
    }
}

impl fmt::Debug for MonitoringPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonitoringPattern({})", self.name)
    }
}

/// Patterns addressable by name from configuration.
#[derive(Debug, Clone)]
pub struct PatternRegistry {
    patterns: BTreeMap<String, MonitoringPattern>,
}

impl Default for PatternRegistry {
    fn default() -> Self {
        let mut r = PatternRegistry {
            patterns: BTreeMap::new(),
        };
        for p in [
            MonitoringPattern::contains_violated(),
            MonitoringPattern::contains_satisfied(),
            MonitoringPattern::ends_violated(),
        ] {
            r.register(p);
        }
        r
    }
}

impl PatternRegistry {
    pub fn register(&mut self, pattern: MonitoringPattern) {
        self.patterns.insert(pattern.name.clone(), pattern);
    }

    pub fn get(&self, name: &str) -> Result<MonitoringPattern, PredictError> {
        self.patterns
            .get(name)
            .cloned()
            .ok_or_else(|| PredictError::UnknownPattern(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.patterns.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub constraint: String,
    pub probability: f64,
    pub matches: usize,
    pub m: usize,
    pub k: usize,
    /// Per-sample verdict sequences, led by the current verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<Vec<Verdict>>,
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("model call failed during sampling: {0}")]
    Model(#[from] ModelError),
    #[error("labeling failed on a sampled step: {0}")]
    Label(#[from] LabelError),
    #[error("sampling needs {needed} model calls but the budget is {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("unknown monitoring pattern `{0}`")]
    UnknownPattern(String),
    #[error("invalid estimator setting: {0}")]
    Invalid(String),
}

/// The first sampled step: either generated from an input, or fixed to a
/// known candidate output.
#[derive(Debug, Clone, Copy)]
pub enum FirstStep<'a> {
    Input(&'a str),
    Fixed { input: &'a str, output: &'a str },
}

pub struct Predictor<'a> {
    pub model: &'a dyn BlackBoxModel,
    pub labeler: &'a dyn LabelingFunction,
    /// Horizon, at least 1.
    pub k: usize,
    /// Samples, at least 1.
    pub m: usize,
    pub temperature: f64,
    /// Maximum model calls per estimate.
    pub budget: Option<usize>,
    /// Keep per-sample verdict sequences in the estimates.
    pub keep_samples: bool,
    calls: AtomicUsize,
}

impl<'a> Predictor<'a> {
    pub fn new(
        model: &'a dyn BlackBoxModel,
        labeler: &'a dyn LabelingFunction,
        k: usize,
        m: usize,
    ) -> Self {
        Predictor {
            model,
            labeler,
            k,
            m,
            temperature: SAMPLING_TEMPERATURE,
            budget: None,
            keep_samples: false,
            calls: AtomicUsize::new(0),
        }
    }

    /// Model calls issued so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn check(&self, first_fixed: bool) -> Result<(), PredictError> {
        if self.k == 0 || self.m == 0 {
            return Err(PredictError::Invalid(format!(
                "k = {} and m = {} must both be at least 1",
                self.k, self.m
            )));
        }
        let per_sample = if first_fixed { self.k - 1 } else { self.k };
        let needed = per_sample * self.m;
        match self.budget {
            Some(budget) if needed > budget => Err(PredictError::Budget { needed, budget }),
            _ => Ok(()),
        }
    }

    fn continuation(
        &self,
        history: &[StepRecord],
        first: FirstStep<'_>,
        sample_seed: u64,
    ) -> Result<Vec<StepRecord>, PredictError> {
        let mut hist = history.to_vec();
        let base_t = history.last().map_or(0, |s| s.t);
        for s in 0..self.k {
            let t = base_t + s + 1;
            let (input, output) = match (s, first) {
                (0, FirstStep::Fixed { input, output }) => (input.to_string(), output.to_string()),
                (0, FirstStep::Input(input)) => {
                    (input.to_string(), self.draw(&hist, input, sample_seed, s)?)
                }
                _ => (String::new(), self.draw(&hist, "", sample_seed, s)?),
            };
            hist.push(StepRecord::new(t, input, output));
            let labels = label_checked(self.labeler, &hist)?;
            hist.last_mut().expect("just pushed").labels = Some(labels);
        }
        Ok(hist.split_off(history.len()))
    }

    fn draw(
        &self,
        hist: &[StepRecord],
        input: &str,
        sample_seed: u64,
        offset: usize,
    ) -> Result<String, ModelError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let params = SampleParams::new(
            self.temperature,
            seed::derive(sample_seed, &[offset as u64]),
        );
        self.model.next_output(hist, input, &params)
    }

    /// `m` labeled continuations of length `k`; sample `j` is seeded from
    /// `(seed, j)`.
    pub fn sample(
        &self,
        history: &[StepRecord],
        first: FirstStep<'_>,
        seed: u64,
    ) -> Result<Vec<Vec<StepRecord>>, PredictError> {
        self.check(matches!(first, FirstStep::Fixed { .. }))?;
        (0..self.m)
            .into_par_iter()
            .map(|j| self.continuation(history, first, seed::derive(seed, &[j as u64])))
            .collect()
    }

    /// Applies `pattern` to each state's verdict sequence along each sample.
    pub fn score(
        &self,
        states: &[MonitorState],
        samples: &[Vec<StepRecord>],
        pattern: &MonitoringPattern,
    ) -> Vec<RiskEstimate> {
        states
            .iter()
            .map(|state| {
                let sequences: Vec<Vec<Verdict>> =
                    samples.iter().map(|s| verdict_sequence(state, s)).collect();
                let matches = sequences.iter().filter(|v| pattern.matches(v)).count();
                RiskEstimate {
                    constraint: state.id().to_string(),
                    probability: matches as f64 / samples.len() as f64,
                    matches,
                    m: samples.len(),
                    k: self.k,
                    samples: if self.keep_samples {
                        sequences
                    } else {
                        Vec::new()
                    },
                }
            })
            .collect()
    }

    /// Risk per constraint that `pattern` occurs within the next `k` steps
    /// after `next_input` is given.
    pub fn estimate(
        &self,
        states: &[MonitorState],
        history: &[StepRecord],
        next_input: &str,
        pattern: &MonitoringPattern,
        seed: u64,
    ) -> Result<Vec<RiskEstimate>, PredictError> {
        let samples = self.sample(history, FirstStep::Input(next_input), seed)?;
        Ok(self.score(states, &samples, pattern))
    }

    /// Risk per constraint given that the next output is already fixed.
    pub fn estimate_for_output(
        &self,
        states: &[MonitorState],
        history: &[StepRecord],
        input: &str,
        output: &str,
        pattern: &MonitoringPattern,
        seed: u64,
    ) -> Result<Vec<RiskEstimate>, PredictError> {
        let samples = self.sample(history, FirstStep::Fixed { input, output }, seed)?;
        Ok(self.score(states, &samples, pattern))
    }

    /// Expected number of Violated verdicts over the horizon, summed across
    /// constraints, if the next step is `(input, output)`.
    pub fn predicted_violations(
        &self,
        states: &[MonitorState],
        history: &[StepRecord],
        input: &str,
        output: &str,
        seed: u64,
    ) -> Result<f64, PredictError> {
        let samples = self.sample(history, FirstStep::Fixed { input, output }, seed)?;
        let mut total = 0.0;
        for state in states {
            let count: usize = samples
                .iter()
                .map(|s| {
                    verdict_sequence(state, s)[1..]
                        .iter()
                        .filter(|v| **v == Verdict::Violated)
                        .count()
                })
                .sum();
            total += count as f64 / samples.len() as f64;
        }
        Ok(total)
    }
}

/// The current verdict followed by the verdicts along `continuation`.
fn verdict_sequence(state: &MonitorState, continuation: &[StepRecord]) -> Vec<Verdict> {
    let mut copy = state.clone();
    let mut out = Vec::with_capacity(continuation.len() + 1);
    out.push(state.verdict());
    for step in continuation {
        let labels = step.labels.as_ref().expect("sampled steps are labeled");
        out.push(copy.step(labels, step).verdict);
    }
    out
}

/// Single-constraint convenience wrapper.
#[allow(clippy::too_many_arguments)]
pub fn estimate_risk(
    state: &MonitorState,
    model: &dyn BlackBoxModel,
    labeler: &dyn LabelingFunction,
    history: &[StepRecord],
    pattern: &MonitoringPattern,
    k: usize,
    m: usize,
    next_input: &str,
    seed: u64,
) -> Result<RiskEstimate, PredictError> {
    let p = Predictor::new(model, labeler, k, m);
    Ok(p.estimate(
        std::slice::from_ref(state),
        history,
        next_input,
        pattern,
        seed,
    )?
    .remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse, TruthAssignment};
    use crate::models::{Matcher, Rule, RuleLabeler, ScriptedModel};
    use crate::monitor::{Constraint, Mode};

    fn bad_labeler() -> RuleLabeler {
        RuleLabeler::new(&[Rule {
            prop: "bad".into(),
            matcher: Matcher::Contains("bad".into()),
            field: Default::default(),
        }])
        .unwrap()
    }

    fn state(f: &str, mode: Mode) -> MonitorState {
        MonitorState::new(&Constraint::new("c", parse(f).unwrap()), mode)
    }

    #[test]
    fn builtin_patterns() {
        use Verdict::*;
        let r = PatternRegistry::default();
        assert!(r.get("contains_violated").unwrap().matches(&[
            Inconclusive,
            Violated,
            Inconclusive
        ]));
        assert!(!r
            .get("ends_violated")
            .unwrap()
            .matches(&[Violated, Inconclusive]));
        assert!(r.get("contains_satisfied").unwrap().matches(&[Satisfied]));
        assert!(matches!(
            r.get("nope"),
            Err(PredictError::UnknownPattern(_))
        ));
    }

    #[test]
    fn quarter_of_samples() {
        struct ByIndex;
        impl BlackBoxModel for ByIndex {
            fn name(&self) -> &str {
                "by-index"
            }
            fn next_output(
                &self,
                _: &[StepRecord],
                _: &str,
                _: &SampleParams,
            ) -> Result<String, ModelError> {
                Ok("x".into())
            }
        }
        let labeler = bad_labeler();
        let p = Predictor::new(&ByIndex, &labeler, 1, 4);
        let samples: Vec<Vec<StepRecord>> = ["bad", "ok", "ok", "ok"]
            .iter()
            .map(|o| {
                vec![StepRecord::new(1, "", *o).with_labels(if *o == "bad" {
                    ["bad"].into_iter().collect()
                } else {
                    TruthAssignment::new()
                })]
            })
            .collect();
        let est = p.score(
            &[state("G !bad", Mode::Reset)],
            &samples,
            &MonitoringPattern::contains_violated(),
        );
        assert_eq!(est[0].probability, 0.25);
    }

    #[test]
    fn already_violated_forces_match() {
        let mut s = state("G !bad", Mode::Plain);
        s.step(
            &["bad"].into_iter().collect(),
            &StepRecord::new(1, "", "bad"),
        );
        let model = ScriptedModel::bernoulli("bad", "ok", 0.0, 1);
        let labeler = bad_labeler();
        let hist = [StepRecord::new(1, "", "bad")];
        let est = estimate_risk(
            &s,
            &model,
            &labeler,
            &hist,
            &MonitoringPattern::contains_violated(),
            2,
            16,
            "",
            5,
        )
        .unwrap();
        assert_eq!(est.probability, 1.0);
    }

    #[test]
    fn bernoulli_estimate_and_determinism() {
        let model = ScriptedModel::bernoulli("bad", "ok", 0.5, 3);
        let labeler = bad_labeler();
        let s = state("G !bad", Mode::Reset);
        let run = || {
            estimate_risk(
                &s,
                &model,
                &labeler,
                &[],
                &MonitoringPattern::contains_violated(),
                1,
                10_000,
                "go",
                99,
            )
            .unwrap()
        };
        let a = run();
        assert!((a.probability - 0.5).abs() <= 0.02, "{}", a.probability);
        assert_eq!(a, run());
    }

    #[test]
    fn budget_and_settings() {
        let model = ScriptedModel::sequence(["a"]);
        let labeler = bad_labeler();
        let mut p = Predictor::new(&model, &labeler, 3, 5);
        p.budget = Some(10);
        let s = [state("G !bad", Mode::Reset)];
        let pat = MonitoringPattern::contains_violated();
        assert!(matches!(
            p.estimate(&s, &[], "", &pat, 0),
            Err(PredictError::Budget {
                needed: 15,
                budget: 10
            })
        ));
        let p = Predictor::new(&model, &labeler, 0, 5);
        assert!(matches!(
            p.estimate(&s, &[], "", &pat, 0),
            Err(PredictError::Invalid(_))
        ));
    }

    #[test]
    fn live_state_untouched() {
        let model = ScriptedModel::bernoulli("bad", "ok", 1.0, 0);
        let labeler = bad_labeler();
        let s = state("G !bad", Mode::Plain);
        let before = s.clone();
        let p = Predictor::new(&model, &labeler, 3, 8);
        let est = p
            .estimate(
                std::slice::from_ref(&s),
                &[],
                "",
                &MonitoringPattern::contains_violated(),
                0,
            )
            .unwrap();
        assert_eq!(est[0].probability, 1.0);
        assert_eq!(s, before);
        assert_eq!(p.calls(), 24);
    }
}
