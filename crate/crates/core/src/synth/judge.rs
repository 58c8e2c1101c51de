//! Asking a model whether a complete benchmark trace satisfies its
//! constraints, and scoring the answers against construction truth.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::labeler::SyntheticLabeler;
use super::patterns::{finite_truth, render_constraint, SpecLevel};
use super::{BenchCase, Suite, SynthError};
use crate::ltl::Verdict;
use crate::models::proportion_ci;
use crate::models::{BlackBoxModel, ModelError, SampleParams, ACTION_TEMPERATURE};
use crate::monitor::{Mode, MonitorState};
use crate::prompts;
use crate::seed;

pub trait Judge: Send + Sync {
    fn name(&self) -> &str;
    /// Reply to `prompt` about `case`, the `index`-th case of the batch.
    fn judge(&self, case: &BenchCase, prompt: &str, index: usize) -> Result<String, ModelError>;
}

/// Sends the prompt to a model as a single fresh turn.
pub struct ModelJudge<M> {
    model: M,
    seed: u64,
}

impl<M: BlackBoxModel> ModelJudge<M> {
    pub fn new(model: M, seed: u64) -> Self {
        ModelJudge { model, seed }
    }
}

impl<M: BlackBoxModel> Judge for ModelJudge<M> {
    fn name(&self) -> &str {
        self.model.name()
    }

    fn judge(&self, _case: &BenchCase, prompt: &str, index: usize) -> Result<String, ModelError> {
        let params =
            SampleParams::new(ACTION_TEMPERATURE, seed::derive(self.seed, &[index as u64]));
        self.model.next_output(&[], prompt, &params)
    }
}

/// Recovers labels from the step text and runs the monitor; used to check
/// the harness end to end.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleJudge;

impl OracleJudge {
    pub fn decide(case: &BenchCase) -> Vec<bool> {
        let labeler = SyntheticLabeler::new(if case.knobs.suite == Suite::Proposition {
            case.knobs.entities
        } else {
            0
        });
        let labels: Vec<_> = case
            .trace
            .steps
            .iter()
            .map(|s| labeler.label_text(&s.output))
            .collect();
        let ctx = &case.trace.steps;
        case.constraints
            .iter()
            .map(|c| {
                let mut state = MonitorState::new(c, Mode::Plain);
                for (l, step) in labels.iter().zip(ctx) {
                    state.step(l, step);
                }
                match state.verdict() {
                    Verdict::Satisfied => true,
                    Verdict::Violated => false,
                    Verdict::Inconclusive => {
                        // the residual still has to hold on the repeated last step
                        let tail: Vec<_> = labels.last().into_iter().collect();
                        finite_truth(state.residual(), &tail)
                    }
                }
            })
            .collect()
    }
}

fn word(ok: bool) -> &'static str {
    if ok {
        "VALID"
    } else {
        "INVALID"
    }
}

impl Judge for OracleJudge {
    fn name(&self) -> &str {
        "oracle"
    }

    fn judge(&self, case: &BenchCase, _prompt: &str, _index: usize) -> Result<String, ModelError> {
        Ok(format_answers(&Self::decide(case)))
    }
}

/// Answers each constraint with a seeded fair coin; a chance baseline.
#[derive(Debug, Clone, Copy)]
pub struct CoinJudge {
    pub seed: u64,
}

impl Judge for CoinJudge {
    fn name(&self) -> &str {
        "coin"
    }

    fn judge(&self, case: &BenchCase, _prompt: &str, index: usize) -> Result<String, ModelError> {
        let mut rng = seed::rng(seed::derive(self.seed, &[index as u64]));
        let d: Vec<bool> = case.truth.iter().map(|_| rng.gen_bool(0.5)).collect();
        Ok(format_answers(&d))
    }
}

fn format_answers(d: &[bool]) -> String {
    if d.len() == 1 {
        word(d[0]).to_string()
    } else {
        d.iter()
            .enumerate()
            .map(|(i, ok)| format!("Constraint {}: {}", i + 1, word(*ok)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// `Some(true)` for VALID, `Some(false)` for INVALID, `None` if neither or
/// both appear.
pub fn parse_single_verdict(reply: &str) -> Option<bool> {
    let lower = reply.to_lowercase();
    let invalid = lower.contains("invalid");
    let valid = lower.replace("invalid", "").contains("valid");
    match (valid, invalid) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

/// One entry per constraint; the last line mentioning a constraint wins.
pub fn parse_multi_verdicts(reply: &str, n: usize) -> Vec<Option<bool>> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)constraint\s*(\d+)\s*:\s*\**\s*(in)?valid").expect("static regex")
    });
    let mut out = vec![None; n];
    for cap in re.captures_iter(reply) {
        let Ok(i) = cap[1].parse::<usize>() else {
            continue;
        };
        if (1..=n).contains(&i) {
            out[i - 1] = Some(cap.get(2).is_none());
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KnobAccuracy {
    pub accuracy: f64,
    pub half_width: f64,
    pub correct: usize,
    pub total: usize,
    pub parse_failures: usize,
}

impl KnobAccuracy {
    fn add(&mut self, correct: bool, parsed: bool) {
        self.total += 1;
        self.correct += correct as usize;
        self.parse_failures += !parsed as usize;
    }

    fn finalize(&mut self) {
        let (p, h) = proportion_ci(self.correct, self.total);
        self.accuracy = p;
        self.half_width = h;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeReport {
    pub judge: String,
    pub level: SpecLevel,
    #[serde(flatten)]
    pub overall: KnobAccuracy,
    pub per_knob: BTreeMap<String, KnobAccuracy>,
}

fn trace_text(case: &BenchCase) -> String {
    case.trace
        .steps
        .iter()
        .map(|s| format!("Step {}: {}", s.t, s.output))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Prompt for one case: the multi-constraint form for several constraints,
/// the entity form for the entity suite, the single form otherwise.
pub fn judge_prompt(case: &BenchCase, level: SpecLevel) -> Result<String, SynthError> {
    let texts = case
        .constraints
        .iter()
        .map(|c| render_constraint(&c.formula, level))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = trace_text(case);
    Ok(if texts.len() > 1 {
        prompts::judge_multi(&texts, &trace)
    } else if case.knobs.suite == Suite::Proposition {
        prompts::judge_entities(case.knobs.entities, &texts[0], &trace)
    } else {
        prompts::judge_single(&texts[0], &trace)
    })
}

/// Scores each (case, constraint) decision against construction truth.
/// Replies that cannot be parsed count as wrong and are tallied separately.
pub fn eval_judge(
    cases: &[BenchCase],
    judge: &dyn Judge,
    level: SpecLevel,
) -> Result<JudgeReport, SynthError> {
    let prompts = cases
        .iter()
        .map(|c| judge_prompt(c, level))
        .collect::<Result<Vec<_>, _>>()?;
    let replies = cases
        .par_iter()
        .zip(&prompts)
        .enumerate()
        .map(|(i, (c, p))| judge.judge(c, p, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut overall = KnobAccuracy::default();
    let mut per_knob: BTreeMap<String, KnobAccuracy> = BTreeMap::new();
    for (case, reply) in cases.iter().zip(&replies) {
        let n = case.truth.len();
        let answers = if n > 1 {
            parse_multi_verdicts(reply, n)
        } else {
            vec![parse_single_verdict(reply)]
        };
        let knob = per_knob.entry(case.knobs.key()).or_default();
        for (ans, truth) in answers.iter().zip(&case.truth) {
            let ok = *ans == Some(*truth);
            overall.add(ok, ans.is_some());
            knob.add(ok, ans.is_some());
        }
    }
    overall.finalize();
    per_knob.values_mut().for_each(KnobAccuracy::finalize);
    Ok(JudgeReport {
        judge: judge.name().to_string(),
        level,
        overall,
        per_knob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{
        gen_constraint_scaling, gen_elasticity, gen_spec_language, Family, PatternId,
    };

    #[test]
    fn single_parsing() {
        assert_eq!(parse_single_verdict("The trace is VALID."), Some(true));
        assert_eq!(parse_single_verdict("invalid"), Some(false));
        assert_eq!(parse_single_verdict("**Invalid**"), Some(false));
        assert_eq!(parse_single_verdict("no idea"), None);
        assert_eq!(parse_single_verdict("VALID or INVALID"), None);
    }

    #[test]
    fn coin_is_near_chance() {
        let cases = gen_elasticity(1, Family::Simple, 4, 400).unwrap();
        let r = eval_judge(&cases, &CoinJudge { seed: 1 }, SpecLevel::Precise).unwrap();
        assert!(
            (0.42..=0.58).contains(&r.overall.accuracy),
            "{}",
            r.overall.accuracy
        );
    }

    #[test]
    fn multi_parsing() {
        let got = parse_multi_verdicts(
            "Constraint 1: VALID\nconstraint 2 : invalid\nConstraint 4: valid",
            4,
        );
        assert_eq!(got, vec![Some(true), Some(false), None, Some(true)]);
    }

    #[test]
    fn oracle_is_perfect() {
        let mut cases = gen_elasticity(5, Family::Simple, 1, 8).unwrap();
        cases.extend(gen_constraint_scaling(4, Family::Simple, 2, 4, None).unwrap());
        for p in PatternId::TABLE {
            cases.extend(gen_spec_language(p, 3, 4).unwrap());
        }
        let r = eval_judge(&cases, &OracleJudge, SpecLevel::Precise).unwrap();
        assert_eq!(r.overall.accuracy, 1.0);
        assert_eq!(r.overall.parse_failures, 0);
        assert_eq!(r.overall.total, 8 + 16 + 28);
    }

    struct Missing3;
    impl Judge for Missing3 {
        fn name(&self) -> &str {
            "missing"
        }
        fn judge(&self, case: &BenchCase, _: &str, _: usize) -> Result<String, ModelError> {
            Ok(case
                .truth
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != 2)
                .map(|(i, t)| format!("Constraint {}: {}", i + 1, word(*t)))
                .collect::<Vec<_>>()
                .join("\n"))
        }
    }

    #[test]
    fn missing_line_counts_as_wrong() {
        let cases = gen_constraint_scaling(4, Family::Simple, 5, 1, None).unwrap();
        let r = eval_judge(&cases, &Missing3, SpecLevel::Informal).unwrap();
        assert_eq!(r.overall.total, 4);
        assert_eq!(r.overall.correct, 3);
        assert_eq!(r.overall.parse_failures, 1);
    }
}
