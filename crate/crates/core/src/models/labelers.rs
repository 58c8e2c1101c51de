use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{BlackBoxModel, ModelError, SampleParams, ACTION_TEMPERATURE};
use crate::ltl::{is_valid_prop_name, TruthAssignment};
use crate::prompts;
use crate::trace::{LabelError, LabelingFunction, StepRecord};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchField {
    #[default]
    Output,
    Input,
    /// Input and output joined by a newline.
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matcher {
    Contains(String),
    Regex(String),
}

/// Proposition `prop` holds when `matcher` matches `field` of the latest step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub prop: String,
    #[serde(flatten)]
    pub matcher: Matcher,
    #[serde(default)]
    pub field: MatchField,
}

enum Compiled {
    Contains(String),
    Regex(Regex),
}

/// Keyword / regular-expression labeler over the latest step.
pub struct RuleLabeler {
    vocab: BTreeSet<String>,
    rules: Vec<(String, MatchField, Compiled)>,
}

impl RuleLabeler {
    pub fn new(rules: &[Rule]) -> Result<Self, LabelError> {
        let mut compiled = Vec::with_capacity(rules.len());
        let mut vocab = BTreeSet::new();
        for rule in rules {
            if !is_valid_prop_name(&rule.prop) {
                return Err(LabelError::Other(format!(
                    "invalid proposition name `{}`",
                    rule.prop
                )));
            }
            let m = match &rule.matcher {
                Matcher::Contains(s) => Compiled::Contains(s.clone()),
                Matcher::Regex(r) => Compiled::Regex(
                    Regex::new(r)
                        .map_err(|e| LabelError::Other(format!("rule for `{}`: {e}", rule.prop)))?,
                ),
            };
            vocab.insert(rule.prop.clone());
            compiled.push((rule.prop.clone(), rule.field, m));
        }
        Ok(RuleLabeler {
            vocab,
            rules: compiled,
        })
    }

    /// Adds propositions that no rule can produce (always false).
    pub fn with_extra_vocabulary<S: Into<String>>(
        mut self,
        props: impl IntoIterator<Item = S>,
    ) -> Self {
        self.vocab.extend(props.into_iter().map(Into::into));
        self
    }
}

impl LabelingFunction for RuleLabeler {
    fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
        let Some(step) = history.last() else {
            return Ok(TruthAssignment::new());
        };
        let both = format!("{}\n{}", step.input, step.output);
        let mut out = TruthAssignment::new();
        for (prop, field, matcher) in &self.rules {
            let text: &str = match field {
                MatchField::Output => &step.output,
                MatchField::Input => &step.input,
                MatchField::Both => &both,
            };
            let hit = match matcher {
                Compiled::Contains(s) => text.contains(s.as_str()),
                Compiled::Regex(r) => r.is_match(text),
            };
            if hit {
                out.insert(prop.clone());
            }
        }
        Ok(out)
    }
}

/// Labels each step by asking a model one batched yes/no question per
/// proposition.
pub struct EndpointLabeler<M> {
    model: M,
    vocab: BTreeSet<String>,
    /// Optional per-proposition descriptions shown to the model.
    descriptions: BTreeMap<String, String>,
    /// Maximum characters of history text included in the prompt.
    history_budget: usize,
    seed: u64,
    warnings: Mutex<Vec<String>>,
}

impl<M: BlackBoxModel> EndpointLabeler<M> {
    pub fn new<S: Into<String>>(model: M, vocab: impl IntoIterator<Item = S>) -> Self {
        EndpointLabeler {
            model,
            vocab: vocab.into_iter().map(Into::into).collect(),
            descriptions: BTreeMap::new(),
            history_budget: 8000,
            seed: 0,
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn with_descriptions(mut self, descriptions: BTreeMap<String, String>) -> Self {
        self.descriptions = descriptions;
        self
    }

    pub fn with_history_budget(mut self, chars: usize) -> Self {
        self.history_budget = chars;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Warnings recorded so far: unparseable answers and history truncation.
    pub fn warnings(&self) -> Vec<String> {
        self.warnings.lock().expect("warnings lock").clone()
    }

    fn warn(&self, msg: String) {
        self.warnings.lock().expect("warnings lock").push(msg);
    }

    fn history_text(&self, history: &[StepRecord]) -> String {
        let (current, past) = history.split_last().expect("nonempty history");
        let mut lines: Vec<String> = past
            .iter()
            .map(|s| format!("step {}: {}", s.t, s.output))
            .collect();
        let mut total: usize = lines.iter().map(|l| l.len() + 1).sum();
        let mut dropped = 0;
        while total > self.history_budget && !lines.is_empty() {
            total -= lines[0].len() + 1;
            lines.remove(0);
            dropped += 1;
        }
        if dropped > 0 {
            self.warn(format!(
                "step {}: history truncated, {dropped} earlier step(s) omitted",
                current.t
            ));
        }
        lines.join("\n")
    }
}

/// Parses `<prop>: yes|no` lines. Returns the props answered yes and those
/// with no parseable answer.
pub(crate) fn parse_yes_no(
    reply: &str,
    vocab: &BTreeSet<String>,
) -> (TruthAssignment, Vec<String>) {
    let mut answers: BTreeMap<String, bool> = BTreeMap::new();
    for line in reply.lines() {
        let line = line.trim().trim_start_matches(['-', '*', ' ']);
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let key = key
            .trim()
            .trim_matches(|c| c == '`' || c == '"' || c == '*')
            .to_ascii_lowercase();
        let value = value
            .trim()
            .trim_matches(|c: char| !c.is_ascii_alphabetic())
            .to_ascii_lowercase();
        let Some(prop) = vocab.iter().find(|p| p.to_ascii_lowercase() == key) else {
            continue;
        };
        match value.as_str() {
            "yes" | "true" => {
                answers.insert(prop.clone(), true);
            }
            "no" | "false" => {
                answers.insert(prop.clone(), false);
            }
            _ => {}
        }
    }
    let labels = answers
        .iter()
        .filter(|(_, v)| **v)
        .map(|(k, _)| k.clone())
        .collect();
    let missing = vocab
        .iter()
        .filter(|p| !answers.contains_key(*p))
        .cloned()
        .collect();
    (labels, missing)
}

impl<M: BlackBoxModel> LabelingFunction for EndpointLabeler<M> {
    fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
        let Some(step) = history.last() else {
            return Ok(TruthAssignment::new());
        };
        let context = self.history_text(history);
        let prompt =
            prompts::labeling_prompt(&context, &step.output, &self.vocab, &self.descriptions);
        let params = SampleParams::new(
            ACTION_TEMPERATURE,
            crate::seed::derive(self.seed, &[step.t as u64]),
        );
        let reply = self
            .model
            .next_output(&[], &prompt, &params)
            .map_err(|e: ModelError| LabelError::Model(e))?;
        let (labels, missing) = parse_yes_no(&reply, &self.vocab);
        if !missing.is_empty() {
            self.warn(format!(
                "step {}: no parseable answer for {}; treated as absent",
                step.t,
                missing.join(", ")
            ));
        }
        Ok(labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ScriptedModel;

    #[test]
    fn keyword_rule() {
        let l = RuleLabeler::new(&[Rule {
            prop: "stop".into(),
            matcher: Matcher::Contains("STOP".into()),
            field: MatchField::Output,
        }])
        .unwrap();
        let h = [StepRecord::new(1, "", "STOP now")];
        assert_eq!(l.label(&h).unwrap(), ["stop"].into_iter().collect());
        let h = [StepRecord::new(1, "STOP", "go")];
        assert!(l.label(&h).unwrap().is_empty());
    }

    #[test]
    fn regex_rule_on_input() {
        let l = RuleLabeler::new(&[Rule {
            prop: "num".into(),
            matcher: Matcher::Regex(r"\d+".into()),
            field: MatchField::Input,
        }])
        .unwrap();
        assert!(l
            .label(&[StepRecord::new(1, "x1", "")])
            .unwrap()
            .contains("num"));
        assert!(RuleLabeler::new(&[Rule {
            prop: "n".into(),
            matcher: Matcher::Regex("(".into()),
            field: MatchField::Input
        }])
        .is_err());
    }

    #[test]
    fn rule_json_shape() {
        let r: Rule = serde_json::from_str(r#"{"prop": "drop", "contains": "drop "}"#).unwrap();
        assert_eq!(r.matcher, Matcher::Contains("drop ".into()));
        assert_eq!(r.field, MatchField::Output);
    }

    #[test]
    fn yes_no_parsing_is_lenient() {
        let vocab: BTreeSet<String> = ["pickup", "putdown", "knife"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let (labels, missing) = parse_yes_no("PICKUP: Yes\n- putdown: no.\nknife maybe", &vocab);
        assert_eq!(labels, ["pickup"].into_iter().collect());
        assert_eq!(missing, vec!["knife".to_string()]);
    }

    #[test]
    fn unparseable_reply_is_absent_with_warning() {
        let l = EndpointLabeler::new(ScriptedModel::sequence(["I cannot tell"]), ["a", "b"]);
        let out = l.label(&[StepRecord::new(1, "", "x")]).unwrap();
        assert!(out.is_empty());
        assert_eq!(l.warnings().len(), 1);
    }

    #[test]
    fn truncation_is_recorded() {
        let l = EndpointLabeler::new(ScriptedModel::sequence(["a: yes"]), ["a"])
            .with_history_budget(10);
        let hist: Vec<_> = (1..=5)
            .map(|t| StepRecord::new(t, "", "some output text"))
            .collect();
        assert!(l.label(&hist).unwrap().contains("a"));
        assert!(l.warnings()[0].contains("truncated"));
    }
}
