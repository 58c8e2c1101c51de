//! Histories, labels, witnesses and verdict reports.
//!
//! Trace files are UTF-8 JSONL. An optional first line `{"meta": {...}}`
//! carries free-form metadata; every other line is one step:
//!
//! ```text
//! {"meta": {"seed": 7, "domain": "synthetic"}}
//! {"t": 1, "input": "go", "output": "ok", "labels": ["pickup"]}
//! {"t": 2, "output": "done"}
//! ```
//!
//! A missing `input` is the empty input. `labels` is present only when the
//! ground truth is embedded or a labeler has run.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{Formula, TruthAssignment, Verdict};
use crate::models::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based.
    pub t: usize,
    #[serde(default)]
    pub input: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<TruthAssignment>,
}

impl StepRecord {
    pub fn new(t: usize, input: impl Into<String>, output: impl Into<String>) -> Self {
        StepRecord {
            t,
            input: input.into(),
            output: output.into(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: TruthAssignment) -> Self {
        self.labels = Some(labels);
        self
    }
}

pub type Metadata = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: Metadata,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed step at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("non-contiguous step index at line {line}: expected t = {expected}, found {found}")]
    NonContiguous {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("trace is empty")]
    Empty,
    #[error("step {t} has no labels")]
    MissingLabels { t: usize },
    #[error("labeling failed at step {t}: {source}")]
    Labeler { t: usize, source: LabelError },
}

impl Trace {
    pub fn new(steps: Vec<StepRecord>) -> Self {
        Trace {
            steps,
            metadata: Metadata::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks that `t` runs 1, 2, 3, ... without gaps.
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.steps.is_empty() {
            return Err(TraceError::Empty);
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.t != i + 1 {
                return Err(TraceError::NonContiguous {
                    line: i + 1,
                    expected: i + 1,
                    found: s.t,
                });
            }
        }
        Ok(())
    }

    /// The labels of every step, failing on the first unlabeled one.
    pub fn labels(&self) -> Result<Vec<&TruthAssignment>, TraceError> {
        self.steps
            .iter()
            .map(|s| {
                s.labels
                    .as_ref()
                    .ok_or(TraceError::MissingLabels { t: s.t })
            })
            .collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        if !self.metadata.is_empty() {
            let meta = serde_json::json!({ "meta": self.metadata });
            out.push_str(&meta.to_string());
            out.push('\n');
        }
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("step serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, TraceError> {
        Self::read(BufReader::new(text.as_bytes()))
    }

    pub fn read(reader: impl BufRead) -> Result<Trace, TraceError> {
        #[derive(Deserialize)]
        struct MetaLine {
            meta: Metadata,
        }

        let mut trace = Trace::default();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if trace.steps.is_empty()
                && trace.metadata.is_empty()
                && line.trim_start().starts_with("{\"meta\"")
            {
                let meta: MetaLine =
                    serde_json::from_str(&line).map_err(|e| TraceError::Malformed {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                trace.metadata = meta.meta;
                continue;
            }
            let step: StepRecord =
                serde_json::from_str(&line).map_err(|e| TraceError::Malformed {
                    line: line_no,
                    message: e.to_string(),
                })?;
            let expected = trace.steps.len() + 1;
            if step.t != expected {
                return Err(TraceError::NonContiguous {
                    line: line_no,
                    expected,
                    found: step.t,
                });
            }
            trace.steps.push(step);
        }
        if trace.steps.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(trace)
    }
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Trace, TraceError> {
    let file = fs::File::open(path)?;
    Trace::read(BufReader::new(file))
}

pub fn save_trace(trace: &Trace, path: impl AsRef<Path>) -> Result<(), TraceError> {
    let mut file = fs::File::create(path)?;
    file.write_all(trace.to_jsonl().as_bytes())?;
    Ok(())
}

/// One entry of a witness: the step at which the residual changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub t: usize,
    pub input: String,
    pub output: String,
    pub labels: TruthAssignment,
    pub residual: Formula,
}

pub type Witness = Vec<WitnessEntry>;

/// Per-constraint verdict stream for one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub constraint: String,
    pub verdicts: Vec<Verdict>,
    pub violations: usize,
    pub satisfactions: usize,
    /// One per completed violation/satisfaction episode.
    pub witnesses: Vec<Witness>,
}

impl VerdictReport {
    pub fn has_violation(&self) -> bool {
        self.violations > 0
    }
}

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("undeclared proposition `{0}`")]
    Undeclared(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Other(String),
}

/// Maps a history, whose last element is the current step, to the set of
/// propositions true at that step.
pub trait LabelingFunction: Send + Sync {
    fn vocabulary(&self) -> &BTreeSet<String>;

    fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError>;
}

/// Calls `labeler` and rejects propositions outside its vocabulary.
pub fn label_checked(
    labeler: &dyn LabelingFunction,
    history: &[StepRecord],
) -> Result<TruthAssignment, LabelError> {
    let labels = labeler.label(history)?;
    let vocab = labeler.vocabulary();
    if let Some(bad) = labels.iter().find(|p| !vocab.contains(*p)) {
        return Err(LabelError::Undeclared(bad.to_string()));
    }
    Ok(labels)
}

/// Returns a copy of `trace` with labels at every step. Steps that already
/// carry labels keep them unless `overwrite` is set.
pub fn apply_labeler(
    trace: &Trace,
    labeler: &dyn LabelingFunction,
    overwrite: bool,
) -> Result<Trace, TraceError> {
    let mut out = trace.clone();
    for i in 0..out.steps.len() {
        if out.steps[i].labels.is_some() && !overwrite {
            continue;
        }
        let t = out.steps[i].t;
        let labels = label_checked(labeler, &out.steps[..=i])
            .map_err(|source| TraceError::Labeler { t, source })?;
        out.steps[i].labels = Some(labels);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct OutputWords(BTreeSet<String>);

    impl LabelingFunction for OutputWords {
        fn vocabulary(&self) -> &BTreeSet<String> {
            &self.0
        }
        fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
            let last = history.last().expect("nonempty history");
            Ok(last.output.split_whitespace().map(str::to_string).collect())
        }
    }

    /// Labels a step with `prev_a` when the previous output was "a".
    struct Previous(BTreeSet<String>);

    impl LabelingFunction for Previous {
        fn vocabulary(&self) -> &BTreeSet<String> {
            &self.0
        }
        fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
            let mut out = TruthAssignment::new();
            if history.len() >= 2 && history[history.len() - 2].output == "a" {
                out.insert("prev_a");
            }
            Ok(out)
        }
    }

    fn vocab(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn one_line_trace() {
        let t = Trace::from_jsonl("{\"t\":1,\"input\":\"go\",\"output\":\"ok\"}\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.steps[0].input, "go");
        assert_eq!(t.steps[0].labels, None);
    }

    #[test]
    fn gap_in_step_index() {
        let err = Trace::from_jsonl("{\"t\":1,\"output\":\"a\"}\n{\"t\":3,\"output\":\"b\"}\n")
            .unwrap_err();
        assert!(
            err.to_string()
                .starts_with("non-contiguous step index at line 2"),
            "{err}"
        );
    }

    #[test]
    fn embedded_labels_pass_through() {
        let t = Trace::from_jsonl("{\"t\":1,\"output\":\"x\",\"labels\":[\"pickup\"]}").unwrap();
        assert_eq!(t.steps[0].labels, Some(["pickup"].into_iter().collect()));
    }

    #[test]
    fn empty_and_malformed() {
        assert!(matches!(Trace::from_jsonl(""), Err(TraceError::Empty)));
        assert!(matches!(
            Trace::from_jsonl("{\"t\":1,\"output\":\"x\"}\nnot json"),
            Err(TraceError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn metadata_line_round_trip() {
        let text = "{\"meta\":{\"seed\":7}}\n{\"t\":1,\"input\":\"\",\"output\":\"x\"}\n";
        let t = Trace::from_jsonl(text).unwrap();
        assert_eq!(t.metadata["seed"], 7);
        assert_eq!(t.to_jsonl(), text);
    }

    #[test]
    fn labeler_fills_every_step() {
        let t = Trace::new(vec![
            StepRecord::new(1, "", "stop"),
            StepRecord::new(2, "", "go"),
            StepRecord::new(3, "", "stop go"),
        ]);
        let labeled = apply_labeler(&t, &OutputWords(vocab(&["stop", "go"])), false).unwrap();
        assert!(labeled.steps.iter().all(|s| s.labels.is_some()));
        assert_eq!(labeled.steps[2].labels.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn undeclared_proposition_rejected() {
        let t = Trace::new(vec![StepRecord::new(1, "", "jump")]);
        let err = apply_labeler(&t, &OutputWords(vocab(&["stop"])), false).unwrap_err();
        assert!(err.to_string().contains("undeclared proposition"), "{err}");
    }

    #[test]
    fn empty_input_step_labeled_from_history() {
        let t = Trace::new(vec![
            StepRecord::new(1, "start", "a"),
            StepRecord::new(2, "", "b"),
        ]);
        let labeled = apply_labeler(&t, &Previous(vocab(&["prev_a"])), false).unwrap();
        assert!(labeled.steps[1].labels.as_ref().unwrap().contains("prev_a"));
    }

    #[test]
    fn existing_labels_kept_unless_overwrite() {
        let t = Trace::new(vec![
            StepRecord::new(1, "", "stop").with_labels(TruthAssignment::new())
        ]);
        let l = OutputWords(vocab(&["stop"]));
        assert!(apply_labeler(&t, &l, false).unwrap().steps[0]
            .labels
            .as_ref()
            .unwrap()
            .is_empty());
        assert!(apply_labeler(&t, &l, true).unwrap().steps[0]
            .labels
            .as_ref()
            .unwrap()
            .contains("stop"));
    }

    #[test]
    fn labeler_idempotent() {
        let t = Trace::new(vec![
            StepRecord::new(1, "", "stop"),
            StepRecord::new(2, "", "go"),
        ]);
        let l = OutputWords(vocab(&["stop", "go"]));
        let once = apply_labeler(&t, &l, true).unwrap();
        assert_eq!(apply_labeler(&once, &l, true).unwrap(), once);
    }
}
