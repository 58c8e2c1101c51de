use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::{label_checked, LabelError, LabelingFunction, StepRecord, Trace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub half_width: f64,
}

impl PropAccuracy {
    fn from_counts(correct: usize, total: usize) -> Self {
        let (accuracy, half_width) = proportion_ci(correct, total);
        PropAccuracy {
            correct,
            total,
            accuracy,
            half_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub overall: PropAccuracy,
    pub per_prop: BTreeMap<String, PropAccuracy>,
}

#[derive(Debug, Error)]
pub enum AccuracyError {
    #[error("trace {trace} step {t} has no ground-truth labels")]
    MissingTruth { trace: usize, t: usize },
    #[error("labeling failed on trace {trace} step {t}: {source}")]
    Labeler {
        trace: usize,
        t: usize,
        source: LabelError,
    },
    #[error("corpus has no decisions to score")]
    Empty,
}

/// Mean and 95% normal-approximation half-width for `k` successes in `n`.
pub fn proportion_ci(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = k as f64 / n as f64;
    (p, 1.96 * (p * (1.0 - p) / n as f64).sqrt())
}

/// Scores `labeler` against the embedded labels of `corpus`, one decision
/// per (step, vocabulary proposition). The labeler sees histories with the
/// ground truth stripped.
pub fn measure_labeler_accuracy(
    labeler: &dyn LabelingFunction,
    corpus: &[Trace],
) -> Result<AccuracyReport, AccuracyError> {
    let vocab = labeler.vocabulary().clone();
    let mut counts: BTreeMap<String, (usize, usize)> =
        vocab.iter().map(|p| (p.clone(), (0, 0))).collect();
    for (ti, trace) in corpus.iter().enumerate() {
        let stripped: Vec<StepRecord> = trace
            .steps
            .iter()
            .map(|s| StepRecord {
                labels: None,
                ..s.clone()
            })
            .collect();
        for (i, step) in trace.steps.iter().enumerate() {
            let truth = step.labels.as_ref().ok_or(AccuracyError::MissingTruth {
                trace: ti,
                t: step.t,
            })?;
            let got = label_checked(labeler, &stripped[..=i]).map_err(|source| {
                AccuracyError::Labeler {
                    trace: ti,
                    t: step.t,
                    source,
                }
            })?;
            for p in &vocab {
                let c = counts.get_mut(p).expect("vocab key");
                c.1 += 1;
                if truth.contains(p) == got.contains(p) {
                    c.0 += 1;
                }
            }
        }
    }
    let (correct, total) = counts
        .values()
        .fold((0, 0), |(a, b), (c, n)| (a + c, b + n));
    if total == 0 {
        return Err(AccuracyError::Empty);
    }
    Ok(AccuracyReport {
        overall: PropAccuracy::from_counts(correct, total),
        per_prop: counts
            .into_iter()
            .map(|(p, (c, n))| (p, PropAccuracy::from_counts(c, n)))
            .collect(),
    })
}
