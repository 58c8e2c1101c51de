//! Progression monitors over labeled traces, the prefix-replay auditor and
//! F1 scoring of verdict streams.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{progress_simplified, simplify, verdict_of, Formula, TruthAssignment, Verdict};
use crate::trace::{StepRecord, Trace, VerdictReport, Witness, WitnessEntry};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Terminal verdicts absorb.
    #[default]
    Plain,
    /// Restart from the original formula after every terminal verdict.
    Reset,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Mode::Plain),
            "reset" => Ok(Mode::Reset),
            other => Err(format!("unknown mode `{other}` (expected plain or reset)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub id: String,
    pub formula: Formula,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss: Option<String>,
}

impl Constraint {
    pub fn new(id: impl Into<String>, formula: Formula) -> Self {
        Constraint {
            id: id.into(),
            formula,
            gloss: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MonitorError {
    #[error("step {t} has no labels")]
    MissingLabels { t: usize },
    #[error("duplicate constraint id `{0}`")]
    DuplicateId(String),
    #[error("prefix replay disagrees with incremental monitoring for `{constraint}` at step {t}: {incremental} vs {replayed}")]
    Discrepancy {
        constraint: String,
        t: usize,
        incremental: Verdict,
        replayed: Verdict,
    },
    #[error("report shapes differ: {0}")]
    ShapeMismatch(String),
}

/// Monitoring state for one constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorState {
    id: String,
    original: Formula,
    start: Formula,
    residual: Formula,
    witness: Witness,
    mode: Mode,
    violations: usize,
    satisfactions: usize,
    last: Verdict,
    closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub verdict: Verdict,
    /// Set when this step completed a violation or satisfaction episode.
    pub closed_witness: Option<Witness>,
}

impl MonitorState {
    pub fn new(constraint: &Constraint, mode: Mode) -> Self {
        let start = simplify(&constraint.formula);
        MonitorState {
            id: constraint.id.clone(),
            original: constraint.formula.clone(),
            last: verdict_of(&start),
            residual: start.clone(),
            start,
            witness: Vec::new(),
            mode,
            violations: 0,
            satisfactions: 0,
            closed: false,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn formula(&self) -> &Formula {
        &self.original
    }

    pub fn residual(&self) -> &Formula {
        &self.residual
    }

    pub fn witness(&self) -> &Witness {
        &self.witness
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Verdict for the history seen so far. In reset mode this is the
    /// verdict reported at the last step, even though the residual has
    /// already been reset.
    pub fn verdict(&self) -> Verdict {
        self.last
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    pub fn satisfactions(&self) -> usize {
        self.satisfactions
    }

    pub fn step(&mut self, labels: &TruthAssignment, ctx: &StepRecord) -> StepOutcome {
        let absorbed = self.mode == Mode::Plain && self.residual.is_literal();
        let verdict = if absorbed {
            verdict_of(&self.residual)
        } else {
            let next = progress_simplified(&self.residual, labels);
            if next != self.residual {
                self.witness.push(WitnessEntry {
                    t: ctx.t,
                    input: ctx.input.clone(),
                    output: ctx.output.clone(),
                    labels: labels.clone(),
                    residual: next.clone(),
                });
            }
            self.residual = next;
            verdict_of(&self.residual)
        };
        match verdict {
            Verdict::Violated => self.violations += 1,
            Verdict::Satisfied => self.satisfactions += 1,
            Verdict::Inconclusive => {}
        }
        self.last = verdict;
        let closed_witness = match (verdict.is_terminal(), self.mode) {
            (false, _) => None,
            (true, Mode::Plain) if self.closed => None,
            (true, Mode::Plain) => {
                self.closed = true;
                Some(self.witness.clone())
            }
            (true, Mode::Reset) => {
                self.residual = self.start.clone();
                Some(std::mem::take(&mut self.witness))
            }
        };
        StepOutcome {
            verdict,
            closed_witness,
        }
    }
}

/// Independent monitors for a set of constraints, ordered by id, recording
/// verdict streams and closed witnesses.
#[derive(Debug, Clone)]
pub struct Monitor {
    states: Vec<MonitorState>,
    verdicts: Vec<Vec<Verdict>>,
    witnesses: Vec<Vec<Witness>>,
}

impl Monitor {
    pub fn new(constraints: &[Constraint], mode: Mode) -> Result<Self, MonitorError> {
        let mut sorted: Vec<&Constraint> = constraints.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(MonitorError::DuplicateId(w[0].id.clone()));
        }
        let n = sorted.len();
        Ok(Monitor {
            states: sorted
                .into_iter()
                .map(|c| MonitorState::new(c, mode))
                .collect(),
            verdicts: vec![Vec::new(); n],
            witnesses: vec![Vec::new(); n],
        })
    }

    pub fn states(&self) -> &[MonitorState] {
        &self.states
    }

    /// Progresses every constraint with the labels of `step`.
    pub fn step(&mut self, step: &StepRecord) -> Result<Vec<Verdict>, MonitorError> {
        let labels = step
            .labels
            .as_ref()
            .ok_or(MonitorError::MissingLabels { t: step.t })?;
        Ok(self.step_with(labels, step))
    }

    pub fn step_with(&mut self, labels: &TruthAssignment, ctx: &StepRecord) -> Vec<Verdict> {
        let mut out = Vec::with_capacity(self.states.len());
        for (i, state) in self.states.iter_mut().enumerate() {
            let o = state.step(labels, ctx);
            self.verdicts[i].push(o.verdict);
            if let Some(w) = o.closed_witness {
                self.witnesses[i].push(w);
            }
            out.push(o.verdict);
        }
        out
    }

    pub fn reports(&self) -> Vec<VerdictReport> {
        self.states
            .iter()
            .zip(&self.verdicts)
            .zip(&self.witnesses)
            .map(|((s, v), w)| VerdictReport {
                constraint: s.id.clone(),
                verdicts: v.clone(),
                violations: s.violations,
                satisfactions: s.satisfactions,
                witnesses: w.clone(),
            })
            .collect()
    }
}

/// One report per constraint, sorted by constraint id.
pub fn run_monitor(
    trace: &Trace,
    constraints: &[Constraint],
    mode: Mode,
) -> Result<Vec<VerdictReport>, MonitorError> {
    if let Some(s) = trace.steps.iter().find(|s| s.labels.is_none()) {
        return Err(MonitorError::MissingLabels { t: s.t });
    }
    let mut monitor = Monitor::new(constraints, mode)?;
    for step in &trace.steps {
        monitor.step(step)?;
    }
    Ok(monitor.reports())
}

/// Offline audit of a complete log. With `cross_check`, every prefix is
/// also re-monitored from scratch and its final verdict compared against
/// the incremental stream.
pub fn audit_log(
    trace: &Trace,
    constraints: &[Constraint],
    mode: Mode,
    cross_check: bool,
) -> Result<Vec<VerdictReport>, MonitorError> {
    let reports = run_monitor(trace, constraints, mode)?;
    if cross_check {
        for n in 1..=trace.steps.len() {
            let prefix = Trace::new(trace.steps[..n].to_vec());
            let replayed = run_monitor(&prefix, constraints, mode)?;
            for (inc, rep) in reports.iter().zip(&replayed) {
                let (a, b) = (
                    inc.verdicts[n - 1],
                    *rep.verdicts.last().expect("nonempty prefix"),
                );
                if a != b {
                    return Err(MonitorError::Discrepancy {
                        constraint: inc.constraint.clone(),
                        t: trace.steps[n - 1].t,
                        incremental: a,
                        replayed: b,
                    });
                }
            }
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl F1Score {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        if tp + fp + fn_ == 0 {
            return F1Score {
                tp,
                fp,
                fn_,
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
            };
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        F1Score {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub per_constraint: BTreeMap<String, F1Score>,
    pub pooled: F1Score,
}

fn events(r: &VerdictReport) -> BTreeSet<(usize, Verdict)> {
    r.verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_terminal())
        .map(|(i, v)| (i, *v))
        .collect()
}

/// Event-level precision/recall/F1. An event is a (step, terminal verdict)
/// pair of one constraint; both sides must agree on all three to match.
pub fn score_f1(
    predicted: &[VerdictReport],
    truth: &[VerdictReport],
) -> Result<F1Report, MonitorError> {
    let index = |rs: &[VerdictReport]| -> Result<BTreeMap<String, VerdictReport>, MonitorError> {
        let mut m = BTreeMap::new();
        for r in rs {
            if m.insert(r.constraint.clone(), r.clone()).is_some() {
                return Err(MonitorError::DuplicateId(r.constraint.clone()));
            }
        }
        Ok(m)
    };
    let (p, t) = (index(predicted)?, index(truth)?);
    if p.keys().ne(t.keys()) {
        return Err(MonitorError::ShapeMismatch(format!(
            "constraint ids {:?} vs {:?}",
            p.keys().collect::<Vec<_>>(),
            t.keys().collect::<Vec<_>>()
        )));
    }
    let mut per_constraint = BTreeMap::new();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (id, pr) in &p {
        let tr = &t[id];
        if pr.verdicts.len() != tr.verdicts.len() {
            return Err(MonitorError::ShapeMismatch(format!(
                "`{id}` has {} predicted verdicts and {} true ones",
                pr.verdicts.len(),
                tr.verdicts.len()
            )));
        }
        let (pe, te) = (events(pr), events(tr));
        let c_tp = pe.intersection(&te).count();
        let score = F1Score::from_counts(c_tp, pe.len() - c_tp, te.len() - c_tp);
        tp += score.tp;
        fp += score.fp;
        fn_ += score.fn_;
        per_constraint.insert(id.clone(), score);
    }
    Ok(F1Report {
        per_constraint,
        pooled: F1Score::from_counts(tp, fp, fn_),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn labeled(steps: &[&[&str]]) -> Trace {
        Trace::new(
            steps
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    StepRecord::new(i + 1, "", format!("o{}", i + 1))
                        .with_labels(l.iter().copied().collect())
                })
                .collect(),
        )
    }

    fn c(id: &str, f: &str) -> Constraint {
        Constraint::new(id, parse(f).unwrap())
    }

    #[test]
    fn eventually_satisfied_with_witness() {
        let mut s = MonitorState::new(&c("x", "F putdown"), Mode::Plain);
        let o = s.step(
            &["putdown"].into_iter().collect(),
            &StepRecord::new(1, "", "put"),
        );
        assert_eq!(o.verdict, Verdict::Satisfied);
        assert_eq!(s.witness().last().unwrap().residual, Formula::True);
    }

    #[test]
    fn always_violated() {
        let mut s = MonitorState::new(&c("x", "G p"), Mode::Plain);
        assert_eq!(
            s.step(&TruthAssignment::new(), &StepRecord::new(1, "", ""))
                .verdict,
            Verdict::Violated
        );
        assert_eq!(
            s.step(&["p"].into_iter().collect(), &StepRecord::new(2, "", ""))
                .verdict,
            Verdict::Violated
        );
        assert_eq!(s.residual(), &Formula::False);
    }

    #[test]
    fn reset_mode_counts_episodes() {
        let r = run_monitor(&labeled(&[&[], &["p"]]), &[c("g", "G p")], Mode::Reset).unwrap();
        assert_eq!(
            r[0].verdicts,
            vec![Verdict::Violated, Verdict::Inconclusive]
        );
        assert_eq!(r[0].violations, 1);
        assert_eq!(r[0].witnesses.len(), 1);
        let mut m = Monitor::new(&[c("g", "G p")], Mode::Reset).unwrap();
        m.step(&labeled(&[&[]]).steps[0]).unwrap();
        assert_eq!(m.states()[0].residual(), &parse("G p").unwrap());
        assert_eq!(m.states()[0].verdict(), Verdict::Violated);
    }

    #[test]
    fn true_constraint() {
        let t = labeled(&[&[], &[], &[]]);
        let r = run_monitor(&t, &[c("t", "true")], Mode::Reset).unwrap();
        assert_eq!(r[0].verdicts, vec![Verdict::Satisfied; 3]);
        let r = run_monitor(&t, &[c("t", "true")], Mode::Plain).unwrap();
        assert_eq!(r[0].verdicts, vec![Verdict::Satisfied; 3]);
        assert_eq!(r[0].witnesses.len(), 1);
    }

    #[test]
    fn simple_formula_hand_trace() {
        let mut steps: Vec<&[&str]> = vec![&[]; 8];
        steps[1] = &["a"];
        steps[6] = &["b"];
        let r = run_monitor(&labeled(&steps), &[c("s", "F(a & X F b)")], Mode::Plain).unwrap();
        let mut expected = vec![Verdict::Inconclusive; 6];
        expected.extend([Verdict::Satisfied, Verdict::Satisfied]);
        assert_eq!(r[0].verdicts, expected);
    }

    #[test]
    fn shapes_and_ordering() {
        let t = labeled(&[&[], &["a"], &[], &[], &[]]);
        let r = run_monitor(&t, &[c("z", "G !a"), c("a", "F a")], Mode::Plain).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].constraint, "a");
        assert!(r.iter().all(|r| r.verdicts.len() == 5));
        assert_eq!(
            run_monitor(&t, &[c("a", "p"), c("a", "q")], Mode::Plain),
            Err(MonitorError::DuplicateId("a".into()))
        );
        assert_eq!(run_monitor(&t, &[], Mode::Plain).unwrap(), vec![]);
        let unlabeled = Trace::new(vec![StepRecord::new(1, "", "")]);
        assert_eq!(
            run_monitor(&unlabeled, &[c("a", "p")], Mode::Plain),
            Err(MonitorError::MissingLabels { t: 1 })
        );
    }

    #[test]
    fn cross_check_agrees() {
        let t = labeled(&[&["a"], &[], &["b"], &["a"], &[], &[], &["b"]]);
        let cs = [c("r", "G(a -> F b)"), c("u", "!b U a"), c("x", "X X b")];
        for mode in [Mode::Plain, Mode::Reset] {
            assert_eq!(
                audit_log(&t, &cs, mode, true).unwrap(),
                run_monitor(&t, &cs, mode).unwrap()
            );
        }
    }

    fn report(v: &[Verdict]) -> VerdictReport {
        VerdictReport {
            constraint: "c".into(),
            verdicts: v.to_vec(),
            violations: 0,
            satisfactions: 0,
            witnesses: vec![],
        }
    }

    #[test]
    fn f1_cases() {
        use Verdict::*;
        let truth = report(&[Inconclusive, Violated, Inconclusive]);
        let same = score_f1(std::slice::from_ref(&truth), std::slice::from_ref(&truth)).unwrap();
        assert_eq!(same.pooled.f1, 1.0);
        let pred = report(&[Satisfied, Violated, Inconclusive]);
        let s = score_f1(&[pred], std::slice::from_ref(&truth)).unwrap();
        assert_eq!((s.pooled.precision, s.pooled.recall), (0.5, 1.0));
        assert_eq!(s.pooled.f1, 2.0 / 3.0);
        let none = report(&[Inconclusive; 3]);
        assert_eq!(
            score_f1(&[none], std::slice::from_ref(&truth))
                .unwrap()
                .pooled
                .f1,
            0.0
        );
        assert!(score_f1(&[report(&[Inconclusive])], &[truth]).is_err());
    }
}
