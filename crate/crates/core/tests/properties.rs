//! Randomized properties of progression, monitoring, prediction,
//! intervention and the benchmark generator.

use std::collections::BTreeSet;

use ltlmon::intervention::{
    run_guarded, run_unguarded, GuardSession, InputScript, InterventionPolicy,
    Strategy as Intervention,
};
use ltlmon::ltl::{
    evaluate_lasso, parse, progress, progress_simplified, render, simplify, verdict_of, Formula,
    Style,
};
use ltlmon::models::{Rule, RuleLabeler, ScriptedModel};
use ltlmon::monitor::{audit_log, run_monitor, Constraint, Mode, MonitorState};
use ltlmon::predictive::{MonitoringPattern, Predictor};
use ltlmon::synth::{
    embedded_path, gen_constraint_scaling, gen_elasticity, write_bench, Family, Tree,
};
use ltlmon::{StepRecord, Trace, TruthAssignment, Verdict};
use proptest::prelude::*;

const PROPS: [&str; 4] = ["a", "b", "c", "d"];

fn formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => (0..PROPS.len()).prop_map(|i| Formula::prop(PROPS[i])),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::until(a, b)),
        ]
    })
    .boxed()
}

fn sigma() -> impl Strategy<Value = TruthAssignment> {
    (0u8..16).prop_map(|m| {
        PROPS
            .iter()
            .enumerate()
            .filter(|(i, _)| m & (1 << i) != 0)
            .map(|(_, p)| *p)
            .collect()
    })
}

fn lasso() -> impl Strategy<Value = (Vec<TruthAssignment>, Vec<TruthAssignment>)> {
    (
        prop::collection::vec(sigma(), 0..=6),
        prop::collection::vec(sigma(), 1..=3),
    )
}

/// The lasso word read from position 1.
fn shifted(
    prefix: &[TruthAssignment],
    cycle: &[TruthAssignment],
) -> (Vec<TruthAssignment>, Vec<TruthAssignment>) {
    match prefix.split_first() {
        Some((_, rest)) => (rest.to_vec(), cycle.to_vec()),
        None => {
            let mut c = cycle[1..].to_vec();
            c.push(cycle[0].clone());
            (Vec::new(), c)
        }
    }
}

fn first(prefix: &[TruthAssignment], cycle: &[TruthAssignment]) -> TruthAssignment {
    prefix.first().unwrap_or(&cycle[0]).clone()
}

fn steps_of(labels: &[TruthAssignment]) -> Trace {
    Trace::new(
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| StepRecord::new(i + 1, "", "").with_labels(l.clone()))
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn progression_matches_lasso_semantics(f in formula(5), (prefix, cycle) in lasso()) {
        let now = evaluate_lasso(&f, &prefix, &cycle).unwrap();
        let s = first(&prefix, &cycle);
        let (p2, c2) = shifted(&prefix, &cycle);
        prop_assert_eq!(now, evaluate_lasso(&progress(&f, &s), &p2, &c2).unwrap());
        prop_assert_eq!(now, evaluate_lasso(&progress_simplified(&f, &s), &p2, &c2).unwrap());
    }

    #[test]
    fn simplification_preserves_meaning(f in formula(5), (prefix, cycle) in lasso()) {
        prop_assert_eq!(
            evaluate_lasso(&f, &prefix, &cycle).unwrap(),
            evaluate_lasso(&simplify(&f), &prefix, &cycle).unwrap()
        );
        let once = simplify(&f);
        prop_assert_eq!(simplify(&once), once);
    }

    #[test]
    fn rendering_round_trips(f in formula(5)) {
        prop_assert_eq!(parse(&render(&f, Style::Ascii)).unwrap(), f.clone());
        prop_assert_eq!(parse(&render(&f, Style::Symbolic)).unwrap(), f);
    }

    #[test]
    fn terminal_verdicts_are_sound(f in formula(4), seen in prop::collection::vec(sigma(), 0..=4), (prefix, cycle) in lasso()) {
        let mut r = simplify(&f);
        for s in &seen {
            r = progress_simplified(&r, s);
        }
        let mut word = seen.clone();
        word.extend(prefix);
        let holds = evaluate_lasso(&f, &word, &cycle).unwrap();
        match verdict_of(&r) {
            Verdict::Satisfied => prop_assert!(holds),
            Verdict::Violated => prop_assert!(!holds),
            Verdict::Inconclusive => {}
        }
    }

    #[test]
    fn plain_mode_absorbs(f in formula(4), labels in prop::collection::vec(sigma(), 1..12)) {
        let c = Constraint::new("c", f);
        let r = run_monitor(&steps_of(&labels), &[c], Mode::Plain).unwrap().remove(0);
        if let Some(i) = r.verdicts.iter().position(|v| v.is_terminal()) {
            prop_assert!(r.verdicts[i..].iter().all(|v| *v == r.verdicts[i]));
        }
        prop_assert!(r.witnesses.len() <= 1);
    }

    #[test]
    fn reset_counters_match_verdicts(f in formula(4), labels in prop::collection::vec(sigma(), 1..12)) {
        let c = Constraint::new("c", f);
        let r = run_monitor(&steps_of(&labels), &[c], Mode::Reset).unwrap().remove(0);
        prop_assert_eq!(r.violations, r.verdicts.iter().filter(|v| **v == Verdict::Violated).count());
        prop_assert_eq!(r.satisfactions, r.verdicts.iter().filter(|v| **v == Verdict::Satisfied).count());
        prop_assert_eq!(r.witnesses.len(), r.violations + r.satisfactions);
    }

    #[test]
    fn witnesses_replay(f in formula(4), labels in prop::collection::vec(sigma(), 1..12)) {
        let c = Constraint::new("c", f.clone());
        let r = run_monitor(&steps_of(&labels), &[c], Mode::Reset).unwrap().remove(0);
        // one witness per terminal verdict; its entries are exactly the
        // residual changes of the episode ending there
        let ends: Vec<usize> = r.verdicts.iter().enumerate().filter(|(_, v)| v.is_terminal()).map(|(i, _)| i).collect();
        prop_assert_eq!(ends.len(), r.witnesses.len());
        let mut start = 0;
        for (w, &end) in r.witnesses.iter().zip(&ends) {
            let mut residual = simplify(&f);
            let mut expected = Vec::new();
            for (i, l) in labels.iter().enumerate().take(end + 1).skip(start) {
                let next = progress_simplified(&residual, l);
                if next != residual {
                    expected.push((i + 1, next.clone()));
                }
                residual = next;
            }
            let got: Vec<(usize, Formula)> = w.iter().map(|e| (e.t, e.residual.clone())).collect();
            prop_assert_eq!(got, expected);
            prop_assert!(verdict_of(&residual).is_terminal());
            start = end + 1;
        }
    }

    #[test]
    fn incremental_matches_prefix_replay(f in formula(4), g in formula(3), labels in prop::collection::vec(sigma(), 1..10), reset in any::<bool>()) {
        let cs = [Constraint::new("f", f), Constraint::new("g", g)];
        let mode = if reset { Mode::Reset } else { Mode::Plain };
        prop_assert!(audit_log(&steps_of(&labels), &cs, mode, true).is_ok());
    }

    #[test]
    fn constraints_are_monitored_independently(f in formula(4), g in formula(4), labels in prop::collection::vec(sigma(), 1..10)) {
        let trace = steps_of(&labels);
        let joint = run_monitor(&trace, &[Constraint::new("f", f.clone()), Constraint::new("g", g.clone())], Mode::Reset).unwrap();
        let alone_f = run_monitor(&trace, &[Constraint::new("f", f)], Mode::Reset).unwrap();
        let alone_g = run_monitor(&trace, &[Constraint::new("g", g)], Mode::Reset).unwrap();
        prop_assert_eq!(&joint[0], &alone_f[0]);
        prop_assert_eq!(&joint[1], &alone_g[0]);
    }
}

fn bad_labeler() -> RuleLabeler {
    RuleLabeler::new(&[serde_json::from_str::<Rule>(r#"{"prop":"bad","contains":"bad"}"#).unwrap()])
        .unwrap()
}

fn never_bad() -> Vec<Constraint> {
    vec![Constraint::new("safe", parse("G !bad").unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimates_are_reproducible(seed in any::<u64>(), p in 0.0f64..1.0, k in 1usize..4) {
        let model = ScriptedModel::bernoulli("bad", "good", p, 3);
        let labeler = bad_labeler();
        let state = MonitorState::new(&never_bad()[0], Mode::Plain);
        let pat = MonitoringPattern::contains_violated();
        let est = |pred: &Predictor| pred.estimate(std::slice::from_ref(&state), &[], "go", &pat, seed).unwrap();
        let a = est(&Predictor::new(&model, &labeler, k, 64));
        let b = est(&Predictor::new(&model, &labeler, k, 64));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn unguarded_equals_strategy_none(seed in any::<u64>(), p in 0.0f64..1.0) {
        let model = ScriptedModel::bernoulli("bad", "good", p, 5);
        let labeler = bad_labeler();
        let inputs = InputScript::new("start");
        let policy = InterventionPolicy { k: 1, m: 4, ..InterventionPolicy::new(Intervention::None, 0.5) };
        let mut session = GuardSession::new(&model, None, &labeler, &never_bad(), policy, Mode::Reset, seed).unwrap();
        let guarded = run_guarded(&mut session, &inputs, 12, "DONE").unwrap();
        let (trace, reports, rate) = run_unguarded(&model, &labeler, &never_bad(), &inputs, 12, "DONE", Mode::Reset, seed).unwrap();
        prop_assert_eq!(guarded.trace, trace);
        prop_assert_eq!(guarded.reports, reports);
        prop_assert_eq!(guarded.violation_rate, rate);
        prop_assert_eq!(guarded.interventions, 0);
    }

    #[test]
    fn contract_flag_is_consistent(seed in any::<u64>(), p in 0.0f64..1.0, tau in 0.0f64..1.0) {
        let model = ScriptedModel::bernoulli("bad", "good", p, 9);
        let labeler = bad_labeler();
        let policy = InterventionPolicy { k: 2, m: 8, n: 3, ..InterventionPolicy::new(Intervention::Resample, tau) };
        let mut session = GuardSession::new(&model, None, &labeler, &never_bad(), policy, Mode::Reset, seed).unwrap();
        let run = run_guarded(&mut session, &InputScript::new("go"), 6, "DONE").unwrap();
        for o in &run.outcomes {
            prop_assert_eq!(o.intervened, o.risk_before >= tau);
            match (o.risk_original, o.risk_after, o.contract_held) {
                (Some(before), Some(after), Some(held)) => prop_assert_eq!(held, after <= before),
                (None, None, None) => prop_assert!(!o.intervened),
                other => prop_assert!(false, "partial contract record {:?}", other),
            }
        }
    }

    /// At one decision point, raising the threshold never adds an intervention.
    #[test]
    fn threshold_is_monotone_per_step(seed in any::<u64>(), p in 0.0f64..1.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let model = ScriptedModel::bernoulli("bad", "good", p, 2);
        let labeler = bad_labeler();
        let step = |tau: f64| {
            let policy = InterventionPolicy { k: 2, m: 10, ..InterventionPolicy::new(Intervention::Resample, tau) };
            let mut s = GuardSession::new(&model, None, &labeler, &never_bad(), policy, Mode::Reset, seed).unwrap();
            s.guard_step("go").unwrap()
        };
        let (a, b) = (step(lo), step(hi));
        prop_assert_eq!(a.risk_before, b.risk_before);
        prop_assert!(a.intervened || !b.intervened);
    }

    #[test]
    fn generation_is_seed_deterministic(seed in any::<u64>(), gap in 1usize..30) {
        let bytes = || {
            let mut out = Vec::new();
            write_bench(&mut out, &gen_elasticity(gap, Family::Simple, seed, 4).unwrap()).unwrap();
            out
        };
        prop_assert_eq!(bytes(), bytes());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn satisfied_trees_embed_a_path(seed in any::<u64>()) {
        for c in gen_constraint_scaling(3, Family::Complex, seed, 2, Some(20)).unwrap() {
            let labels = c.trace.labels().unwrap();
            for (con, truth) in c.constraints.iter().zip(&c.truth) {
                let tree = Tree::from_formula(&con.formula).unwrap();
                let path = embedded_path(&tree, &labels);
                prop_assert_eq!(path.is_some(), *truth);
                if let Some(p) = path {
                    prop_assert_eq!(p.len(), 6);
                    prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
                    let props: BTreeSet<&str> = tree.paths().iter().map(|p| *p.last().unwrap()).collect();
                    prop_assert_eq!(props.len(), 1);
                }
            }
        }
    }
}
