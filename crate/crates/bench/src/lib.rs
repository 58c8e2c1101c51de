//! Workloads shared by the criterion benchmarks.

use ltlmon::ltl::{Formula, TruthAssignment};
use ltlmon::synth::{gen_constraint_scaling, Family};
use ltlmon::{Constraint, Trace};

/// A depth-4 tree constraint with its generated trace.
pub fn complex_case(seed: u64) -> (Trace, Vec<Constraint>) {
    let mut cases =
        gen_constraint_scaling(1, Family::Complex, seed, 1, None).expect("generator accepts n=1");
    let c = cases.pop().expect("one case");
    (c.trace, c.constraints)
}

/// Twenty chain constraints over a 500-step trace.
pub fn many_constraints(seed: u64) -> (Trace, Vec<Constraint>) {
    let mut cases =
        gen_constraint_scaling(20, Family::Simple, seed, 1, None).expect("generator accepts n=20");
    let c = cases.pop().expect("one case");
    (c.trace, c.constraints)
}

/// Label sets of a trace, owned.
pub fn labels(trace: &Trace) -> Vec<TruthAssignment> {
    trace
        .labels()
        .expect("generated traces are labeled")
        .into_iter()
        .cloned()
        .collect()
}

pub fn formulas(constraints: &[Constraint]) -> Vec<Formula> {
    constraints.iter().map(|c| c.formula.clone()).collect()
}
