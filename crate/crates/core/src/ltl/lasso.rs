//! Exact LTL semantics on ultimately periodic words `prefix · loop^ω`.
//!
//! Used as an oracle independent of progression: the word has
//! `prefix.len() + loop.len()` distinct positions, each subformula is
//! evaluated to a truth vector over them, and the temporal operators are
//! solved as least (`U`, `F`) or greatest (`G`) fixed points along the
//! successor function, which wraps the last position back to the loop start.

use thiserror::Error;

use super::formula::{Formula, TruthAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
}

struct Word<'a> {
    prefix: &'a [TruthAssignment],
    cycle: &'a [TruthAssignment],
}

impl Word<'_> {
    fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    fn at(&self, i: usize) -> &TruthAssignment {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Whether `prefix · loop^ω` satisfies `phi` at position 0.
pub fn evaluate_lasso(
    phi: &Formula,
    prefix: &[TruthAssignment],
    cycle: &[TruthAssignment],
) -> Result<bool, LassoError> {
    if cycle.is_empty() {
        return Err(LassoError::EmptyLoop);
    }
    let word = Word { prefix, cycle };
    Ok(eval(phi, &word)[0])
}

fn eval(phi: &Formula, w: &Word<'_>) -> Vec<bool> {
    let n = w.len();
    match phi {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Prop(p) => (0..n).map(|i| w.at(i).contains(p)).collect(),
        Formula::Not(c) => eval(c, w).into_iter().map(|v| !v).collect(),
        Formula::And(l, r) => zip_with(eval(l, w), eval(r, w), |a, b| a && b),
        Formula::Or(l, r) => zip_with(eval(l, w), eval(r, w), |a, b| a || b),
        Formula::Implies(l, r) => zip_with(eval(l, w), eval(r, w), |a, b| !a || b),
        Formula::Next(c) => {
            let v = eval(c, w);
            (0..n).map(|i| v[w.succ(i)]).collect()
        }
        Formula::Until(l, r) => {
            let lv = eval(l, w);
            let rv = eval(r, w);
            fixpoint(w, false, |i, next| rv[i] || (lv[i] && next))
        }
        Formula::Eventually(c) => {
            let v = eval(c, w);
            fixpoint(w, false, |i, next| v[i] || next)
        }
        Formula::Always(c) => {
            let v = eval(c, w);
            fixpoint(w, true, |i, next| v[i] && next)
        }
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ(i)])` from the all-`init` vector until it
/// stabilises; `init = false` yields the least and `true` the greatest fixed
/// point. The step functions used are monotone, so at most `n + 1` rounds run.
fn fixpoint(w: &Word<'_>, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.len();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let nv = step(i, v[w.succ(i)]);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
