//! Syntactic simplification of residual formulas.
//!
//! Rewrites are local and purely structural: literal propagation, double
//! negation, idempotence, and absorption of conjuncts (disjuncts) that are
//! syntactically entailed by (entail) a sibling in the same flattened
//! `&`-chain (`|`-chain). No semantic tautology check is performed, so some
//! residuals whose truth is already determined stay non-literal.

use std::sync::Arc;

use super::formula::Formula;

/// Simplifies to a fixed point. Idempotent and never increases node count.
pub fn simplify(phi: &Formula) -> Formula {
    let mut current = simplify_once(phi);
    loop {
        let next = simplify_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn simplify_once(phi: &Formula) -> Formula {
    match phi {
        Formula::True | Formula::False | Formula::Prop(_) => phi.clone(),
        Formula::Not(c) => match simplify_once(c) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => (*inner).clone(),
            other => reuse_unary(phi, c, other, Formula::Not),
        },
        Formula::And(..) => simplify_chain(phi, true),
        Formula::Or(..) => simplify_chain(phi, false),
        Formula::Implies(l, r) => {
            let l = simplify_once(l);
            let r = simplify_once(r);
            match (&l, &r) {
                (Formula::True, _) => r,
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (_, Formula::False) => simplify_once(&Formula::not(l)),
                _ if l == r => Formula::True,
                _ => Formula::implies(l, r),
            }
        }
        Formula::Next(c) => match simplify_once(c) {
            lit @ (Formula::True | Formula::False) => lit,
            other => reuse_unary(phi, c, other, Formula::Next),
        },
        Formula::Eventually(c) => match simplify_once(c) {
            lit @ (Formula::True | Formula::False) => lit,
            inner @ Formula::Eventually(_) => inner,
            other => reuse_unary(phi, c, other, Formula::Eventually),
        },
        Formula::Always(c) => match simplify_once(c) {
            lit @ (Formula::True | Formula::False) => lit,
            inner @ Formula::Always(_) => inner,
            other => reuse_unary(phi, c, other, Formula::Always),
        },
        Formula::Until(l, r) => {
            let ls = simplify_once(l);
            let rs = simplify_once(r);
            match (&ls, &rs) {
                (_, Formula::True) => Formula::True,
                (_, Formula::False) => Formula::False,
                (Formula::False, _) => rs,
                (Formula::True, _) => Formula::eventually(rs),
                _ if ls == rs => rs,
                _ if ls == **l && rs == **r => phi.clone(),
                _ => Formula::until(ls, rs),
            }
        }
    }
}

/// Keeps the original node (and its shared subtree) when the child did not change.
fn reuse_unary(
    original: &Formula,
    child: &Arc<Formula>,
    simplified: Formula,
    wrap: fn(Arc<Formula>) -> Formula,
) -> Formula {
    if simplified == **child {
        original.clone()
    } else {
        wrap(Arc::new(simplified))
    }
}

fn flatten<'a>(phi: &'a Formula, conj: bool, out: &mut Vec<&'a Formula>) {
    match (phi, conj) {
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
            flatten(l, conj, out);
            flatten(r, conj, out);
        }
        _ => out.push(phi),
    }
}

fn simplify_chain(phi: &Formula, conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut raw = Vec::new();
    flatten(phi, conj, &mut raw);

    let mut items: Vec<Formula> = Vec::with_capacity(raw.len());
    for item in raw {
        let s = simplify_once(item);
        let mut parts = Vec::new();
        flatten(&s, conj, &mut parts);
        for part in parts {
            if *part == zero {
                return zero;
            }
            if *part == unit || items.contains(part) {
                continue;
            }
            items.push(part.clone());
        }
    }

    // Absorption: in a conjunction drop x when a kept sibling entails x; in a
    // disjunction drop x when x entails a kept sibling.
    let mut keep = vec![true; items.len()];
    for i in 0..items.len() {
        let redundant = (0..items.len()).any(|j| {
            j != i
                && keep[j]
                && if conj {
                    entails(&items[j], &items[i])
                } else {
                    entails(&items[i], &items[j])
                }
        });
        if redundant {
            keep[i] = false;
        }
    }
    let mut kept = items
        .into_iter()
        .zip(keep)
        .filter_map(|(f, k)| k.then_some(f));

    let Some(first) = kept.next() else {
        return unit;
    };
    let rebuilt = kept.fold(first, |acc, f| {
        if conj {
            Formula::and(acc, f)
        } else {
            Formula::or(acc, f)
        }
    });
    if rebuilt == *phi {
        phi.clone()
    } else {
        rebuilt
    }
}

/// Sound but incomplete syntactic entailment: `true` only if every word
/// satisfying `a` satisfies `b`.
pub fn entails(a: &Formula, b: &Formula) -> bool {
    use Formula::*;
    if a == b || matches!(b, True) || matches!(a, False) {
        return true;
    }
    match a {
        And(x, y) if entails(x, b) || entails(y, b) => return true,
        Or(x, y) if entails(x, b) && entails(y, b) => return true,
        _ => {}
    }
    match b {
        And(x, y) if entails(a, x) && entails(a, y) => return true,
        Or(x, y) if entails(a, x) || entails(a, y) => return true,
        _ => {}
    }
    match (a, b) {
        // G x holds now, so x does
        (Always(x), _) if entails(x, b) => true,
        (Always(x), Always(y) | Next(y)) => entails(x, y),
        (Next(x), Next(y)) => entails(x, y),
        // the witness position of F x (or X x, or x1 U x2) already yields F y
        (Eventually(x), Eventually(_))
        | (Next(x), Eventually(_))
        | (Until(_, x), Eventually(_)) => entails(x, b),
        (Until(x1, x2), Until(y1, y2)) => (entails(x1, y1) && entails(x2, y2)) || entails(a, y2),
        (_, Eventually(y)) => entails(a, y),
        (_, Until(_, y2)) => entails(a, y2),
        (Not(x), Not(y)) => entails(y, x),
        _ => false,
    }
}
