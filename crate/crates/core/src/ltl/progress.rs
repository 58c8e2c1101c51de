use std::sync::Arc;

use super::formula::{Formula, TruthAssignment};
use super::simplify::simplify;

/// One step of LTL progression: the obligation the rest of the word must meet
/// given that `sigma` holds now.
///
/// The result is not simplified; see [`progress_simplified`].
pub fn progress(phi: &Formula, sigma: &TruthAssignment) -> Formula {
    match phi {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Prop(p) => {
            if sigma.contains(p) {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(c) => Formula::not(progress(c, sigma)),
        Formula::And(l, r) => Formula::and(progress(l, sigma), progress(r, sigma)),
        Formula::Or(l, r) => Formula::or(progress(l, sigma), progress(r, sigma)),
        // l -> r is progressed as !l | r
        Formula::Implies(l, r) => Formula::or(Formula::not(progress(l, sigma)), progress(r, sigma)),
        Formula::Next(c) => (**c).clone(),
        Formula::Until(l, r) => Formula::or(
            progress(r, sigma),
            Formula::And(Arc::new(progress(l, sigma)), Arc::new(phi.clone())),
        ),
        Formula::Always(c) => Formula::And(Arc::new(progress(c, sigma)), Arc::new(phi.clone())),
        Formula::Eventually(c) => Formula::Or(Arc::new(progress(c, sigma)), Arc::new(phi.clone())),
    }
}

/// `simplify(progress(phi, sigma))`, the residual update used by the monitors.
pub fn progress_simplified(phi: &Formula, sigma: &TruthAssignment) -> Formula {
    simplify(&progress(phi, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parser::parse;

    fn sigma(props: &[&str]) -> TruthAssignment {
        props.iter().copied().collect()
    }

    #[test]
    fn pickup_then_putdown_residual() {
        let phi = parse("F(pickup & X F putdown)").unwrap();
        let raw = progress(&phi, &sigma(&["pickup"]));
        // (true & F putdown) | F(pickup & X F putdown)
        assert_eq!(
            raw,
            Formula::or(
                Formula::and(Formula::True, parse("F putdown").unwrap()),
                phi.clone()
            )
        );
        assert_eq!(simplify(&raw), parse("F putdown").unwrap());
    }

    #[test]
    fn always_kept_when_holding() {
        let phi = parse("G p").unwrap();
        assert_eq!(progress_simplified(&phi, &sigma(&["p"])), phi);
        assert_eq!(progress_simplified(&phi, &sigma(&[])), Formula::False);
    }

    #[test]
    fn prop_absent_is_false() {
        assert_eq!(progress(&Formula::prop("p"), &sigma(&[])), Formula::False);
        assert_eq!(progress(&Formula::prop("p"), &sigma(&["p"])), Formula::True);
    }

    #[test]
    fn next_drops_one_step() {
        let phi = parse("X X p").unwrap();
        assert_eq!(progress(&phi, &sigma(&[])), parse("X p").unwrap());
    }

    #[test]
    fn until_rule() {
        let phi = parse("a U b").unwrap();
        assert_eq!(progress_simplified(&phi, &sigma(&["b"])), Formula::True);
        assert_eq!(progress_simplified(&phi, &sigma(&["a"])), phi);
        assert_eq!(progress_simplified(&phi, &sigma(&[])), Formula::False);
    }

    #[test]
    fn implies_rule() {
        let phi = parse("G(a -> F b)").unwrap();
        assert_eq!(progress_simplified(&phi, &sigma(&[])), phi);
        let after_a = progress_simplified(&phi, &sigma(&["a"]));
        assert_eq!(after_a, parse("F b & G(a -> F b)").unwrap());
    }
}
