use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An LTL formula.
///
/// Children are reference counted so that progression, which copies the
/// unprogressed formula into its own result (`prg(G p) = prg(p) & G p`), can
/// share subtrees instead of deep-cloning them. Equality and hashing are
/// structural.
// `eq` only adds a pointer shortcut to structural comparison, so it agrees
// with the derived hash
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Debug, Clone, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    Eventually(Arc<Formula>),
    Always(Arc<Formula>),
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        use Formula::*;
        fn same(a: &Arc<Formula>, b: &Arc<Formula>) -> bool {
            Arc::ptr_eq(a, b) || **a == **b
        }
        match (self, other) {
            (True, True) | (False, False) => true,
            (Prop(a), Prop(b)) => a == b,
            (Not(a), Not(b))
            | (Next(a), Next(b))
            | (Eventually(a), Eventually(b))
            | (Always(a), Always(b)) => same(a, b),
            (And(a1, a2), And(b1, b2))
            | (Or(a1, a2), Or(b1, b2))
            | (Implies(a1, a2), Implies(b1, b2))
            | (Until(a1, a2), Until(b1, b2)) => same(a1, b1) && same(a2, b2),
            _ => false,
        }
    }
}

/// Returns true if `name` is a valid proposition identifier.
pub fn is_valid_prop_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Formula {
    /// Panics if `name` is not a valid proposition identifier; use the parser
    /// for untrusted text.
    pub fn prop(name: &str) -> Formula {
        assert!(
            is_valid_prop_name(name),
            "invalid proposition name {name:?}"
        );
        Formula::Prop(Arc::from(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Arc::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Arc::new(l), Arc::new(r))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Arc::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Formula::Always(Arc::new(f))
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => 1,
            Formula::Not(c) | Formula::Next(c) | Formula::Eventually(c) | Formula::Always(c) => {
                1 + c.size()
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => 0,
            Formula::Not(c) | Formula::Next(c) | Formula::Eventually(c) | Formula::Always(c) => {
                1 + c.depth()
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// All proposition names occurring in the formula.
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Prop(p) => {
                out.insert(p.to_string());
            }
            Formula::Not(c) | Formula::Next(c) | Formula::Eventually(c) | Formula::Always(c) => {
                c.collect_props(out)
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::True | Formula::False)
    }
}

/// Displays the canonical ascii rendering.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render(self, super::render::Style::Ascii))
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        super::parser::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The set of propositions true at one step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruthAssignment(BTreeSet<String>);

impl TruthAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, prop: &str) -> bool {
        self.0.contains(prop)
    }

    pub fn insert(&mut self, prop: impl Into<String>) -> bool {
        self.0.insert(prop.into())
    }

    pub fn remove(&mut self, prop: &str) -> bool {
        self.0.remove(prop)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TruthAssignment {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TruthAssignment(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for TruthAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Three-valued monitor output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// Not violated or satisfied yet.
    Inconclusive,
}

impl Verdict {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "Satisfied",
            Verdict::Violated => "Violated",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Maps a simplified residual to its verdict.
pub fn verdict_of(phi: &Formula) -> Verdict {
    match phi {
        Formula::False => Verdict::Violated,
        Formula::True => Verdict::Satisfied,
        _ => Verdict::Inconclusive,
    }
}
