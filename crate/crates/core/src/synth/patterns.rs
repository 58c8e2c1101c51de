//! Constraint shapes used by the benchmark and their English wordings.

use serde::{Deserialize, Serialize};

use super::vocab::article;
use super::{Attr, Prop, SynthError};
use crate::ltl::{evaluate_lasso, render, Formula, Style, TruthAssignment};

/// An "A, then strictly later one of the children" obligation tree.
///
/// A node with prop `p` and children `c1..cn` is `p & X F(c1 | ... | cn)`;
/// a leaf is its bare proposition; the whole tree is wrapped in `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub prop: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(prop: impl Into<String>) -> Tree {
        Tree {
            prop: prop.into(),
            children: Vec::new(),
        }
    }

    pub fn node(prop: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree {
            prop: prop.into(),
            children,
        }
    }

    /// `F(a & X F b)`.
    pub fn chain(a: &str, b: &str) -> Tree {
        Tree::node(a, vec![Tree::leaf(b)])
    }

    pub fn to_formula(&self) -> Formula {
        Formula::eventually(self.body())
    }

    fn body(&self) -> Formula {
        let p = Formula::prop(&self.prop);
        let mut kids = self.children.iter().map(Tree::body);
        match kids.next() {
            None => p,
            Some(first) => {
                let alt = kids.fold(first, Formula::or);
                Formula::and(p, Formula::next(Formula::eventually(alt)))
            }
        }
    }

    pub fn from_formula(f: &Formula) -> Option<Tree> {
        match f {
            Formula::Eventually(inner) => Self::from_body(inner),
            _ => None,
        }
    }

    fn from_body(f: &Formula) -> Option<Tree> {
        match f {
            Formula::Prop(p) => Some(Tree::leaf(p.as_ref())),
            Formula::And(l, r) => {
                let Formula::Prop(p) = &**l else { return None };
                let Formula::Next(n) = &**r else { return None };
                let Formula::Eventually(alt) = &**n else {
                    return None;
                };
                let mut disjuncts = Vec::new();
                flatten_or(alt, &mut disjuncts);
                let children = disjuncts
                    .into_iter()
                    .map(Self::from_body)
                    .collect::<Option<Vec<_>>>()?;
                Some(Tree::node(p.as_ref(), children))
            }
            _ => None,
        }
    }

    /// Number of propositions on a root-to-leaf path.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    pub fn paths(&self) -> Vec<Vec<&str>> {
        if self.children.is_empty() {
            return vec![vec![self.prop.as_str()]];
        }
        self.children
            .iter()
            .flat_map(|c| c.paths())
            .map(|mut p| {
                p.insert(0, self.prop.as_str());
                p
            })
            .collect()
    }

    fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

fn flatten_or<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Or(l, r) => {
            flatten_or(l, out);
            flatten_or(r, out);
        }
        other => out.push(other),
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(l, r) => {
            flatten_and(l, out);
            flatten_and(r, out);
        }
        other => out.push(other),
    }
}

/// Steps (0-based) of the first root-to-leaf path embedded in order, each
/// event strictly after the previous one.
pub fn embedded_path(tree: &Tree, labels: &[&TruthAssignment]) -> Option<Vec<usize>> {
    fn search(node: &Tree, from: usize, labels: &[&TruthAssignment]) -> Option<Vec<usize>> {
        // the earliest occurrence leaves the most room for the rest of the path
        let i = (from..labels.len()).find(|&i| labels[i].contains(&node.prop))?;
        if node.is_leaf() {
            return Some(vec![i]);
        }
        node.children
            .iter()
            .find_map(|c| search(c, i + 1, labels))
            .map(|mut rest| {
                rest.insert(0, i);
                rest
            })
    }
    search(tree, 0, labels)
}

/// Truth on a complete finite trace: the trace followed by its last step
/// repeated forever.
pub fn finite_truth(formula: &Formula, labels: &[&TruthAssignment]) -> bool {
    let owned: Vec<TruthAssignment> = labels.iter().map(|l| (*l).clone()).collect();
    let result = match owned.split_last() {
        Some((last, prefix)) => evaluate_lasso(formula, prefix, std::slice::from_ref(last)),
        None => evaluate_lasso(formula, &[], &[TruthAssignment::new()]),
    };
    result.expect("loop is nonempty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternId {
    Universality,
    Absence,
    Response,
    AbsenceBetween,
    ConstrainedResponse,
    /// `F(a & X F b)`.
    Sequence,
    TreeD1,
    TreeD4,
}

impl PatternId {
    pub const TABLE: [PatternId; 7] = [
        PatternId::Universality,
        PatternId::Absence,
        PatternId::Response,
        PatternId::AbsenceBetween,
        PatternId::ConstrainedResponse,
        PatternId::TreeD1,
        PatternId::TreeD4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::Universality => "universality",
            PatternId::Absence => "absence",
            PatternId::Response => "response",
            PatternId::AbsenceBetween => "absence_between",
            PatternId::ConstrainedResponse => "constrained_response",
            PatternId::Sequence => "sequence",
            PatternId::TreeD1 => "tree_d1",
            PatternId::TreeD4 => "tree_d4",
        }
    }

    /// Propositions the pattern takes, in the order of [`PatternId::formula`].
    pub fn arity(self) -> usize {
        match self {
            PatternId::Universality | PatternId::Absence => 1,
            PatternId::Response | PatternId::Sequence => 2,
            PatternId::AbsenceBetween | PatternId::ConstrainedResponse => 3,
            PatternId::TreeD1 => 4,
            PatternId::TreeD4 => 32,
        }
    }

    /// Builds the pattern over `props`: `[P]`, `[P, S]`, `[P, Q, R]`, or for
    /// trees the nodes in breadth-first order followed by the shared leaf.
    pub fn formula(self, props: &[String]) -> Result<Formula, SynthError> {
        if props.len() != self.arity() {
            return Err(SynthError::Invalid(format!(
                "{} takes {} propositions, got {}",
                self.as_str(),
                self.arity(),
                props.len()
            )));
        }
        let p = |i: usize| Formula::prop(&props[i]);
        use Formula as F;
        Ok(match self {
            PatternId::Universality => F::always(p(0)),
            PatternId::Absence => F::always(F::not(p(0))),
            PatternId::Response => F::always(F::implies(p(0), F::eventually(p(1)))),
            PatternId::AbsenceBetween => F::always(F::implies(
                F::and(F::and(p(1), F::not(p(2))), F::eventually(p(2))),
                F::until(F::not(p(0)), p(2)),
            )),
            PatternId::ConstrainedResponse => {
                F::always(F::implies(p(0), F::until(F::not(p(1)), p(2))))
            }
            PatternId::Sequence | PatternId::TreeD1 | PatternId::TreeD4 => {
                self.tree(props)?.to_formula()
            }
        })
    }

    pub fn tree(self, props: &[String]) -> Result<Tree, SynthError> {
        let depth = match self {
            PatternId::Sequence => 0,
            PatternId::TreeD1 => 1,
            PatternId::TreeD4 => 4,
            other => {
                return Err(SynthError::Invalid(format!(
                    "{} is not a tree pattern",
                    other.as_str()
                )))
            }
        };
        Ok(binary_tree(
            &props[..props.len() - 1],
            &props[props.len() - 1],
            depth,
        ))
    }
}

/// Complete binary tree of the given depth over `nodes` (breadth-first),
/// every deepest node pointing at `leaf`. Depth 0 is a single node.
pub(crate) fn binary_tree(nodes: &[String], leaf: &str, depth: usize) -> Tree {
    fn build(nodes: &[String], leaf: &str, idx: usize, level: usize, depth: usize) -> Tree {
        let children = if level == depth {
            vec![Tree::leaf(leaf)]
        } else {
            vec![
                build(nodes, leaf, 2 * idx + 1, level + 1, depth),
                build(nodes, leaf, 2 * idx + 2, level + 1, depth),
            ]
        };
        Tree::node(nodes[idx].clone(), children)
    }
    assert_eq!(
        nodes.len(),
        (1 << (depth + 1)) - 1,
        "node count does not match depth"
    );
    build(nodes, leaf, 0, 0, depth)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecLevel {
    Informal,
    #[default]
    Precise,
    PreciseLtl,
}

impl std::str::FromStr for SpecLevel {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "informal" => Ok(SpecLevel::Informal),
            "precise" => Ok(SpecLevel::Precise),
            "precise+ltl" | "precise_ltl" => Ok(SpecLevel::PreciseLtl),
            other => Err(SynthError::Invalid(format!(
                "unknown specification level `{other}`"
            ))),
        }
    }
}

enum Shape {
    Universality(String),
    Absence(String),
    Response(String, String),
    AbsenceBetween { p: String, q: String, r: String },
    ConstrainedResponse { p: String, q: String, r: String },
    Tree(Tree),
}

fn prop_name(f: &Formula) -> Option<String> {
    match f {
        Formula::Prop(p) => Some(p.to_string()),
        _ => None,
    }
}

fn negated_prop(f: &Formula) -> Option<String> {
    match f {
        Formula::Not(inner) => prop_name(inner),
        _ => None,
    }
}

fn classify(f: &Formula) -> Option<Shape> {
    if let Some(t) = Tree::from_formula(f) {
        return Some(Shape::Tree(t));
    }
    let Formula::Always(body) = f else {
        return None;
    };
    if let Some(p) = prop_name(body) {
        return Some(Shape::Universality(p));
    }
    if let Some(p) = negated_prop(body) {
        return Some(Shape::Absence(p));
    }
    let Formula::Implies(lhs, rhs) = &**body else {
        return None;
    };
    match &**rhs {
        Formula::Eventually(s) => Some(Shape::Response(prop_name(lhs)?, prop_name(s)?)),
        Formula::Until(not_x, r) => {
            let x = negated_prop(not_x)?;
            let r = prop_name(r)?;
            if let Some(p) = prop_name(lhs) {
                return Some(Shape::ConstrainedResponse { p, q: x, r });
            }
            let mut conj = Vec::new();
            flatten_and(lhs, &mut conj);
            match conj.as_slice() {
                [q, not_r, Formula::Eventually(r2)]
                    if negated_prop(not_r).as_deref() == Some(&r)
                        && prop_name(r2).as_deref() == Some(&r) =>
                {
                    Some(Shape::AbsenceBetween {
                        p: x,
                        q: prop_name(q)?,
                        r,
                    })
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Identifies which benchmark pattern `formula` instantiates.
pub fn pattern_of(formula: &Formula) -> Option<PatternId> {
    Some(match classify(formula)? {
        Shape::Universality(_) => PatternId::Universality,
        Shape::Absence(_) => PatternId::Absence,
        Shape::Response(..) => PatternId::Response,
        Shape::AbsenceBetween { .. } => PatternId::AbsenceBetween,
        Shape::ConstrainedResponse { .. } => PatternId::ConstrainedResponse,
        Shape::Tree(t) => match t.depth() {
            2 => PatternId::Sequence,
            3 => PatternId::TreeD1,
            _ => PatternId::TreeD4,
        },
    })
}

/// English phrases for one proposition.
struct Phrase {
    parsed: Option<Prop>,
    raw: String,
}

impl Phrase {
    fn new(name: &str) -> Self {
        Phrase {
            parsed: Prop::parse(name),
            raw: name.to_string(),
        }
    }

    fn owner(p: &Prop) -> String {
        match p.entity {
            Some(e) => format!("Entity {e}'s {}", p.attr.as_str()),
            None => format!("the {}", p.attr.as_str()),
        }
    }

    /// "a triangle", "a blue item", "the number 19", "Entity 3's animal salmon".
    fn item(&self) -> String {
        let Some(p) = &self.parsed else {
            return self.raw.clone();
        };
        if p.entity.is_some() {
            return format!("{} {}", Self::owner(p), p.value);
        }
        match p.attr {
            Attr::Animal | Attr::Shape => format!("{} {}", article(&p.value), p.value),
            Attr::Color => format!("{} {} item", article(&p.value), p.value),
            Attr::Number => format!("the number {}", p.value),
        }
    }

    /// Like [`Phrase::item`] with a definite article.
    fn definite(&self) -> String {
        let item = self.item();
        match item.split_once(' ') {
            Some(("a" | "an", rest)) => format!("the {rest}"),
            _ => item,
        }
    }

    /// "the color blue", "the animal fox".
    fn named(&self) -> String {
        match &self.parsed {
            Some(p) if p.entity.is_some() => format!("{} {}", Self::owner(p), p.value),
            Some(p) => format!("the {} {}", p.attr.as_str(), p.value),
            None => self.raw.clone(),
        }
    }

    /// "a triangle shape", otherwise as [`Phrase::named`].
    fn occurrence(&self) -> String {
        match &self.parsed {
            Some(p) if p.entity.is_none() && p.attr == Attr::Shape => {
                format!("{} {} shape", article(&p.value), p.value)
            }
            _ => self.named(),
        }
    }

    /// "square", "number 19".
    fn bare(&self) -> String {
        match &self.parsed {
            Some(p) if p.entity.is_none() && p.attr == Attr::Number => {
                format!("number {}", p.value)
            }
            Some(p) if p.entity.is_none() => p.value.clone(),
            _ => self.named(),
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn choice<F: Fn(&Tree) -> String>(children: &[Tree], each: F) -> String {
    match children {
        [only] => each(only),
        [a, b] => format!("either {} or {}", each(a), each(b)),
        many => {
            let parts: Vec<String> = many.iter().map(&each).collect();
            format!(
                "either {}, or {}",
                parts[..parts.len() - 1].join(", "),
                parts[parts.len() - 1]
            )
        }
    }
}

fn tree_informal(t: &Tree) -> String {
    let item = |n: &Tree| Phrase::new(&n.prop).item();
    let mut s = format!(
        "At some point {} should appear, followed by {}",
        item(t),
        choice(&t.children, item)
    );
    let leaf_only = |n: &Tree| n.children.iter().all(Tree::is_leaf);
    if t.children.iter().all(Tree::is_leaf) {
        return s + ".";
    }
    if t.children.iter().all(leaf_only) {
        let leaf = &t.children[0].children[0];
        return format!("{s}, and then {}.", item(leaf));
    }
    s.push('.');
    let mut queue: Vec<&Tree> = t.children.iter().collect();
    let mut leaf = None;
    while !queue.is_empty() {
        let mut next = Vec::new();
        for n in queue {
            if leaf_only(n) {
                leaf = n.children.first();
                continue;
            }
            s.push_str(&format!(
                " If {}, then {}.",
                item(n),
                choice(&n.children, item)
            ));
            next.extend(n.children.iter());
        }
        queue = next;
    }
    if let Some(l) = leaf {
        s.push_str(&format!(" Everything ends with {}.", item(l)));
    }
    s
}

fn tree_precise(t: &Tree) -> String {
    const LATER: &str = "and then at some strictly later time step, ";
    fn node(n: &Tree) -> String {
        let item = Phrase::new(&n.prop).item();
        if n.is_leaf() {
            format!("{item} appears")
        } else {
            format!("{item} appears, {LATER}{}", alternatives(&n.children))
        }
    }
    fn alternatives(children: &[Tree]) -> String {
        match children {
            [only] => node(only),
            many => format!(
                "either: ({})",
                many.iter().map(node).collect::<Vec<_>>().join(") or (")
            ),
        }
    }
    format!(
        "At some time step, {} must appear, {LATER}{}.",
        Phrase::new(&t.prop).item(),
        alternatives(&t.children)
    )
}

/// Wording of a benchmark constraint at the requested level.
pub fn render_constraint(formula: &Formula, level: SpecLevel) -> Result<String, SynthError> {
    let shape = classify(formula)
        .ok_or_else(|| SynthError::UnknownPattern(render(formula, Style::Ascii)))?;
    let text = match (&shape, level) {
        (Shape::Universality(p), SpecLevel::Informal) => match Phrase::new(p).parsed {
            Some(q) => format!("{} is always {}.", capitalize(&Phrase::owner(&q)), q.value),
            None => format!("{p} always holds."),
        },
        (Shape::Universality(p), _) => match Phrase::new(p).parsed {
            Some(q) => format!("At every time step in the trace, {} must be {}.", Phrase::owner(&q), q.value),
            None => format!("At every time step in the trace, {p} must hold."),
        },
        (Shape::Absence(p), SpecLevel::Informal) => format!("{} never appears.", capitalize(&Phrase::new(p).item())),
        (Shape::Absence(p), _) => match Phrase::new(p).parsed {
            Some(q) => format!("At no time step in the trace does {} \"{}\" appear.", Phrase::owner(&q), q.value),
            None => format!("At no time step in the trace does {p} hold."),
        },
        (Shape::Response(p, s), SpecLevel::Informal) => format!(
            "Whenever {} appears, {} should eventually appear too.",
            Phrase::new(p).item(),
            Phrase::new(s).item()
        ),
        (Shape::Response(p, s), _) => format!(
            "It is always the case that for every occurrence of {}, {} must occur at the same time step or at a later time step.",
            Phrase::new(p).occurrence(),
            Phrase::new(s).named()
        ),
        (Shape::AbsenceBetween { p, q, r }, SpecLevel::Informal) => format!(
            "{} should not occur between {} and {}.",
            capitalize(&Phrase::new(p).item()),
            Phrase::new(q).item(),
            Phrase::new(r).item()
        ),
        (Shape::AbsenceBetween { p, q, r }, _) => {
            let (p, q, r) = (Phrase::new(p), Phrase::new(q), Phrase::new(r));
            format!(
                "It is always the case that if {} appears at a time step where {} does not appear, and {} will appear at some future time step, then {} must not appear at any time step from that point until {} appears.",
                q.item(),
                r.item(),
                r.item(),
                p.named(),
                r.definite()
            )
        }
        (Shape::ConstrainedResponse { p, q, r }, SpecLevel::Informal) => format!(
            "Whenever {} appears, {} should not appear until {} appears.",
            Phrase::new(p).item(),
            Phrase::new(q).item(),
            Phrase::new(r).item()
        ),
        (Shape::ConstrainedResponse { p, q, r }, _) => {
            let (p, q, r) = (Phrase::new(p), Phrase::new(q), Phrase::new(r));
            format!(
                "It is always the case that whenever {} appears, {} must not appear at any time step from that point until {} appears. For every {}, {} must eventually appear at that time step or at a later time step.",
                p.occurrence(),
                q.named(),
                r.named(),
                p.bare(),
                r.named()
            )
        }
        (Shape::Tree(t), SpecLevel::Informal) => tree_informal(t),
        (Shape::Tree(t), _) => tree_precise(t),
    };
    Ok(match level {
        SpecLevel::PreciseLtl => format!("{text}\nLTL: {}", render(formula, Style::Ascii)),
        _ => text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn table_wordings() {
        let r = |id: PatternId, props: &[&str], level| {
            render_constraint(&id.formula(&s(props)).unwrap(), level).unwrap()
        };
        use PatternId::*;
        use SpecLevel::*;
        assert_eq!(
            r(Universality, &["color_navy"], Informal),
            "The color is always navy."
        );
        assert_eq!(
            r(Universality, &["color_navy"], Precise),
            "At every time step in the trace, the color must be navy."
        );
        assert_eq!(
            r(Absence, &["animal_moose"], Informal),
            "A moose never appears."
        );
        assert_eq!(
            r(Absence, &["animal_moose"], Precise),
            "At no time step in the trace does the animal \"moose\" appear."
        );
        assert_eq!(
            r(Response, &["shape_hexagon", "color_maroon"], Informal),
            "Whenever a hexagon appears, a maroon item should eventually appear too."
        );
        assert_eq!(
            r(Response, &["shape_hexagon", "color_maroon"], Precise),
            "It is always the case that for every occurrence of a hexagon shape, the color maroon must occur at the same time step or at a later time step."
        );
        assert_eq!(
            r(
                AbsenceBetween,
                &["color_teal", "animal_rabbit", "shape_ring"],
                Informal
            ),
            "A teal item should not occur between a rabbit and a ring."
        );
        assert_eq!(
            r(AbsenceBetween, &["color_teal", "animal_rabbit", "shape_ring"], Precise),
            "It is always the case that if a rabbit appears at a time step where a ring does not appear, and a ring will appear at some future time step, then the color teal must not appear at any time step from that point until the ring appears."
        );
        assert_eq!(
            r(
                ConstrainedResponse,
                &["shape_cone", "animal_rabbit", "shape_cube"],
                Informal
            ),
            "Whenever a cone appears, a rabbit should not appear until a cube appears."
        );
        assert_eq!(
            r(ConstrainedResponse, &["shape_cone", "animal_rabbit", "shape_cube"], Precise),
            "It is always the case that whenever a cone shape appears, the animal rabbit must not appear at any time step from that point until the shape cube appears. For every cone, the shape cube must eventually appear at that time step or at a later time step."
        );
        let d1 = [
            "animal_lynx",
            "animal_wolf",
            "animal_badger",
            "animal_otter",
        ];
        assert_eq!(
            r(TreeD1, &d1, Informal),
            "At some point a lynx should appear, followed by either a wolf or a badger, and then an otter."
        );
        assert_eq!(
            r(TreeD1, &d1, Precise),
            "At some time step, a lynx must appear, and then at some strictly later time step, either: (a wolf appears, and then at some strictly later time step, an otter appears) or (a badger appears, and then at some strictly later time step, an otter appears)."
        );
    }

    #[test]
    fn deep_tree_wording() {
        let mut props: Vec<String> = (0..31).map(|i| format!("number_{}", i + 1)).collect();
        props[0] = "animal_lynx".into();
        props[1] = "animal_wolf".into();
        props[2] = "animal_badger".into();
        props[3] = "animal_raven".into();
        props[4] = "animal_heron".into();
        props.push("animal_otter".into());
        let f = PatternId::TreeD4.formula(&props).unwrap();
        let informal = render_constraint(&f, SpecLevel::Informal).unwrap();
        assert!(informal.starts_with(
            "At some point a lynx should appear, followed by either a wolf or a badger. If a wolf, then either a raven or a heron."
        ));
        assert!(informal.ends_with("Everything ends with an otter."));
        let precise = render_constraint(&f, SpecLevel::Precise).unwrap();
        assert!(precise.starts_with("At some time step, a lynx must appear, and then at some strictly later time step, either: (a wolf appears, and then at some strictly later time step, either: (a raven appears, and then"));
    }

    #[test]
    fn precise_ltl_round_trips() {
        for id in PatternId::TABLE {
            let props: Vec<String> = (0..id.arity())
                .map(|i| format!("number_{}", i + 1))
                .collect();
            let f = id.formula(&props).unwrap();
            let text = render_constraint(&f, SpecLevel::PreciseLtl).unwrap();
            let ltl = text.rsplit_once("\nLTL: ").unwrap().1;
            assert_eq!(parse(ltl).unwrap(), f, "{}", id.as_str());
            assert_eq!(pattern_of(&f), Some(id));
        }
        assert!(matches!(
            render_constraint(&parse("p U q").unwrap(), SpecLevel::Precise),
            Err(SynthError::UnknownPattern(_))
        ));
    }

    #[test]
    fn tree_structure() {
        let nodes: Vec<String> = (1..=31).map(|i| format!("n{i}")).collect();
        let t = binary_tree(&nodes, "f", 4);
        assert_eq!(t.paths().len(), 16);
        assert!(t.paths().iter().all(|p| p.len() == 6 && p[5] == "f"));
        assert_eq!(Tree::from_formula(&t.to_formula()), Some(t.clone()));
        assert_eq!(
            Tree::chain("a", "b").to_formula(),
            parse("F(a & X F b)").unwrap()
        );
    }

    #[test]
    fn path_extraction() {
        let t = Tree::node("a", vec![Tree::chain("b1", "f"), Tree::chain("b2", "f")]);
        let l = |v: &[&str]| -> TruthAssignment { v.iter().copied().collect() };
        let steps = [l(&["f"]), l(&["a"]), l(&["b2"]), l(&[]), l(&["f"])];
        let refs: Vec<&TruthAssignment> = steps.iter().collect();
        assert_eq!(embedded_path(&t, &refs), Some(vec![1, 2, 4]));
        assert_eq!(embedded_path(&t, &refs[..4]), None);
    }

    #[test]
    fn finite_truth_stutters_last_step() {
        let l = |v: &[&str]| -> TruthAssignment { v.iter().copied().collect() };
        let steps = [l(&["p"]), l(&["p"])];
        let refs: Vec<&TruthAssignment> = steps.iter().collect();
        assert!(finite_truth(&parse("G p").unwrap(), &refs));
        assert!(!finite_truth(&parse("F q").unwrap(), &refs));
    }
}
