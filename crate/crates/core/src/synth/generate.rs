//! Case generators for the four benchmark suites.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patterns::{binary_tree, finite_truth, PatternId, Tree};
use super::vocab::{render_event, vocabulary, AttributeEvent};
use super::{Attr, BenchCase, Family, Knobs, Prop, Suite, SynthError};
use crate::ltl::{Formula, TruthAssignment};
use crate::monitor::Constraint;
use crate::seed;
use crate::trace::{StepRecord, Trace};

const MAX_ATTEMPTS: usize = 1000;
const TREE_DEPTH: usize = 4;
const TREE_NODES: usize = 31;

/// Gap between consecutive path events for complex-family constraint scaling.
///
/// Known points are 1→23, 5→117, 10→91, 20→40; other counts interpolate
/// linearly between neighbours.
pub fn complex_gap(n: usize) -> usize {
    const POINTS: [(usize, usize); 4] = [(1, 23), (5, 117), (10, 91), (20, 40)];
    if n <= POINTS[0].0 {
        return POINTS[0].1;
    }
    for w in POINTS.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if n <= x1 {
            let (x0, y0, x1, y1) = (x0 as f64, y0 as f64, x1 as f64, y1 as f64);
            return (y0 + (y1 - y0) * (n as f64 - x0) / (x1 - x0)).round() as usize;
        }
    }
    POINTS[3].1
}

/// Trace under construction: required events pinned to slots, values that
/// random draws must avoid, and everything else drawn uniformly.
struct Builder {
    len: usize,
    entities: usize,
    tagged: bool,
    rng: ChaCha8Rng,
    masks: HashMap<(usize, Attr), BTreeSet<String>>,
    fixed: HashMap<(usize, usize, Attr), String>,
    /// Every proposition handed out so far, so new ones are distinct.
    used: BTreeSet<String>,
}

fn slot(p: &Prop) -> (usize, Attr) {
    (p.entity.unwrap_or(1), p.attr)
}

impl Builder {
    fn new(len: usize, entities: usize, tagged: bool, rng: ChaCha8Rng) -> Self {
        Builder {
            len,
            entities,
            tagged,
            rng,
            masks: HashMap::new(),
            fixed: HashMap::new(),
            used: BTreeSet::new(),
        }
    }

    fn masked_count(&self, entity: usize, attr: Attr) -> usize {
        self.masks.get(&(entity, attr)).map_or(0, BTreeSet::len)
    }

    /// Keeps `p` out of random draws. At most half of any attribute's values
    /// may be masked so distractors stay varied.
    fn mask(&mut self, p: &Prop) -> Result<(), SynthError> {
        let (e, a) = slot(p);
        let cap = vocabulary().values(a).len() / 2;
        let set = self.masks.entry((e, a)).or_default();
        if !set.contains(&p.value) && set.len() >= cap {
            return Err(SynthError::Invalid(format!(
                "too many masked {} values",
                a.as_str()
            )));
        }
        set.insert(p.value.clone());
        Ok(())
    }

    fn free(&self, step: usize, p: &Prop) -> bool {
        let (e, a) = slot(p);
        self.fixed.get(&(step, e, a)).is_none_or(|v| *v == p.value)
    }

    fn pin(&mut self, step: usize, p: &Prop) {
        let (e, a) = slot(p);
        self.fixed.insert((step, e, a), p.value.clone());
    }

    /// Pins every event if all slots are free; otherwise changes nothing.
    fn place_all(&mut self, plan: &[(usize, &Prop)]) -> bool {
        let mut seen: HashMap<(usize, usize, Attr), &str> = HashMap::new();
        for (s, p) in plan {
            let (e, a) = slot(p);
            if *s >= self.len || !self.free(*s, p) {
                return false;
            }
            if seen
                .insert((*s, e, a), &p.value)
                .is_some_and(|v| v != p.value)
            {
                return false;
            }
        }
        for (s, p) in plan {
            self.pin(*s, p);
        }
        true
    }

    fn entity(&mut self) -> Option<usize> {
        self.tagged.then(|| self.rng.gen_range(1..=self.entities))
    }

    /// A proposition not handed out before. With `masked`, the attribute is
    /// chosen among those that still have mask capacity and the result is
    /// masked; `avoid` lists further names to skip.
    fn fresh(&mut self, masked: bool, avoid: &BTreeSet<String>) -> Result<Prop, SynthError> {
        let v = vocabulary();
        for _ in 0..MAX_ATTEMPTS {
            let entity = self.entity();
            let e = entity.unwrap_or(1);
            let attrs: Vec<Attr> = Attr::ALL
                .into_iter()
                .filter(|a| !masked || self.masked_count(e, *a) < v.values(*a).len() / 2)
                .collect();
            let Some(&attr) = attrs.choose(&mut self.rng) else {
                continue;
            };
            let value = v
                .values(attr)
                .choose(&mut self.rng)
                .expect("vocabulary lists are nonempty")
                .clone();
            let p = Prop::new(entity, attr, value);
            let name = p.name();
            let blocked = self
                .masks
                .get(&(e, attr))
                .is_some_and(|m| m.contains(&p.value));
            if self.used.contains(&name) || avoid.contains(&name) || blocked {
                continue;
            }
            if masked {
                self.mask(&p)?;
            }
            self.used.insert(name);
            return Ok(p);
        }
        Err(SynthError::Invalid(
            "proposition vocabulary exhausted".into(),
        ))
    }

    fn build(mut self) -> Trace {
        let v = vocabulary();
        let mut allowed: HashMap<(usize, Attr), Vec<&String>> = HashMap::new();
        for e in 1..=self.entities {
            for a in Attr::ALL {
                let mask = self.masks.get(&(e, a));
                allowed.insert(
                    (e, a),
                    v.values(a)
                        .iter()
                        .filter(|x| mask.is_none_or(|m| !m.contains(*x)))
                        .collect(),
                );
            }
        }
        let mut steps = Vec::with_capacity(self.len);
        for s in 0..self.len {
            let mut labels = TruthAssignment::new();
            let mut parts = Vec::with_capacity(self.entities);
            for e in 1..=self.entities {
                let mut ev = AttributeEvent {
                    entity: e,
                    animal: String::new(),
                    shape: String::new(),
                    color: String::new(),
                    number: String::new(),
                };
                for a in Attr::ALL {
                    let value = match self.fixed.get(&(s, e, a)) {
                        Some(x) => x.clone(),
                        None => (*allowed[&(e, a)]
                            .choose(&mut self.rng)
                            .expect("mask cap keeps values"))
                        .clone(),
                    };
                    labels.insert(Prop::new(self.tagged.then_some(e), a, value.clone()).name());
                    ev.set(a, value);
                }
                let sentence = render_event(&ev, s + e - 1);
                parts.push(if self.tagged {
                    format!("Entity {e}: {sentence}")
                } else {
                    sentence
                });
            }
            steps.push(StepRecord::new(s + 1, "", parts.join(" ")).with_labels(labels));
        }
        Trace::new(steps)
    }
}

/// Propositions of one generated constraint.
enum Shape {
    Chain(Prop, Prop),
    Tree { nodes: Vec<Prop>, leaf: Prop },
}

impl Shape {
    fn formula(&self) -> Formula {
        match self {
            Shape::Chain(a, b) => Tree::chain(&a.name(), &b.name()).to_formula(),
            Shape::Tree { nodes, leaf } => {
                let names: Vec<String> = nodes.iter().map(Prop::name).collect();
                binary_tree(&names, &leaf.name(), TREE_DEPTH).to_formula()
            }
        }
    }

    /// Events of one root-to-leaf path, root first.
    fn path(&self, rng: &mut ChaCha8Rng) -> Vec<&Prop> {
        match self {
            Shape::Chain(a, b) => vec![a, b],
            Shape::Tree { nodes, leaf } => {
                let mut idx = 0;
                let mut out = vec![&nodes[0]];
                for _ in 0..TREE_DEPTH {
                    idx = 2 * idx + 1 + rng.gen_range(0..2);
                    out.push(&nodes[idx]);
                }
                out.push(leaf);
                out
            }
        }
    }
}

/// Draws the propositions for `n` constraints. Chains use masked, pairwise
/// distinct propositions. Trees mask only their leaves; internal nodes are
/// distinct within a tree and never equal any leaf, but may repeat across
/// trees since 32 propositions per tree outgrow the vocabulary.
fn draw_shapes(b: &mut Builder, family: Family, n: usize) -> Result<Vec<Shape>, SynthError> {
    match family {
        Family::Simple => (0..n)
            .map(|_| {
                let none = BTreeSet::new();
                Ok(Shape::Chain(b.fresh(true, &none)?, b.fresh(true, &none)?))
            })
            .collect(),
        Family::Complex => {
            let none = BTreeSet::new();
            let leaves = (0..n)
                .map(|_| b.fresh(true, &none))
                .collect::<Result<Vec<_>, _>>()?;
            let leaf_names: BTreeSet<String> = leaves.iter().map(Prop::name).collect();
            let mut shapes = Vec::with_capacity(n);
            for leaf in leaves {
                let saved = std::mem::take(&mut b.used);
                let nodes = (0..TREE_NODES)
                    .map(|_| b.fresh(false, &leaf_names))
                    .collect::<Result<Vec<_>, _>>()?;
                b.used = saved;
                shapes.push(Shape::Tree { nodes, leaf });
            }
            Ok(shapes)
        }
    }
}

/// Pins one constraint's events: a full path spaced `gap` apart when
/// satisfied; otherwise the path without its final event, plus for chains a
/// decoy final event before the first one when there is room.
fn place_shape(
    b: &mut Builder,
    shape: &Shape,
    gap: usize,
    satisfied: bool,
    start: Option<usize>,
) -> Result<(), SynthError> {
    let span = match shape {
        Shape::Chain(..) => gap,
        Shape::Tree { .. } => (TREE_DEPTH + 1) * gap,
    };
    if span >= b.len {
        return Err(SynthError::Invalid(format!(
            "trace of length {} cannot hold a span of {span}",
            b.len
        )));
    }
    for _ in 0..MAX_ATTEMPTS {
        let t0 = match start {
            Some(t) => t,
            None => b.rng.gen_range(0..b.len - span),
        };
        let path = shape.path(&mut b.rng);
        let mut plan: Vec<(usize, &Prop)> = path
            .iter()
            .enumerate()
            .map(|(i, p)| (t0 + i * gap, *p))
            .collect();
        if !satisfied {
            let last = plan.pop().expect("paths have two or more events").1;
            if matches!(shape, Shape::Chain(..)) && t0 > 0 {
                let decoy = b.rng.gen_range(0..t0);
                plan.push((decoy, last));
            }
        }
        if b.place_all(&plan) {
            return Ok(());
        }
        if start.is_some() {
            break;
        }
    }
    Err(SynthError::Placement(MAX_ATTEMPTS))
}

fn finish(
    b: Builder,
    knobs: Knobs,
    case_seed: u64,
    formulas: Vec<Formula>,
    intended: Vec<bool>,
) -> Result<BenchCase, SynthError> {
    let trace = b.build();
    let labels = trace
        .labels()
        .map_err(|e| SynthError::Construction(e.to_string()))?;
    for (i, (f, want)) in formulas.iter().zip(&intended).enumerate() {
        if finite_truth(f, &labels) != *want {
            return Err(SynthError::Construction(format!(
                "constraint c{} of {} (seed {case_seed})",
                i + 1,
                knobs.key()
            )));
        }
    }
    let constraints = formulas
        .into_iter()
        .enumerate()
        .map(|(i, f)| Constraint::new(format!("c{}", i + 1), f))
        .collect();
    Ok(BenchCase {
        knobs,
        seed: case_seed,
        trace,
        constraints,
        truth: intended,
    })
}

fn cases<F>(seed: u64, count: usize, make: F) -> Result<Vec<BenchCase>, SynthError>
where
    F: Fn(usize, u64) -> Result<BenchCase, SynthError> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| make(i, seed::derive(seed, &[i as u64])))
        .collect()
}

/// Gap suite: one constraint whose consecutive events are `gap` steps apart.
/// Even-indexed cases are satisfied.
pub fn gen_elasticity(
    gap: usize,
    family: Family,
    seed: u64,
    count: usize,
) -> Result<Vec<BenchCase>, SynthError> {
    if !(1..=1000).contains(&gap) {
        return Err(SynthError::Invalid(format!(
            "gap must be in 1..=1000, got {gap}"
        )));
    }
    cases(seed, count, |i, cs| {
        let mut rng = seed::rng(cs);
        let t_a: usize = rng.gen_range(1..=10);
        let span = match family {
            Family::Simple => gap,
            Family::Complex => (TREE_DEPTH + 1) * gap,
        };
        let mut b = Builder::new(t_a + span + 10, 1, false, rng);
        let shape = draw_shapes(&mut b, family, 1)?.pop().expect("one shape");
        let satisfied = i % 2 == 0;
        place_shape(&mut b, &shape, gap, satisfied, Some(t_a - 1))?;
        let knobs = Knobs {
            suite: Suite::Elasticity,
            family: Some(family),
            gap: Some(gap),
            constraints: 1,
            entities: 1,
            pattern: None,
        };
        finish(b, knobs, cs, vec![shape.formula()], vec![satisfied])
    })
}

/// Constraint-count suite: `n` constraints of one family over separate
/// propositions. With one constraint, even-indexed cases are satisfied;
/// otherwise each constraint is satisfied on an independent fair coin.
pub fn gen_constraint_scaling(
    n: usize,
    family: Family,
    seed: u64,
    count: usize,
    gap: Option<usize>,
) -> Result<Vec<BenchCase>, SynthError> {
    if !(1..=20).contains(&n) {
        return Err(SynthError::Invalid(format!(
            "constraint count must be in 1..=20, got {n}"
        )));
    }
    let (len, gap) = match family {
        Family::Simple => (500, gap.unwrap_or(10)),
        Family::Complex => (1000, gap.unwrap_or_else(|| complex_gap(n))),
    };
    if gap == 0 {
        return Err(SynthError::Invalid("gap must be positive".into()));
    }
    cases(seed, count, |i, cs| {
        let mut b = Builder::new(len, 1, false, seed::rng(cs));
        let shapes = draw_shapes(&mut b, family, n)?;
        let truth: Vec<bool> = if n == 1 {
            vec![i % 2 == 0]
        } else {
            (0..n).map(|_| b.rng.gen_bool(0.5)).collect()
        };
        for (s, sat) in shapes.iter().zip(&truth) {
            place_shape(&mut b, s, gap, *sat, None)?;
        }
        let knobs = Knobs {
            suite: Suite::Constraint,
            family: Some(family),
            gap: Some(gap),
            constraints: n,
            entities: 1,
            pattern: None,
        };
        finish(
            b,
            knobs,
            cs,
            shapes.iter().map(Shape::formula).collect(),
            truth,
        )
    })
}

/// Entity-count suite: every step describes `entities` tagged entities and
/// the single constraint refers to randomly chosen entities' attributes.
pub fn gen_proposition_scaling(
    entities: usize,
    family: Family,
    seed: u64,
    count: usize,
) -> Result<Vec<BenchCase>, SynthError> {
    if !(1..=50).contains(&entities) {
        return Err(SynthError::Invalid(format!(
            "entity count must be in 1..=50, got {entities}"
        )));
    }
    let gap = match family {
        Family::Simple => 10,
        Family::Complex => 15,
    };
    cases(seed, count, |i, cs| {
        let mut b = Builder::new(100, entities, true, seed::rng(cs));
        let shape = draw_shapes(&mut b, family, 1)?.pop().expect("one shape");
        let satisfied = i % 2 == 0;
        place_shape(&mut b, &shape, gap, satisfied, None)?;
        let knobs = Knobs {
            suite: Suite::Proposition,
            family: Some(family),
            gap: Some(gap),
            constraints: 1,
            entities,
            pattern: None,
        };
        finish(b, knobs, cs, vec![shape.formula()], vec![satisfied])
    })
}

const SPEC_LEN: usize = 200;

/// Pattern suite: one instance of `pattern` per case over a trace of 200
/// steps, even-indexed cases satisfied. Truth is the finite-trace truth with
/// the last step repeated.
pub fn gen_spec_language(
    pattern: PatternId,
    seed: u64,
    count: usize,
) -> Result<Vec<BenchCase>, SynthError> {
    if pattern == PatternId::Sequence {
        return Err(SynthError::UnknownPattern(format!(
            "{} is not part of the pattern suite",
            pattern.as_str()
        )));
    }
    cases(seed, count, |i, cs| {
        let mut b = Builder::new(SPEC_LEN, 1, false, seed::rng(cs));
        let satisfied = i % 2 == 0;
        let props = build_pattern(&mut b, pattern, satisfied)?;
        let names: Vec<String> = props.iter().map(Prop::name).collect();
        let formula = pattern.formula(&names)?;
        let knobs = Knobs {
            suite: Suite::Spec,
            family: None,
            gap: None,
            constraints: 1,
            entities: 1,
            pattern: Some(pattern),
        };
        finish(b, knobs, cs, vec![formula], vec![satisfied])
    })
}

/// Distinct sorted positions in `lo..hi`.
fn positions(rng: &mut ChaCha8Rng, lo: usize, hi: usize, k: usize) -> Vec<usize> {
    let mut v = rand::seq::index::sample(rng, hi - lo, k).into_vec();
    v.sort_unstable();
    v.into_iter().map(|x| x + lo).collect()
}

fn build_pattern(b: &mut Builder, pattern: PatternId, sat: bool) -> Result<Vec<Prop>, SynthError> {
    let none = BTreeSet::new();
    let len = b.len;
    Ok(match pattern {
        PatternId::Universality => {
            let p = b.fresh(false, &none)?;
            let bad = if sat {
                None
            } else {
                Some(b.rng.gen_range(0..len))
            };
            for s in 0..len {
                let q = if Some(s) == bad {
                    let others: Vec<&String> = vocabulary()
                        .values(p.attr)
                        .iter()
                        .filter(|v| **v != p.value)
                        .collect();
                    Prop::new(
                        None,
                        p.attr,
                        (*others.choose(&mut b.rng).expect("several values")).clone(),
                    )
                } else {
                    p.clone()
                };
                b.pin(s, &q);
            }
            vec![p]
        }
        PatternId::Absence => {
            let p = b.fresh(true, &none)?;
            if !sat {
                let s = b.rng.gen_range(0..len);
                b.pin(s, &p);
            }
            vec![p]
        }
        PatternId::Response => {
            let p = b.fresh(true, &none)?;
            let s = b.fresh(true, &none)?;
            let triggers = positions(&mut b.rng, 0, len - 20, 3);
            for &t in &triggers {
                b.pin(t, &p);
            }
            let (first, last) = (triggers[0], triggers[2]);
            // a response sharing the trigger's slot cannot sit on a trigger step
            let placed = (0..MAX_ATTEMPTS).any(|_| {
                let at = if sat {
                    b.rng.gen_range(last..len)
                } else {
                    b.rng.gen_range(first..last)
                };
                b.place_all(&[(at, &s)])
            });
            if !placed {
                return Err(SynthError::Placement(MAX_ATTEMPTS));
            }
            vec![p, s]
        }
        PatternId::AbsenceBetween => {
            let p = b.fresh(true, &none)?;
            let q = b.fresh(true, &none)?;
            let r = b.fresh(true, &none)?;
            place_window(b, &p, &q, &r, sat)?;
            vec![p, q, r]
        }
        PatternId::ConstrainedResponse => {
            let p = b.fresh(true, &none)?;
            let q = b.fresh(true, &none)?;
            let r = b.fresh(true, &none)?;
            // the forbidden proposition plays the role of `p` in the window
            place_window(b, &q, &p, &r, sat)?;
            vec![p, q, r]
        }
        PatternId::TreeD1 | PatternId::TreeD4 => {
            let depth = if pattern == PatternId::TreeD1 {
                1
            } else {
                TREE_DEPTH
            };
            let leaf = b.fresh(true, &none)?;
            let avoid: BTreeSet<String> = [leaf.name()].into();
            let nodes = (0..(1 << (depth + 1)) - 1)
                .map(|_| b.fresh(false, &avoid))
                .collect::<Result<Vec<_>, _>>()?;
            let placed = (0..MAX_ATTEMPTS).any(|_| {
                let gap = b.rng.gen_range(5..=20);
                let t0 = b.rng.gen_range(0..len - (depth + 1) * gap);
                let mut idx = 0;
                let mut plan = vec![(t0, &nodes[0])];
                for d in 1..=depth {
                    idx = 2 * idx + 1 + b.rng.gen_range(0..2);
                    plan.push((t0 + d * gap, &nodes[idx]));
                }
                if sat {
                    plan.push((t0 + (depth + 1) * gap, &leaf));
                }
                b.place_all(&plan)
            });
            if !placed {
                return Err(SynthError::Placement(MAX_ATTEMPTS));
            }
            let mut all = nodes.clone();
            all.push(leaf);
            all
        }
        PatternId::Sequence => unreachable!("rejected by the caller"),
    })
}

/// Opens a window at `open`, closes it at `close`, and puts `inside` either
/// strictly within `[open, close)` or after `close`.
fn place_window(
    b: &mut Builder,
    inside: &Prop,
    open: &Prop,
    close: &Prop,
    sat: bool,
) -> Result<(), SynthError> {
    let len = b.len;
    for _ in 0..MAX_ATTEMPTS {
        let o = b.rng.gen_range(10..len / 2);
        let c = b.rng.gen_range(o + 5..len - 10);
        let at = if sat {
            b.rng.gen_range(c + 1..len)
        } else {
            b.rng.gen_range(o..c)
        };
        if b.place_all(&[(o, open), (c, close), (at, inside)]) {
            return Ok(());
        }
    }
    Err(SynthError::Placement(MAX_ATTEMPTS))
}

/// Sweep description used by the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub suite: Suite,
    #[serde(default)]
    pub family: Option<Family>,
    /// Gaps, constraint counts or entity counts depending on the suite.
    #[serde(default)]
    pub values: Vec<usize>,
    /// Pattern suite only; empty means all seven.
    #[serde(default)]
    pub patterns: Vec<PatternId>,
    /// Cases per value.
    pub count: usize,
    pub seed: u64,
    /// Overrides the complex-family gap in the constraint suite.
    #[serde(default)]
    pub gap: Option<usize>,
}

pub fn generate_batch(spec: &BatchSpec) -> Result<Vec<BenchCase>, SynthError> {
    let family = spec.family.unwrap_or(Family::Simple);
    let sub = |v: u64| seed::derive(spec.seed, &[seed::tag(&format!("{:?}", spec.suite)), v]);
    let mut out = Vec::new();
    if spec.suite == Suite::Spec {
        let pats = if spec.patterns.is_empty() {
            PatternId::TABLE.to_vec()
        } else {
            spec.patterns.clone()
        };
        for p in pats {
            out.extend(gen_spec_language(
                p,
                sub(seed::tag(p.as_str())),
                spec.count,
            )?);
        }
        return Ok(out);
    }
    if spec.values.is_empty() {
        return Err(SynthError::Invalid("no sweep values given".into()));
    }
    for &v in &spec.values {
        out.extend(match spec.suite {
            Suite::Elasticity => gen_elasticity(v, family, sub(v as u64), spec.count)?,
            Suite::Constraint => {
                gen_constraint_scaling(v, family, sub(v as u64), spec.count, spec.gap)?
            }
            Suite::Proposition => gen_proposition_scaling(v, family, sub(v as u64), spec.count)?,
            Suite::Spec => unreachable!(),
        });
    }
    Ok(out)
}

pub fn write_bench(mut w: impl Write, cases: &[BenchCase]) -> Result<(), SynthError> {
    for c in cases {
        let line = serde_json::to_string(c).map_err(|e| SynthError::Invalid(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench(r: impl BufRead) -> Result<Vec<BenchCase>, SynthError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let case: BenchCase = serde_json::from_str(&line).map_err(|e| SynthError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        if case.truth.len() != case.constraints.len() {
            return Err(SynthError::Format {
                line: i + 1,
                message: "truth and constraint counts differ".into(),
            });
        }
        out.push(case);
    }
    Ok(out)
}
