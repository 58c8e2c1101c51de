//! Synthetic attribute-event benchmark.
//!
//! Each step describes one or more entities, each with an animal, a shape, a
//! color and a number, rendered as an English sentence. Propositions are
//! `animal_deer`, `shape_oval`, `color_red`, `number_19`, or with an entity
//! tag `entity3_animal_salmon` when steps describe several entities.
//! Constraints are trees of "A, then strictly later one of the children"
//! obligations (the simple family is the chain `F(a & X F b)`), or one of the
//! specification patterns. Every case records whether each constraint holds
//! on the complete trace, fixed at construction time.

mod generate;
mod judge;
mod labeler;
mod patterns;
mod vocab;

pub use generate::{
    complex_gap, gen_constraint_scaling, gen_elasticity, gen_proposition_scaling,
    gen_spec_language, generate_batch, read_bench, write_bench, BatchSpec,
};
pub use judge::{
    eval_judge, judge_prompt, parse_multi_verdicts, parse_single_verdict, CoinJudge, Judge,
    JudgeReport, KnobAccuracy, ModelJudge, OracleJudge,
};
pub use labeler::SyntheticLabeler;
pub use patterns::{
    embedded_path, finite_truth, pattern_of, render_constraint, PatternId, SpecLevel, Tree,
};
pub use vocab::{render_event, vocabulary, AttributeEvent, Vocabulary, EVENT_TEMPLATES};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monitor::Constraint;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attr {
    Animal,
    Shape,
    Color,
    Number,
}

impl Attr {
    pub const ALL: [Attr; 4] = [Attr::Animal, Attr::Shape, Attr::Color, Attr::Number];

    pub fn as_str(self) -> &'static str {
        match self {
            Attr::Animal => "animal",
            Attr::Shape => "shape",
            Attr::Color => "color",
            Attr::Number => "number",
        }
    }
}

impl FromStr for Attr {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        Attr::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| SynthError::Invalid(format!("unknown attribute `{s}`")))
    }
}

/// An attribute value, optionally tied to one entity of a multi-entity step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prop {
    pub entity: Option<usize>,
    pub attr: Attr,
    pub value: String,
}

impl Prop {
    pub fn new(entity: Option<usize>, attr: Attr, value: impl Into<String>) -> Self {
        Prop {
            entity,
            attr,
            value: value.into(),
        }
    }

    pub fn name(&self) -> String {
        match self.entity {
            Some(e) => format!("entity{e}_{}_{}", self.attr.as_str(), self.value),
            None => format!("{}_{}", self.attr.as_str(), self.value),
        }
    }

    /// Inverse of [`Prop::name`].
    pub fn parse(name: &str) -> Option<Prop> {
        let (entity, rest) = match name.strip_prefix("entity") {
            Some(r) => {
                let (num, rest) = r.split_once('_')?;
                (Some(num.parse().ok()?), rest)
            }
            None => (None, name),
        };
        let (attr, value) = rest.split_once('_')?;
        if value.is_empty() {
            return None;
        }
        Some(Prop {
            entity,
            attr: attr.parse().ok()?,
            value: value.to_string(),
        })
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `F(a & X F b)`.
    Simple,
    /// Binary tree of depth 4 whose 16 paths end in one shared leaf.
    Complex,
}

impl FromStr for Family {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "simple" => Ok(Family::Simple),
            "complex" => Ok(Family::Complex),
            other => Err(SynthError::Invalid(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Elasticity,
    Constraint,
    Proposition,
    Spec,
}

impl FromStr for Suite {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "elasticity" => Ok(Suite::Elasticity),
            "constraint" => Ok(Suite::Constraint),
            "proposition" => Ok(Suite::Proposition),
            "spec" => Ok(Suite::Spec),
            other => Err(SynthError::Invalid(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knobs {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Steps between consecutive required events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<usize>,
    pub constraints: usize,
    pub entities: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternId>,
}

impl Knobs {
    /// Grouping key for accuracy reports, e.g. `elasticity/simple/gap=10`.
    pub fn key(&self) -> String {
        let fam = self.family.map(|f| format!("{f:?}").to_lowercase());
        match self.suite {
            Suite::Elasticity => format!(
                "elasticity/{}/gap={}",
                fam.unwrap_or_default(),
                self.gap.unwrap_or(0)
            ),
            Suite::Constraint => format!(
                "constraint/{}/n={}",
                fam.unwrap_or_default(),
                self.constraints
            ),
            Suite::Proposition => format!(
                "proposition/{}/e={}",
                fam.unwrap_or_default(),
                self.entities
            ),
            Suite::Spec => format!("spec/{}", self.pattern.map(|p| p.as_str()).unwrap_or("?")),
        }
    }
}

/// One generated trace with its constraints and construction-time truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub knobs: Knobs,
    pub seed: u64,
    pub trace: Trace,
    pub constraints: Vec<Constraint>,
    /// Whether each constraint holds on the complete trace.
    pub truth: Vec<bool>,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid benchmark setting: {0}")]
    Invalid(String),
    #[error("could not place the required events after {0} attempts")]
    Placement(usize),
    #[error("constructed case disagrees with its intended truth: {0}")]
    Construction(String),
    #[error("formula is not one of the known patterns: {0}")]
    UnknownPattern(String),
    #[error("bench file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("judge call failed: {0}")]
    Model(#[from] crate::models::ModelError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prop_names_round_trip() {
        for p in [
            Prop::new(None, Attr::Color, "red"),
            Prop::new(Some(3), Attr::Animal, "salmon"),
            Prop::new(None, Attr::Number, "19"),
        ] {
            assert_eq!(Prop::parse(&p.name()), Some(p));
        }
        assert_eq!(
            Prop::new(Some(3), Attr::Animal, "salmon").name(),
            "entity3_animal_salmon"
        );
        assert_eq!(Prop::parse("pickup"), None);
    }
}
