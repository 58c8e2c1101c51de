use std::collections::BTreeSet;

use super::vocab::vocabulary;
use super::{Attr, Prop};
use crate::ltl::TruthAssignment;
use crate::trace::{LabelError, LabelingFunction, StepRecord};

/// Recovers attribute propositions from the text of a synthetic step.
///
/// With `entities == 0` the step is a single untagged sentence; otherwise it
/// holds `Entity i:` sections and propositions carry the entity tag.
pub struct SyntheticLabeler {
    entities: usize,
    vocab: BTreeSet<String>,
}

impl SyntheticLabeler {
    pub fn new(entities: usize) -> Self {
        let v = vocabulary();
        let tags: Vec<Option<usize>> = if entities == 0 {
            vec![None]
        } else {
            (1..=entities).map(Some).collect()
        };
        let vocab = tags
            .iter()
            .flat_map(|e| {
                Attr::ALL.iter().flat_map(move |a| {
                    v.values(*a)
                        .iter()
                        .map(move |val| Prop::new(*e, *a, val.clone()).name())
                })
            })
            .collect();
        SyntheticLabeler { entities, vocab }
    }

    pub fn label_text(&self, text: &str) -> TruthAssignment {
        let mut out = TruthAssignment::new();
        if self.entities == 0 {
            scan(text, None, &mut out);
            return out;
        }
        let mut rest = text;
        while let Some(pos) = rest.find("Entity ") {
            let after = &rest[pos + "Entity ".len()..];
            let Some((num, body)) = after.split_once(':') else {
                break;
            };
            let Ok(e) = num.trim().parse::<usize>() else {
                rest = after;
                continue;
            };
            let end = body.find("Entity ").unwrap_or(body.len());
            if (1..=self.entities).contains(&e) {
                scan(&body[..end], Some(e), &mut out);
            }
            rest = &body[end..];
        }
        out
    }
}

fn scan(text: &str, entity: Option<usize>, out: &mut TruthAssignment) {
    let v = vocabulary();
    for word in text.split(|c: char| !c.is_ascii_alphanumeric()) {
        let w = word.to_ascii_lowercase();
        if let Some(attr) = v.attr_of(&w) {
            out.insert(Prop::new(entity, attr, w).name());
        }
    }
}

impl LabelingFunction for SyntheticLabeler {
    fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
        Ok(history
            .last()
            .map(|s| self.label_text(&s.output))
            .unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sentence() {
        let l = SyntheticLabeler::new(0);
        let got = l.label_text("Observed a teal spiral (number 42) alongside a gecko");
        let want: TruthAssignment = ["color_teal", "shape_spiral", "animal_gecko", "number_42"]
            .into_iter()
            .collect();
        assert_eq!(got, want);
        assert_eq!(l.vocabulary().len(), 170);
    }

    #[test]
    fn entity_sections() {
        let l = SyntheticLabeler::new(3);
        let got = l.label_text(
            "Entity 1: Observed an olive cube (number 4) alongside a fox. Entity 3: A salmon was seen next to a red star marked 77.",
        );
        assert!(got.contains("entity1_color_olive"));
        assert!(got.contains("entity3_animal_salmon"));
        assert!(got.contains("entity3_number_77"));
        assert_eq!(got.len(), 8);
        assert_eq!(l.vocabulary().len(), 510);
    }
}
