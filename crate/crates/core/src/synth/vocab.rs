use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::Attr;

#[derive(Deserialize)]
struct RawVocab {
    animals: Vec<String>,
    shapes: Vec<String>,
    colors: Vec<String>,
    numbers: NumberRange,
}

#[derive(Deserialize)]
struct NumberRange {
    min: u32,
    max: u32,
}

/// The fixed attribute vocabularies.
#[derive(Debug)]
pub struct Vocabulary {
    animals: Vec<String>,
    shapes: Vec<String>,
    colors: Vec<String>,
    numbers: Vec<String>,
    words: HashMap<String, Attr>,
}

impl Vocabulary {
    pub fn values(&self, attr: Attr) -> &[String] {
        match attr {
            Attr::Animal => &self.animals,
            Attr::Shape => &self.shapes,
            Attr::Color => &self.colors,
            Attr::Number => &self.numbers,
        }
    }

    /// Attribute of a vocabulary word or number.
    pub fn attr_of(&self, word: &str) -> Option<Attr> {
        self.words.get(word).copied()
    }

    pub fn total(&self) -> usize {
        Attr::ALL.iter().map(|a| self.values(*a).len()).sum()
    }
}

pub fn vocabulary() -> &'static Vocabulary {
    static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
    VOCAB.get_or_init(|| {
        let raw: RawVocab = serde_json::from_str(include_str!("../../data/vocab.json"))
            .expect("bundled vocabulary is valid");
        let numbers: Vec<String> = (raw.numbers.min..=raw.numbers.max)
            .map(|n| n.to_string())
            .collect();
        let mut words = HashMap::new();
        for (attr, list) in [
            (Attr::Animal, &raw.animals),
            (Attr::Shape, &raw.shapes),
            (Attr::Color, &raw.colors),
            (Attr::Number, &numbers),
        ] {
            for w in list {
                let prev = words.insert(w.clone(), attr);
                assert!(prev.is_none(), "vocabulary word `{w}` is listed twice");
            }
        }
        Vocabulary {
            animals: raw.animals,
            shapes: raw.shapes,
            colors: raw.colors,
            numbers,
            words,
        }
    })
}

/// One entity observed at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeEvent {
    /// 1-based.
    pub entity: usize,
    pub animal: String,
    pub shape: String,
    pub color: String,
    pub number: String,
}

impl AttributeEvent {
    pub fn get(&self, attr: Attr) -> &str {
        match attr {
            Attr::Animal => &self.animal,
            Attr::Shape => &self.shape,
            Attr::Color => &self.color,
            Attr::Number => &self.number,
        }
    }

    pub fn set(&mut self, attr: Attr, value: String) {
        match attr {
            Attr::Animal => self.animal = value,
            Attr::Shape => self.shape = value,
            Attr::Color => self.color = value,
            Attr::Number => self.number = value,
        }
    }
}

pub const EVENT_TEMPLATES: [&str; 4] = [
    "Observed {a_color} {color} {shape} (number {number}) alongside {a_animal} {animal}.",
    "{A_animal} {animal} was seen next to {a_color} {color} {shape} marked {number}.",
    "Spotted {a_animal} {animal} beside {a_color} {color} {shape} with the number {number}.",
    "There was {a_color} {color} {shape} numbered {number} near {a_animal} {animal}.",
];

pub(crate) fn article(word: &str) -> &'static str {
    match word.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn render_event(ev: &AttributeEvent, template: usize) -> String {
    EVENT_TEMPLATES[template % EVENT_TEMPLATES.len()]
        .replace("{A_animal}", &capitalize(article(&ev.animal)))
        .replace("{a_animal}", article(&ev.animal))
        .replace("{a_color}", article(&ev.color))
        .replace("{animal}", &ev.animal)
        .replace("{shape}", &ev.shape)
        .replace("{color}", &ev.color)
        .replace("{number}", &ev.number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let v = vocabulary();
        assert_eq!(v.values(Attr::Animal).len(), 30);
        assert_eq!(v.values(Attr::Shape).len(), 20);
        assert_eq!(v.values(Attr::Color).len(), 20);
        assert_eq!(v.values(Attr::Number).len(), 100);
        assert_eq!(v.attr_of("olive"), Some(Attr::Color));
        assert_eq!(v.attr_of("19"), Some(Attr::Number));
        for t in EVENT_TEMPLATES {
            for w in t.split(|c: char| !c.is_alphanumeric()) {
                assert!(
                    v.attr_of(&w.to_lowercase()).is_none(),
                    "template word `{w}` is in the vocabulary"
                );
            }
        }
    }

    #[test]
    fn first_template() {
        let ev = AttributeEvent {
            entity: 1,
            animal: "gecko".into(),
            shape: "spiral".into(),
            color: "teal".into(),
            number: "42".into(),
        };
        assert_eq!(
            render_event(&ev, 0),
            "Observed a teal spiral (number 42) alongside a gecko."
        );
        let ev = AttributeEvent {
            animal: "owl".into(),
            color: "orange".into(),
            ..ev
        };
        assert_eq!(
            render_event(&ev, 1),
            "An owl was seen next to an orange spiral marked 42."
        );
    }
}
