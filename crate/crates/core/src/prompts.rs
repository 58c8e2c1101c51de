//! Prompt texts sent to models: labeling, judging, constraint injection and
//! safe-model substitution.

use std::collections::{BTreeMap, BTreeSet};

pub const LABELING_PREAMBLE: &str = "Given the following text, and following propositions, analyze whether the following action satisfies this proposition or not. If the proposition is an item or tool, check if it is used in the action. If the proposition is an action, check that the action is performing it.";

/// Default injection template; `{Constraints}` is replaced by the rendered
/// residuals.
pub const INJECT_TEMPLATE: &str =
    "VERY IMPORTANT: PAY ATTENTION and Double check to ensure that your response complies with the following: \n{Constraints}";

pub const SWITCH_TEMPLATE: &str = "You are a safe model specifically designed to follow the provided rules. \nGiven your past actions output an action that is compliant with the rules that will follow.\nYour past actions: \n{Memory}\nThese are the rules that you have to follow:  \n{Rules}\nNow choose your next action. Output only one action.";

pub fn labeling_prompt(
    history: &str,
    action: &str,
    vocab: &BTreeSet<String>,
    descriptions: &BTreeMap<String, String>,
) -> String {
    let mut s = String::from(LABELING_PREAMBLE);
    s.push_str("\n\n");
    if !history.is_empty() {
        s.push_str("Previous actions:\n");
        s.push_str(history);
        s.push_str("\n\n");
    }
    s.push_str("Action:\n");
    s.push_str(action);
    s.push_str("\n\nPropositions:\n");
    for p in vocab {
        match descriptions.get(p) {
            Some(d) => s.push_str(&format!("{p}: {d}\n")),
            None => s.push_str(&format!("{p}\n")),
        }
    }
    s.push_str("\nAnswer with exactly one line per proposition in the format `<proposition>: yes` or `<proposition>: no`.");
    s
}

pub fn inject(input: &str, template: &str, constraints: &[String]) -> String {
    if constraints.is_empty() {
        return input.to_string();
    }
    let body = template.replace("{Constraints}", &constraints.join("\n"));
    if input.is_empty() {
        body
    } else {
        format!("{input}\n{body}")
    }
}

pub fn switch_prompt(past_actions: &[&str], rules: &[String]) -> String {
    let memory = if past_actions.is_empty() {
        "(none)".to_string()
    } else {
        past_actions.join("\n")
    };
    SWITCH_TEMPLATE
        .replace("{Memory}", &memory)
        .replace("{Rules}", &rules.join("\n"))
}

pub fn judge_single(constraint: &str, trace_text: &str) -> String {
    format!(
        "Below is a log of events, one step per line.\nConstraint: {constraint}\nAnswer VALID if the log satisfies the constraint and INVALID if it does not. Reply with the single word VALID or INVALID.\n\n{trace_text}"
    )
}

pub fn judge_multi(constraints: &[String], trace_text: &str) -> String {
    let mut s = String::from(
        "Below is a log of events, one step per line, and a numbered list of constraints.\n",
    );
    for (i, c) in constraints.iter().enumerate() {
        s.push_str(&format!("Constraint {}: {c}\n", i + 1));
    }
    s.push_str("Judge each constraint on its own: VALID if the log satisfies it, INVALID if not. Reply with one line per constraint, formatted as\nConstraint i: VALID or INVALID\n\n");
    s.push_str(trace_text);
    s
}

pub fn judge_entities(entities: usize, constraint: &str, trace_text: &str) -> String {
    format!(
        "Below is a log of events, one step per line. Every step mentions {entities} entities, named Entity 1 to Entity {entities}, and gives each one an animal, a color, a shape and a number.\nConstraint: {constraint}\nAnswer VALID if the log satisfies the constraint and INVALID if it does not. Reply with the single word VALID or INVALID.\n\n{trace_text}"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injection() {
        let out = inject(
            "go",
            INJECT_TEMPLATE,
            &["eventually, putdown must hold".into()],
        );
        assert!(out.starts_with("go\nVERY IMPORTANT"));
        assert!(out.ends_with("eventually, putdown must hold"));
        assert_eq!(inject("go", INJECT_TEMPLATE, &[]), "go");
    }

    #[test]
    fn switch_has_memory_and_rules() {
        let p = switch_prompt(&["a", "b"], &["never x".into()]);
        assert!(p.contains("Your past actions: \na\nb\n"));
        assert!(p.contains("never x\nNow choose"));
    }
}
