//! Text renderings of formulas.
//!
//! `Ascii` is the canonical on-disk form and `Symbolic` uses the usual
//! logic glyphs; both parse back to a structurally equal formula and emit the
//! fewest parentheses that preserve the tree shape.
//!
//! `English` is a fixed template table used when residual obligations are
//! shown to a model:
//!
//! | formula      | rendering                              |
//! |--------------|----------------------------------------|
//! | `p`          | `p must hold`                          |
//! | `!p`         | `p must not hold`                      |
//! | `F x`        | `eventually, <x> must hold`            |
//! | `G x`        | `always, <x> must hold`                |
//! | `X x`        | `at the next step, <x> must hold`      |
//! | `a U b`      | `<a> must hold until <b> holds`        |
//! | `true`       | `nothing further is required`          |
//! | `false`      | `the constraint can no longer be met`  |
//! | other        | `<phrase> must hold`                   |
//!
//! Nested subformulas use the phrase forms `not x`, `x and y`, `x or y`,
//! `if x then y`, `x until y`, `eventually x`, `always x` and
//! `at the next step x`, with binary subformulas wrapped in parentheses.

use super::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Ascii,
    Symbolic,
    English,
}

impl std::str::FromStr for Style {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(Style::Ascii),
            "symbolic" => Ok(Style::Symbolic),
            "english" => Ok(Style::English),
            other => Err(format!("unknown render style `{other}`")),
        }
    }
}

pub fn render(phi: &Formula, style: Style) -> String {
    match style {
        Style::Ascii => {
            let mut out = String::new();
            write_syntax(phi, &ASCII, &mut out);
            out
        }
        Style::Symbolic => {
            let mut out = String::new();
            write_syntax(phi, &SYMBOLIC, &mut out);
            out
        }
        Style::English => english_sentence(phi),
    }
}

struct Glyphs {
    t: &'static str,
    f: &'static str,
    not: &'static str,
    always: &'static str,
    eventually: &'static str,
    next: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    until: &'static str,
    /// Whether a letter operator needs a space before a bare operand.
    letter_ops: bool,
}

const ASCII: Glyphs = Glyphs {
    t: "true",
    f: "false",
    not: "!",
    always: "G",
    eventually: "F",
    next: "X",
    and: " & ",
    or: " | ",
    implies: " -> ",
    until: " U ",
    letter_ops: true,
};

const SYMBOLIC: Glyphs = Glyphs {
    t: "⊤",
    f: "⊥",
    not: "¬",
    always: "□",
    eventually: "◇",
    next: "○",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
    until: " 𝒰 ",
    letter_ops: false,
};

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNTIL: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

fn precedence(phi: &Formula) -> u8 {
    match phi {
        Formula::True | Formula::False | Formula::Prop(_) => PREC_ATOM,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) | Formula::Always(_) => {
            PREC_UNARY
        }
        Formula::Until(..) => PREC_UNTIL,
        Formula::And(..) => PREC_AND,
        Formula::Or(..) => PREC_OR,
        Formula::Implies(..) => PREC_IMPLIES,
    }
}

fn write_syntax(phi: &Formula, g: &Glyphs, out: &mut String) {
    match phi {
        Formula::True => out.push_str(g.t),
        Formula::False => out.push_str(g.f),
        Formula::Prop(p) => out.push_str(p),
        Formula::Not(c) => write_unary(g.not, false, c, g, out),
        Formula::Always(c) => write_unary(g.always, g.letter_ops, c, g, out),
        Formula::Eventually(c) => write_unary(g.eventually, g.letter_ops, c, g, out),
        Formula::Next(c) => write_unary(g.next, g.letter_ops, c, g, out),
        Formula::And(l, r) => write_binary(l, r, g.and, PREC_AND, false, g, out),
        Formula::Or(l, r) => write_binary(l, r, g.or, PREC_OR, false, g, out),
        Formula::Implies(l, r) => write_binary(l, r, g.implies, PREC_IMPLIES, true, g, out),
        Formula::Until(l, r) => write_binary(l, r, g.until, PREC_UNTIL, true, g, out),
    }
}

fn write_unary(op: &str, letter: bool, child: &Formula, g: &Glyphs, out: &mut String) {
    out.push_str(op);
    if precedence(child) >= PREC_UNARY {
        if letter {
            out.push(' ');
        }
        write_syntax(child, g, out);
    } else {
        out.push('(');
        write_syntax(child, g, out);
        out.push(')');
    }
}

fn write_binary(
    l: &Formula,
    r: &Formula,
    op: &str,
    prec: u8,
    right_assoc: bool,
    g: &Glyphs,
    out: &mut String,
) {
    let lp = precedence(l);
    let rp = precedence(r);
    let paren_l = lp < prec || (lp == prec && right_assoc);
    let paren_r = rp < prec || (rp == prec && !right_assoc);
    write_grouped(l, paren_l, g, out);
    out.push_str(op);
    write_grouped(r, paren_r, g, out);
}

fn write_grouped(phi: &Formula, paren: bool, g: &Glyphs, out: &mut String) {
    if paren {
        out.push('(');
        write_syntax(phi, g, out);
        out.push(')');
    } else {
        write_syntax(phi, g, out);
    }
}

fn english_sentence(phi: &Formula) -> String {
    match phi {
        Formula::True => "nothing further is required".to_string(),
        Formula::False => "the constraint can no longer be met".to_string(),
        Formula::Prop(p) => format!("{p} must hold"),
        Formula::Not(c) if matches!(**c, Formula::Prop(_)) => {
            format!("{} must not hold", english_phrase(c))
        }
        Formula::Eventually(c) => format!("eventually, {} must hold", english_group(c)),
        Formula::Always(c) => format!("always, {} must hold", english_group(c)),
        Formula::Next(c) => format!("at the next step, {} must hold", english_group(c)),
        Formula::Until(l, r) => format!(
            "{} must hold until {} holds",
            english_group(l),
            english_group(r)
        ),
        other => format!("{} must hold", english_phrase(other)),
    }
}

fn english_group(phi: &Formula) -> String {
    match phi {
        Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Until(..) => {
            format!("({})", english_phrase(phi))
        }
        _ => english_phrase(phi),
    }
}

fn english_phrase(phi: &Formula) -> String {
    match phi {
        Formula::True => "true".to_string(),
        Formula::False => "false".to_string(),
        Formula::Prop(p) => p.to_string(),
        Formula::Not(c) => format!("not {}", english_group(c)),
        Formula::And(l, r) => format!("{} and {}", english_group(l), english_group(r)),
        Formula::Or(l, r) => format!("{} or {}", english_group(l), english_group(r)),
        Formula::Implies(l, r) => format!("if {} then {}", english_group(l), english_group(r)),
        Formula::Until(l, r) => format!("{} until {}", english_group(l), english_group(r)),
        Formula::Eventually(c) => format!("eventually {}", english_group(c)),
        Formula::Always(c) => format!("always {}", english_group(c)),
        Formula::Next(c) => format!("at the next step {}", english_group(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parser::parse;

    fn ascii(s: &str) -> String {
        render(&parse(s).unwrap(), Style::Ascii)
    }

    #[test]
    fn ascii_canonical_forms() {
        assert_eq!(ascii("G(red_light -> stop)"), "G(red_light -> stop)");
        assert_eq!(ascii("G (a -> (F (b)))"), "G(a -> F b)");
        assert_eq!(ascii("F(pickup & X F putdown)"), "F(pickup & X F putdown)");
        assert_eq!(ascii("!(a & b)"), "!(a & b)");
        assert_eq!(ascii("!!a"), "!!a");
        assert_eq!(ascii("(a -> b) -> c"), "(a -> b) -> c");
        assert_eq!(ascii("a -> b -> c"), "a -> b -> c");
        assert_eq!(ascii("a & (b & c)"), "a & (b & c)");
        assert_eq!(ascii("(a U b) U c"), "(a U b) U c");
        assert_eq!(ascii("(a | b) & c"), "(a | b) & c");
    }

    #[test]
    fn symbolic_form() {
        let f = parse("F(pickup & X F putdown)").unwrap();
        assert_eq!(render(&f, Style::Symbolic), "◇(pickup ∧ ○◇putdown)");
        assert_eq!(parse(&render(&f, Style::Symbolic)).unwrap(), f);
    }

    #[test]
    fn english_templates() {
        let e = |s: &str| render(&parse(s).unwrap(), Style::English);
        assert_eq!(e("F putdown"), "eventually, putdown must hold");
        assert_eq!(e("X p"), "at the next step, p must hold");
        assert_eq!(
            e("G(red_light -> stop)"),
            "always, (if red_light then stop) must hold"
        );
        assert_eq!(e("!bad"), "bad must not hold");
        assert_eq!(e("a U b"), "a must hold until b holds");
        assert_eq!(
            e("F(pickup & X F putdown)"),
            "eventually, (pickup and at the next step eventually putdown) must hold"
        );
    }
}
