//! Concrete syntax for LTL formulas.
//!
//! ```text
//! formula := or ( "->" formula )?           right associative
//! or      := and ( "|" and )*
//! and     := until ( "&" until )*
//! until   := unary ( "U" until )?           right associative
//! unary   := ( "!" | "G" | "F" | "X" ) unary | atom
//! atom    := ident | "true" | "false" | "(" formula ")"
//! ```
//!
//! The symbolic spellings `¬ ∧ ∨ → □ ◇ ○ 𝒰 ⊤ ⊥` are accepted wherever the
//! ascii operator is. `G`, `F`, `X`, `U`, `true` and `false` are reserved and
//! cannot be used as proposition names.

use std::fmt;

use thiserror::Error;

use super::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnexpectedEnd,
    UnknownOperator,
    UnbalancedParen,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ParseErrorKind::UnexpectedToken => "unexpected token",
            ParseErrorKind::UnexpectedEnd => "unexpected end of input",
            ParseErrorKind::UnknownOperator => "unknown operator",
            ParseErrorKind::UnbalancedParen => "unbalanced parentheses",
        };
        write!(f, "line {}, column {}: {what}", self.line, self.column)?;
        if self.kind != ParseErrorKind::UnexpectedEnd {
            write!(f, " {}", self.found)?;
        }
        if !self.expected.is_empty() {
            write!(f, "; expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl ParseError {
    /// The offending source line with a caret under the error column.
    pub fn caret(&self, source: &str) -> String {
        let line = source.lines().nth(self.line - 1).unwrap_or("");
        format!("{line}\n{}^", " ".repeat(self.column.saturating_sub(1)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Eventually,
    Always,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Next => "X",
            Tok::Until => "U",
            Tok::Eventually => "F",
            Tok::Always => "G",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let single = |tok: Tok| Spanned {
            tok,
            line: start_line,
            column: start_col,
        };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[begin..i].iter().collect();
            column += i - begin;
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "G" => Tok::Always,
                "F" => Tok::Eventually,
                "X" => Tok::Next,
                "U" => Tok::Until,
                _ => Tok::Ident(word),
            };
            out.push(single(tok));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('-', Some('>')) => (Tok::Implies, 2),
            ('&', Some('&')) => (Tok::And, 2),
            ('|', Some('|')) => (Tok::Or, 2),
            ('!' | '¬', _) => (Tok::Not, 1),
            ('&' | '∧', _) => (Tok::And, 1),
            ('|' | '∨', _) => (Tok::Or, 1),
            ('→', _) => (Tok::Implies, 1),
            ('□', _) => (Tok::Always, 1),
            ('◇', _) => (Tok::Eventually, 1),
            ('○', _) => (Tok::Next, 1),
            ('𝒰', _) => (Tok::Until, 1),
            ('⊤', _) => (Tok::True, 1),
            ('⊥', _) => (Tok::False, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownOperator,
                    line,
                    column,
                    found: format!("`{c}`"),
                    expected: vec![],
                })
            }
        };
        out.push(single(tok));
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    open_parens: Vec<(usize, usize)>,
}

const ATOM_START: &[&str] = &["identifier", "true", "false", "(", "!", "G", "F", "X"];

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: Vec<&'static str>) -> ParseError {
        let t = self.peek();
        let kind = match t.tok {
            Tok::Eof if !self.open_parens.is_empty() && expected.contains(&")") => {
                ParseErrorKind::UnbalancedParen
            }
            Tok::Eof => ParseErrorKind::UnexpectedEnd,
            Tok::RParen if self.open_parens.is_empty() => ParseErrorKind::UnbalancedParen,
            _ => ParseErrorKind::UnexpectedToken,
        };
        ParseError {
            kind,
            line: t.line,
            column: t.column,
            found: t.tok.describe(),
            expected,
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek().tok == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.peek().tok == Tok::And {
            self.bump();
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.peek().tok == Tok::Until {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek().tok {
            Tok::Not => Formula::not,
            Tok::Always => Formula::always,
            Tok::Eventually => Formula::eventually,
            Tok::Next => Formula::next,
            _ => return self.atom(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::prop(&name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                let open = self.bump();
                self.open_parens.push((open.line, open.column));
                let inner = self.formula()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.error_here(vec![")", "&", "|", "->", "U"]));
                }
                self.bump();
                self.open_parens.pop();
                Ok(inner)
            }
            _ => Err(self.error_here(ATOM_START.to_vec())),
        }
    }
}

/// Parses formula text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        open_parens: Vec::new(),
    };
    let f = p.formula()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error_here(vec!["&", "|", "->", "U", "end of input"]));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::formula::Formula as F;

    fn p(s: &str) -> F {
        F::prop(s)
    }

    #[test]
    fn red_light_example() {
        assert_eq!(
            parse("G(red_light -> stop)").unwrap(),
            F::always(F::implies(p("red_light"), p("stop")))
        );
    }

    #[test]
    fn literal() {
        assert_eq!(parse("true").unwrap(), F::True);
        assert_eq!(parse("false").unwrap(), F::False);
    }

    #[test]
    fn pickup_putdown() {
        assert_eq!(
            parse("F(pickup & X F putdown)").unwrap(),
            F::eventually(F::and(p("pickup"), F::next(F::eventually(p("putdown")))))
        );
    }

    #[test]
    fn symbolic_spelling() {
        assert_eq!(
            parse("◇(pickup ∧ ○◇putdown)").unwrap(),
            parse("F(pickup & X F putdown)").unwrap()
        );
        assert_eq!(
            parse("□(a → ¬b 𝒰 c) ∨ ⊥").unwrap(),
            parse("G(a -> !b U c) | false").unwrap()
        );
    }

    #[test]
    fn precedence() {
        // -> loosest and right associative
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            F::implies(p("a"), F::implies(p("b"), p("c")))
        );
        // & binds tighter than |
        assert_eq!(
            parse("a | b & c").unwrap(),
            F::or(p("a"), F::and(p("b"), p("c")))
        );
        // U binds tighter than &, right associative
        assert_eq!(
            parse("a & b U c U d").unwrap(),
            F::and(p("a"), F::until(p("b"), F::until(p("c"), p("d"))))
        );
        // unary binds tighter than U
        assert_eq!(parse("!a U b").unwrap(), F::until(F::not(p("a")), p("b")));
        assert_eq!(
            parse("F a U b").unwrap(),
            F::until(F::eventually(p("a")), p("b"))
        );
        // left associative & and |
        assert_eq!(
            parse("a & b & c").unwrap(),
            F::and(F::and(p("a"), p("b")), p("c"))
        );
    }

    #[test]
    fn unexpected_end_reports_column() {
        let err = parse("G(a ->").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!((err.line, err.column), (1, 7));
        assert!(err.expected.contains(&"identifier"));
        assert_eq!(err.caret("G(a ->"), "G(a ->\n      ^");
    }

    #[test]
    fn unbalanced() {
        assert_eq!(
            parse("(a & b").unwrap_err().kind,
            ParseErrorKind::UnbalancedParen
        );
        assert_eq!(
            parse("a & b)").unwrap_err().kind,
            ParseErrorKind::UnbalancedParen
        );
    }

    #[test]
    fn unknown_operator() {
        let err = parse("a <-> b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownOperator);
        assert_eq!(err.column, 3);
    }

    #[test]
    fn multiline_positions() {
        let err = parse("G(a ->\n  )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn reserved_words_need_separation() {
        assert_eq!(parse("Gp").unwrap(), p("Gp"));
        assert_eq!(parse("G p").unwrap(), F::always(p("p")));
    }
}
