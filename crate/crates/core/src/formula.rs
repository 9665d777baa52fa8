//! Formulas of the `¬ ∧ ∨ ⫰ ⫯` fragment in literal normal form.
//!
//! Surface syntax (precedence low to high): `|`, `&`, prefix `~` `!` `?`,
//! parentheses. `!` is branching recurrence, `?` branching corecurrence.
//! Binary connectives associate to the left. `¬ ∧ ∨ ⫰ ⫯` are accepted as
//! aliases on input.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("empty formula")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("position {0} does not exist in the formula")]
    InvalidPosition(Position),
}

/// A formula in which negation occurs only directly over atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Branching recurrence `⫰`.
    Rec(Box<Formula>),
    /// Branching corecurrence `⫯`.
    Corec(Box<Formula>),
}

/// Top connective of a formula node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    Literal,
    And,
    Or,
    Rec,
    Corec,
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::NegAtom(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn rec(a: Formula) -> Formula {
        Formula::Rec(Box::new(a))
    }

    pub fn corec(a: Formula) -> Formula {
        Formula::Corec(Box::new(a))
    }

    pub fn connective(&self) -> Connective {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => Connective::Literal,
            Formula::And(..) => Connective::And,
            Formula::Or(..) => Connective::Or,
            Formula::Rec(_) => Connective::Rec,
            Formula::Corec(_) => Connective::Corec,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.connective() == Connective::Literal
    }

    /// `(atom name, positive?)` for literals.
    pub fn literal(&self) -> Option<(&str, bool)> {
        match self {
            Formula::Atom(p) => Some((p, true)),
            Formula::NegAtom(p) => Some((p, false)),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Rec(a) | Formula::Corec(a) => vec![a],
        }
    }

    pub fn child(&self, index: u8) -> Option<&Formula> {
        match (self, index) {
            (Formula::And(a, _) | Formula::Or(a, _), 0) => Some(a),
            (Formula::And(_, b) | Formula::Or(_, b), 1) => Some(b),
            (Formula::Rec(a) | Formula::Corec(a), 0) => Some(a),
            _ => None,
        }
    }

    /// The negation of `self`, pushed down to the atoms.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom(p) => Formula::NegAtom(p.clone()),
            Formula::NegAtom(p) => Formula::Atom(p.clone()),
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
            Formula::Rec(a) => Formula::corec(a.negate()),
            Formula::Corec(a) => Formula::rec(a.negate()),
        }
    }

    pub fn subformula_at(&self, position: &Position) -> Result<&Formula, FormulaError> {
        let mut node = self;
        for &step in position.steps() {
            node = node
                .child(step)
                .ok_or_else(|| FormulaError::InvalidPosition(position.clone()))?;
        }
        Ok(node)
    }

    /// Every position of the formula in preorder (parents before children,
    /// left before right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        fn walk(f: &Formula, at: Position, out: &mut Vec<Position>) {
            out.push(at.clone());
            for (i, _) in f.children().into_iter().enumerate() {
                walk(f.child(i as u8).unwrap(), at.child(i as u8), out);
            }
        }
        walk(self, Position::root(), &mut out);
        out
    }

    /// Positions of all literal occurrences, left to right.
    pub fn politerals(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| self.subformula_at(p).map(Formula::is_literal).unwrap_or(false))
            .collect()
    }

    /// Number of `⫰`/`⫯` nodes strictly above `position`.
    pub fn modal_depth(&self, position: &Position) -> Result<usize, FormulaError> {
        let mut node = self;
        let mut depth = 0;
        for &step in position.steps() {
            if matches!(node, Formula::Rec(_) | Formula::Corec(_)) {
                depth += 1;
            }
            node = node
                .child(step)
                .ok_or_else(|| FormulaError::InvalidPosition(position.clone()))?;
        }
        Ok(depth)
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in self.politerals() {
            let (name, _) = self.subformula_at(&p).unwrap().literal().unwrap();
            if !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        }
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }
}

/// Path of child indices from the root. Binary nodes use `0`/`1`; modal
/// nodes have the single child `0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<u8>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(steps: Vec<u8>) -> Position {
        Position(steps)
    }

    pub fn steps(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: u8) -> Position {
        let mut steps = self.0.clone();
        steps.push(index);
        Position(steps)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = FormulaError;

    /// Digit string, e.g. `10` for `[1, 0]`; the empty string is the root.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(FormulaError::Syntax {
                    offset: i,
                    message: format!("bad position digit {c:?}"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "~{p}"),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let prec = self.precedence();
                let op = if prec == 1 { "|" } else { "&" };
                write_wrapped(f, a, a.precedence() < prec)?;
                write!(f, " {op} ")?;
                write_wrapped(f, b, b.precedence() <= prec)
            }
            Formula::Rec(a) | Formula::Corec(a) => {
                let op = if matches!(self, Formula::Rec(_)) { "!" } else { "?" };
                write!(f, "{op}")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, g: &Formula, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

pub fn render(f: &Formula) -> String {
    f.to_string()
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Atom(String),
    Or,
    And,
    Not,
    Bang,
    Query,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '|' | '∨' => Token::Or,
            '&' | '∧' => Token::And,
            '~' | '¬' => Token::Not,
            '!' | '⫰' => Token::Bang,
            '?' | '⫯' => Token::Query,
            '(' => Token::LParen,
            ')' => Token::RParen,
            'A'..='Z' => {
                let mut name = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((i, Token::Atom(name)));
                continue;
            }
            other => {
                return Err(FormulaError::Syntax {
                    offset: i,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        chars.next();
        out.push((i, tok));
    }
    Ok(out)
}

/// Surface syntax tree; negation may still sit over compound formulas.
enum Raw {
    Atom(String),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Rec(Box<Raw>),
    Corec(Box<Raw>),
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error(&self, message: &str) -> FormulaError {
        FormulaError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn disjunction(&mut self) -> Result<Raw, FormulaError> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.conjunction()?;
            left = Raw::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Raw, FormulaError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.unary()?;
            left = Raw::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Raw, FormulaError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            Some(Token::Bang) => {
                self.pos += 1;
                Ok(Raw::Rec(Box::new(self.unary()?)))
            }
            Some(Token::Query) => {
                self.pos += 1;
                Ok(Raw::Corec(Box::new(self.unary()?)))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.disjunction()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Atom(name)) => {
                self.pos += 1;
                Ok(Raw::Atom(name))
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn normalize(raw: &Raw, negated: bool) -> Formula {
    match (raw, negated) {
        (Raw::Atom(p), false) => Formula::Atom(p.clone()),
        (Raw::Atom(p), true) => Formula::NegAtom(p.clone()),
        (Raw::Not(a), n) => normalize(a, !n),
        (Raw::And(a, b), false) => Formula::and(normalize(a, false), normalize(b, false)),
        (Raw::And(a, b), true) => Formula::or(normalize(a, true), normalize(b, true)),
        (Raw::Or(a, b), false) => Formula::or(normalize(a, false), normalize(b, false)),
        (Raw::Or(a, b), true) => Formula::and(normalize(a, true), normalize(b, true)),
        (Raw::Rec(a), false) => Formula::rec(normalize(a, false)),
        (Raw::Rec(a), true) => Formula::corec(normalize(a, true)),
        (Raw::Corec(a), false) => Formula::corec(normalize(a, false)),
        (Raw::Corec(a), true) => Formula::rec(normalize(a, true)),
    }
}

/// Parses `text` and rewrites negation into literal normal form.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(FormulaError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let raw = parser.disjunction()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(normalize(&raw, false))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parses_examples() {
        assert_eq!(
            p("P & (~Q | ~Q)"),
            Formula::and(
                Formula::atom("P"),
                Formula::or(Formula::neg_atom("Q"), Formula::neg_atom("Q"))
            )
        );
        assert_eq!(
            p("~(P & Q)"),
            Formula::or(Formula::neg_atom("P"), Formula::neg_atom("Q"))
        );
        assert_eq!(
            p("?~P | !P"),
            Formula::or(
                Formula::corec(Formula::neg_atom("P")),
                Formula::rec(Formula::atom("P"))
            )
        );
    }

    #[test]
    fn negation_dualities() {
        assert_eq!(p("~!P"), p("?~P"));
        assert_eq!(p("~?(P | Q)"), p("!(~P & ~Q)"));
        assert_eq!(p("~~P"), p("P"));
        assert_eq!(p("¬(P ∧ Q)"), p("~P | ~Q"));
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render(&p("P & (~Q | ~Q)")), "P & (~Q | ~Q)");
        assert_eq!(render(&p("P")), "P");
        assert_eq!(render(&p("?~P | !P")), "?~P | !P");
        assert_eq!(render(&p("P | (Q | R)")), "P | (Q | R)");
        assert_eq!(render(&p("(P | Q) | R")), "P | Q | R");
        assert_eq!(render(&p("!(P & Q)")), "!(P & Q)");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_formula("   "), Err(FormulaError::Empty));
        assert!(matches!(
            parse_formula("P &"),
            Err(FormulaError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_formula("p"),
            Err(FormulaError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_formula("(P | Q"),
            Err(FormulaError::Syntax { .. })
        ));
        assert!(matches!(parse_formula("P Q"), Err(FormulaError::Syntax { .. })));
    }

    #[test]
    fn subformula_addressing() {
        let f = p("P & (~Q | ~Q)");
        assert_eq!(f.subformula_at(&Position::root()).unwrap(), &f);
        assert_eq!(
            f.subformula_at(&Position::new(vec![1, 0])).unwrap(),
            &Formula::neg_atom("Q")
        );
        let g = p("?~P | !P");
        assert_eq!(
            g.subformula_at(&Position::new(vec![1, 0])).unwrap(),
            &Formula::atom("P")
        );
        assert!(f.subformula_at(&Position::new(vec![0, 0])).is_err());
        assert!(g.subformula_at(&Position::new(vec![1, 1])).is_err());
    }

    #[test]
    fn politerals_and_depth() {
        let f = p("P & (~Q | ~Q)");
        assert_eq!(
            f.politerals(),
            vec![
                Position::new(vec![0]),
                Position::new(vec![1, 0]),
                Position::new(vec![1, 1])
            ]
        );
        assert_eq!(p("P").politerals(), vec![Position::root()]);
        let g = p("?~P | !P");
        assert_eq!(
            g.politerals(),
            vec![Position::new(vec![0, 0]), Position::new(vec![1, 0])]
        );
        assert_eq!(f.modal_depth(&Position::new(vec![1, 0])).unwrap(), 0);
        assert_eq!(g.modal_depth(&Position::new(vec![1, 0])).unwrap(), 1);
        assert_eq!(p("!?P").modal_depth(&Position::new(vec![0, 0])).unwrap(), 2);
        assert!(g.modal_depth(&Position::new(vec![2])).is_err());
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["P", "Q", "R"]).prop_map(Formula::atom),
            prop::sample::select(vec!["P", "Q", "R"]).prop_map(Formula::neg_atom),
        ];
        leaf.prop_recursive(5, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                inner.clone().prop_map(Formula::rec),
                inner.prop_map(Formula::corec),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&render(&f)).unwrap(), f);
        }

        #[test]
        fn politerals_are_literals(f in arb_formula()) {
            for pos in f.politerals() {
                prop_assert!(f.subformula_at(&pos).unwrap().is_literal());
            }
            prop_assert_eq!(f.modal_depth(&Position::root()).unwrap(), 0);
        }

        #[test]
        fn negation_is_involutive(f in arb_formula()) {
            prop_assert_eq!(f.negate().negate(), f.clone());
            let text = format!("~({})", render(&f));
            prop_assert_eq!(parse_formula(&text).unwrap(), f.negate());
        }
    }
}
