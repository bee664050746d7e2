//! Recursive-descent parser shared by both languages.
//!
//! Precedence, tightest first: prefix operators (`~ K B <K> <B>`), `&`,
//! `|`, then `->` and `<->` (right-associative). `&` and `|` associate to
//! the left.

use std::fmt;
use std::marker::PhantomData;

use thiserror::Error;

use super::{Formula, ProbFormula, Term};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset of the offending token (input length at end of input).
    pub offset: usize,
    /// Token classes that would have been accepted, sorted.
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: found {}, expected one of {}",
            self.offset,
            self.found,
            self.expected.join(" ")
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    True,
    False,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    K,
    B,
    KDual,
    BDual,
    LParen,
    RParen,
    Atom(String),
    Num(Rational),
    P,
    Star,
    Plus,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom {a:?}"),
            Tok::Num(q) => format!("number {q}"),
            Tok::Eof => "end of input".into(),
            t => format!("{:?}", t.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::True => "true",
            Tok::False => "false",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::K => "K",
            Tok::B => "B",
            Tok::KDual => "<K>",
            Tok::BDual => "<B>",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::P => "P",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Ge => ">=",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Lt => "<",
            Tok::Eq => "=",
            Tok::Atom(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let fixed: &[(&str, Tok)] = &[
        ("<->", Tok::DArrow),
        ("<K>", Tok::KDual),
        ("<B>", Tok::BDual),
        ("<=", Tok::Le),
        (">=", Tok::Ge),
        ("->", Tok::Arrow),
        ("<", Tok::Lt),
        (">", Tok::Gt),
        ("=", Tok::Eq),
        ("~", Tok::Tilde),
        ("&", Tok::Amp),
        ("|", Tok::Bar),
        ("(", Tok::LParen),
        (")", Tok::RParen),
        ("*", Tok::Star),
        ("+", Tok::Plus),
        ("K", Tok::K),
        ("B", Tok::B),
        ("P", Tok::P),
    ];
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_lowercase() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &input[start..i];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Atom(word.to_string()),
            };
            out.push((tok, start));
            continue;
        }
        let digit_at = |j: usize| j < bytes.len() && bytes[j].is_ascii_digit();
        if digit_at(i) || (c == b'-' && digit_at(i + 1)) {
            let start = i;
            i += 1;
            while digit_at(i) {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'/' && digit_at(i + 1) {
                i += 1;
                while digit_at(i) {
                    i += 1;
                }
            }
            let q: Rational = input[start..i].parse().map_err(|_| SyntaxError {
                offset: start,
                expected: vec!["rational".into()],
                found: format!("{:?}", &input[start..i]),
            })?;
            out.push((Tok::Num(q), start));
            continue;
        }
        for (s, t) in fixed {
            if input[i..].starts_with(s) {
                out.push((t.clone(), i));
                i += s.len();
                continue 'outer;
            }
        }
        let ch = input[i..].chars().next().unwrap_or('?');
        return Err(SyntaxError { offset: i, expected: vec!["token".into()], found: format!("{ch:?}") });
    }
    out.push((Tok::Eof, input.len()));
    Ok(out)
}

trait Lang {
    type F: Clone;
    const PROB: bool;
    fn top() -> Self::F;
    fn bot() -> Self::F;
    fn atom(a: String) -> Self::F;
    fn not(a: Self::F) -> Self::F;
    fn and(a: Self::F, b: Self::F) -> Self::F;
    fn or(a: Self::F, b: Self::F) -> Self::F;
    fn imp(a: Self::F, b: Self::F) -> Self::F;
    fn iff(a: Self::F, b: Self::F) -> Self::F;
    fn modal(op: &Tok, a: Self::F) -> Option<Self::F>;
    fn from_prob(f: ProbFormula) -> Self::F;
}

struct Kb;
struct Lp;

impl Lang for Kb {
    type F = Formula;
    const PROB: bool = false;
    fn top() -> Formula {
        Formula::top()
    }
    fn bot() -> Formula {
        Formula::bot()
    }
    fn atom(a: String) -> Formula {
        Formula::atom(a)
    }
    fn not(a: Formula) -> Formula {
        Formula::not(a)
    }
    fn and(a: Formula, b: Formula) -> Formula {
        Formula::and(a, b)
    }
    fn or(a: Formula, b: Formula) -> Formula {
        Formula::or(a, b)
    }
    fn imp(a: Formula, b: Formula) -> Formula {
        Formula::imp(a, b)
    }
    fn iff(a: Formula, b: Formula) -> Formula {
        Formula::iff(a, b)
    }
    fn modal(op: &Tok, a: Formula) -> Option<Formula> {
        Some(match op {
            Tok::K => Formula::k(a),
            Tok::B => Formula::b(a),
            Tok::KDual => Formula::k_dual(a),
            Tok::BDual => Formula::b_dual(a),
            _ => return None,
        })
    }
    fn from_prob(_: ProbFormula) -> Formula {
        unreachable!("comparisons are not part of the knowledge/belief language")
    }
}

impl Lang for Lp {
    type F = ProbFormula;
    const PROB: bool = true;
    fn top() -> ProbFormula {
        ProbFormula::top()
    }
    fn bot() -> ProbFormula {
        ProbFormula::bot()
    }
    fn atom(a: String) -> ProbFormula {
        ProbFormula::atom(a)
    }
    fn not(a: ProbFormula) -> ProbFormula {
        ProbFormula::not(a)
    }
    fn and(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::and(a, b)
    }
    fn or(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::or(a, b)
    }
    fn imp(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::imp(a, b)
    }
    fn iff(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::iff(a, b)
    }
    fn modal(_: &Tok, _: ProbFormula) -> Option<ProbFormula> {
        None
    }
    fn from_prob(f: ProbFormula) -> ProbFormula {
        f
    }
}

struct Parser<'a, L> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    _lang: PhantomData<L>,
}

type PResult<T> = Result<T, SyntaxError>;

fn operand_expected(prob: bool) -> Vec<String> {
    let mut v: Vec<&str> = vec!["(", "atom", "false", "true", "~"];
    if prob {
        v.extend(["P", "rational"]);
    } else {
        v.extend(["<B>", "<K>", "B", "K"]);
    }
    let mut v: Vec<String> = v.into_iter().map(String::from).collect();
    v.sort();
    v
}

impl<'a, L: Lang> Parser<'a, L> {
    fn new(toks: &'a [(Tok, usize)], pos: usize) -> Self {
        Parser { toks, pos, _lang: PhantomData }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let mut e: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        e.sort();
        SyntaxError { offset: self.offset(), expected: e, found: self.peek().describe() }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[t.spelling()]))
        }
    }

    fn formula(&mut self) -> PResult<L::F> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                Ok(L::imp(lhs, self.formula()?))
            }
            Tok::DArrow => {
                self.bump();
                Ok(L::iff(lhs, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> PResult<L::F> {
        let mut x = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            x = L::or(x, self.conjunction()?);
        }
        Ok(x)
    }

    fn conjunction(&mut self) -> PResult<L::F> {
        let mut x = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            x = L::and(x, self.unary()?);
        }
        Ok(x)
    }

    fn unary(&mut self) -> PResult<L::F> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(L::not(self.unary()?))
            }
            op @ (Tok::K | Tok::B | Tok::KDual | Tok::BDual) if !L::PROB => {
                self.bump();
                let a = self.unary()?;
                Ok(L::modal(&op, a).expect("modal operators exist in this language"))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<L::F> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(L::top())
            }
            Tok::False => {
                self.bump();
                Ok(L::bot())
            }
            Tok::Atom(a) => {
                self.bump();
                Ok(L::atom(a))
            }
            Tok::LParen if L::PROB => {
                // `(` opens either a parenthesized formula or a term.
                let start = self.pos;
                match self.comparison() {
                    Ok(f) => Ok(L::from_prob(f)),
                    Err(e1) => {
                        self.pos = start;
                        match self.parenthesized() {
                            Ok(f) => Ok(f),
                            Err(e2) => Err(if e1.offset > e2.offset { e1 } else { e2 }),
                        }
                    }
                }
            }
            Tok::LParen => self.parenthesized(),
            Tok::Num(_) | Tok::P if L::PROB => Ok(L::from_prob(self.comparison()?)),
            _ => Err(SyntaxError {
                offset: self.offset(),
                expected: operand_expected(L::PROB),
                found: self.peek().describe(),
            }),
        }
    }

    fn parenthesized(&mut self) -> PResult<L::F> {
        self.expect(Tok::LParen)?;
        let f = self.formula()?;
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    fn comparison(&mut self) -> PResult<ProbFormula> {
        let t = self.term()?;
        let rel = self.peek().clone();
        let build: fn(Term, Term) -> ProbFormula = match rel {
            Tok::Ge => ProbFormula::ge,
            Tok::Le => ProbFormula::le,
            Tok::Gt => ProbFormula::gt,
            Tok::Lt => ProbFormula::lt,
            Tok::Eq => ProbFormula::eq,
            _ => return Err(self.error(&["+", "<", "<=", "=", ">", ">="])),
        };
        self.bump();
        let s = self.term()?;
        Ok(build(t, s))
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.term_atom()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            t = Term::sum(t, self.term_atom()?);
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                if *self.peek() == Tok::Star {
                    self.bump();
                    Ok(Term::Scaled(q, self.prob_application()?))
                } else {
                    Ok(Term::Const(q))
                }
            }
            Tok::P => Ok(Term::prob(self.prob_application()?)),
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.error(&["(", "P", "rational"])),
        }
    }

    /// `P ( φ )`, with `φ` in the probability language.
    fn prob_application(&mut self) -> PResult<ProbFormula> {
        self.expect(Tok::P)?;
        self.expect(Tok::LParen)?;
        let mut inner: Parser<'a, Lp> = Parser::new(self.toks, self.pos);
        let f = inner.formula()?;
        self.pos = inner.pos;
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            let mut ops = vec!["&", "->", "<->", "|", "end of input"];
            if self.pos > 0 {
                ops.push(")");
            }
            Err(self.error(&ops))
        }
    }
}

fn run<L: Lang>(text: &str) -> PResult<L::F> {
    let toks = lex(text)?;
    let mut p: Parser<L> = Parser::new(&toks, 0);
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parse a knowledge/belief formula.
pub fn parse_kb(text: &str) -> Result<Formula, SyntaxError> {
    run::<Kb>(text)
}

/// Parse a formula of the linear-probability language.
pub fn parse_l(text: &str) -> Result<ProbFormula, SyntaxError> {
    run::<Lp>(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_operand_offset() {
        let e = parse_kb("B B").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.expected.contains(&"atom".to_string()));
    }

    #[test]
    fn precedence() {
        let a = |s: &str| Formula::atom(s);
        assert_eq!(
            parse_kb("p & q | r -> s").unwrap(),
            Formula::imp(Formula::or(Formula::and(a("p"), a("q")), a("r")), a("s"))
        );
        assert_eq!(parse_kb("p -> q -> r").unwrap(), Formula::imp(a("p"), Formula::imp(a("q"), a("r"))));
        assert_eq!(parse_kb("~K p & B q").unwrap(), Formula::and(Formula::not(Formula::k(a("p"))), Formula::b(a("q"))));
        assert_eq!(parse_kb("p & q & r").unwrap(), Formula::and(Formula::and(a("p"), a("q")), a("r")));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_kb("p &").unwrap_err().offset, 3);
        assert_eq!(parse_kb("(p").unwrap_err().offset, 2);
        assert_eq!(parse_kb("p q").unwrap_err().offset, 2);
        assert_eq!(parse_kb("p $ q").unwrap_err().offset, 2);
        assert_eq!(parse_kb("P(p) >= 0").unwrap_err().offset, 0);
        assert!(parse_l("K p").is_err());
        assert!(parse_l("P(p) >=").is_err());
    }

    #[test]
    fn l_parentheses() {
        let a = parse_l("(P(p) + 1) >= 0").unwrap();
        let b = parse_l("(P(p) >= 1/2)").unwrap();
        assert!(matches!(a.node(), super::super::PNode::GeqZero(_)));
        assert_eq!(b, parse_l("P(p) >= 1/2").unwrap());
        assert_eq!(parse_l("P(h1)+P(h3) >= 2/3").unwrap(), parse_l("1*P(h1) + 1*P(h3) >= 2/3").unwrap());
        assert!(parse_l("P(P(p) > 1/2) = 1").is_ok());
    }
}
