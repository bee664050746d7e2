//! Printing in the concrete syntax accepted by the parser.
//!
//! Derived connectives are recognized by shape and printed with their
//! sugar; the output re-parses to the identical tree.

use std::fmt::{self, Display, Write};

use super::{Formula, Node, PNode, ProbFormula, Term};

const IMP: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

trait Printable: Sized {
    fn as_imp(&self) -> Option<(&Self, &Self)>;
    fn as_iff(&self) -> Option<(&Self, &Self)>;
    fn as_or(&self) -> Option<(&Self, &Self)>;
    fn is_bot(&self) -> bool;
    /// Language-specific nodes: returns `(precedence, rendering)` or None
    /// for the shared boolean nodes.
    fn special(&self, out: &mut String) -> Option<u8>;
    fn shared(&self) -> Shared<'_, Self>;
}

enum Shared<'a, F> {
    Top,
    Atom(&'a str),
    Not(&'a F),
    And(&'a F, &'a F),
    Other,
}

fn render<F: Printable>(f: &F, out: &mut String) -> u8 {
    if f.is_bot() {
        out.push_str("false");
        return UNARY;
    }
    if let Some((a, b)) = f.as_iff() {
        wrap(a, OR, out);
        out.push_str(" <-> ");
        wrap(b, IMP, out);
        return IMP;
    }
    if let Some((a, b)) = f.as_imp() {
        wrap(a, OR, out);
        out.push_str(" -> ");
        wrap(b, IMP, out);
        return IMP;
    }
    if let Some((a, b)) = f.as_or() {
        wrap(a, OR, out);
        out.push_str(" | ");
        wrap(b, AND, out);
        return OR;
    }
    if let Some(level) = f.special(out) {
        return level;
    }
    match f.shared() {
        Shared::Top => out.push_str("true"),
        Shared::Atom(a) => out.push_str(a),
        Shared::Not(a) => {
            out.push('~');
            wrap(a, UNARY, out);
        }
        Shared::And(a, b) => {
            wrap(a, AND, out);
            out.push_str(" & ");
            wrap(b, UNARY, out);
            return AND;
        }
        Shared::Other => unreachable!("special() handles the remaining nodes"),
    }
    UNARY
}

/// Render `f`, parenthesized if it binds looser than `min`.
fn wrap<F: Printable>(f: &F, min: u8, out: &mut String) {
    let mut s = String::new();
    let level = render(f, &mut s);
    if level < min {
        out.push('(');
        out.push_str(&s);
        out.push(')');
    } else {
        out.push_str(&s);
    }
}

impl Printable for Formula {
    fn as_imp(&self) -> Option<(&Self, &Self)> {
        Formula::as_imp(self)
    }
    fn as_iff(&self) -> Option<(&Self, &Self)> {
        Formula::as_iff(self)
    }
    fn as_or(&self) -> Option<(&Self, &Self)> {
        Formula::as_or(self)
    }
    fn is_bot(&self) -> bool {
        Formula::is_bot(self)
    }
    fn special(&self, out: &mut String) -> Option<u8> {
        let (op, arg) = if let Some(a) = self.as_k_dual() {
            ("<K> ", a)
        } else if let Some(a) = self.as_b_dual() {
            ("<B> ", a)
        } else {
            match self.node() {
                Node::K(a) => ("K ", a),
                Node::B(a) => ("B ", a),
                _ => return None,
            }
        };
        out.push_str(op);
        wrap(arg, UNARY, out);
        Some(UNARY)
    }
    fn shared(&self) -> Shared<'_, Self> {
        match self.node() {
            Node::Top => Shared::Top,
            Node::Atom(a) => Shared::Atom(a),
            Node::Not(a) => Shared::Not(a),
            Node::And(a, b) => Shared::And(a, b),
            _ => Shared::Other,
        }
    }
}

impl Printable for ProbFormula {
    fn as_imp(&self) -> Option<(&Self, &Self)> {
        ProbFormula::as_imp(self)
    }
    fn as_iff(&self) -> Option<(&Self, &Self)> {
        ProbFormula::as_iff(self)
    }
    fn as_or(&self) -> Option<(&Self, &Self)> {
        ProbFormula::as_or(self)
    }
    fn is_bot(&self) -> bool {
        ProbFormula::is_bot(self)
    }
    fn special(&self, out: &mut String) -> Option<u8> {
        match self.node() {
            PNode::GeqZero(t) => {
                write!(out, "{t} >= 0").unwrap();
                // a comparison is an operand, but `~t >= 0` would not re-lex
                // as intended after `~`, so callers wrap it like a binary node
                Some(AND)
            }
            _ => None,
        }
    }
    fn shared(&self) -> Shared<'_, Self> {
        match self.node() {
            PNode::Top => Shared::Top,
            PNode::Atom(a) => Shared::Atom(a),
            PNode::Not(a) => Shared::Not(a),
            PNode::And(a, b) => Shared::And(a, b),
            PNode::GeqZero(_) => Shared::Other,
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s);
        f.write_str(&s)
    }
}

impl Display for ProbFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s);
        f.write_str(&s)
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(q) => write!(f, "{q}"),
            Term::Scaled(q, phi) => write!(f, "{q}*P({phi})"),
            Term::Sum(a, b) => match **b {
                Term::Sum(..) => write!(f, "{a} + ({b})"),
                _ => write!(f, "{a} + {b}"),
            },
        }
    }
}
