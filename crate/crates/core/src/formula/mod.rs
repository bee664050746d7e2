//! The two object languages.
//!
//! [`Formula`] is the knowledge/belief language over `⊤, p, ¬, ∧, K, B`.
//! [`ProbFormula`] is the linear-probability language whose atomic
//! comparisons are `t ≥ 0` for terms built from constants and `q·P(φ)`.
//! Derived connectives are expanded when constructed, so structural
//! equality is the only notion of formula identity.

mod parse;
mod print;
mod segerberg;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::rational::Rational;

pub use parse::{parse_kb, parse_l, SyntaxError};
pub use segerberg::{scott_instance, segerberg_expand, ExpansionTooLarge, SegerbergMode, EXPANSION_GUARD};

/// A knowledge/belief formula. Cheap to clone; subterms are shared.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<Node>);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Top,
    Atom(String),
    Not(Formula),
    And(Formula, Formula),
    K(Formula),
    B(Formula),
}

impl Formula {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn top() -> Formula {
        Formula(Arc::new(Node::Top))
    }

    pub fn atom(name: impl Into<String>) -> Formula {
        Formula(Arc::new(Node::Atom(name.into())))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula(Arc::new(Node::Not(a)))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula(Arc::new(Node::And(a, b)))
    }

    pub fn k(a: Formula) -> Formula {
        Formula(Arc::new(Node::K(a)))
    }

    pub fn b(a: Formula) -> Formula {
        Formula(Arc::new(Node::B(a)))
    }

    /// `⊥ := ¬⊤`
    pub fn bot() -> Formula {
        Formula::not(Formula::top())
    }

    /// `a ∨ b := ¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a → b := ¬a ∨ b`
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    /// `Ǩa := ¬K¬a`
    pub fn k_dual(a: Formula) -> Formula {
        Formula::not(Formula::k(Formula::not(a)))
    }

    /// `B̌a := ¬B¬a`
    pub fn b_dual(a: Formula) -> Formula {
        Formula::not(Formula::b(Formula::not(a)))
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bot)
    }

    /// `(a, b)` if this is `a → b`.
    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        if let Node::Not(x) = self.node() {
            if let Node::And(l, r) = x.node() {
                if let (Node::Not(l1), Node::Not(b)) = (l.node(), r.node()) {
                    if let Node::Not(a) = l1.node() {
                        return Some((a, b));
                    }
                }
            }
        }
        None
    }

    /// `(a, b)` if this is `a ∨ b`.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        if let Node::Not(x) = self.node() {
            if let Node::And(l, r) = x.node() {
                if let (Node::Not(a), Node::Not(b)) = (l.node(), r.node()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `(a, b)` if this is `a ↔ b`.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        if let Node::And(l, r) = self.node() {
            if let (Some((a, b)), Some((b2, a2))) = (l.as_imp(), r.as_imp()) {
                if a == a2 && b == b2 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_bot(&self) -> bool {
        matches!(self.node(), Node::Not(x) if matches!(x.node(), Node::Top))
    }

    /// `a` if this is `Ǩa`.
    pub fn as_k_dual(&self) -> Option<&Formula> {
        match self.node() {
            Node::Not(x) => match x.node() {
                Node::K(y) => match y.node() {
                    Node::Not(a) => Some(a),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `a` if this is `B̌a`.
    pub fn as_b_dual(&self) -> Option<&Formula> {
        match self.node() {
            Node::Not(x) => match x.node() {
                Node::B(y) => match y.node() {
                    Node::Not(a) => Some(a),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Top => {}
            Node::Atom(a) => {
                out.insert(a.clone());
            }
            Node::Not(a) | Node::K(a) | Node::B(a) => a.collect_atoms(out),
            Node::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Top | Node::Atom(_) => 1,
            Node::Not(a) | Node::K(a) | Node::B(a) => 1 + a.size(),
            Node::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Nesting depth of the primitive tree.
    pub fn depth(&self) -> usize {
        match self.node() {
            Node::Top | Node::Atom(_) => 0,
            Node::Not(a) | Node::K(a) | Node::B(a) => 1 + a.depth(),
            Node::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl FromStr for Formula {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_kb(s)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A formula of the linear-probability language.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbFormula(Arc<PNode>);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PNode {
    Top,
    Atom(String),
    Not(ProbFormula),
    And(ProbFormula, ProbFormula),
    GeqZero(Term),
}

/// `q | q·P(φ) | t + t`
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Const(Rational),
    Scaled(Rational, ProbFormula),
    Sum(Box<Term>, Box<Term>),
}

impl Term {
    /// `1·P(φ)`
    pub fn prob(f: ProbFormula) -> Term {
        Term::Scaled(Rational::one(), f)
    }

    pub fn sum(a: Term, b: Term) -> Term {
        Term::Sum(Box::new(a), Box::new(b))
    }

    /// Pointwise negation, preserving shape.
    pub fn negated(&self) -> Term {
        match self {
            Term::Const(q) => Term::Const(-q),
            Term::Scaled(q, f) => Term::Scaled(-q, f.clone()),
            Term::Sum(a, b) => Term::sum(a.negated(), b.negated()),
        }
    }

    fn is_literal_zero(&self) -> bool {
        matches!(self, Term::Const(q) if q.is_zero())
    }
}

impl ProbFormula {
    pub fn node(&self) -> &PNode {
        &self.0
    }

    pub fn top() -> ProbFormula {
        ProbFormula(Arc::new(PNode::Top))
    }

    pub fn atom(name: impl Into<String>) -> ProbFormula {
        ProbFormula(Arc::new(PNode::Atom(name.into())))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: ProbFormula) -> ProbFormula {
        ProbFormula(Arc::new(PNode::Not(a)))
    }

    pub fn and(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula(Arc::new(PNode::And(a, b)))
    }

    pub fn geq_zero(t: Term) -> ProbFormula {
        ProbFormula(Arc::new(PNode::GeqZero(t)))
    }

    pub fn bot() -> ProbFormula {
        ProbFormula::not(ProbFormula::top())
    }

    pub fn or(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::not(ProbFormula::and(ProbFormula::not(a), ProbFormula::not(b)))
    }

    pub fn imp(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::or(ProbFormula::not(a), b)
    }

    pub fn iff(a: ProbFormula, b: ProbFormula) -> ProbFormula {
        ProbFormula::and(ProbFormula::imp(a.clone(), b.clone()), ProbFormula::imp(b, a))
    }

    /// `t ≥ s`, written `t + (-1)s ≥ 0` unless `s` is the literal 0.
    pub fn ge(t: Term, s: Term) -> ProbFormula {
        if s.is_literal_zero() {
            ProbFormula::geq_zero(t)
        } else {
            ProbFormula::geq_zero(Term::sum(t, s.negated()))
        }
    }

    /// `t ≤ s := s ≥ t`
    pub fn le(t: Term, s: Term) -> ProbFormula {
        ProbFormula::ge(s, t)
    }

    /// `t > s := ¬(s ≥ t)`
    pub fn gt(t: Term, s: Term) -> ProbFormula {
        ProbFormula::not(ProbFormula::ge(s, t))
    }

    /// `t < s := ¬(t ≥ s)`
    pub fn lt(t: Term, s: Term) -> ProbFormula {
        ProbFormula::not(ProbFormula::ge(t, s))
    }

    /// `t = s := (t ≥ s) ∧ (s ≥ t)`
    pub fn eq(t: Term, s: Term) -> ProbFormula {
        ProbFormula::and(ProbFormula::ge(t.clone(), s.clone()), ProbFormula::ge(s, t))
    }

    pub fn as_imp(&self) -> Option<(&ProbFormula, &ProbFormula)> {
        if let PNode::Not(x) = self.node() {
            if let PNode::And(l, r) = x.node() {
                if let (PNode::Not(l1), PNode::Not(b)) = (l.node(), r.node()) {
                    if let PNode::Not(a) = l1.node() {
                        return Some((a, b));
                    }
                }
            }
        }
        None
    }

    pub fn as_or(&self) -> Option<(&ProbFormula, &ProbFormula)> {
        if let PNode::Not(x) = self.node() {
            if let PNode::And(l, r) = x.node() {
                if let (PNode::Not(a), PNode::Not(b)) = (l.node(), r.node()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn as_iff(&self) -> Option<(&ProbFormula, &ProbFormula)> {
        if let PNode::And(l, r) = self.node() {
            if let (Some((a, b)), Some((b2, a2))) = (l.as_imp(), r.as_imp()) {
                if a == a2 && b == b2 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_bot(&self) -> bool {
        matches!(self.node(), PNode::Not(x) if matches!(x.node(), PNode::Top))
    }
}

impl FromStr for ProbFormula {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_l(s)
    }
}

impl fmt::Debug for ProbFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("threshold {0} is not strictly between 0 and 1")]
    OutOfRange(Rational),
    #[error(transparent)]
    Parse(#[from] crate::rational::ParseRationalError),
}

/// A rational strictly between 0 and 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Threshold(Rational);

impl Threshold {
    pub fn new(c: Rational) -> Result<Threshold, ThresholdError> {
        if c.is_positive() && c < Rational::one() {
            Ok(Threshold(c))
        } else {
            Err(ThresholdError::OutOfRange(c))
        }
    }

    /// Shorthand for literals known to be in range.
    pub fn of(num: i64, den: i64) -> Threshold {
        Threshold::new(Rational::new(num, den)).expect("threshold literal out of range")
    }

    pub fn half() -> Threshold {
        Threshold::of(1, 2)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl FromStr for Threshold {
    type Err = ThresholdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Threshold::new(s.parse()?)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `φ^c`: K and B become statements about `P(φ^c)`.
pub fn translate(phi: &Formula, c: &Threshold) -> ProbFormula {
    match phi.node() {
        Node::Top => ProbFormula::top(),
        Node::Atom(a) => ProbFormula::atom(a.clone()),
        Node::Not(a) => ProbFormula::not(translate(a, c)),
        Node::And(a, b) => ProbFormula::and(translate(a, c), translate(b, c)),
        Node::K(a) => ProbFormula::eq(Term::prob(translate(a, c)), Term::Const(Rational::one())),
        Node::B(a) => ProbFormula::gt(Term::prob(translate(a, c)), Term::Const(c.value().clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_kb(s).unwrap()
    }

    #[test]
    fn desugaring() {
        let f = p("K (p -> q)");
        assert_eq!(f, Formula::k(Formula::or(Formula::not(Formula::atom("p")), Formula::atom("q"))));
        assert_eq!(p("false"), Formula::not(Formula::top()));
        assert_eq!(p("<B> p"), Formula::not(Formula::b(Formula::not(Formula::atom("p")))));
    }

    #[test]
    fn l_grammar_case() {
        let f = parse_l("2/3*P(p) + -1/3 >= 0").unwrap();
        let want = ProbFormula::geq_zero(Term::sum(
            Term::Scaled(Rational::new(2, 3), ProbFormula::atom("p")),
            Term::Const(Rational::new(-1, 3)),
        ));
        assert_eq!(f, want);
    }

    #[test]
    fn translation_cases() {
        let half = Threshold::half();
        assert_eq!(translate(&p("B p"), &half), parse_l("P(p) > 1/2").unwrap());
        for c in [Threshold::half(), Threshold::of(2, 3)] {
            assert_eq!(translate(&p("K p"), &c), parse_l("P(p) = 1").unwrap());
        }
        assert_eq!(translate(&p("~(p & B q)"), &Threshold::of(2, 3)), parse_l("~(p & P(q) > 2/3)").unwrap());
    }

    #[test]
    fn threshold_range() {
        assert!(Threshold::new(Rational::zero()).is_err());
        assert!(Threshold::new(Rational::one()).is_err());
        assert!("3/5".parse::<Threshold>().is_ok());
    }

    #[test]
    fn sugar_views() {
        let a = Formula::atom("a");
        let b = Formula::atom("b");
        assert_eq!(Formula::imp(a.clone(), b.clone()).as_imp(), Some((&a, &b)));
        assert_eq!(Formula::iff(a.clone(), b.clone()).as_iff(), Some((&a, &b)));
        assert_eq!(Formula::or(a.clone(), b.clone()).as_or(), Some((&a, &b)));
        assert!(Formula::bot().is_bot());
    }
}
