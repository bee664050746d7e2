//! Comparative probability: realizability of `X ≺ Y`, `X ⪯ Y`, `X ≈ Y`
//! statements by a measure, and the de Finetti conditions on full tables.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::lp::{lp_feasible, LPResult, LinearConstraint};
use crate::event::EventSet;
use crate::model::Frame;
use crate::neighborhood::{PropertyReport, Verdict, Witness};
use crate::rational::Rational;

/// Largest universe whose full comparison table is built.
pub const MAX_TABLE_UNIVERSE: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComparativeError {
    #[error("universe of {0} elements exceeds the table limit of {MAX_TABLE_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    /// `≺`
    Strict,
    /// `⪯`
    Weak,
    /// `≈`
    Equiv,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Strict => "<",
            Comparison::Weak => "<=",
            Comparison::Equiv => "~",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparativeRelation {
    pub universe: Vec<String>,
    pub statements: Vec<(EventSet, Comparison, EventSet)>,
}

impl ComparativeRelation {
    pub fn new(universe: Vec<String>) -> Self {
        ComparativeRelation { universe, statements: Vec::new() }
    }

    pub fn set(&self, names: &[&str]) -> EventSet {
        EventSet::from_indices(
            self.universe.len(),
            names.iter().map(|n| self.universe.iter().position(|u| u == n).expect("name in universe")),
        )
    }

    pub fn push(&mut self, x: &[&str], rel: Comparison, y: &[&str]) {
        let (x, y) = (self.set(x), self.set(y));
        self.statements.push((x, rel, y));
    }

    fn render_set(&self, s: &EventSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.universe[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parse statements, one per line: `{a,b} < {c}`, with `<`, `<=` or `~`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_statements(universe: Vec<String>, text: &str) -> Result<Self, ComparativeError> {
        let mut rel = ComparativeRelation::new(universe);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| ComparativeError::Parse { line: i + 1, msg };
            let (lhs, op, rhs) = ["<=", "<", "~"]
                .iter()
                .find_map(|op| {
                    let close = line.find('}')?;
                    let rest = line[close + 1..].trim_start();
                    rest.strip_prefix(op).map(|r| (&line[..=close], *op, r.trim()))
                })
                .ok_or_else(|| err("expected `{...} <|<=|~ {...}`".into()))?;
            let parse_set = |s: &str| -> Result<EventSet, ComparativeError> {
                let inner = s
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| err(format!("expected a braced set, found `{s}`")))?;
                let mut out = EventSet::empty(rel.universe.len());
                for name in inner.split([',', ' ']).map(str::trim).filter(|n| !n.is_empty()) {
                    let k = rel
                        .universe
                        .iter()
                        .position(|u| u == name)
                        .ok_or_else(|| err(format!("`{name}` is not in the universe")))?;
                    out.insert(k);
                }
                Ok(out)
            };
            let c = match op {
                "<" => Comparison::Strict,
                "<=" => Comparison::Weak,
                _ => Comparison::Equiv,
            };
            let (x, y) = (parse_set(lhs)?, parse_set(rhs)?);
            rel.statements.push((x, c, y));
        }
        Ok(rel)
    }
}

impl fmt::Display for ComparativeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, c, y) in &self.statements {
            writeln!(f, "{} {} {}", self.render_set(x), c.symbol(), self.render_set(y))?;
        }
        Ok(())
    }
}

impl FromStr for Comparison {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "<" => Ok(Comparison::Strict),
            "<=" => Ok(Comparison::Weak),
            "~" => Ok(Comparison::Equiv),
            _ => Err(format!("unknown comparison `{s}`")),
        }
    }
}

/// Measures `p_w ≥ 0` with `Σ p_w = 1` realizing every statement; with
/// `full_support` each `p_w > 0`.
pub fn realize_comparative(rel: &ComparativeRelation, full_support: bool) -> LPResult {
    let var = |i: usize| rel.universe[i].clone();
    let diff = |x: &EventSet, y: &EventSet| -> Vec<(String, Rational)> {
        y.iter()
            .map(|i| (var(i), Rational::one()))
            .chain(x.iter().map(|i| (var(i), Rational::from_integer(-1))))
            .collect()
    };
    let mut cons = vec![LinearConstraint::eq(LinearConstraint::sum_of(rel.universe.iter().cloned()), Rational::one())];
    if !full_support {
        cons.extend(
            rel.universe.iter().map(|v| LinearConstraint::ge([(v.clone(), Rational::one())], Rational::zero())),
        );
    }
    for (x, c, y) in &rel.statements {
        let d = diff(x, y);
        cons.push(match c {
            Comparison::Strict => LinearConstraint::gt(d, Rational::zero()),
            Comparison::Weak => LinearConstraint::ge(d, Rational::zero()),
            Comparison::Equiv => LinearConstraint::eq(d, Rational::zero()),
        });
    }
    let pos: Vec<String> = if full_support { rel.universe.clone() } else { Vec::new() };
    lp_feasible(&cons, &pos)
}

/// A total table `X ⪯ Y` over every pair of subsets, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonTable {
    pub universe: Vec<String>,
    le: Vec<Vec<bool>>,
}

impl ComparisonTable {
    pub fn from_fn(universe: Vec<String>, mut le: impl FnMut(u64, u64) -> bool) -> Result<Self, ComparativeError> {
        let n = universe.len();
        if n > MAX_TABLE_UNIVERSE {
            return Err(ComparativeError::UniverseTooLarge(n));
        }
        let size = 1u64 << n;
        let le = (0..size).map(|x| (0..size).map(|y| le(x, y)).collect()).collect();
        Ok(ComparisonTable { universe, le })
    }

    /// `X ⪯ Y` iff `P(X) ≤ P(Y)`.
    pub fn from_measure(universe: Vec<String>, weights: &[Rational]) -> Result<Self, ComparativeError> {
        let mass = |x: u64| -> Rational { (0..weights.len()).filter(|i| x >> i & 1 == 1).map(|i| &weights[i]).sum() };
        Self::from_fn(universe, |x, y| mass(x) <= mass(y))
    }

    pub fn le(&self, x: u64, y: u64) -> bool {
        self.le[x as usize][y as usize]
    }

    pub fn lt(&self, x: u64, y: u64) -> bool {
        self.le(x, y) && !self.le(y, x)
    }

    fn set(&self, x: u64) -> EventSet {
        EventSet::from_mask(self.universe.len(), x)
    }

    /// The strict statements `X ≺ Y` of the table, one per pair of disjoint
    /// differences (the table only matters through `X−Y` against `Y−X`
    /// once it is additive).
    pub fn strict_part(&self) -> ComparativeRelation {
        let size = 1u64 << self.universe.len();
        let mut rel = ComparativeRelation::new(self.universe.clone());
        for x in 0..size {
            for y in 0..size {
                if x & y == 0 && self.lt(x, y) {
                    rel.statements.push((self.set(x), Comparison::Strict, self.set(y)));
                }
            }
        }
        rel
    }

    /// A single-cell frame over the universe, for rendering reports.
    pub fn frame(&self) -> Frame {
        let names: Vec<&str> = self.universe.iter().map(|s| s.as_str()).collect();
        Frame::from_names(&names, &[&names], &[]).expect("distinct names")
    }
}

/// The five de Finetti conditions: `W ⋠ ∅`; `∅ ⪯ X`; totality;
/// transitivity; and `X ⪯ Y ⟺ X∪Z ⪯ Y∪Z` for `Z` disjoint from `X∪Y`.
pub fn check_definetti(t: &ComparisonTable) -> PropertyReport {
    let size = 1u64 << t.universe.len();
    let full = size - 1;
    let fail = |sets: &[u64]| {
        Verdict::Fails(Witness::Lists { cell: 0, xs: sets.iter().map(|&s| t.set(s)).collect(), ys: Vec::new() })
    };
    let mut r = PropertyReport::default();
    r.entries.push(("nontrivial".into(), if t.le(full, 0) { fail(&[full, 0]) } else { Verdict::Holds }));
    let nonneg = (0..size).find(|&x| !t.le(0, x));
    r.entries.push(("nonnegative".into(), nonneg.map_or(Verdict::Holds, |x| fail(&[0, x]))));
    let total = (0..size).flat_map(|x| (0..size).map(move |y| (x, y))).find(|&(x, y)| !t.le(x, y) && !t.le(y, x));
    r.entries.push(("total".into(), total.map_or(Verdict::Holds, |(x, y)| fail(&[x, y]))));
    let trans = (0..size).find_map(|x| {
        (0..size)
            .filter(|&y| t.le(x, y))
            .find_map(|y| (0..size).find(|&z| t.le(y, z) && !t.le(x, z)).map(|z| (x, y, z)))
    });
    r.entries.push(("transitive".into(), trans.map_or(Verdict::Holds, |(x, y, z)| fail(&[x, y, z]))));
    let additive = (0..size).find_map(|x| {
        (0..size).find_map(|y| {
            let rest = full & !(x | y);
            // submasks of rest, including 0
            let mut z = rest;
            loop {
                if t.le(x, y) != t.le(x | z, y | z) {
                    return Some((x, y, z));
                }
                if z == 0 {
                    return None;
                }
                z = (z - 1) & rest;
            }
        })
    });
    r.entries.push(("additive".into(), additive.map_or(Verdict::Holds, |(x, y, z)| fail(&[x, y, z]))));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn small_relations() {
        let mut rel = ComparativeRelation::new(names("a b"));
        assert!(realize_comparative(&rel, false).is_feasible());
        rel.push(&["a"], Comparison::Strict, &["a", "b"]);
        let a = realize_comparative(&rel, false);
        assert!(a.assignment().unwrap()["b"].is_positive());
        rel.push(&["a", "b"], Comparison::Weak, &["a"]);
        assert_eq!(realize_comparative(&rel, false), LPResult::Infeasible);
    }

    #[test]
    fn statements_round_trip() {
        let text = "{c} < {a,b}\n# note\n{b,d} <= {a, c}\n{} ~ {e}\n";
        let rel = ComparativeRelation::parse_statements(names("a b c d e"), text).unwrap();
        assert_eq!(rel.statements.len(), 3);
        assert_eq!(rel.to_string(), "{c} < {a,b}\n{b,d} <= {a,c}\n{} ~ {e}\n");
        let again = ComparativeRelation::parse_statements(names("a b c d e"), &rel.to_string()).unwrap();
        assert_eq!(again, rel);
        assert!(matches!(
            ComparativeRelation::parse_statements(names("a"), "{z} < {a}"),
            Err(ComparativeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn definetti_on_measures_and_failures() {
        let w = vec![Rational::new(1, 2), Rational::new(1, 3), Rational::new(1, 6)];
        let t = ComparisonTable::from_measure(names("a b c"), &w).unwrap();
        assert!(check_definetti(&t).all_hold());
        let bad = ComparisonTable::from_fn(names("a b"), |_, _| true).unwrap();
        let r = check_definetti(&bad);
        assert!(!r.get("nontrivial").unwrap().holds());
        assert!(r.get("additive").unwrap().holds());
        assert!(matches!(
            ComparisonTable::from_fn(names("a b c d e f"), |_, _| true),
            Err(ComparativeError::UniverseTooLarge(6))
        ));
    }
}
