//! Hilbert-style derivations in KB, KB½ and KB½⁻.
//!
//! Axiom lines name a scheme and a substitution for its metavariables; the
//! checker rebuilds the instance and compares it with the line verbatim.
//! Classical reasoning goes through a fixed basis:
//!
//! | id  | scheme                               |
//! |-----|--------------------------------------|
//! | CL1 | `φ → (ψ → φ)`                        |
//! | CL2 | `(φ → (ψ → χ)) → ((φ → ψ) → (φ → χ))`|
//! | CL3 | `(¬φ → ¬ψ) → (ψ → φ)`                |
//! | CL4 | `(φ ∧ ψ) → φ`                        |
//! | CL5 | `(φ ∧ ψ) → ψ`                        |
//! | CL6 | `φ → (ψ → (φ ∧ ψ))`                  |
//! | CL7 | `⊤`                                  |
//!
//! Knowledge is S5 via K, T, 4 and 5 with necessitation.

mod builder;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{parse_kb, scott_instance, Formula, Node, EXPANSION_GUARD};

pub use builder::ProofBuilder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Cl(u8),
    Ks5K,
    Ks5T,
    Ks5Four,
    Ks5Five,
    Bf,
    N,
    Ap,
    An,
    Kbm,
    D,
    Sc,
    Scott(usize),
    /// Any truth-table tautology; accepted only when explicitly enabled.
    Taut,
}

impl SchemeId {
    pub const CL_BASIS: [SchemeId; 7] = [
        SchemeId::Cl(1),
        SchemeId::Cl(2),
        SchemeId::Cl(3),
        SchemeId::Cl(4),
        SchemeId::Cl(5),
        SchemeId::Cl(6),
        SchemeId::Cl(7),
    ];

    /// The schemes of the base calculus, without the open-ended Scott family.
    pub const KB_SCHEMES: [SchemeId; 16] = [
        SchemeId::Cl(1),
        SchemeId::Cl(2),
        SchemeId::Cl(3),
        SchemeId::Cl(4),
        SchemeId::Cl(5),
        SchemeId::Cl(6),
        SchemeId::Cl(7),
        SchemeId::Ks5K,
        SchemeId::Ks5T,
        SchemeId::Ks5Four,
        SchemeId::Ks5Five,
        SchemeId::Bf,
        SchemeId::N,
        SchemeId::Ap,
        SchemeId::An,
        SchemeId::Kbm,
    ];

    /// Metavariables of the template, in display order.
    pub fn metavariables(self) -> Vec<String> {
        let names: &[&str] = match self {
            SchemeId::Cl(2) => &["phi", "psi", "chi"],
            SchemeId::Cl(1) | SchemeId::Cl(3) | SchemeId::Cl(4) | SchemeId::Cl(5) | SchemeId::Cl(6) => &["phi", "psi"],
            SchemeId::Ks5K | SchemeId::Kbm | SchemeId::Sc => &["phi", "psi"],
            SchemeId::Ks5T | SchemeId::Ks5Four | SchemeId::Ks5Five | SchemeId::Ap | SchemeId::An | SchemeId::D => {
                &["phi"]
            }
            SchemeId::Scott(m) => {
                return (1..=m).map(|i| format!("phi{i}")).chain((1..=m).map(|i| format!("psi{i}"))).collect()
            }
            _ => &[],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    /// The scheme with metavariables as `$name` atoms, or None for `Taut`
    /// and out-of-range ids.
    pub fn template(self) -> Option<Formula> {
        let v = |s: &str| Formula::atom(format!("${s}"));
        let (phi, psi, chi) = (v("phi"), v("psi"), v("chi"));
        let imp = Formula::imp;
        let k = Formula::k;
        let b = Formula::b;
        let not = Formula::not;
        Some(match self {
            SchemeId::Cl(1) => imp(phi.clone(), imp(psi, phi)),
            SchemeId::Cl(2) => {
                imp(imp(phi.clone(), imp(psi.clone(), chi.clone())), imp(imp(phi.clone(), psi), imp(phi, chi)))
            }
            SchemeId::Cl(3) => imp(imp(not(phi.clone()), not(psi.clone())), imp(psi, phi)),
            SchemeId::Cl(4) => imp(Formula::and(phi.clone(), psi), phi),
            SchemeId::Cl(5) => imp(Formula::and(phi, psi.clone()), psi),
            SchemeId::Cl(6) => imp(phi.clone(), imp(psi.clone(), Formula::and(phi, psi))),
            SchemeId::Cl(7) => Formula::top(),
            SchemeId::Cl(_) => return None,
            SchemeId::Ks5K => imp(k(imp(phi.clone(), psi.clone())), imp(k(phi), k(psi))),
            SchemeId::Ks5T => imp(k(phi.clone()), phi),
            SchemeId::Ks5Four => imp(k(phi.clone()), k(k(phi))),
            SchemeId::Ks5Five => imp(not(k(phi.clone())), k(not(k(phi)))),
            SchemeId::Bf => not(b(Formula::bot())),
            SchemeId::N => b(Formula::top()),
            SchemeId::Ap => imp(b(phi.clone()), k(b(phi))),
            SchemeId::An => imp(not(b(phi.clone())), k(not(b(phi)))),
            SchemeId::Kbm => imp(k(imp(phi.clone(), psi.clone())), imp(b(phi), b(psi))),
            SchemeId::D => imp(b(phi.clone()), Formula::b_dual(phi)),
            SchemeId::Sc => imp(
                Formula::and(
                    Formula::b_dual(phi.clone()),
                    Formula::k_dual(Formula::and(not(phi.clone()), psi.clone())),
                ),
                b(Formula::or(phi, psi)),
            ),
            SchemeId::Scott(m) => {
                if m == 0 || m > EXPANSION_GUARD {
                    return None;
                }
                let phis: Vec<Formula> = (1..=m).map(|i| v(&format!("phi{i}"))).collect();
                let psis: Vec<Formula> = (1..=m).map(|i| v(&format!("psi{i}"))).collect();
                scott_instance(&phis, &psis).expect("arity within guard")
            }
            SchemeId::Taut => return None,
        })
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeId::Cl(i) => write!(f, "CL{i}"),
            SchemeId::Ks5K => f.write_str("KS5_K"),
            SchemeId::Ks5T => f.write_str("KS5_T"),
            SchemeId::Ks5Four => f.write_str("KS5_4"),
            SchemeId::Ks5Five => f.write_str("KS5_5"),
            SchemeId::Bf => f.write_str("BF"),
            SchemeId::N => f.write_str("N"),
            SchemeId::Ap => f.write_str("Ap"),
            SchemeId::An => f.write_str("An"),
            SchemeId::Kbm => f.write_str("KBM"),
            SchemeId::D => f.write_str("D"),
            SchemeId::Sc => f.write_str("SC"),
            SchemeId::Scott(m) => write!(f, "Scott({m})"),
            SchemeId::Taut => f.write_str("TAUT"),
        }
    }
}

impl FromStr for SchemeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "KS5_K" => SchemeId::Ks5K,
            "KS5_T" => SchemeId::Ks5T,
            "KS5_4" => SchemeId::Ks5Four,
            "KS5_5" => SchemeId::Ks5Five,
            "BF" => SchemeId::Bf,
            "N" => SchemeId::N,
            "Ap" => SchemeId::Ap,
            "An" => SchemeId::An,
            "KBM" => SchemeId::Kbm,
            "D" => SchemeId::D,
            "SC" => SchemeId::Sc,
            "TAUT" => SchemeId::Taut,
            _ => {
                if let Some(i) = s.strip_prefix("CL").and_then(|d| d.parse::<u8>().ok()).filter(|i| (1..=7).contains(i))
                {
                    SchemeId::Cl(i)
                } else if let Some(m) = s
                    .strip_prefix("Scott(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&m| m >= 1)
                {
                    SchemeId::Scott(m)
                } else {
                    return Err(format!("unknown scheme `{s}`"));
                }
            }
        })
    }
}

pub type Substitution = BTreeMap<String, Formula>;

fn matches(pat: &Formula, f: &Formula, s: &mut Substitution) -> bool {
    match (pat.node(), f.node()) {
        (Node::Atom(name), _) if name.starts_with('$') => match s.get(&name[1..]) {
            Some(bound) => bound == f,
            None => {
                s.insert(name[1..].to_string(), f.clone());
                true
            }
        },
        (Node::Top, Node::Top) => true,
        (Node::Atom(a), Node::Atom(b)) => a == b,
        (Node::Not(a), Node::Not(b)) | (Node::K(a), Node::K(b)) | (Node::B(a), Node::B(b)) => matches(a, b, s),
        (Node::And(a1, a2), Node::And(b1, b2)) => matches(a1, b1, s) && matches(a2, b2, s),
        _ => false,
    }
}

/// Replace `$name` atoms by their images.
pub fn instantiate(pat: &Formula, s: &Substitution) -> Formula {
    match pat.node() {
        Node::Atom(name) if name.starts_with('$') => s.get(&name[1..]).cloned().unwrap_or_else(|| pat.clone()),
        Node::Top | Node::Atom(_) => pat.clone(),
        Node::Not(a) => Formula::not(instantiate(a, s)),
        Node::And(a, b) => Formula::and(instantiate(a, s), instantiate(b, s)),
        Node::K(a) => Formula::k(instantiate(a, s)),
        Node::B(a) => Formula::b(instantiate(a, s)),
    }
}

/// The substitution making `φ` an instance of the scheme, if any. Every
/// metavariable occurs in its template, so the match is total and unique.
pub fn match_axiom(phi: &Formula, scheme: SchemeId) -> Option<Substitution> {
    let pat = scheme.template()?;
    let mut s = Substitution::new();
    matches(&pat, phi, &mut s).then_some(s)
}

/// First CL basis scheme matching `φ`.
pub fn match_classical(phi: &Formula) -> Option<(SchemeId, Substitution)> {
    SchemeId::CL_BASIS.iter().find_map(|&id| match_axiom(phi, id).map(|s| (id, s)))
}

/// Largest number of leaves the truth-table oracle accepts.
pub const TAUT_LEAF_LIMIT: usize = 12;

/// Maximal subformulas not built by `¬`, `∧` or `⊤`, in first-occurrence order.
pub fn propositional_leaves(phi: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, out: &mut Vec<Formula>) {
        match f.node() {
            Node::Top => {}
            Node::Not(a) => go(a, out),
            Node::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                if !out.contains(f) {
                    out.push(f.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    go(phi, &mut out);
    out
}

/// Truth value of the propositional skeleton under `bits` (bit `i` for leaf `i`).
pub fn skeleton_value(phi: &Formula, leaves: &[Formula], bits: u32) -> bool {
    match phi.node() {
        Node::Top => true,
        Node::Not(a) => !skeleton_value(a, leaves, bits),
        Node::And(a, b) => skeleton_value(a, leaves, bits) && skeleton_value(b, leaves, bits),
        _ => {
            let i = leaves.iter().position(|l| l == phi).expect("leaf listed");
            bits >> i & 1 == 1
        }
    }
}

/// Truth-table tautology test; None when there are too many leaves.
pub fn is_tautology(phi: &Formula) -> Option<bool> {
    let leaves = propositional_leaves(phi);
    if leaves.len() > TAUT_LEAF_LIMIT {
        return None;
    }
    Some((0..1u32 << leaves.len()).all(|bits| skeleton_value(phi, &leaves, bits)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    Kb,
    KbHalf,
    KbHalfMinus,
}

impl Theory {
    pub fn allows(self, s: SchemeId) -> bool {
        match s {
            SchemeId::D | SchemeId::Sc | SchemeId::Scott(_) => self != Theory::Kb,
            SchemeId::Bf | SchemeId::Kbm => self != Theory::KbHalfMinus,
            _ => true,
        }
    }
}

impl FromStr for Theory {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kb" => Ok(Theory::Kb),
            "kb-half" => Ok(Theory::KbHalf),
            "kb-half-minus" => Ok(Theory::KbHalfMinus),
            _ => Err(format!("unknown theory `{s}` (expected kb, kb-half or kb-half-minus)")),
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Theory::Kb => "kb",
            Theory::KbHalf => "kb-half",
            Theory::KbHalfMinus => "kb-half-minus",
        })
    }
}

/// Line references are 1-based, as in proof files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(SchemeId, Substitution),
    Mp(usize, usize),
    Mn(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Accepted,
    RejectedAt { line: usize, reason: String },
}

impl CheckResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CheckResult::Accepted)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Accept `AX TAUT` lines via the truth-table oracle.
    pub allow_taut: bool,
}

pub fn check_derivation(d: &Derivation, theory: Theory) -> CheckResult {
    check_derivation_with(d, theory, CheckOptions::default())
}

pub fn check_derivation_with(d: &Derivation, theory: Theory, opts: CheckOptions) -> CheckResult {
    for (idx, line) in d.lines.iter().enumerate() {
        let n = idx + 1;
        let reject = |reason: String| CheckResult::RejectedAt { line: n, reason };
        let earlier = |i: usize| -> Result<&Formula, CheckResult> {
            if i == 0 || i >= n {
                Err(reject(format!("reference to line {i} is not an earlier line")))
            } else {
                Ok(&d.lines[i - 1].formula)
            }
        };
        match &line.justification {
            Justification::Axiom(SchemeId::Taut, _) => {
                if !opts.allow_taut {
                    return reject("TAUT lines need the tautology oracle to be enabled".into());
                }
                match is_tautology(&line.formula) {
                    Some(true) => {}
                    Some(false) => return reject("not a tautology".into()),
                    None => return reject(format!("more than {TAUT_LEAF_LIMIT} leaves for the oracle")),
                }
            }
            Justification::Axiom(scheme, given) => {
                if !theory.allows(*scheme) {
                    return reject(format!("scheme {scheme} is not part of {theory}"));
                }
                let Some(found) = match_axiom(&line.formula, *scheme) else {
                    return reject(format!("not an instance of {scheme}"));
                };
                if let Some((k, v)) = given.iter().find(|(k, v)| found.get(*k) != Some(v)) {
                    return reject(format!("substitution {k}:={v} does not produce this line"));
                }
            }
            Justification::Mp(i, j) => {
                let a = match earlier(*i) {
                    Ok(f) => f,
                    Err(e) => return e,
                };
                let b = match earlier(*j) {
                    Ok(f) => f,
                    Err(e) => return e,
                };
                if *b != Formula::imp(a.clone(), line.formula.clone()) {
                    return reject(format!("line {j} is not line {i} -> this line"));
                }
            }
            Justification::Mn(i) => {
                let a = match earlier(*i) {
                    Ok(f) => f,
                    Err(e) => return e,
                };
                if line.formula != Formula::k(a.clone()) {
                    return reject(format!("this line is not K applied to line {i}"));
                }
            }
        }
    }
    CheckResult::Accepted
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("proof line {line}: {msg}")]
pub struct ProofParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lines.iter().enumerate() {
            write!(f, "{}. {} ; ", i + 1, l.formula)?;
            match &l.justification {
                Justification::Axiom(s, sub) => {
                    let items: Vec<String> = sub.iter().map(|(k, v)| format!("{k}:={v}")).collect();
                    writeln!(f, "AX {s} {{{}}}", items.join(", "))?;
                }
                Justification::Mp(i, j) => writeln!(f, "MP {i} {j}")?,
                Justification::Mn(i) => writeln!(f, "MN {i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Derivation {
    type Err = ProofParseError;

    /// Lines `n. φ ; AX Scheme {x:=φ, ...}`, `n. φ ; MP i j` or `n. φ ; MN i`.
    /// Blank lines and `#` comments are skipped; step numbers must count up from 1.
    fn from_str(text: &str) -> Result<Self, ProofParseError> {
        let mut lines = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let src = raw.trim();
            if src.is_empty() || src.starts_with('#') {
                continue;
            }
            let err = |msg: String| ProofParseError { line: k + 1, msg };
            let (num, rest) = src.split_once('.').ok_or_else(|| err("expected `n.`".into()))?;
            let num: usize = num.trim().parse().map_err(|_| err(format!("bad step number `{num}`")))?;
            if num != lines.len() + 1 {
                return Err(err(format!("expected step {}, found {num}", lines.len() + 1)));
            }
            let (formula, just) = rest.rsplit_once(';').ok_or_else(|| err("expected `; justification`".into()))?;
            let formula = parse_kb(formula.trim()).map_err(|e| err(e.to_string()))?;
            let mut words = just.split_whitespace();
            let index = |w: Option<&str>| -> Result<usize, ProofParseError> {
                w.and_then(|w| w.parse().ok()).ok_or_else(|| err("expected a line number".into()))
            };
            let justification = match words.next() {
                Some("MP") => {
                    let j = Justification::Mp(index(words.next())?, index(words.next())?);
                    if words.next().is_some() {
                        return Err(err("trailing input after MP".into()));
                    }
                    j
                }
                Some("MN") => Justification::Mn(index(words.next())?),
                Some("AX") => {
                    let body = just.trim_start().strip_prefix("AX").unwrap().trim();
                    let (scheme, subst) = match body.find('{') {
                        Some(p) => (body[..p].trim(), body[p..].trim()),
                        None => (body, "{}"),
                    };
                    let scheme: SchemeId = scheme.parse().map_err(err)?;
                    let inner = subst
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| err("substitution must be braced".into()))?;
                    let mut sub = Substitution::new();
                    for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (key, val) =
                            item.split_once(":=").ok_or_else(|| err(format!("expected x:=φ, found `{item}`")))?;
                        let val = parse_kb(val.trim()).map_err(|e| err(format!("in {key}: {e}")))?;
                        sub.insert(key.trim().to_string(), val);
                    }
                    Justification::Axiom(scheme, sub)
                }
                _ => return Err(err("justification must be AX, MP or MN".into())),
            };
            lines.push(Line { formula, justification });
        }
        Ok(Derivation { lines })
    }
}
