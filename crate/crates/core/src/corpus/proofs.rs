//! Stored derivations, generated by the (untrusted) proof builder.

use crate::calculus::{match_axiom, Derivation, Justification, ProofBuilder, SchemeId, Theory};
use crate::formula::{segerberg_expand, Formula, SegerbergMode};

pub struct CorpusProof {
    pub name: &'static str,
    pub statement: &'static str,
    pub theory: Theory,
    pub derivation: Derivation,
}

fn p() -> Formula {
    Formula::atom("p")
}

fn q() -> Formula {
    Formula::atom("q")
}

/// `Kp → Bp`
fn knowledge_implies_belief() -> Derivation {
    let mut b = ProofBuilder::new();
    let g = b.knowledge_to_belief(&p());
    b.finish(g)
}

/// `B(p∧q) → (Bp ∧ Bq)`, from monotonicity on each conjunct.
fn monotone_conjunction() -> Derivation {
    let mut b = ProofBuilder::new();
    let (p, q) = (p(), q());
    let bpq = Formula::b(Formula::and(p.clone(), q.clone()));
    let l = b.cl_pair(4, &p, &q);
    let l = b.b_mono(l);
    let r = b.cl_pair(5, &p, &q);
    let r = b.b_mono(r);
    let h = [bpq];
    let c6 = b.cl_pair(6, &Formula::b(p), &Formula::b(q));
    let c6 = b.c_thm(&h, c6);
    let m = b.c_mp(&h, l, c6);
    let g = b.c_mp(&h, r, m);
    b.finish(g)
}

/// `Kp ∧ Bq → B(p∧q)`: knowing `p` makes `q → p∧q` known.
fn known_conjunct() -> Derivation {
    let mut b = ProofBuilder::new();
    let (p, q) = (p(), q());
    let c6 = b.cl_pair(6, &p, &q);
    let k = b.k_mono(c6);
    let kbm = b.ax(SchemeId::Kbm, &[("phi", q.clone()), ("psi", Formula::and(p, q))]);
    let h = b.hs(k, kbm);
    let g = b.import(h);
    b.finish(g)
}

/// From the theorem `p → p`, `B(p → p)`.
fn belief_necessitation() -> Derivation {
    let mut b = ProofBuilder::new();
    let t = Formula::imp(p(), p());
    let id = b.identity(&p());
    let k = b.mn(id);
    let kb = b.knowledge_to_belief(&t);
    let g = b.mp(k, kb);
    b.finish(g)
}

/// From the theorem `p∧q → p`, `B(p∧q) → Bp`.
fn belief_monotonicity() -> Derivation {
    let mut b = ProofBuilder::new();
    let l = b.cl_pair(4, &p(), &q());
    let g = b.b_mono(l);
    b.finish(g)
}

/// From the theorem `p∧q ↔ q∧p`, `B(p∧q) ↔ B(q∧p)`.
fn belief_congruence() -> Derivation {
    let mut b = ProofBuilder::new();
    let (pq, qp) = (Formula::and(p(), q()), Formula::and(q(), p()));
    let fwd = Formula::imp(pq.clone(), qp.clone());
    let bwd = Formula::imp(qp, pq);
    let iff = b.taut(&Formula::and(fwd.clone(), bwd.clone()));
    let l = b.cl_pair(4, &fwd, &bwd);
    let l = b.mp(iff, l);
    let r = b.cl_pair(5, &fwd, &bwd);
    let r = b.mp(iff, r);
    let l = b.b_mono(l);
    let r = b.b_mono(r);
    let g = b.conj(l, r);
    b.finish(g)
}

/// From the theorem `p∧¬p → ⊥`, `¬B(p∧¬p)`.
fn no_belief_in_contradiction() -> Derivation {
    let mut b = ProofBuilder::new();
    let t = b.taut(&Formula::imp(Formula::and(p(), Formula::not(p())), Formula::bot()));
    let m = b.b_mono(t);
    let c = b.contrapose(m);
    let bf = b.ax(SchemeId::Bf, &[]);
    let g = b.mp(bf, c);
    b.finish(g)
}

/// `¬B⊥` without (BF): (N) and (D) at `⊤`, since `⊥` is `¬⊤`.
fn bf_from_consistency() -> Derivation {
    let mut b = ProofBuilder::new();
    let n = b.ax(SchemeId::N, &[]);
    let d = b.ax(SchemeId::D, &[("phi", Formula::top())]);
    let g = b.mp(n, d);
    b.finish(g)
}

/// `K(p→q) → (Bp → Bq)` without (KBM): `p → q` implies the one-element
/// counting formula, and (Scott) with `m = 1` does the rest.
fn kbm_from_scott() -> Derivation {
    let mut b = ProofBuilder::new();
    let (p, q) = (p(), q());
    let seg = segerberg_expand(std::slice::from_ref(&p), std::slice::from_ref(&q), SegerbergMode::I).expect("m = 1");
    let body = match seg.node() {
        crate::formula::Node::K(f) => f.clone(),
        _ => unreachable!("expansion is K-prefixed"),
    };
    let t = b.taut(&Formula::imp(Formula::imp(p.clone(), q.clone()), body));
    let k = b.k_mono(t);
    let s = b.ax(SchemeId::Scott(1), &[("phi1", p), ("psi1", q)]);
    let e = b.export(s);
    let g = b.hs(k, e);
    b.finish(g)
}

pub fn proof_corpus() -> Vec<CorpusProof> {
    vec![
        CorpusProof {
            name: "kbc",
            statement: "K p -> B p",
            theory: Theory::Kb,
            derivation: knowledge_implies_belief(),
        },
        CorpusProof {
            name: "m",
            statement: "B(p & q) -> B p & B q",
            theory: Theory::Kb,
            derivation: monotone_conjunction(),
        },
        CorpusProof {
            name: "known-conjunct",
            statement: "K p & B q -> B(p & q)",
            theory: Theory::Kb,
            derivation: known_conjunct(),
        },
        CorpusProof { name: "rn", statement: "B(p -> p)", theory: Theory::Kb, derivation: belief_necessitation() },
        CorpusProof { name: "rm", statement: "B(p & q) -> B p", theory: Theory::Kb, derivation: belief_monotonicity() },
        CorpusProof {
            name: "re",
            statement: "(B(p & q) -> B(q & p)) & (B(q & p) -> B(p & q))",
            theory: Theory::Kb,
            derivation: belief_congruence(),
        },
        CorpusProof {
            name: "bf-general",
            statement: "~B(p & ~p)",
            theory: Theory::Kb,
            derivation: no_belief_in_contradiction(),
        },
        CorpusProof {
            name: "bf",
            statement: "~B false",
            theory: Theory::KbHalfMinus,
            derivation: bf_from_consistency(),
        },
        CorpusProof {
            name: "kbm",
            statement: "K(p -> q) -> (B p -> B q)",
            theory: Theory::KbHalfMinus,
            derivation: kbm_from_scott(),
        },
    ]
}

/// A derivation with one corrupted line.
pub struct Mutant {
    pub line: usize,
    pub kind: &'static str,
    pub derivation: Derivation,
}

/// Single-line corruptions of `d`, at up to `per_kind` evenly spaced lines
/// per kind plus the last line: a negated formula, a redirected MP
/// premise, and an axiom line relabeled with a scheme it does not match.
pub fn mutants(d: &Derivation, theory: Theory, per_kind: usize) -> Vec<Mutant> {
    let n = d.lines.len();
    let step = n.div_ceil(per_kind.max(1)).max(1);
    let mut picks: Vec<usize> = (1..=n).step_by(step).collect();
    if picks.last() != Some(&n) {
        picks.push(n);
    }
    let mut out = Vec::new();
    for &k in &picks {
        let mut m = d.clone();
        m.lines[k - 1].formula = Formula::not(m.lines[k - 1].formula.clone());
        out.push(Mutant { line: k, kind: "negated formula", derivation: m });
    }
    let mp_lines: Vec<usize> =
        (1..=n).filter(|&k| matches!(d.lines[k - 1].justification, Justification::Mp(..))).collect();
    for &k in mp_lines.iter().step_by(mp_lines.len().div_ceil(per_kind.max(1)).max(1)) {
        let Justification::Mp(i, j) = d.lines[k - 1].justification else { unreachable!() };
        // another earlier line; formulas in builder output are distinct
        let other = (1..k).rev().find(|&o| o != i && d.lines[o - 1].formula != d.lines[i - 1].formula);
        if let Some(o) = other {
            let mut m = d.clone();
            m.lines[k - 1].justification = Justification::Mp(o, j);
            out.push(Mutant { line: k, kind: "wrong MP premise", derivation: m });
        }
    }
    let ax_lines: Vec<usize> =
        (1..=n).filter(|&k| matches!(d.lines[k - 1].justification, Justification::Axiom(..))).collect();
    let mut pool: Vec<SchemeId> = SchemeId::KB_SCHEMES.to_vec();
    pool.extend([SchemeId::D, SchemeId::Sc, SchemeId::Scott(1)]);
    pool.retain(|s| theory.allows(*s));
    for &k in ax_lines.iter().step_by(ax_lines.len().div_ceil(per_kind.max(1)).max(1)) {
        let Justification::Axiom(s, ref subst) = d.lines[k - 1].justification else { unreachable!() };
        let f = &d.lines[k - 1].formula;
        if let Some(&other) = pool.iter().find(|&&o| o != s && match_axiom(f, o).is_none()) {
            let mut m = d.clone();
            m.lines[k - 1].justification = Justification::Axiom(other, subst.clone());
            out.push(Mutant { line: k, kind: "wrong scheme", derivation: m });
        }
    }
    out
}
