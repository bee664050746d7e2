//! Emits primitive derivation lines for common classical and modal steps.
//!
//! Nothing here is trusted: the output is an ordinary [`Derivation`] that
//! goes through the checker. Reasoning under hypotheses `h₁..hₖ` works on
//! curried lines `h₁ → (h₂ → … → (hₖ → φ))`; a context line for `φ` under
//! `[h₁..hₖ]` is the same line as one for `hₖ → φ` under `[h₁..hₖ₋₁]`.

use std::collections::HashMap;

use super::{
    instantiate, propositional_leaves, skeleton_value, Derivation, Justification, Line, SchemeId, Substitution,
};
use crate::formula::{Formula, Node};

#[derive(Default)]
pub struct ProofBuilder {
    lines: Vec<Line>,
    index: HashMap<Formula, usize>,
}

fn curry(hyps: &[Formula], phi: Formula) -> Formula {
    hyps.iter().rev().fold(phi, |acc, h| Formula::imp(h.clone(), acc))
}

impl ProofBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.lines[i - 1].formula
    }

    fn have(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        if let Some(i) = self.have(&formula) {
            return i;
        }
        self.lines.push(Line { formula: formula.clone(), justification });
        let n = self.lines.len();
        self.index.insert(formula, n);
        n
    }

    /// The derivation of line `goal`, keeping only the lines it depends on.
    pub fn finish(self, goal: usize) -> Derivation {
        let mut keep = vec![false; goal + 1];
        keep[goal] = true;
        for n in (1..=goal).rev() {
            if keep[n] {
                match self.lines[n - 1].justification {
                    Justification::Mp(i, j) => {
                        keep[i] = true;
                        keep[j] = true;
                    }
                    Justification::Mn(i) => keep[i] = true,
                    Justification::Axiom(..) => {}
                }
            }
        }
        let mut renumber = vec![0; goal + 1];
        let mut lines = Vec::new();
        for n in 1..=goal {
            if keep[n] {
                let mut l = self.lines[n - 1].clone();
                l.justification = match l.justification {
                    Justification::Mp(i, j) => Justification::Mp(renumber[i], renumber[j]),
                    Justification::Mn(i) => Justification::Mn(renumber[i]),
                    a => a,
                };
                lines.push(l);
                renumber[n] = lines.len();
            }
        }
        Derivation { lines }
    }

    pub fn ax(&mut self, scheme: SchemeId, subst: &[(&str, Formula)]) -> usize {
        let s: Substitution = subst.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let template = scheme.template().expect("builder uses concrete schemes");
        let f = instantiate(&template, &s);
        self.push(f, Justification::Axiom(scheme, s))
    }

    /// From `a` (line `i`) and `a → b` (line `j`), `b`.
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = self.formula(j).as_imp().expect("major premise is an implication");
        assert_eq!(a, self.formula(i), "minor premise does not match");
        let b = b.clone();
        self.push(b, Justification::Mp(i, j))
    }

    pub fn mn(&mut self, i: usize) -> usize {
        let f = Formula::k(self.formula(i).clone());
        self.push(f, Justification::Mn(i))
    }

    fn cl1(&mut self, a: &Formula, b: &Formula) -> usize {
        self.ax(SchemeId::Cl(1), &[("phi", a.clone()), ("psi", b.clone())])
    }

    fn cl2(&mut self, a: &Formula, b: &Formula, c: &Formula) -> usize {
        self.ax(SchemeId::Cl(2), &[("phi", a.clone()), ("psi", b.clone()), ("chi", c.clone())])
    }

    fn cl3(&mut self, a: &Formula, b: &Formula) -> usize {
        self.ax(SchemeId::Cl(3), &[("phi", a.clone()), ("psi", b.clone())])
    }

    pub fn cl_pair(&mut self, id: u8, a: &Formula, b: &Formula) -> usize {
        self.ax(SchemeId::Cl(id), &[("phi", a.clone()), ("psi", b.clone())])
    }

    /// `a → a`
    pub fn identity(&mut self, a: &Formula) -> usize {
        if let Some(i) = self.have(&Formula::imp(a.clone(), a.clone())) {
            return i;
        }
        let aa = Formula::imp(a.clone(), a.clone());
        let l1 = self.cl1(a, &aa);
        let l2 = self.cl2(a, &aa, a);
        let l3 = self.mp(l1, l2);
        let l4 = self.cl1(a, a);
        self.mp(l4, l3)
    }

    /// From `x` (line `i`), `h → x`.
    pub fn weaken(&mut self, i: usize, h: &Formula) -> usize {
        let x = self.formula(i).clone();
        let l = self.cl1(&x, h);
        self.mp(i, l)
    }

    /// From `x → y` and `y → z`, `x → z`.
    pub fn hs(&mut self, i: usize, j: usize) -> usize {
        let (x, y) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let z = self.formula(j).as_imp().expect("implication").1.clone();
        let wj = self.weaken(j, &x);
        let c = self.cl2(&x, &y, &z);
        let m = self.mp(wj, c);
        self.mp(i, m)
    }

    /// The formula a context line proves.
    fn strip(&self, hyps: &[Formula], i: usize) -> Formula {
        let mut f = self.formula(i).clone();
        for h in hyps {
            let (a, b) = f.as_imp().expect("curried context line");
            assert_eq!(a, h, "context mismatch");
            f = b.clone();
        }
        f
    }

    /// A theorem used under hypotheses.
    pub fn c_thm(&mut self, hyps: &[Formula], i: usize) -> usize {
        hyps.iter().rev().fold(i, |acc, h| self.weaken(acc, h))
    }

    /// Hypothesis `k` under `hyps`.
    pub fn c_hyp(&mut self, hyps: &[Formula], k: usize) -> usize {
        let hk = &hyps[k];
        if let Some(i) = self.have(&curry(hyps, hk.clone())) {
            return i;
        }
        let mut t = self.identity(hk);
        let mut rest = hk.clone();
        for h in hyps[k + 1..].iter().rev() {
            let l = self.cl1(&rest, h);
            t = self.hs(t, l);
            rest = Formula::imp(h.clone(), rest);
        }
        self.c_thm(&hyps[..k], t)
    }

    /// `(H ⇒ (a → b)) → ((H ⇒ a) → (H ⇒ b))`
    fn distribute(&mut self, hyps: &[Formula], a: &Formula, b: &Formula) -> usize {
        let Some((g, rest)) = hyps.split_first() else {
            return self.identity(&Formula::imp(a.clone(), b.clone()));
        };
        let target = Formula::imp(
            curry(hyps, Formula::imp(a.clone(), b.clone())),
            Formula::imp(curry(hyps, a.clone()), curry(hyps, b.clone())),
        );
        if let Some(i) = self.have(&target) {
            return i;
        }
        let inner = self.distribute(rest, a, b);
        let rab = curry(rest, Formula::imp(a.clone(), b.clone()));
        let ra = curry(rest, a.clone());
        let rb = curry(rest, b.clone());
        let w = self.weaken(inner, g);
        let c1 = self.cl2(g, &rab, &Formula::imp(ra.clone(), rb.clone()));
        let m1 = self.mp(w, c1);
        let c2 = self.cl2(g, &ra, &rb);
        self.hs(m1, c2)
    }

    /// Modus ponens under hypotheses: `H ⇒ a` and `H ⇒ (a → b)` give `H ⇒ b`.
    pub fn c_mp(&mut self, hyps: &[Formula], i: usize, j: usize) -> usize {
        if hyps.is_empty() {
            return self.mp(i, j);
        }
        let a = self.strip(hyps, i);
        let b = self.strip(hyps, j).as_imp().expect("implication under hypotheses").1.clone();
        let l = self.distribute(hyps, &a, &b);
        let m = self.mp(j, l);
        self.mp(i, m)
    }

    /// `(y → z) → ((x → y) → (x → z))`
    fn hs_thm(&mut self, x: &Formula, y: &Formula, z: &Formula) -> usize {
        let h = [Formula::imp(y.clone(), z.clone()), Formula::imp(x.clone(), y.clone()), x.clone()];
        let hx = self.c_hyp(&h, 2);
        let hxy = self.c_hyp(&h, 1);
        let vy = self.c_mp(&h, hx, hxy);
        let hyz = self.c_hyp(&h, 0);
        self.c_mp(&h, vy, hyz)
    }

    /// Chaining under hypotheses.
    pub fn c_hs(&mut self, hyps: &[Formula], i: usize, j: usize) -> usize {
        let (x, y) = self.strip(hyps, i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let z = self.strip(hyps, j).as_imp().expect("implication").1.clone();
        let t = self.hs_thm(&x, &y, &z);
        let t = self.c_thm(hyps, t);
        let m = self.c_mp(hyps, j, t);
        self.c_mp(hyps, i, m)
    }

    /// `¬¬a → a`
    pub fn dne(&mut self, a: &Formula) -> usize {
        let nna = Formula::not(Formula::not(a.clone()));
        if let Some(i) = self.have(&Formula::imp(nna.clone(), a.clone())) {
            return i;
        }
        let na = Formula::not(a.clone());
        let nnna = Formula::not(nna.clone());
        let h = [nna.clone()];
        let l1 = self.cl1(&nna, &Formula::not(nnna.clone()));
        let l2 = self.cl3(&nnna, &na);
        let l2 = self.c_thm(&h, l2);
        let m = self.c_mp(&h, l1, l2);
        let l3 = self.cl3(a, &nna);
        let l3 = self.c_thm(&h, l3);
        let m2 = self.c_mp(&h, m, l3);
        let hy = self.c_hyp(&h, 0);
        self.c_mp(&h, hy, m2)
    }

    /// `a → ¬¬a`
    pub fn dni(&mut self, a: &Formula) -> usize {
        let nna = Formula::not(Formula::not(a.clone()));
        if let Some(i) = self.have(&Formula::imp(a.clone(), nna.clone())) {
            return i;
        }
        let d = self.dne(&Formula::not(a.clone()));
        let c = self.cl3(&nna, a);
        self.mp(d, c)
    }

    /// `¬a → (a → b)`
    pub fn efq(&mut self, a: &Formula, b: &Formula) -> usize {
        let na = Formula::not(a.clone());
        let h = [na.clone(), a.clone()];
        let l1 = self.cl1(&na, &Formula::not(b.clone()));
        let l1 = self.c_thm(&h, l1);
        let hna = self.c_hyp(&h, 0);
        let m1 = self.c_mp(&h, hna, l1);
        let l2 = self.cl3(b, a);
        let l2 = self.c_thm(&h, l2);
        let m2 = self.c_mp(&h, m1, l2);
        let ha = self.c_hyp(&h, 1);
        self.c_mp(&h, ha, m2)
    }

    /// `(a → b) → (¬b → ¬a)`
    pub fn contrapose_thm(&mut self, a: &Formula, b: &Formula) -> usize {
        let target = Formula::imp(
            Formula::imp(a.clone(), b.clone()),
            Formula::imp(Formula::not(b.clone()), Formula::not(a.clone())),
        );
        if let Some(i) = self.have(&target) {
            return i;
        }
        let h = [Formula::imp(a.clone(), b.clone())];
        let d1 = self.dne(a);
        let d1 = self.c_thm(&h, d1);
        let hy = self.c_hyp(&h, 0);
        let d2 = self.dni(b);
        let d2 = self.c_thm(&h, d2);
        let ch = self.c_hs(&h, d1, hy);
        let ch = self.c_hs(&h, ch, d2);
        let l = self.cl3(&Formula::not(a.clone()), &Formula::not(b.clone()));
        let l = self.c_thm(&h, l);
        self.c_mp(&h, ch, l)
    }

    /// From `a → b`, `¬b → ¬a`.
    pub fn contrapose(&mut self, i: usize) -> usize {
        let (a, b) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let t = self.contrapose_thm(&a, &b);
        self.mp(i, t)
    }

    /// `(l → φ) → ((¬l → φ) → φ)`
    pub fn cases(&mut self, l: &Formula, phi: &Formula) -> usize {
        let nl = Formula::not(l.clone());
        let target = Formula::imp(
            Formula::imp(l.clone(), phi.clone()),
            Formula::imp(Formula::imp(nl.clone(), phi.clone()), phi.clone()),
        );
        if let Some(i) = self.have(&target) {
            return i;
        }
        let top = Formula::top();
        let nphi = Formula::not(phi.clone());
        let h2 = [Formula::imp(l.clone(), phi.clone()), Formula::imp(nl.clone(), phi.clone())];
        let h = [h2[0].clone(), h2[1].clone(), nphi.clone()];
        let c = self.contrapose_thm(l, phi);
        let c = self.c_thm(&h, c);
        let h0 = self.c_hyp(&h, 0);
        let c1 = self.c_mp(&h, h0, c);
        let hn = self.c_hyp(&h, 2);
        let vnl = self.c_mp(&h, hn, c1);
        let c = self.contrapose_thm(&nl, phi);
        let c = self.c_thm(&h, c);
        let h1 = self.c_hyp(&h, 1);
        let c2 = self.c_mp(&h, h1, c);
        let vnnl = self.c_mp(&h, hn, c2);
        let e = self.efq(&nl, &Formula::not(top.clone()));
        let e = self.c_thm(&h, e);
        let m = self.c_mp(&h, vnnl, e);
        let absurd = self.c_mp(&h, vnl, m);
        let l3 = self.cl3(phi, &top);
        let l3 = self.c_thm(&h2, l3);
        let m = self.c_mp(&h2, absurd, l3);
        let t = self.ax(SchemeId::Cl(7), &[]);
        let t = self.c_thm(&h2, t);
        self.c_mp(&h2, t, m)
    }

    /// From `(a ∧ b) → c`, `a → (b → c)`.
    pub fn export(&mut self, i: usize) -> usize {
        let (ab, c) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let Node::And(a, b) = ab.node() else { panic!("antecedent is not a conjunction") };
        let (a, b) = (a.clone(), b.clone());
        let _ = c;
        let h = [a.clone(), b.clone()];
        let c6 = self.cl_pair(6, &a, &b);
        let c6 = self.c_thm(&h, c6);
        let ha = self.c_hyp(&h, 0);
        let m = self.c_mp(&h, ha, c6);
        let hb = self.c_hyp(&h, 1);
        let cj = self.c_mp(&h, hb, m);
        let t = self.c_thm(&h, i);
        self.c_mp(&h, cj, t)
    }

    /// From `a → (b → c)`, `(a ∧ b) → c`.
    pub fn import(&mut self, i: usize) -> usize {
        let (a, bc) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let b = bc.as_imp().expect("curried implication").0.clone();
        let h = [Formula::and(a.clone(), b.clone())];
        let hy = self.c_hyp(&h, 0);
        let c4 = self.cl_pair(4, &a, &b);
        let c4 = self.c_thm(&h, c4);
        let x = self.c_mp(&h, hy, c4);
        let c5 = self.cl_pair(5, &a, &b);
        let c5 = self.c_thm(&h, c5);
        let y = self.c_mp(&h, hy, c5);
        let t = self.c_thm(&h, i);
        let m = self.c_mp(&h, x, t);
        self.c_mp(&h, y, m)
    }

    /// From `a` and `b`, `a ∧ b`.
    pub fn conj(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = (self.formula(i).clone(), self.formula(j).clone());
        let c6 = self.cl_pair(6, &a, &b);
        let m = self.mp(i, c6);
        self.mp(j, m)
    }

    /// From `a → b`, `Ka → Kb`.
    pub fn k_mono(&mut self, i: usize) -> usize {
        let (a, b) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let k = self.mn(i);
        let ax = self.ax(SchemeId::Ks5K, &[("phi", a), ("psi", b)]);
        self.mp(k, ax)
    }

    /// From `a → b`, `Ba → Bb`.
    pub fn b_mono(&mut self, i: usize) -> usize {
        let (a, b) = self.formula(i).as_imp().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let k = self.mn(i);
        let ax = self.ax(SchemeId::Kbm, &[("phi", a), ("psi", b)]);
        self.mp(k, ax)
    }

    /// `Kφ → Bφ`, through `K(⊤ → φ)`, (KBM) and (N).
    pub fn knowledge_to_belief(&mut self, phi: &Formula) -> usize {
        let top = Formula::top();
        let l1 = self.cl1(phi, &top);
        let k1 = self.k_mono(l1);
        let kbm = self.ax(SchemeId::Kbm, &[("phi", top.clone()), ("psi", phi.clone())]);
        let h = self.hs(k1, kbm);
        let n = self.ax(SchemeId::N, &[]);
        let hyps = [Formula::k(phi.clone())];
        let n = self.c_thm(&hyps, n);
        self.c_mp(&hyps, n, h)
    }

    /// `φ` or `¬φ` under the literal hypotheses, by the truth value of `φ`.
    fn kalmar(&mut self, hyps: &[Formula], leaves: &[Formula], bits: u32, phi: &Formula) -> usize {
        match phi.node() {
            Node::Top => {
                let t = self.ax(SchemeId::Cl(7), &[]);
                self.c_thm(hyps, t)
            }
            Node::Not(a) => {
                let inner = self.kalmar(hyps, leaves, bits, a);
                if skeleton_value(a, leaves, bits) {
                    let d = self.dni(a);
                    let d = self.c_thm(hyps, d);
                    self.c_mp(hyps, inner, d)
                } else {
                    inner
                }
            }
            Node::And(a, b) => {
                let (va, vb) = (skeleton_value(a, leaves, bits), skeleton_value(b, leaves, bits));
                let pa = self.kalmar(hyps, leaves, bits, a);
                let pb = self.kalmar(hyps, leaves, bits, b);
                if va && vb {
                    let c6 = self.cl_pair(6, a, b);
                    let c6 = self.c_thm(hyps, c6);
                    let m = self.c_mp(hyps, pa, c6);
                    self.c_mp(hyps, pb, m)
                } else {
                    let (id, p) = if !va { (4, pa) } else { (5, pb) };
                    let c = self.cl_pair(id, a, b);
                    let n = self.contrapose(c);
                    let n = self.c_thm(hyps, n);
                    self.c_mp(hyps, p, n)
                }
            }
            _ => {
                let k = leaves.iter().position(|l| l == phi).expect("leaf");
                self.c_hyp(hyps, k)
            }
        }
    }

    fn eliminate(&mut self, prefix: &mut Vec<Formula>, leaves: &[Formula], bits: u32, phi: &Formula) -> usize {
        let d = prefix.len();
        if d == leaves.len() {
            return self.kalmar(prefix, leaves, bits, phi);
        }
        let l = leaves[d].clone();
        prefix.push(l.clone());
        let pos = self.eliminate(prefix, leaves, bits | 1 << d, phi);
        prefix.pop();
        prefix.push(Formula::not(l.clone()));
        let neg = self.eliminate(prefix, leaves, bits, phi);
        prefix.pop();
        let c = self.cases(&l, phi);
        let c = self.c_thm(prefix, c);
        let m = self.c_mp(prefix, pos, c);
        self.c_mp(prefix, neg, m)
    }

    /// A propositional tautology (over its modal and atomic leaves), proved
    /// from the CL basis by case analysis on the leaves.
    pub fn taut(&mut self, phi: &Formula) -> usize {
        if let Some(i) = self.have(phi) {
            return i;
        }
        let leaves = propositional_leaves(phi);
        assert!((0..1u32 << leaves.len()).all(|b| skeleton_value(phi, &leaves, b)), "not a tautology: {phi}");
        self.eliminate(&mut Vec::new(), &leaves, 0, phi)
    }
}
