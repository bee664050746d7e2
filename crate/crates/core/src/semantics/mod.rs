//! Truth conditions for both semantics.
//!
//! Evaluation computes extensions bottom-up: each subformula becomes the
//! set of worlds where it holds, so one pass answers every world at once.

mod search;

use num_traits::ToPrimitive;

use crate::event::EventSet;
use crate::formula::{Formula, Node, PNode, ProbFormula, SegerbergMode, Term, Threshold};
use crate::model::{Frame, NeighborhoodModel, ProbabilityModel};
use crate::rational::Rational;

pub use search::{
    antichains, enumerate_neighborhood_structures, find_nbhd_countermodel, random_probability_model,
    sample_prob_countermodel, set_partitions, valuations, CountermodelResult, SearchBound, SearchError,
    MAX_SEARCH_ATOMS, MAX_SEARCH_WORLDS,
};

/// Threshold comparison `P_w(X) > c`, with an integer fast path when all
/// weights share a small common denominator.
struct Masses {
    small: Option<(Vec<i128>, i128, i128)>,
}

impl Masses {
    fn new(m: &ProbabilityModel, c: &Threshold) -> Masses {
        let small = (|| {
            let mut lcm: i128 = 1;
            for w in m.weights() {
                let d = w.denom().to_i128()?;
                lcm = num_integer::lcm(lcm, d);
                if lcm > 1 << 40 {
                    return None;
                }
            }
            let ints = m
                .weights()
                .iter()
                .map(|w| Some(w.numer().to_i128()? * (lcm / w.denom().to_i128()?)))
                .collect::<Option<Vec<i128>>>()?;
            let cn = c.value().numer().to_i128()?;
            let cd = c.value().denom().to_i128()?;
            if cn.abs() > 1 << 40 || cd > 1 << 40 {
                return None;
            }
            Some((ints, cn, cd))
        })();
        Masses { small }
    }

    fn exceeds(&self, m: &ProbabilityModel, c: &Threshold, x: &EventSet, cell: &EventSet) -> bool {
        match &self.small {
            Some((ints, cn, cd)) => {
                let sx: i128 = x.iter().map(|w| ints[w]).sum();
                let sc: i128 = cell.iter().map(|w| ints[w]).sum();
                sx * cd > cn * sc
            }
            None => m.measure(x) > c.value() * &m.measure(cell),
        }
    }
}

/// Union of the cells on which `pred` holds.
fn cells_where(frame: &Frame, mut pred: impl FnMut(&EventSet) -> bool) -> EventSet {
    let mut out = frame.empty_set();
    for cell in frame.cells() {
        if pred(cell) {
            out = out.union(cell);
        }
    }
    out
}

fn extension_with(frame: &Frame, phi: &Formula, believes: &mut dyn FnMut(usize, &EventSet) -> bool) -> EventSet {
    match phi.node() {
        Node::Top => frame.universe(),
        Node::Atom(a) => frame.atom_extension(a),
        Node::Not(a) => extension_with(frame, a, believes).complement(),
        Node::And(a, b) => extension_with(frame, a, believes).intersection(&extension_with(frame, b, believes)),
        Node::K(a) => {
            let ea = extension_with(frame, a, believes);
            cells_where(frame, |cell| cell.is_subset(&ea))
        }
        Node::B(a) => {
            let ea = extension_with(frame, a, believes);
            let mut out = frame.empty_set();
            for (k, cell) in frame.cells().iter().enumerate() {
                if believes(k, &ea.intersection(cell)) {
                    out = out.union(cell);
                }
            }
            out
        }
    }
}

/// Worlds of a probability model where `φ` holds at threshold `c`.
pub fn extension_prob(m: &ProbabilityModel, phi: &Formula, c: &Threshold) -> EventSet {
    let masses = Masses::new(m, c);
    let frame = m.frame();
    extension_with(frame, phi, &mut |k, x| masses.exceeds(m, c, x, &frame.cells()[k]))
}

/// Worlds of a neighborhood model where `φ` holds.
pub fn extension_nbhd(m: &NeighborhoodModel, phi: &Formula) -> EventSet {
    extension_with(m.frame(), phi, &mut |k, x| m.in_cell_neighborhood(k, x))
}

/// `M, w ⊨ φ` with `Kφ` as `P_w(φ) = 1` and `Bφ` as `P_w(φ) > c`.
pub fn eval_kb_prob(m: &ProbabilityModel, w: usize, phi: &Formula, c: &Threshold) -> bool {
    extension_prob(m, phi, c).contains(w)
}

/// `M, w ⊨ φ` with `Bφ` as `[w] ∩ ⟦φ⟧ ∈ N(w)`.
pub fn eval_kb_nbhd(m: &NeighborhoodModel, w: usize, phi: &Formula) -> bool {
    extension_nbhd(m, phi).contains(w)
}

fn term_value(m: &ProbabilityModel, cell: &EventSet, t: &Term) -> Rational {
    match t {
        Term::Const(q) => q.clone(),
        Term::Scaled(q, f) => {
            let ext = extension_l(m, f);
            q * &(m.measure(&ext.intersection(cell)) / m.measure(cell))
        }
        Term::Sum(a, b) => term_value(m, cell, a) + term_value(m, cell, b),
    }
}

/// Worlds where a linear-probability formula holds.
pub fn extension_l(m: &ProbabilityModel, phi: &ProbFormula) -> EventSet {
    let frame = m.frame();
    match phi.node() {
        PNode::Top => frame.universe(),
        PNode::Atom(a) => frame.atom_extension(a),
        PNode::Not(a) => extension_l(m, a).complement(),
        PNode::And(a, b) => extension_l(m, a).intersection(&extension_l(m, b)),
        PNode::GeqZero(t) => cells_where(frame, |cell| !term_value(m, cell, t).is_negative()),
    }
}

pub fn eval_l(m: &ProbabilityModel, w: usize, phi: &ProbFormula) -> bool {
    extension_l(m, phi).contains(w)
}

/// Either kind of model, with the threshold the probability semantics needs.
#[derive(Clone, Copy)]
pub enum ModelRef<'a> {
    Prob(&'a ProbabilityModel, &'a Threshold),
    Nbhd(&'a NeighborhoodModel),
}

impl<'a> ModelRef<'a> {
    pub fn frame(&self) -> &'a Frame {
        match self {
            ModelRef::Prob(m, _) => m.frame(),
            ModelRef::Nbhd(m) => m.frame(),
        }
    }

    pub fn extension(&self, phi: &Formula) -> EventSet {
        match self {
            ModelRef::Prob(m, c) => extension_prob(m, phi, c),
            ModelRef::Nbhd(m) => extension_nbhd(m, phi),
        }
    }

    pub fn eval(&self, w: usize, phi: &Formula) -> bool {
        self.extension(phi).contains(w)
    }
}

/// The counting condition behind `(φᵢ𝕀ψᵢ)`, evaluated without expanding it:
/// every `v ∈ [w]` satisfies at least as many ψ's as φ's (mode `I`), or
/// exactly as many (mode `E`).
pub fn eval_segerberg_direct(
    model: ModelRef<'_>,
    w: usize,
    phis: &[Formula],
    psis: &[Formula],
    mode: SegerbergMode,
) -> bool {
    assert_eq!(phis.len(), psis.len(), "argument lists differ in length");
    let frame = model.frame();
    let ephi: Vec<EventSet> = phis.iter().map(|f| model.extension(f)).collect();
    let epsi: Vec<EventSet> = psis.iter().map(|f| model.extension(f)).collect();
    frame.cell(w).iter().all(|v| {
        let a = ephi.iter().filter(|e| e.contains(v)).count();
        let b = epsi.iter().filter(|e| e.contains(v)).count();
        match mode {
            SegerbergMode::I => b >= a,
            SegerbergMode::E => b == a,
        }
    })
}

/// `φ` holds at every world.
pub fn valid_in_model(model: ModelRef<'_>, phi: &Formula) -> bool {
    model.extension(phi).len() == model.frame().num_worlds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_kb, parse_l, segerberg_expand};

    fn horses(weights: [(i64, i64); 3], cells: &[&[&str]]) -> ProbabilityModel {
        let f = Frame::from_names(&["w1", "w2", "w3"], cells, &[("w1", &["h1"]), ("w2", &["h2"]), ("w3", &["h3"])])
            .unwrap();
        ProbabilityModel::new(f, weights.iter().map(|&(n, d)| Rational::new(n, d)).collect()).unwrap()
    }

    #[test]
    fn l_examples() {
        let m22 = horses([(3, 6), (2, 6), (1, 6)], &[&["w1", "w2", "w3"]]);
        let m23 = horses([(3, 6), (2, 6), (1, 6)], &[&["w1", "w2"], &["w3"]]);
        assert!(eval_l(&m22, 0, &parse_l("P(h1) >= 1/2").unwrap()));
        assert!(!eval_l(&m22, 0, &parse_l("P(h1) > 1/2").unwrap()));
        assert!(eval_l(&m23, 0, &parse_l("P(h3) = 0").unwrap()));
        assert!(eval_l(&m22, 2, &parse_l("1 + -1*P(true) >= 0").unwrap()));
        assert!(eval_l(&m22, 0, &parse_l("P(h1)+P(h3) >= 2/3").unwrap()));
    }

    #[test]
    fn uniform_thirds() {
        let m = horses([(1, 3), (1, 3), (1, 3)], &[&["w1", "w2", "w3"]]);
        let half = Threshold::half();
        let ev = |s: &str| eval_kb_prob(&m, 0, &parse_kb(s).unwrap(), &half);
        assert!(ev("B(h1 | h2 | h3)"));
        assert!(ev("B(h1 | h2) & B(h1 | h3) & B(h2 | h3)"));
        assert!(ev("B ~h1 & B ~h2 & B ~h3"));
        assert!(!ev("B(~h1 & ~h2)"));
        assert!(ev("K true"));
        assert!(valid_in_model(ModelRef::Prob(&m, &half), &parse_kb("K p -> B p").unwrap()));
        assert!(valid_in_model(ModelRef::Prob(&m, &half), &parse_kb("B true").unwrap()));
        let h1 = parse_kb("h1").unwrap();
        let h2 = parse_kb("h2").unwrap();
        let mr = ModelRef::Prob(&m, &half);
        assert!(!eval_segerberg_direct(mr, 0, std::slice::from_ref(&h1), &[h2], SegerbergMode::I));
        assert!(eval_segerberg_direct(mr, 0, std::slice::from_ref(&h1), std::slice::from_ref(&h1), SegerbergMode::E));
    }

    #[test]
    fn direct_matches_expansion_small() {
        let m = horses([(1, 2), (1, 4), (1, 4)], &[&["w1", "w2"], &["w3"]]);
        let half = Threshold::half();
        let mr = ModelRef::Prob(&m, &half);
        let pool: Vec<Formula> = ["h1", "h2", "h1 | h3", "B h1", "~h2"].iter().map(|s| parse_kb(s).unwrap()).collect();
        for a in &pool {
            for b in &pool {
                for c in &pool {
                    let phis = vec![a.clone(), b.clone()];
                    let psis = vec![c.clone(), a.clone()];
                    let f = segerberg_expand(&phis, &psis, SegerbergMode::I).unwrap();
                    for w in 0..3 {
                        assert_eq!(mr.eval(w, &f), eval_segerberg_direct(mr, w, &phis, &psis, SegerbergMode::I));
                    }
                }
            }
        }
    }
}
