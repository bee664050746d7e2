//! Built-in models, the KPS relation, demo scenarios and the proof corpus.

mod proofs;

use serde_json::{json, Value};

pub use proofs::{mutants, proof_corpus, CorpusProof, Mutant};

use crate::event::EventSet;
use crate::formula::{parse_kb, Threshold};
use crate::model::{Frame, NeighborhoodModel, ProbabilityModel};
use crate::neighborhood::{
    check_base_properties_model, check_mid_threshold, replay_scott_witness, BruteForceBudget, NeighborhoodError,
    PropertyReport,
};
use crate::rational::Rational;
use crate::semantics::eval_kb_prob;
use crate::synthesis::{
    check_definetti, realize_comparative, synthesize_measure, ComparativeRelation, Comparison, ComparisonTable,
    LPResult,
};

fn horse_frame(partition: &[&[&str]]) -> Frame {
    Frame::from_names(&["w1", "w2", "w3"], partition, &[("w1", &["h1"]), ("w2", &["h2"]), ("w3", &["h3"])])
        .expect("horse frame is valid")
}

fn thirds(a: Rational, b: Rational, c: Rational, partition: &[&[&str]]) -> ProbabilityModel {
    ProbabilityModel::new(horse_frame(partition), vec![a, b, c]).expect("weights sum to one")
}

/// Three horses, `hᵢ` wins at `wᵢ`, odds 3:2:1, one information cell.
pub fn horses() -> ProbabilityModel {
    thirds(Rational::new(3, 6), Rational::new(2, 6), Rational::new(1, 6), &[&["w1", "w2", "w3"]])
}

/// As [`horses`], with `w3` split off into its own cell.
pub fn horses_split() -> ProbabilityModel {
    thirds(Rational::new(3, 6), Rational::new(2, 6), Rational::new(1, 6), &[&["w1", "w2"], &["w3"]])
}

/// Equal chances for the three horses.
pub fn horses_uniform() -> ProbabilityModel {
    let t = Rational::new(1, 3);
    thirds(t.clone(), t.clone(), t, &[&["w1", "w2", "w3"]])
}

/// Weights `((1−c)/2, c, (1−c)/2)`: at `w1` the agent believes `¬h1 → h2`
/// and `¬h1` at threshold `c` but not `h2`.
pub fn horses_skewed(c: &Threshold) -> ProbabilityModel {
    let side = (Rational::one() - c.value().clone()) * Rational::new(1, 2);
    thirds(side.clone(), c.value().clone(), side, &[&["w1", "w2", "w3"]])
}

const WF_WORLDS: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];
const WF_X: [&str; 7] = ["efg", "abg", "adf", "bde", "ace", "cdg", "bcf"];
const WF_Y: [&str; 7] = ["abcd", "cdef", "bceg", "acfg", "bdfg", "abef", "adeg"];

fn wf_set(letters: &str) -> EventSet {
    EventSet::from_indices(7, letters.chars().map(|ch| WF_WORLDS.iter().position(|w| w.starts_with(ch)).unwrap()))
}

/// Seven worlds `a..g`, each making its own letter true, one cell, with
/// neighborhoods generated by seven 3-sets.
pub fn walley_fine() -> NeighborhoodModel {
    let val: Vec<(&str, &[&str])> = WF_WORLDS.iter().map(|w| (*w, std::slice::from_ref(w))).collect();
    let frame = Frame::from_names(&WF_WORLDS, &[&WF_WORLDS], &val).expect("valid frame");
    NeighborhoodModel::new(frame, vec![WF_X.iter().map(|s| wf_set(s)).collect()]).expect("valid model")
}

/// The generator list `𝒳` and the list `𝒴` of their complements, in the
/// order that makes a (scott) counterexample with `m = 7`.
pub fn walley_fine_lists() -> (Vec<EventSet>, Vec<EventSet>) {
    (WF_X.iter().map(|s| wf_set(s)).collect(), WF_Y.iter().map(|s| wf_set(s)).collect())
}

pub struct WalleyFineReport {
    pub frame: Frame,
    pub base: PropertyReport,
    /// Bounded search; errors when the budget does not cover seven worlds.
    pub mid_threshold: Result<PropertyReport, NeighborhoodError>,
    pub xs: Vec<EventSet>,
    pub ys: Vec<EventSet>,
    /// The two lists violate (scott): every `Xᵢ` is a neighborhood, the
    /// `Yᵢ` cover each world at least as often, and no `Yᵢ` is one.
    pub scott_violation: bool,
    pub x_counts: Vec<usize>,
    pub y_counts: Vec<usize>,
    pub synthesis: Vec<(Threshold, bool)>,
}

pub fn walley_fine_demo(thresholds: &[Threshold], budget: &BruteForceBudget) -> WalleyFineReport {
    let m = walley_fine();
    let (xs, ys) = walley_fine_lists();
    let count = |ls: &[EventSet]| (0..7).map(|w| ls.iter().filter(|s| s.contains(w)).count()).collect();
    WalleyFineReport {
        frame: m.frame().clone(),
        base: check_base_properties_model(&m),
        mid_threshold: check_mid_threshold(&m, budget),
        scott_violation: replay_scott_witness(&m, 0, &xs, &ys),
        x_counts: count(&xs),
        y_counts: count(&ys),
        xs,
        ys,
        synthesis: thresholds.iter().map(|c| (c.clone(), synthesize_measure(&m, c).is_feasible())).collect(),
    }
}

impl WalleyFineReport {
    pub fn to_json(&self) -> Value {
        let names = |ls: &[EventSet]| ls.iter().map(|s| self.frame.names_of(s).concat()).collect::<Vec<_>>();
        json!({
            "base_properties": self.base.to_json(&self.frame),
            "mid_threshold_properties": match &self.mid_threshold {
                Ok(r) => r.to_json(&self.frame),
                Err(e) => json!({"error": e.to_string()}),
            },
            "scott_witness": {"m": self.xs.len(), "xs": names(&self.xs), "ys": names(&self.ys), "violation": self.scott_violation},
            "x_counts": self.x_counts,
            "y_counts": self.y_counts,
            "synthesis": self.synthesis.iter().map(|(c, f)| json!({"threshold": c.to_string(), "feasible": f})).collect::<Vec<_>>(),
        })
    }

    pub fn render(&self) -> String {
        let names = |ls: &[EventSet]| ls.iter().map(|s| self.frame.names_of(s).concat()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        out.push_str("base properties:\n");
        out.push_str(&self.base.render(&self.frame));
        out.push_str("mid-threshold properties (bounded search):\n");
        match &self.mid_threshold {
            Ok(r) => out.push_str(&r.render(&self.frame)),
            Err(e) => out.push_str(&format!("  skipped: {e}\n")),
        }
        out.push_str(&format!(
            "(scott) m={} violation: {}\n  X: {}\n  Y: {}\n",
            self.xs.len(),
            if self.scott_violation { "confirmed" } else { "NOT confirmed" },
            names(&self.xs),
            names(&self.ys)
        ));
        out.push_str(&format!("occurrences per world in X: {:?}, in Y: {:?}\n", self.x_counts, self.y_counts));
        for (c, feasible) in &self.synthesis {
            out.push_str(&format!("c = {c}: {}\n", if *feasible { "FEASIBLE" } else { "INFEASIBLE" }));
        }
        out
    }
}

pub fn kps_universe() -> Vec<String> {
    ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect()
}

/// Four strict comparisons over `{a,b,c,d,e}` that no measure realizes.
pub fn kps_statements() -> ComparativeRelation {
    let mut r = ComparativeRelation::new(kps_universe());
    r.push(&["c"], Comparison::Strict, &["a", "b"]);
    r.push(&["b", "d"], Comparison::Strict, &["a", "c"]);
    r.push(&["a", "e"], Comparison::Strict, &["b", "c"]);
    r.push(&["a", "b", "c"], Comparison::Strict, &["d", "e"]);
    r
}

/// A total table extending the four statements, from weights
/// `(x, y, x+y, 2x, 2y)`. Under those weights each statement is a tie; ties
/// are broken strictly along the statements (comparing `X−Y` against
/// `Y−X`) and all other ties stay equivalences.
pub fn kps_table(x: i64, y: i64) -> ComparisonTable {
    let w = [x, y, x + y, 2 * x, 2 * y];
    let kps = kps_statements();
    let pairs: Vec<(u64, u64)> = kps.statements.iter().map(|(a, _, b)| (a.mask(), b.mask())).collect();
    let mass = |s: u64| (0..5).filter(|i| s >> i & 1 == 1).map(|i| w[i]).sum::<i64>();
    ComparisonTable::from_fn(kps_universe(), |a, b| {
        let (ma, mb) = (mass(a), mass(b));
        if ma != mb {
            return ma < mb;
        }
        let (da, db) = (a & !b, b & !a);
        !pairs.contains(&(db, da))
    })
    .expect("five elements")
}

/// The first `(x, y)` with `x + y ≤ 24` whose [`kps_table`] meets the
/// de Finetti conditions.
pub fn kps_extension() -> Option<(i64, i64, ComparisonTable)> {
    (2..=24).flat_map(|s| (1..s).map(move |x| (x, s - x))).find_map(|(x, y)| {
        let t = kps_table(x, y);
        check_definetti(&t).all_hold().then_some((x, y, t))
    })
}

pub struct KpsReport {
    pub statements: ComparativeRelation,
    pub realization: LPResult,
    pub extension: Option<(i64, i64, PropertyReport, LPResult)>,
    pub frame: Frame,
}

pub fn kps_demo() -> KpsReport {
    let statements = kps_statements();
    let realization = realize_comparative(&statements, false);
    let extension = kps_extension().map(|(x, y, t)| {
        let strict = realize_comparative(&t.strict_part(), false);
        (x, y, check_definetti(&t), strict)
    });
    let frame = kps_table(1, 2).frame();
    KpsReport { statements, realization, extension, frame }
}

impl KpsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "statements": self.statements.to_string().lines().collect::<Vec<_>>(),
            "feasible": self.realization.is_feasible(),
            "extension": self.extension.as_ref().map(|(x, y, r, s)| json!({
                "weights": [x, y, x + y, 2 * x, 2 * y],
                "definetti": r.to_json(&self.frame),
                "strict_part_feasible": s.is_feasible(),
            })),
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.statements.to_string());
        out.push_str(if self.realization.is_feasible() { "FEASIBLE\n" } else { "INFEASIBLE\n" });
        match &self.extension {
            Some((x, y, r, s)) => {
                out.push_str(&format!(
                    "total extension from weights ({x}, {y}, {}, {}, {}), ties broken along the statements:\n",
                    x + y,
                    2 * x,
                    2 * y
                ));
                out.push_str(&r.render(&self.frame));
                out.push_str(&format!("strict part: {}\n", if s.is_feasible() { "FEASIBLE" } else { "INFEASIBLE" }));
            }
            None => out.push_str("no total extension found in the searched weights\n"),
        }
        out
    }
}

/// One checked judgment of the horse scenarios.
pub struct Judgment {
    pub description: String,
    pub value: String,
    pub expected: String,
}

impl Judgment {
    pub fn ok(&self) -> bool {
        self.value == self.expected
    }
}

pub fn horses_demo() -> Vec<Judgment> {
    let mut out = Vec::new();
    let h = horses();
    let w13 = EventSet::from_indices(3, [0, 2]);
    out.push(Judgment {
        description: "odds 3:2:1, P_w1({w1,w3})".into(),
        value: h.conditional_probability(0, &w13).to_string(),
        expected: "2/3".into(),
    });
    out.push(Judgment {
        description: "w3 split off, P_w1({w3})".into(),
        value: horses_split().conditional_probability(0, &EventSet::singleton(3, 2)).to_string(),
        expected: "0".into(),
    });
    let u = horses_uniform();
    let half = Threshold::half();
    for (s, expect) in [
        ("B(h1 | h2 | h3)", true),
        ("B(h1 | h2) & B(h1 | h3) & B(h2 | h3)", true),
        ("B ~h1 & B ~h2 & B ~h3", true),
        ("~B(~h1 & ~h2)", true),
        ("B(~h1 & ~h2)", false),
    ] {
        let f = parse_kb(s).expect("corpus formula");
        out.push(Judgment {
            description: format!("uniform, c = 1/2, w1: {s}"),
            value: eval_kb_prob(&u, 0, &f, &half).to_string(),
            expected: expect.to_string(),
        });
    }
    let f = parse_kb("B(~h1 -> h2) -> (B ~h1 -> B h2)").expect("corpus formula");
    for c in [Threshold::half(), Threshold::of(2, 3)] {
        let m = horses_skewed(&c);
        out.push(Judgment {
            description: format!("weights ((1-c)/2, c, (1-c)/2), c = {c}, w1: {f}"),
            value: eval_kb_prob(&m, 0, &f, &c).to_string(),
            expected: "false".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horse_numbers() {
        assert!(horses_demo().iter().all(Judgment::ok));
    }

    #[test]
    fn walley_fine_shape() {
        let (xs, ys) = walley_fine_lists();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(x.complement(), *y);
        }
        let budget = BruteForceBudget { max_cell: 7, ..BruteForceBudget::with_m_max(2) };
        let r = walley_fine_demo(&[Threshold::half()], &budget);
        println!("{}", r.render());
        assert!(r.base.all_hold());
        assert!(r.scott_violation);
        assert_eq!(r.x_counts, vec![3; 7]);
        assert_eq!(r.y_counts, vec![4; 7]);
        assert!(!r.synthesis[0].1);
    }

    #[test]
    fn kps_extension_exists() {
        let (x, y, t) = kps_extension().expect("an extension in range");
        assert!(x > 0 && y > 0);
        let strict = t.strict_part();
        for s in &kps_statements().statements {
            assert!(strict.statements.contains(s));
        }
        assert!(!realize_comparative(&strict, false).is_feasible());
    }
}
