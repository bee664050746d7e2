//! Agreeing measures by exact LP, comparative realizability, and an
//! explorer pairing property verdicts with LP verdicts for `c ≠ 1/2`.

mod comparative;
mod lp;

use rayon::prelude::*;
use serde::Serialize;

pub use comparative::{
    check_definetti, realize_comparative, ComparativeError, ComparativeRelation, Comparison, ComparisonTable,
    MAX_TABLE_UNIVERSE,
};
pub use lp::{dump, lp_feasible, LPResult, LinearConstraint, Relation};

use crate::formula::Threshold;
use crate::model::Frame;
use crate::model::{NeighborhoodModel, ProbabilityModel};
use crate::neighborhood::{
    check_agreement, check_conjectured, check_mid_threshold, BruteForceBudget, NeighborhoodError, Verdict,
};
use crate::rational::Rational;
use crate::semantics::enumerate_neighborhood_structures;

/// The agreement constraints for cell `k`, over one variable per world of
/// the cell (named after the world), plus the positivity list.
///
/// Rows `Σ_{v∈X} p_v > c` come from minimal neighborhoods and rows
/// `Σ_{v∈Y} p_v ≤ c` from maximal non-neighborhoods; upward closure makes
/// the rest redundant. With `Σ p_v = 1`, a row for `Y` and one for `X`
/// together say `p·(χ_X − χ_Y) > 0`, so a solution is a functional positive
/// on every such difference vector.
pub fn measure_constraints(m: &NeighborhoodModel, c: &Threshold, k: usize) -> (Vec<LinearConstraint>, Vec<String>) {
    let frame = m.frame();
    let cell = &frame.cells()[k];
    let var = |w: usize| frame.world_name(w).to_string();
    let mut cons = vec![LinearConstraint::eq(LinearConstraint::sum_of(cell.iter().map(var)), Rational::one())];
    for g in m.generators(k) {
        cons.push(LinearConstraint::gt(LinearConstraint::sum_of(g.iter().map(var)), c.value().clone()));
    }
    for y in m.maximal_non_neighborhoods(k).iter().filter(|y| !y.is_empty()) {
        cons.push(LinearConstraint::le(LinearConstraint::sum_of(y.iter().map(var)), c.value().clone()));
    }
    (cons, cell.iter().map(var).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthesisResult {
    Feasible(ProbabilityModel),
    /// The first cell whose constraints have no solution.
    Infeasible {
        cell: usize,
    },
}

impl SynthesisResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SynthesisResult::Feasible(_))
    }
}

/// A probability model agreeing with `m` at threshold `c`, if one exists.
/// Cells get equal total weight; conditional probabilities do not depend
/// on that choice.
pub fn synthesize_measure(m: &NeighborhoodModel, c: &Threshold) -> SynthesisResult {
    let frame = m.frame();
    let cells = frame.cells().len();
    let results: Vec<LPResult> = (0..cells)
        .into_par_iter()
        .map(|k| {
            let (cons, pos) = measure_constraints(m, c, k);
            lp_feasible(&cons, &pos)
        })
        .collect();
    let share = Rational::new(1, cells as i64);
    let mut weights = vec![Rational::zero(); frame.num_worlds()];
    for (k, res) in results.iter().enumerate() {
        let Some(a) = res.assignment() else {
            return SynthesisResult::Infeasible { cell: k };
        };
        for w in frame.cells()[k].iter() {
            weights[w] = &a[frame.world_name(w)] * &share;
        }
    }
    let p = ProbabilityModel::new(frame.clone(), weights).expect("LP solution is a full-support measure");
    assert_eq!(check_agreement(m, &p, c), Ok(Verdict::Holds), "synthesized measure must agree");
    SynthesisResult::Feasible(p)
}

/// Tally of (property verdict, LP verdict) pairs for one threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExploreRow {
    pub threshold: String,
    pub properties: Vec<String>,
    pub models: usize,
    pub holds_and_feasible: usize,
    pub holds_but_infeasible: usize,
    pub fails_but_feasible: usize,
    pub fails_and_infeasible: usize,
    /// First few single-cell structures in the discordant columns, as
    /// generator lists of world names.
    pub discordant_examples: Vec<(bool, Vec<Vec<String>>)>,
}

/// For each threshold, run the candidate properties (the mid-threshold
/// ones at `1/2`) and the LP on every single-cell structure with up to
/// `max_worlds` worlds. Empirical only: agreement in the tally is not a
/// proof of any characterization.
pub fn explore_thresholds(
    thresholds: &[Threshold],
    max_worlds: usize,
    budget: &BruteForceBudget,
) -> Result<Vec<ExploreRow>, NeighborhoodError> {
    let mut models = Vec::new();
    for n in 1..=max_worlds {
        let names: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let frame = Frame::from_names(&refs, &[&refs], &[]).expect("valid frame");
        for (partition, gens) in enumerate_neighborhood_structures(n, false) {
            if partition.len() == 1 {
                models.push(NeighborhoodModel::new(frame.clone(), gens).expect("enumerated structure is valid"));
            }
        }
    }
    thresholds
        .iter()
        .map(|c| {
            let verdicts: Vec<(bool, bool)> = models
                .par_iter()
                .map(|m| {
                    let report = if *c == Threshold::half() {
                        check_mid_threshold(m, budget)?
                    } else {
                        check_conjectured(m, c, budget)?
                    };
                    Ok((report.all_hold(), synthesize_measure(m, c).is_feasible()))
                })
                .collect::<Result<_, NeighborhoodError>>()?;
            let count = |p: bool, f: bool| verdicts.iter().filter(|&&v| v == (p, f)).count();
            let discordant_examples = verdicts
                .iter()
                .zip(&models)
                .filter(|((p, f), _)| p != f)
                .take(3)
                .map(|((p, _), m)| (*p, m.generators(0).iter().map(|g| m.frame().names_of(g)).collect()))
                .collect();
            let properties = if *c == Threshold::half() {
                vec!["d".into(), "sc".into(), format!("scott<={}", budget.m_max)]
            } else {
                let (s_prime, s) = crate::neighborhood::conjecture_parameters(c);
                vec![format!("sc{}^{}", if s_prime.is_integer() { 0 } else { 1 }, s), format!("ws<={}", budget.m_max)]
            };
            Ok(ExploreRow {
                threshold: c.to_string(),
                properties,
                models: models.len(),
                holds_and_feasible: count(true, true),
                holds_but_infeasible: count(true, false),
                fails_but_feasible: count(false, true),
                fails_and_infeasible: count(false, false),
                discordant_examples,
            })
        })
        .collect()
}
