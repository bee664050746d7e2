//! The simplex feasibility check against Fourier–Motzkin elimination.

mod common;

use std::collections::BTreeSet;

use betlogic::semantics::enumerate_neighborhood_structures;
use betlogic::synthesis::{lp_feasible, synthesize_measure, LinearConstraint, Relation};
use betlogic::{Frame, NeighborhoodModel, Rational, Threshold};
use proptest::prelude::*;

/// `a·x ≥ b`, or `a·x > b` when strict.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    a: Vec<Rational>,
    b: Rational,
    strict: bool,
}

fn rows_of(cons: &[LinearConstraint], positivity: &[String], vars: &[String]) -> Vec<Row> {
    let coeffs = |c: &LinearConstraint| -> Vec<Rational> {
        vars.iter().map(|v| c.coefficients.get(v).cloned().unwrap_or_else(Rational::zero)).collect()
    };
    let mut out = Vec::new();
    for c in cons {
        let a = coeffs(c);
        match c.relation {
            Relation::Ge => out.push(Row { a, b: c.bound.clone(), strict: false }),
            Relation::Gt => out.push(Row { a, b: c.bound.clone(), strict: true }),
            Relation::Eq => {
                out.push(Row { a: a.iter().map(|q| -q.clone()).collect(), b: -c.bound.clone(), strict: false });
                out.push(Row { a, b: c.bound.clone(), strict: false });
            }
        }
    }
    for p in positivity {
        let a = vars.iter().map(|v| if v == p { Rational::one() } else { Rational::zero() }).collect();
        out.push(Row { a, b: Rational::zero(), strict: true });
    }
    out
}

fn fm_feasible(mut rows: Vec<Row>, nvars: usize) -> bool {
    for k in 0..nvars {
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for r in rows {
            let ak = r.a[k].clone();
            if ak.is_zero() {
                rest.insert(r);
            } else {
                // scale so the coefficient of x_k is ±1
                let s = ak.abs().recip();
                let scaled = Row { a: r.a.iter().map(|q| q * &s).collect(), b: &r.b * &s, strict: r.strict };
                if ak.is_positive() {
                    lower.push(scaled);
                } else {
                    upper.push(scaled);
                }
            }
        }
        for l in &lower {
            for u in &upper {
                let a = l.a.iter().zip(&u.a).map(|(x, y)| x + y).collect();
                rest.insert(Row { a, b: &l.b + &u.b, strict: l.strict || u.strict });
            }
        }
        rows = rest.into_iter().collect();
    }
    let zero = Rational::zero();
    rows.iter().all(|r| if r.strict { zero > r.b } else { zero >= r.b })
}

fn check(cons: &[LinearConstraint], positivity: &[String], vars: &[String]) -> Result<(), TestCaseError> {
    let lp = lp_feasible(cons, positivity);
    let fm = fm_feasible(rows_of(cons, positivity, vars), vars.len());
    prop_assert_eq!(lp.is_feasible(), fm, "{}", betlogic::synthesis::dump(cons, positivity));
    if let Some(x) = lp.assignment() {
        for c in cons {
            prop_assert!(c.satisfied_by(x), "{} violated", c);
        }
        for p in positivity {
            prop_assert!(x[p].is_positive());
        }
    }
    Ok(())
}

fn constraint(nvars: usize) -> impl Strategy<Value = LinearConstraint> {
    (prop::collection::vec(-3i64..=3, nvars), 0..3u8, -4i64..=4).prop_map(|(a, rel, b)| {
        let terms: Vec<(String, Rational)> =
            a.iter().enumerate().map(|(i, &q)| (format!("x{i}"), Rational::from_integer(q))).collect();
        let relation = [Relation::Ge, Relation::Gt, Relation::Eq][rel as usize];
        LinearConstraint::new(terms, relation, Rational::from_integer(b))
    })
}

fn system() -> impl Strategy<Value = (usize, Vec<LinearConstraint>, Vec<bool>)> {
    (1usize..=3).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(constraint(n), 0..=6), prop::collection::vec(any::<bool>(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simplex_agrees_with_elimination((n, cons, pos) in system()) {
        let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let positivity: Vec<String> = vars.iter().zip(&pos).filter(|(_, &p)| p).map(|(v, _)| v.clone()).collect();
        check(&cons, &positivity, &vars)?;
    }
}

#[test]
fn degenerate_systems() {
    let x = || [("x", Rational::one())];
    let one = Rational::one;
    // x > 1 and x < 1
    let cons = [LinearConstraint::gt(x(), one()), LinearConstraint::lt(x(), one())];
    assert!(!lp_feasible(&cons, &[]).is_feasible());
    // x ≥ 1 and x ≤ 1
    let cons = [LinearConstraint::ge(x(), one()), LinearConstraint::le(x(), one())];
    assert_eq!(lp_feasible(&cons, &[]).assignment().unwrap()["x"], one());
    // an empty system, and a variable-free false row
    assert!(lp_feasible(&[], &["x".into()]).is_feasible());
    assert!(
        !lp_feasible(&[LinearConstraint::gt(Vec::<(String, Rational)>::new(), Rational::zero())], &[]).is_feasible()
    );
}

/// Measure synthesis on every neighborhood structure with at most four
/// worlds, against elimination on one row per subset of each cell.
#[test]
fn synthesis_agrees_with_elimination() {
    for c in [Threshold::half(), Threshold::of(1, 3), Threshold::of(2, 3)] {
        for n in 1..=4 {
            let names: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
            for (p, gens) in enumerate_neighborhood_structures(n, false) {
                let frame = Frame::new(names.clone(), p.clone(), vec![Default::default(); n]).unwrap();
                let m = NeighborhoodModel::new(frame, gens).unwrap();
                let by_cells = p.iter().all(|cell| {
                    let fam = common::explicit_family(&m, cell[0]);
                    let vars: Vec<String> = cell.iter().map(|&w| names[w].clone()).collect();
                    let mut cons = vec![LinearConstraint::eq(LinearConstraint::sum_of(vars.clone()), Rational::one())];
                    for mask in 1u32..(1 << cell.len()) {
                        let x: BTreeSet<usize> =
                            (0..cell.len()).filter(|i| mask >> i & 1 == 1).map(|i| cell[i]).collect();
                        let terms = LinearConstraint::sum_of(x.iter().map(|&w| names[w].clone()));
                        cons.push(if fam.contains(&x) {
                            LinearConstraint::gt(terms, c.value().clone())
                        } else {
                            LinearConstraint::le(terms, c.value().clone())
                        });
                    }
                    fm_feasible(rows_of(&cons, &vars, &vars), vars.len())
                });
                assert_eq!(synthesize_measure(&m, &c).is_feasible(), by_cells, "c = {c}: {:?}", m.all_generators());
            }
        }
    }
}
