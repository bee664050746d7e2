//! Acceptance gate: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test -p betlogic --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use betlogic::calculus::{check_derivation, instantiate, CheckResult, SchemeId, Substitution};
use betlogic::corpus::{self, mutants, proof_corpus};
use betlogic::neighborhood::BruteForceBudget;
use betlogic::semantics::{extension_nbhd, random_probability_model};
use betlogic::synthesis::{check_definetti, realize_comparative, synthesize_measure, ComparisonTable, SynthesisResult};
use betlogic::{
    check_mid_threshold, derive_neighborhoods, eval_kb_nbhd, eval_kb_prob, parse_kb, EventSet, Formula,
    NeighborhoodModel, ProbabilityModel, Rational, Threshold,
};
use common::{explicit_family, nbhd_ext, prob_ext, random_formula, ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn atoms3() -> Vec<String> {
    ["p", "q", "r"].iter().map(|s| s.to_string()).collect()
}

fn c1_horse_exactness() -> Outcome {
    let raw = [3i64, 2, 1];
    let m = corpus::horses();
    let got = m.conditional_probability(0, &EventSet::from_indices(3, [0, 2]));
    let want = Rational::new(raw[0] + raw[2], raw.iter().sum());
    ensure(got == want && got == Rational::new(2, 3), || format!("P_w1({{w1,w3}}) = {got}"))?;
    let split = corpus::horses_split();
    let got = split.conditional_probability(0, &EventSet::singleton(3, 2));
    ensure(got.is_zero(), || format!("split model P_w1({{w3}}) = {got}"))?;
    Ok("2/3 and 0, exact".into())
}

fn c2_non_normality() -> Outcome {
    let half = Threshold::half();
    let u = corpus::horses_uniform();
    let items = [
        ("B(h1 | h2 | h3)", true),
        ("B(h1 | h2) & B(h1 | h3) & B(h2 | h3)", true),
        ("B ~h1 & B ~h2 & B ~h3", true),
        ("~B(~h1 & ~h2)", true),
    ];
    for (s, want) in items {
        let f = parse_kb(s).unwrap();
        let lib = eval_kb_prob(&u, 0, &f, &half);
        let oracle = prob_ext(&u, &f, &half)[0];
        ensure(lib == want && oracle == want, || format!("{s}: library {lib}, oracle {oracle}, expected {want}"))?;
    }
    let f = parse_kb("B(~h1 -> h2) -> (B ~h1 -> B h2)").unwrap();
    for (p, q) in [(1, 2), (2, 3)] {
        let c = Threshold::of(p, q);
        // weights (q−p)/2q, p/q, (q−p)/2q built here, not taken from the corpus
        let side = Rational::new(q - p, 2 * q);
        let frame = corpus::horses().frame().clone();
        let m = ProbabilityModel::new(frame, vec![side.clone(), Rational::new(p, q), side]).unwrap();
        ensure(m == corpus::horses_skewed(&c), || format!("skewed model differs at c = {c}"))?;
        let lib = eval_kb_prob(&m, 0, &f, &c);
        let oracle = prob_ext(&m, &f, &c)[0];
        ensure(!lib && !oracle, || format!("c = {c}: library {lib}, oracle {oracle}"))?;
    }
    ensure(corpus::horses_demo().iter().all(|j| j.ok()), || "horses demo disagrees".into())?;
    Ok("four judgments hold; closure under consequence fails at c = 1/2, 2/3".into())
}

const WF_X: [&str; 7] = ["efg", "abg", "adf", "bde", "ace", "cdg", "bcf"];
const WF_Y: [&str; 7] = ["abcd", "cdef", "bceg", "acfg", "bdfg", "abef", "adeg"];

fn letters(s: &str) -> EventSet {
    EventSet::from_indices(7, s.bytes().map(|b| (b - b'a') as usize))
}

fn c3_walley_fine() -> Outcome {
    let cs = [Threshold::of(1, 3), Threshold::half(), Threshold::of(3, 5), Threshold::of(2, 3), Threshold::of(3, 4)];
    let budget = BruteForceBudget { max_cell: 7, ..BruteForceBudget::with_m_max(2) };
    let r = corpus::walley_fine_demo(&cs, &budget);
    ensure(r.base.all_hold(), || format!("base properties: {:?}", r.base.first_failure()))?;
    ensure(r.scott_violation && r.xs.len() == 7, || "no m = 7 violation".into())?;
    let xs: Vec<EventSet> = WF_X.iter().map(|s| letters(s)).collect();
    let ys: Vec<EventSet> = WF_Y.iter().map(|s| letters(s)).collect();
    ensure(r.xs == xs && r.ys == ys, || "lists differ from the seven 3-sets and their complements".into())?;
    // counting, from the letter strings alone
    for w in b'a'..=b'g' {
        let nx = WF_X.iter().filter(|s| s.as_bytes().contains(&w)).count();
        let ny = WF_Y.iter().filter(|s| s.as_bytes().contains(&w)).count();
        ensure(nx == 3 && ny == 4, || format!("world {}: {nx} in X, {ny} in Y", w as char))?;
    }
    ensure(r.x_counts == vec![3; 7] && r.y_counts == vec![4; 7], || "reported counts differ".into())?;
    // every X is a neighborhood and no Y is; with the counts this rules out
    // any agreeing measure: 3 = ΣP(Xᵢ) > 7c ≥ ΣP(Yᵢ) = 4
    let m = corpus::walley_fine();
    let fam = explicit_family(&m, 0);
    let has = |s: &EventSet| fam.contains(&s.iter().collect());
    ensure(xs.iter().all(has) && !ys.iter().any(has), || "membership of the lists".into())?;
    for (c, feasible) in &r.synthesis {
        ensure(!feasible, || format!("synthesis feasible at c = {c}"))?;
    }
    Ok(format!("INFEASIBLE at {} thresholds; counts 3 and 4", cs.len()))
}

fn c4_kps() -> Outcome {
    let rel = corpus::kps_statements();
    // the four differences Y − X sum to zero, so positive masses cannot all
    // make them strictly positive
    let mut sum = [0i32; 5];
    for (x, _, y) in &rel.statements {
        for (i, s) in sum.iter_mut().enumerate() {
            *s += y.contains(i) as i32 - x.contains(i) as i32;
        }
    }
    ensure(sum == [0; 5], || format!("difference vectors sum to {sum:?}"))?;
    ensure(!realize_comparative(&rel, false).is_feasible(), || "KPS realized".into())?;
    ensure(!realize_comparative(&rel, true).is_feasible(), || "KPS realized with full support".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let weights: Vec<Rational> = (0..5).map(|_| Rational::new(rng.gen_range(0..20), 20)).collect();
        if weights.iter().all(Rational::is_zero) {
            continue;
        }
        let t = ComparisonTable::from_measure(corpus::kps_universe(), &weights).unwrap();
        let r = check_definetti(&t);
        ensure(r.all_hold(), || format!("weights {weights:?}: {:?}", r.first_failure()))?;
    }
    Ok("INFEASIBLE; sampled measures satisfy all five conditions".into())
}

struct Sample {
    model: ProbabilityModel,
    formulas: Vec<Formula>,
}

fn samples() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..500)
        .map(|_| {
            let model = random_probability_model(&mut rng, 6, &atoms3());
            let formulas = (0..50).map(|_| random_formula(&mut rng, &["p", "q", "r"], 4)).collect();
            Sample { model, formulas }
        })
        .collect()
}

fn agreement_thresholds() -> [Threshold; 3] {
    [Threshold::half(), Threshold::of(3, 5), Threshold::of(2, 3)]
}

fn c5_agreement(samples: &[Sample]) -> Outcome {
    let ts = agreement_thresholds();
    let bad = samples.par_iter().enumerate().find_map_any(|(i, s)| {
        let m = &s.model;
        ts.iter().find_map(|c| {
            let mc = derive_neighborhoods(m, c);
            s.formulas.iter().find_map(|f| {
                let oracle = prob_ext(m, f, c);
                let nb_oracle = nbhd_ext(&mc, f);
                (0..m.frame().num_worlds()).find_map(|w| {
                    let (p, n) = (eval_kb_prob(m, w, f, c), eval_kb_nbhd(&mc, w, f));
                    (p != n || p != oracle[w] || n != nb_oracle[w]).then(|| {
                        format!("model {i}, c = {c}, w{}: {f}: prob {p}, nbhd {n}, oracle {}", w + 1, oracle[w])
                    })
                })
            })
        })
    });
    let evals: usize = samples.iter().map(|s| s.model.frame().num_worlds() * s.formulas.len() * ts.len()).sum();
    match bad {
        Some(e) => Err(e),
        None => Ok(format!("{} models, {evals} world evaluations, 0 mismatches", samples.len())),
    }
}

fn c10_dual(samples: &[Sample]) -> Outcome {
    let ts = agreement_thresholds();
    let bad = samples.par_iter().enumerate().find_map_any(|(i, s)| {
        let m = &s.model;
        ts.iter().find_map(|c| {
            let floor = Rational::one() - c.value().clone();
            s.formulas.iter().find_map(|f| {
                let ext = prob_ext(m, f, c);
                let dual = Formula::b_dual(f.clone());
                (0..m.frame().num_worlds()).find_map(|w| {
                    let lhs = eval_kb_prob(m, w, &dual, c);
                    let rhs = ratio(m, w, &ext) >= floor;
                    (lhs != rhs).then(|| format!("model {i}, c = {c}, w{}: {f}", w + 1))
                })
            })
        })
    });
    match bad {
        Some(e) => Err(e),
        None => Ok("0 mismatches on the criterion 5 samples".into()),
    }
}

fn c6_round_trip() -> Outcome {
    let half = Threshold::half();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let models: Vec<ProbabilityModel> = (0..200).map(|_| random_probability_model(&mut rng, 6, &atoms3())).collect();
    let bad = models.par_iter().enumerate().find_map_any(|(i, m)| {
        let n = derive_neighborhoods(m, &half);
        let p = match synthesize_measure(&n, &half) {
            SynthesisResult::Feasible(p) => p,
            SynthesisResult::Infeasible { cell } => return Some(format!("model {i}: infeasible at cell {cell}")),
        };
        let again = derive_neighborhoods(&p, &half);
        let frame = m.frame();
        (0..frame.num_worlds()).find_map(|w| {
            let fam = explicit_family(&n, w);
            if fam != explicit_family(&again, w) {
                return Some(format!("model {i}, w{}: re-derived system differs", w + 1));
            }
            // agreement of the synthesized measure, set by set
            let cell = frame.cell(w);
            cell.subsets().find_map(|x| {
                let marks: Vec<bool> = (0..frame.num_worlds()).map(|v| x.contains(v)).collect();
                let believed = ratio(&p, w, &marks) > *half.value();
                (believed != fam.contains(&x.iter().collect()))
                    .then(|| format!("model {i}, w{}: measure disagrees on {:?}", w + 1, x.to_vec()))
            })
        })
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(format!("{} models round-trip set for set", models.len())),
    }
}

fn c7_characterization() -> Outcome {
    let half = Threshold::half();
    let budget = BruteForceBudget::default();
    let (visited, failure) = common::for_all_models(4, &["p", "q"], false, |m| {
        let props = check_mid_threshold(m, &budget).expect("cells of at most four worlds are in budget");
        let passes = ["d", "sc", "scott"].iter().all(|p| props.get(p).is_some_and(|v| v.holds()));
        let feasible = synthesize_measure(m, &half).is_feasible();
        (passes != feasible).then(|| format!("properties {passes}, LP {feasible}: {:?}", m.all_generators()))
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(format!("{visited} models, 0 exceptions")),
    }
}

fn scheme_instance(s: SchemeId, images: &[Formula]) -> Formula {
    let t = s.template().expect("scheme has a template");
    let sub: Substitution = s.metavariables().into_iter().zip(images.iter().cloned()).collect();
    instantiate(&t, &sub)
}

/// All sixteen propositional functions of `p`, `q`.
fn boolean_pool() -> Vec<Formula> {
    let (p, q) = (Formula::atom("p"), Formula::atom("q"));
    (0u8..16)
        .map(|table| {
            let rows = [(true, true), (true, false), (false, true), (false, false)];
            Formula::disj(rows.iter().enumerate().filter(|(i, _)| table >> i & 1 == 1).map(|(_, &(a, b))| {
                let lit = |f: &Formula, t: bool| if t { f.clone() } else { Formula::not(f.clone()) };
                Formula::and(lit(&p, a), lit(&q, b))
            }))
        })
        .collect()
}

fn valid_nbhd(m: &NeighborhoodModel, f: &Formula) -> bool {
    extension_nbhd(m, f) == m.frame().universe()
}

fn c8_soundness() -> Outcome {
    let atoms = [Formula::atom("p"), Formula::atom("q"), Formula::atom("r")];
    let base: Vec<(SchemeId, Formula)> =
        SchemeId::KB_SCHEMES.iter().map(|&s| (s, scheme_instance(s, &atoms[..s.metavariables().len()]))).collect();
    let (n1, failure) = common::for_all_models(4, &["p", "q", "r"], false, |m| {
        base.iter().find(|(_, f)| !valid_nbhd(m, f)).map(|(s, _)| format!("{s} fails on {:?}", m.all_generators()))
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let pool = boolean_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mid: Vec<(SchemeId, Formula)> = [SchemeId::D, SchemeId::Sc]
        .iter()
        .map(|&s| (s, scheme_instance(s, &atoms[..s.metavariables().len()])))
        .collect();
    for m in 1..=3 {
        for _ in 0..40 {
            let images: Vec<Formula> = (0..2 * m).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
            mid.push((SchemeId::Scott(m), scheme_instance(SchemeId::Scott(m), &images)));
        }
    }
    let (n2, failure) = common::for_all_models(4, &["p", "q"], true, |m| {
        mid.iter()
            .find(|(_, f)| !valid_nbhd(m, f))
            .map(|(s, f)| format!("{s} instance {f} fails on {:?}", m.all_generators()))
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let items = c8_probability_items()?;
    Ok(format!("{n1} models for the base schemes, {n2} mid-threshold models, {} instances", mid.len() + items))
}

/// Validities about belief on sampled probability models, with each item's
/// threshold side condition.
fn c8_probability_items() -> Result<usize, String> {
    let any = vec![
        Threshold::of(1, 4),
        Threshold::of(1, 3),
        Threshold::half(),
        Threshold::of(3, 5),
        Threshold::of(2, 3),
        Threshold::of(3, 4),
    ];
    let high: Vec<Threshold> = any.iter().filter(|c| *c.value() >= Rational::new(1, 2)).cloned().collect();
    let half = vec![Threshold::half()];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let names = ["p", "q", "r"];
    let mut cases = Vec::new();
    for i in 0..500 {
        let model = random_probability_model(&mut rng, 6, &atoms3());
        let mut g = |k: usize| -> Vec<Formula> { (0..k).map(|_| random_formula(&mut rng, &names, 2)).collect() };
        let mut checks: Vec<(String, Formula, &Vec<Threshold>)> = Vec::new();
        let f = g(2);
        checks.push((
            "known is believed".into(),
            Formula::imp(Formula::k(f[0].clone()), Formula::b(f[0].clone())),
            &any,
        ));
        for s in [SchemeId::Bf, SchemeId::N, SchemeId::Ap, SchemeId::An, SchemeId::Kbm] {
            checks.push((s.to_string(), scheme_instance(s, &f[..s.metavariables().len()]), &any));
        }
        checks.push(("D".into(), scheme_instance(SchemeId::D, &f[..1]), &high));
        checks.push(("SC".into(), scheme_instance(SchemeId::Sc, &f), &half));
        for m in 1..=3 {
            let s = SchemeId::Scott(m);
            checks.push((s.to_string(), scheme_instance(s, &g(2 * m)), &half));
        }
        cases.push((i, model, checks));
    }
    let count = cases.iter().map(|(_, _, ch)| ch.iter().map(|(_, _, ts)| ts.len()).sum::<usize>()).sum();
    let bad = cases.par_iter().find_map_any(|(i, m, checks)| {
        checks.iter().find_map(|(name, f, ts)| {
            ts.iter().find_map(|c| {
                let oracle = prob_ext(m, f, c);
                (0..m.frame().num_worlds())
                    .find(|&w| !oracle[w] || !eval_kb_prob(m, w, f, c))
                    .map(|w| format!("{name} fails on sample {i} at w{}, c = {c}: {f}", w + 1))
            })
        })
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

fn c9_corpus() -> Outcome {
    let mut total = 0;
    for cp in proof_corpus() {
        let d = &cp.derivation;
        ensure(d.conclusion() == Some(&parse_kb(cp.statement).unwrap()), || format!("{}: wrong conclusion", cp.name))?;
        let r = check_derivation(d, cp.theory);
        ensure(r == CheckResult::Accepted, || format!("{}: {r:?}", cp.name))?;
        for m in mutants(d, cp.theory, 10) {
            total += 1;
            match check_derivation(&m.derivation, cp.theory) {
                CheckResult::RejectedAt { line, .. } if line == m.line => {}
                other => return Err(format!("{} mutant at line {} ({}): {other:?}", cp.name, m.line, m.kind)),
            }
        }
    }
    Ok(format!("{} derivations accepted, {total} mutants rejected", proof_corpus().len()))
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    let mut report = |n: usize, what: &str, limit: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}, but took {took:.2?} (limit {limit:?})")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {what}: {detail} ({took:.2?})"),
            Err(e) => {
                println!("criterion {n:>2} FAIL  {what}: {e} ({took:.2?})");
                failures.push(n);
            }
        }
    };
    let secs = Duration::from_secs;
    report(1, "horse-racing exactness", Duration::from_millis(1), &mut c1_horse_exactness);
    report(2, "non-normality", secs(1), &mut c2_non_normality);
    report(3, "Walley-Fine", secs(5), &mut c3_walley_fine);
    report(4, "KPS", secs(1), &mut c4_kps);
    let samples = samples();
    report(5, "agreement", secs(60), &mut || c5_agreement(&samples));
    report(6, "round-trip synthesis", secs(120), &mut c6_round_trip);
    report(7, "mid-threshold characterization", secs(600), &mut c7_characterization);
    report(8, "soundness suites", secs(600), &mut c8_soundness);
    report(9, "proof corpus", secs(5), &mut c9_corpus);
    report(10, "dual lemma", secs(60), &mut || c10_dual(&samples));
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
