//! Test oracles: naive evaluators and generators that share no code with the
//! library's evaluation paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

use betlogic::formula::Node;
use betlogic::semantics::{enumerate_neighborhood_structures, valuations};
use betlogic::{EventSet, Formula, Frame, NeighborhoodModel, ProbabilityModel, Rational, Threshold};
use rand::Rng;
use rayon::prelude::*;

pub fn cell_worlds(frame: &Frame, w: usize) -> Vec<usize> {
    frame.cells().iter().find(|c| c.contains(w)).expect("every world has a cell").iter().collect()
}

/// Truth table of `f` over all worlds, built bottom-up; `P_w` is summed
/// from the raw weights world by world.
pub fn prob_ext(m: &ProbabilityModel, f: &Formula, c: &Threshold) -> Vec<bool> {
    let frame = m.frame();
    let n = frame.num_worlds();
    match f.node() {
        Node::Top => vec![true; n],
        Node::Atom(a) => (0..n).map(|w| frame.valuation(w).contains(a)).collect(),
        Node::Not(a) => prob_ext(m, a, c).into_iter().map(|t| !t).collect(),
        Node::And(a, b) => prob_ext(m, a, c).into_iter().zip(prob_ext(m, b, c)).map(|(x, y)| x && y).collect(),
        Node::K(a) => {
            let e = prob_ext(m, a, c);
            (0..n).map(|w| cell_worlds(frame, w).into_iter().all(|v| e[v])).collect()
        }
        Node::B(a) => {
            let e = prob_ext(m, a, c);
            (0..n).map(|w| ratio(m, w, &e) > *c.value()).collect()
        }
    }
}

/// `P_w` of the worlds marked in `ext`.
pub fn ratio(m: &ProbabilityModel, w: usize, ext: &[bool]) -> Rational {
    let cell = cell_worlds(m.frame(), w);
    let total: Rational = cell.iter().map(|&v| m.weights()[v].clone()).sum();
    let hit: Rational = cell.iter().filter(|&&v| ext[v]).map(|&v| m.weights()[v].clone()).sum();
    hit / total
}

/// The upward closure of the generators of `[w]`, written out set by set.
pub fn explicit_family(m: &NeighborhoodModel, w: usize) -> Vec<BTreeSet<usize>> {
    let frame = m.frame();
    let k = frame.cells().iter().position(|c| c.contains(w)).unwrap();
    let cell = cell_worlds(frame, w);
    let gens: Vec<BTreeSet<usize>> = m.generators(k).iter().map(|g| g.iter().collect()).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << cell.len()) {
        let s: BTreeSet<usize> = cell.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        if gens.iter().any(|g| g.is_subset(&s)) {
            out.push(s);
        }
    }
    out
}

pub fn nbhd_ext(m: &NeighborhoodModel, f: &Formula) -> Vec<bool> {
    let frame = m.frame();
    let n = frame.num_worlds();
    match f.node() {
        Node::Top => vec![true; n],
        Node::Atom(a) => (0..n).map(|w| frame.valuation(w).contains(a)).collect(),
        Node::Not(a) => nbhd_ext(m, a).into_iter().map(|t| !t).collect(),
        Node::And(a, b) => nbhd_ext(m, a).into_iter().zip(nbhd_ext(m, b)).map(|(x, y)| x && y).collect(),
        Node::K(a) => {
            let e = nbhd_ext(m, a);
            (0..n).map(|w| cell_worlds(frame, w).into_iter().all(|v| e[v])).collect()
        }
        Node::B(a) => {
            let e = nbhd_ext(m, a);
            (0..n)
                .map(|w| {
                    let x: BTreeSet<usize> = cell_worlds(frame, w).into_iter().filter(|&v| e[v]).collect();
                    explicit_family(m, w).contains(&x)
                })
                .collect()
        }
    }
}

/// Random formula over `atoms` of depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.1) { Formula::top() } else { Formula::atom(atoms[rng.gen_range(0..atoms.len())]) };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => Formula::not(random_formula(rng, atoms, d)),
        1 => Formula::and(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        2 => Formula::or(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        3 => Formula::imp(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        4 => Formula::k(random_formula(rng, atoms, d)),
        _ => Formula::b(random_formula(rng, atoms, d)),
    }
}

/// Runs `check` on every neighborhood model with `1..=max_worlds` worlds
/// over every valuation of `atoms`, in parallel over structures. Returns the
/// number of models visited and the first failure message, if any.
pub fn for_all_models<F>(
    max_worlds: usize,
    atoms: &[&str],
    mid_threshold_only: bool,
    check: F,
) -> (usize, Option<String>)
where
    F: Fn(&NeighborhoodModel) -> Option<String> + Sync,
{
    let atoms: Vec<String> = atoms.iter().map(|s| s.to_string()).collect();
    let mut visited = 0;
    for n in 1..=max_worlds {
        let names: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        let vals: Vec<_> = valuations(n, &atoms).collect();
        let structures = enumerate_neighborhood_structures(n, mid_threshold_only);
        let failure = structures.par_iter().find_map_any(|(p, gens)| {
            vals.iter().find_map(|v| {
                let frame = Frame::new(names.clone(), p.clone(), v.clone()).unwrap();
                check(&NeighborhoodModel::new(frame, gens.clone()).unwrap())
            })
        });
        visited += structures.len() * vals.len();
        if failure.is_some() {
            return (visited, failure);
        }
    }
    (visited, None)
}

pub fn set(n: usize, ws: &[usize]) -> EventSet {
    EventSet::from_indices(n, ws.iter().copied())
}
