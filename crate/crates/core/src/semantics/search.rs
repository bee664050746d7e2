//! Finite model enumeration and randomized falsification.
//!
//! Neighborhood models are enumerated by world count, then set partition
//! (restricted-growth order, coarsest first), then valuation
//! (lexicographic, first world most significant), then per-cell antichain
//! (first cell most significant). The first falsified model in this order
//! is reported even when the search runs in parallel.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{extension_nbhd, extension_prob};
use crate::event::EventSet;
use crate::formula::{Formula, Threshold};
use crate::model::{Frame, NeighborhoodModel, ProbabilityModel};
use crate::neighborhood::cell_is_mid_threshold;
use crate::rational::Rational;

pub const MAX_SEARCH_WORLDS: usize = 5;
pub const MAX_SEARCH_ATOMS: usize = 3;
const FILTER_M_MAX: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(
        "search bound too large: {worlds} worlds and {atoms} atoms (limits {MAX_SEARCH_WORLDS} and {MAX_SEARCH_ATOMS})"
    )]
    BoundTooLarge { worlds: usize, atoms: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchBound {
    Exhaustive { max_worlds: usize, atoms: usize, mid_threshold: bool, models_checked: u64 },
    Sampled { trials: usize, max_worlds: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountermodelResult<M> {
    /// `φ` is false at `world` in `model`.
    Found {
        model: M,
        world: usize,
    },
    NoneUpToBound(SearchBound),
}

impl<M> CountermodelResult<M> {
    pub fn is_found(&self) -> bool {
        matches!(self, CountermodelResult::Found { .. })
    }
}

/// Set partitions of `{0..n}` in restricted-growth-string order.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, rgs: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            let blocks = rgs.iter().max().map_or(0, |m| m + 1);
            let mut p = vec![Vec::new(); blocks];
            for (w, &b) in rgs.iter().enumerate() {
                p[b].push(w);
            }
            out.push(p);
            return;
        }
        for b in 0..=max.min(i) {
            rgs.push(b);
            go(i + 1, n, rgs, if b == max { max + 1 } else { max }, out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Every valuation of `atoms` over `n` worlds, lexicographically.
pub fn valuations(n: usize, atoms: &[String]) -> impl Iterator<Item = Valuation> + '_ {
    let a = atoms.len();
    let total: u64 = 1 << (a * n);
    (0..total).map(move |code| {
        (0..n)
            .map(|w| {
                let mask = (code >> (a * (n - 1 - w))) & ((1 << a) - 1);
                (0..a).filter(|j| mask & (1 << j) != 0).map(|j| atoms[j].clone()).collect()
            })
            .collect()
    })
}

/// Local subsets of a `k`-set, nonempty, in canonical order.
fn local_subsets(k: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (1..(1u32 << k)).collect();
    v.sort_by_key(|&m| {
        let members: Vec<u32> = (0..k as u32).filter(|i| m & (1 << i) != 0).collect();
        (m.count_ones(), members)
    });
    v
}

/// Nonempty antichains of nonempty subsets of a `k`-set, as lists of
/// local masks in lexicographic order of their canonically sorted members.
fn local_antichains(k: usize) -> &'static [Vec<u32>] {
    static CACHE: OnceLock<Vec<Vec<Vec<u32>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        (0..=MAX_SEARCH_WORLDS)
            .map(|k| {
                let subs = local_subsets(k);
                let mut out = Vec::new();
                let mut cur: Vec<u32> = Vec::new();
                fn dfs(subs: &[u32], start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
                    for i in start..subs.len() {
                        let s = subs[i];
                        if cur.iter().all(|&t| s & t != s && s & t != t) {
                            cur.push(s);
                            out.push(cur.clone());
                            dfs(subs, i + 1, cur, out);
                            cur.pop();
                        }
                    }
                }
                dfs(&subs, 0, &mut cur, &mut out);
                out
            })
            .collect()
    });
    &cache[k]
}

/// Whether each local antichain of a `k`-cell satisfies (d), (sc) and
/// (scott) up to arity 3.
fn local_mid_threshold(k: usize) -> &'static [bool] {
    static CACHE: OnceLock<Vec<Vec<bool>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        (0..=MAX_SEARCH_WORLDS)
            .map(|k| {
                let cell = EventSet::full(k);
                local_antichains(k)
                    .par_iter()
                    .map(|ac| {
                        let gens: Vec<EventSet> = ac.iter().map(|&m| EventSet::from_mask(k, m as u64)).collect();
                        cell_is_mid_threshold(&cell, &gens, FILTER_M_MAX)
                    })
                    .collect()
            })
            .collect()
    });
    &cache[k]
}

fn lift(cell: &EventSet, local: &[u32]) -> Vec<EventSet> {
    let members = cell.to_vec();
    local
        .iter()
        .map(|&m| {
            EventSet::from_indices(
                cell.universe_size(),
                members.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &w)| w),
            )
        })
        .collect()
}

/// Nonempty antichains of nonempty subsets of `cell`, in canonical order.
pub fn antichains(cell: &EventSet) -> Vec<Vec<EventSet>> {
    assert!(cell.len() <= MAX_SEARCH_WORLDS, "antichain enumeration limited to {MAX_SEARCH_WORLDS}-world cells");
    local_antichains(cell.len()).iter().map(|ac| lift(cell, ac)).collect()
}

/// Per-cell antichain choices for a partition, optionally restricted to
/// mid-threshold ones.
fn cell_choices(cells: &[EventSet], mid_threshold: bool) -> Vec<Vec<Vec<EventSet>>> {
    cells
        .iter()
        .map(|cell| {
            let k = cell.len();
            let ok = local_mid_threshold(k);
            local_antichains(k)
                .iter()
                .enumerate()
                .filter(|(i, _)| !mid_threshold || ok[*i])
                .map(|(_, ac)| lift(cell, ac))
                .collect()
        })
        .collect()
}

/// Odometer over the cartesian product, first position most significant.
fn for_each_product<T>(lists: &[Vec<T>], mut f: impl FnMut(&[&T]) -> bool) -> bool {
    if lists.iter().any(|l| l.is_empty()) {
        return false;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let pick: Vec<&T> = idx.iter().zip(lists).map(|(&i, l)| &l[i]).collect();
        if f(&pick) {
            return true;
        }
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn world_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// The atoms true at each world.
pub type Valuation = Vec<BTreeSet<String>>;

/// A partition as lists of world indices, with the minimal neighborhoods of
/// each cell.
pub type Structure = (Vec<Vec<usize>>, Vec<Vec<EventSet>>);

/// Every structure on `n` worlds, in canonical order. Valuations are not
/// included.
pub fn enumerate_neighborhood_structures(n: usize, mid_threshold_only: bool) -> Vec<Structure> {
    assert!(n <= MAX_SEARCH_WORLDS);
    let mut out = Vec::new();
    for p in set_partitions(n) {
        let cells: Vec<EventSet> = p.iter().map(|c| EventSet::from_indices(n, c.iter().copied())).collect();
        let choices = cell_choices(&cells, mid_threshold_only);
        for_each_product(&choices, |pick| {
            out.push((p.clone(), pick.iter().map(|g| (*g).clone()).collect()));
            false
        });
    }
    out
}

/// Exhaustive search for a neighborhood model falsifying `φ`.
pub fn find_nbhd_countermodel(
    phi: &Formula,
    max_worlds: usize,
    require_mid_threshold: bool,
) -> Result<CountermodelResult<NeighborhoodModel>, SearchError> {
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    if max_worlds > MAX_SEARCH_WORLDS || atoms.len() > MAX_SEARCH_ATOMS {
        return Err(SearchError::BoundTooLarge { worlds: max_worlds, atoms: atoms.len() });
    }
    let checked = AtomicU64::new(0);
    for n in 1..=max_worlds {
        let names = world_names(n);
        let jobs: Vec<(Vec<Vec<usize>>, Valuation)> =
            set_partitions(n).into_iter().flat_map(|p| valuations(n, &atoms).map(move |v| (p.clone(), v))).collect();
        let found = jobs.par_iter().find_map_first(|(p, v)| {
            let frame = Frame::new(names.clone(), p.clone(), v.clone()).expect("enumerated frames are valid");
            let choices = cell_choices(frame.cells(), require_mid_threshold);
            let mut hit = None;
            for_each_product(&choices, |pick| {
                checked.fetch_add(1, Ordering::Relaxed);
                let m = NeighborhoodModel::new(frame.clone(), pick.iter().map(|g| (*g).clone()).collect())
                    .expect("enumerated antichains are valid");
                let ext = extension_nbhd(&m, phi);
                match (0..n).find(|&w| !ext.contains(w)) {
                    Some(w) => {
                        hit = Some((m, w));
                        true
                    }
                    None => false,
                }
            });
            hit
        });
        if let Some((model, world)) = found {
            return Ok(CountermodelResult::Found { model, world });
        }
    }
    Ok(CountermodelResult::NoneUpToBound(SearchBound::Exhaustive {
        max_worlds,
        atoms: atoms.len(),
        mid_threshold: require_mid_threshold,
        models_checked: checked.into_inner(),
    }))
}

/// A random probability model on 1..=max_worlds worlds: uniform random
/// partition and valuation, weights `nᵢ/D` with `D ≤ 64`.
pub fn random_probability_model<R: Rng>(rng: &mut R, max_worlds: usize, atoms: &[String]) -> ProbabilityModel {
    assert!((1..=64).contains(&max_worlds));
    let n = rng.gen_range(1..=max_worlds);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut order: Vec<usize> = Vec::new();
    for &l in &labels {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    let cells: Vec<Vec<usize>> = order.iter().map(|&l| (0..n).filter(|&w| labels[w] == l).collect()).collect();
    let valuation: Vec<BTreeSet<String>> =
        (0..n).map(|_| atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()).collect();
    let frame = Frame::new(world_names(n), cells, valuation).expect("random frame is valid");
    let d = rng.gen_range(n..=64);
    let mut cuts: Vec<usize> = sample(rng, d - 1, n - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(d);
    let mut prev = 0;
    let weights = cuts
        .iter()
        .map(|&c| {
            let w = Rational::new((c - prev) as i64, d as i64);
            prev = c;
            w
        })
        .collect();
    ProbabilityModel::new(frame, weights).expect("random weights are a full-support distribution")
}

/// Randomized search for a probability model falsifying `φ` at threshold `c`.
pub fn sample_prob_countermodel(
    phi: &Formula,
    c: &Threshold,
    trials: usize,
    max_worlds: usize,
    seed: u64,
) -> CountermodelResult<ProbabilityModel> {
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let m = random_probability_model(&mut rng, max_worlds, &atoms);
        let ext = extension_prob(&m, phi, c);
        if let Some(w) = (0..m.frame().num_worlds()).find(|&w| !ext.contains(w)) {
            return CountermodelResult::Found { model: m, world: w };
        }
    }
    CountermodelResult::NoneUpToBound(SearchBound::Sampled { trials, max_worlds, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_kb;

    #[test]
    fn counts() {
        let bell: Vec<usize> = (1..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 2, 5, 15, 52]);
        // Dedekind numbers minus the two degenerate antichains
        let ac: Vec<usize> = (1..=5).map(|k| local_antichains(k).len()).collect();
        assert_eq!(ac, vec![1, 4, 18, 166, 7579]);
        assert_eq!(valuations(3, &["p".into(), "q".into()]).count(), 64);
        let total: usize = (1..=4).map(|n| enumerate_neighborhood_structures(n, false).len()).sum();
        assert_eq!(total, 1 + (4 + 1) + (18 + 3 * 4 + 1) + 311);
    }

    #[test]
    fn search_examples() {
        let f = parse_kb("B(p -> q) -> (B p -> B q)").unwrap();
        assert!(find_nbhd_countermodel(&f, 3, false).unwrap().is_found());
        let f = parse_kb("K p -> B p").unwrap();
        assert!(!find_nbhd_countermodel(&f, 4, false).unwrap().is_found());
        let f = parse_kb("B p -> <B> p").unwrap();
        assert!(find_nbhd_countermodel(&f, 3, false).unwrap().is_found());
        assert!(!find_nbhd_countermodel(&f, 3, true).unwrap().is_found());
        let f = parse_kb("p & q & r & s").unwrap();
        assert!(matches!(find_nbhd_countermodel(&f, 2, false), Err(SearchError::BoundTooLarge { .. })));
    }

    #[test]
    fn reported_witness_is_first_in_order() {
        let f = parse_kb("B(p -> q) -> (B p -> B q)").unwrap();
        let CountermodelResult::Found { model, world } = find_nbhd_countermodel(&f, 3, false).unwrap() else {
            panic!()
        };
        // sequential replay of the same order
        let atoms = vec!["p".to_string(), "q".to_string()];
        let mut first = None;
        'outer: for n in 1..=3 {
            for p in set_partitions(n) {
                for v in valuations(n, &atoms) {
                    let frame = Frame::new(world_names(n), p.clone(), v).unwrap();
                    let choices = cell_choices(frame.cells(), false);
                    let mut hit = None;
                    for_each_product(&choices, |pick| {
                        let m =
                            NeighborhoodModel::new(frame.clone(), pick.iter().map(|g| (*g).clone()).collect()).unwrap();
                        let ext = extension_nbhd(&m, &f);
                        if let Some(w) = (0..n).find(|&w| !ext.contains(w)) {
                            hit = Some((m, w));
                            return true;
                        }
                        false
                    });
                    if hit.is_some() {
                        first = hit;
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(first, Some((model, world)));
    }

    #[test]
    fn sampling() {
        let c = Threshold::half();
        let f = parse_kb("B p -> p").unwrap();
        let a = sample_prob_countermodel(&f, &c, 1000, 4, 7);
        assert!(a.is_found());
        assert_eq!(a, sample_prob_countermodel(&f, &c, 1000, 4, 7));
        let f = parse_kb("K(p -> q) -> (B p -> B q)").unwrap();
        assert!(!sample_prob_countermodel(&f, &c, 300, 5, 1).is_found());
    }
}
