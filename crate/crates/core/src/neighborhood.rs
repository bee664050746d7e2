//! Properties of neighborhood systems, thresholding a measure into a
//! neighborhood model, and agreement between the two.
//!
//! The quantified properties are decided per cell on reduced candidate
//! sets. Sets required to be neighborhoods can be shrunk to generators,
//! sets required to be non-neighborhoods can be grown to maximal
//! non-neighborhoods, and sets whose complement must be a non-neighborhood
//! can be shrunk to complements of maximal non-neighborhoods. Each move
//! preserves a violation, so searching the reduced sets is exact.

use serde_json::{json, Value};
use thiserror::Error;

use crate::event::EventSet;
use crate::formula::Threshold;
use crate::model::{maximal_non_members, Frame, NeighborhoodModel, NeighborhoodSystem, ProbabilityModel};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NeighborhoodError {
    #[error("cell {cell} has {size} worlds; brute force is budgeted to {limit}")]
    CellTooLargeForBruteForce { cell: usize, size: usize, limit: usize },
    #[error("cell {cell}: about {estimate} candidate tuples up to arity {m_max} exceeds the budget of {limit}")]
    TooManyTuples { cell: usize, m_max: usize, estimate: u128, limit: u64 },
    #[error("threshold {0} is below 1/2")]
    ThresholdBelowHalf(Rational),
    #[error("models do not share a frame: {0}")]
    FrameMismatch(String),
}

/// Evidence that a property fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A single offending set, optionally paired with a second one.
    Sets { world: usize, x: EventSet, y: Option<EventSet> },
    /// Lists `X₁..Xₘ` and `Y₁..Yₘ` (for the counting properties), or
    /// disjoint `X`'s with a set `Y` built from their union.
    Lists { cell: usize, xs: Vec<EventSet>, ys: Vec<EventSet> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PropertyReport {
    pub entries: Vec<(String, Verdict)>,
}

impl PropertyReport {
    fn push(&mut self, name: impl Into<String>, v: Verdict) {
        self.entries.push((name.into(), v));
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.holds())
    }

    pub fn first_failure(&self) -> Option<(&str, &Witness)> {
        self.entries.iter().find_map(|(n, v)| match v {
            Verdict::Fails(w) => Some((n.as_str(), w)),
            Verdict::Holds => None,
        })
    }

    pub fn extend(&mut self, other: PropertyReport) {
        self.entries.extend(other.entries);
    }

    /// Stable-keyed JSON, sets rendered as world-name lists.
    pub fn to_json(&self, frame: &Frame) -> Value {
        let names = |s: &EventSet| json!(frame.names_of(s));
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(n, v)| match v {
                Verdict::Holds => json!({"property": n, "holds": true}),
                Verdict::Fails(Witness::Sets { world, x, y }) => json!({
                    "property": n, "holds": false,
                    "witness": {"world": frame.world_name(*world), "x": names(x), "y": y.as_ref().map(names)},
                }),
                Verdict::Fails(Witness::Lists { cell, xs, ys }) => json!({
                    "property": n, "holds": false,
                    "witness": {
                        "cell": names(&frame.cells()[*cell]),
                        "xs": xs.iter().map(names).collect::<Vec<_>>(),
                        "ys": ys.iter().map(names).collect::<Vec<_>>(),
                    },
                }),
            })
            .collect();
        Value::Array(entries)
    }

    /// One line per property.
    pub fn render(&self, frame: &Frame) -> String {
        let set = |s: &EventSet| format!("{{{}}}", frame.names_of(s).join(","));
        let list = |v: &[EventSet]| v.iter().map(set).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        for (n, v) in &self.entries {
            match v {
                Verdict::Holds => out.push_str(&format!("({n}) holds\n")),
                Verdict::Fails(Witness::Sets { world, x, y }) => {
                    out.push_str(&format!("({n}) FAILS at {}: X = {}", frame.world_name(*world), set(x)));
                    if let Some(y) = y {
                        out.push_str(&format!(", Y = {}", set(y)));
                    }
                    out.push('\n');
                }
                Verdict::Fails(Witness::Lists { cell, xs, ys }) => {
                    out.push_str(&format!(
                        "({n}) FAILS in cell {}: X-list [{}], Y-list [{}]\n",
                        set(&frame.cells()[*cell]),
                        list(xs),
                        list(ys)
                    ));
                }
            }
        }
        out
    }
}

/// Check (kbc), (kbf), (n), (a), (kbm) on an explicit system.
pub fn check_base_properties(system: &NeighborhoodSystem) -> PropertyReport {
    let frame = &system.frame;
    let n = frame.num_worlds();
    let mut r = PropertyReport::default();
    let fam = |w: usize| &system.sets[w];
    let has = |w: usize, x: &EventSet| fam(w).contains(x);

    let kbc = (0..n).find_map(|w| fam(w).iter().find(|x| !x.is_subset(frame.cell(w))).map(|x| (w, x.clone())));
    r.push("kbc", kbc.map_or(Verdict::Holds, |(w, x)| Verdict::Fails(Witness::Sets { world: w, x, y: None })));

    let kbf = (0..n).find(|&w| fam(w).iter().any(|x| x.is_empty()));
    r.push(
        "kbf",
        kbf.map_or(Verdict::Holds, |w| Verdict::Fails(Witness::Sets { world: w, x: frame.empty_set(), y: None })),
    );

    let nn = (0..n).find(|&w| !has(w, frame.cell(w)));
    r.push(
        "n",
        nn.map_or(Verdict::Holds, |w| Verdict::Fails(Witness::Sets { world: w, x: frame.cell(w).clone(), y: None })),
    );

    let a = (0..n).find_map(|w| {
        frame.cell(w).iter().find_map(|v| {
            let only_w = fam(w).iter().find(|x| !has(v, x));
            let only_v = fam(v).iter().find(|x| !has(w, x));
            only_w.or(only_v).map(|x| (w, v, x.clone()))
        })
    });
    r.push(
        "a",
        a.map_or(Verdict::Holds, |(w, v, x)| {
            Verdict::Fails(Witness::Sets { world: w, x, y: Some(EventSet::singleton(n, v)) })
        }),
    );

    let kbm = (0..n).find_map(|w| {
        fam(w).iter().find_map(|x| {
            frame.cell(w).difference(x).iter().find_map(|v| {
                let mut y = x.clone();
                y.insert(v);
                (!has(w, &y)).then(|| (w, x.clone(), y))
            })
        })
    });
    r.push("kbm", kbm.map_or(Verdict::Holds, |(w, x, y)| Verdict::Fails(Witness::Sets { world: w, x, y: Some(y) })));
    r
}

/// Base properties of a model, re-verified on its closed system.
pub fn check_base_properties_model(m: &NeighborhoodModel) -> PropertyReport {
    check_base_properties(&m.closed_system())
}

/// Limits for the bounded quantifier checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceBudget {
    pub m_max: usize,
    pub max_cell: usize,
    pub max_tuples: u64,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget { m_max: 3, max_cell: 6, max_tuples: 50_000_000 }
    }
}

impl BruteForceBudget {
    pub fn with_m_max(m_max: usize) -> Self {
        BruteForceBudget { m_max, ..Self::default() }
    }
}

/// One cell's system in local coordinates: world `i` of the cell is bit `i`.
struct Local {
    members: Vec<usize>,
    universe: usize,
    full: u32,
    gens: Vec<u32>,
    maxes: Vec<u32>,
    comaxes: Vec<u32>,
}

impl Local {
    fn new(cell: &EventSet, gens: &[EventSet]) -> Local {
        let members = cell.to_vec();
        assert!(members.len() <= 20, "cell too large for local bitmasks");
        let to_local = |s: &EventSet| {
            members.iter().enumerate().filter(|(_, &w)| s.contains(w)).fold(0u32, |m, (i, _)| m | 1 << i)
        };
        let full = (1u32 << members.len()) - 1;
        let maxes: Vec<u32> = maximal_non_members(cell, gens).iter().map(to_local).collect();
        Local {
            universe: cell.universe_size(),
            full,
            gens: gens.iter().map(to_local).collect(),
            comaxes: maxes.iter().map(|m| full & !m).collect(),
            maxes,
            members,
        }
    }

    fn member(&self, x: u32) -> bool {
        self.gens.iter().any(|&g| g & !x == 0)
    }

    fn lift(&self, x: u32) -> EventSet {
        EventSet::from_indices(
            self.universe,
            self.members.iter().enumerate().filter(|(i, _)| x & (1 << i) != 0).map(|(_, &w)| w),
        )
    }

    fn counts(&self, sets: &[u32]) -> Vec<u8> {
        (0..self.members.len()).map(|i| sets.iter().filter(|&&s| s & (1 << i) != 0).count() as u8).collect()
    }

    fn d(&self) -> Option<(u32, u32)> {
        self.gens.iter().map(|&g| (g, self.full & !g)).find(|&(_, c)| self.member(c))
    }

    fn sc(&self) -> Option<(u32, u32)> {
        self.comaxes.iter().find_map(|&x| {
            (0..self.members.len())
                .filter(|i| x & (1 << i) == 0)
                .map(|i| x | 1 << i)
                .find(|&y| !self.member(y))
                .map(|y| (x, y))
        })
    }

    /// Multisets of size `r` from `pool` (indices nondecreasing) whose
    /// pointwise counts reach `need`; first one in lexicographic order.
    fn cover(&self, pool: &[u32], need: &[u8], r: usize) -> Option<Vec<u32>> {
        fn go(pool: &[u32], start: usize, deficit: &mut Vec<i16>, r: usize, acc: &mut Vec<u32>) -> bool {
            let worst = deficit.iter().copied().max().unwrap_or(0);
            if worst <= 0 {
                // remaining slots can repeat any set
                while acc.len() < acc.capacity() {
                    acc.push(pool[start.min(pool.len() - 1)]);
                }
                return true;
            }
            if worst as usize > r {
                return false;
            }
            for i in start..pool.len() {
                let s = pool[i];
                for (k, d) in deficit.iter_mut().enumerate() {
                    if s & (1 << k) != 0 {
                        *d -= 1;
                    }
                }
                acc.push(s);
                if go(pool, i, deficit, r - 1, acc) {
                    return true;
                }
                acc.pop();
                for (k, d) in deficit.iter_mut().enumerate() {
                    if s & (1 << k) != 0 {
                        *d += 1;
                    }
                }
            }
            false
        }
        if pool.is_empty() {
            return None;
        }
        let mut deficit: Vec<i16> = need.iter().map(|&c| c as i16).collect();
        let mut acc = Vec::with_capacity(r);
        go(pool, 0, &mut deficit, r, &mut acc).then_some(acc)
    }

    /// Violation of the counting property with first list drawn from
    /// `first`, the rest from `rest`, and `Y`'s among non-neighborhoods.
    fn counting(&self, m: usize, first: &[u32], rest: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
        for &x1 in first {
            let mut tail: Vec<usize> = vec![0; m - 1];
            loop {
                if !rest.is_empty() || m == 1 {
                    let mut xs = vec![x1];
                    xs.extend(tail.iter().map(|&i| rest[i]));
                    if let Some(ys) = self.cover(&self.maxes, &self.counts(&xs), m) {
                        return Some((xs, ys));
                    }
                }
                // next nondecreasing index tuple
                let mut pos = tail.len();
                loop {
                    if pos == 0 || rest.is_empty() {
                        break;
                    }
                    pos -= 1;
                    if tail[pos] + 1 < rest.len() {
                        tail[pos] += 1;
                        let v = tail[pos];
                        for t in tail[pos + 1..].iter_mut() {
                            *t = v;
                        }
                        break;
                    }
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if tail.is_empty() || rest.is_empty() || pos == usize::MAX {
                    break;
                }
            }
        }
        None
    }

    fn scott(&self, m: usize) -> Option<(Vec<u32>, Vec<u32>)> {
        self.counting(m, &self.gens, &self.comaxes)
    }

    fn ws(&self, m: usize) -> Option<(Vec<u32>, Vec<u32>)> {
        self.counting(m, &self.gens, &self.gens)
    }

    /// Pairwise disjoint `s`-subsets of the complements of maximal
    /// non-neighborhoods, in lexicographic order of indices.
    fn disjoint_families(&self, s: usize) -> Vec<Vec<u32>> {
        fn go(pool: &[u32], start: usize, s: usize, used: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if acc.len() == s {
                out.push(acc.clone());
                return;
            }
            for i in start..pool.len() {
                if pool[i] & used == 0 {
                    acc.push(pool[i]);
                    go(pool, i + 1, s, used | pool[i], acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&self.comaxes, 0, s, 0, &mut Vec::new(), &mut out);
        out
    }

    fn estimate(&self, m_max: usize, first: usize, rest: usize) -> u128 {
        fn choose(n: u128, k: u128) -> u128 {
            (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
        }
        let y = self.maxes.len() as u128;
        (1..=m_max as u128)
            .map(|m| {
                let xs = first as u128 * choose(rest as u128 + m - 2 + 1, m - 1).max(1);
                xs.saturating_mul(choose(y + m - 1, m))
            })
            .fold(0u128, |a, b| a.saturating_add(b))
    }
}

fn check_budget(
    k: usize,
    local: &Local,
    budget: &BruteForceBudget,
    first: usize,
    rest: usize,
) -> Result<(), NeighborhoodError> {
    if local.members.len() > budget.max_cell {
        return Err(NeighborhoodError::CellTooLargeForBruteForce {
            cell: k,
            size: local.members.len(),
            limit: budget.max_cell,
        });
    }
    let estimate = local.estimate(budget.m_max, first, rest);
    if estimate > budget.max_tuples as u128 {
        return Err(NeighborhoodError::TooManyTuples {
            cell: k,
            m_max: budget.m_max,
            estimate,
            limit: budget.max_tuples,
        });
    }
    Ok(())
}

fn sets_witness(local: &Local, world: usize, x: u32, y: u32) -> Verdict {
    Verdict::Fails(Witness::Sets { world, x: local.lift(x), y: Some(local.lift(y)) })
}

fn lists_witness(local: &Local, cell: usize, xs: &[u32], ys: &[u32]) -> Verdict {
    Verdict::Fails(Witness::Lists {
        cell,
        xs: xs.iter().map(|&x| local.lift(x)).collect(),
        ys: ys.iter().map(|&y| local.lift(y)).collect(),
    })
}

/// (d), (sc) exactly and (scott) for arities up to `budget.m_max`.
pub fn check_mid_threshold(
    m: &NeighborhoodModel,
    budget: &BruteForceBudget,
) -> Result<PropertyReport, NeighborhoodError> {
    let locals: Vec<Local> =
        m.frame().cells().iter().enumerate().map(|(k, c)| Local::new(c, m.generators(k))).collect();
    for (k, l) in locals.iter().enumerate() {
        check_budget(k, l, budget, l.gens.len(), l.comaxes.len())?;
    }
    let mut r = PropertyReport::default();
    let first_world = |k: usize| locals[k].members[0];
    let d = locals.iter().enumerate().find_map(|(k, l)| l.d().map(|(x, y)| sets_witness(l, first_world(k), x, y)));
    r.push("d", d.unwrap_or(Verdict::Holds));
    let sc = locals.iter().enumerate().find_map(|(k, l)| l.sc().map(|(x, y)| sets_witness(l, first_world(k), x, y)));
    r.push("sc", sc.unwrap_or(Verdict::Holds));
    let scott = (1..=budget.m_max).find_map(|mm| {
        locals.iter().enumerate().find_map(|(k, l)| l.scott(mm).map(|(xs, ys)| lists_witness(l, k, &xs, &ys)))
    });
    r.push("scott", scott.unwrap_or(Verdict::Holds));
    Ok(r)
}

/// (d), (sc) and (scott ≤ m_max) for a single cell, without budget checks.
pub fn cell_is_mid_threshold(cell: &EventSet, gens: &[EventSet], m_max: usize) -> bool {
    let l = Local::new(cell, gens);
    l.d().is_none() && l.sc().is_none() && (1..=m_max).all(|m| l.scott(m).is_none())
}

/// Re-check a (scott) violation given explicitly: `X₁ ∈ N`, `[w]−Xᵢ ∉ N`
/// for `i ≥ 2`, no world in more `X`'s than `Y`'s, and no `Yⱼ ∈ N`.
pub fn replay_scott_witness(m: &NeighborhoodModel, cell: usize, xs: &[EventSet], ys: &[EventSet]) -> bool {
    let c = &m.frame().cells()[cell];
    let inn = |x: &EventSet| m.in_cell_neighborhood(cell, x);
    if xs.is_empty() || xs.len() != ys.len() || xs.iter().chain(ys).any(|s| !s.is_subset(c)) {
        return false;
    }
    let counts_ok =
        c.iter().all(|v| xs.iter().filter(|x| x.contains(v)).count() <= ys.iter().filter(|y| y.contains(v)).count());
    inn(&xs[0]) && xs[1..].iter().all(|x| !inn(&c.difference(x))) && counts_ok && ys.iter().all(|y| !inn(y))
}

/// `s′ = c/(1−c)` and `s = ⌈s′⌉`.
pub fn conjecture_parameters(c: &Threshold) -> (Rational, usize) {
    let v = c.value();
    let s_prime = v / &(Rational::one() - v);
    let s = s_prime.ceil().to_i64().expect("ceiling of a bounded rational") as usize;
    (s_prime, s)
}

/// The candidate properties for threshold `c ≥ 1/2`: (sc₀ˢ) when `s′` is an
/// integer, (sc₁ˢ) otherwise, and (ws) up to `budget.m_max`. These are
/// necessary conditions under test, not a characterization.
pub fn check_conjectured(
    m: &NeighborhoodModel,
    c: &Threshold,
    budget: &BruteForceBudget,
) -> Result<PropertyReport, NeighborhoodError> {
    if *c.value() < Rational::new(1, 2) {
        return Err(NeighborhoodError::ThresholdBelowHalf(c.value().clone()));
    }
    let (s_prime, s) = conjecture_parameters(c);
    let locals: Vec<Local> =
        m.frame().cells().iter().enumerate().map(|(k, cell)| Local::new(cell, m.generators(k))).collect();
    for (k, l) in locals.iter().enumerate() {
        check_budget(k, l, budget, l.gens.len(), l.gens.len())?;
    }
    let mut r = PropertyReport::default();
    let exact = s_prime.is_integer();
    let name = format!("sc{}^{}", if exact { 0 } else { 1 }, s);
    let sc = locals.iter().enumerate().find_map(|(k, l)| {
        l.disjoint_families(s).into_iter().find_map(|xs| {
            let u = xs.iter().fold(0u32, |a, &x| a | x);
            if exact {
                (0..l.members.len())
                    .filter(|i| u & (1 << i) == 0)
                    .map(|i| u | 1 << i)
                    .find(|&y| !l.member(y))
                    .map(|y| lists_witness(l, k, &xs, &[y]))
            } else {
                (!l.member(u)).then(|| lists_witness(l, k, &xs, &[u]))
            }
        })
    });
    r.push(name, sc.unwrap_or(Verdict::Holds));
    let ws = (1..=budget.m_max).find_map(|mm| {
        locals.iter().enumerate().find_map(|(k, l)| l.ws(mm).map(|(xs, ys)| lists_witness(l, k, &xs, &ys)))
    });
    r.push("ws", ws.unwrap_or(Verdict::Holds));
    Ok(r)
}

/// `N^c(w) = {X ⊆ [w] : P_w(X) > c}`, stored by its minimal members.
pub fn derive_neighborhoods(m: &ProbabilityModel, c: &Threshold) -> NeighborhoodModel {
    let frame = m.frame().clone();
    let gens = frame
        .cells()
        .iter()
        .map(|cell| {
            let total = m.measure(cell);
            let bound = c.value() * &total;
            let big = |x: &EventSet| m.measure(x) > bound;
            cell.subsets()
                .filter(|x| big(x))
                .filter(|x| {
                    x.iter().all(|v| {
                        let mut y = x.clone();
                        y.remove(v);
                        !big(&y)
                    })
                })
                .collect()
        })
        .collect();
    NeighborhoodModel::new(frame, gens).expect("thresholded measure yields a valid neighborhood model")
}

/// `X ∈ N(w)` iff `P_w(X) > c` for every `w` and `X ⊆ [w]`.
pub fn check_agreement(
    n: &NeighborhoodModel,
    p: &ProbabilityModel,
    c: &Threshold,
) -> Result<Verdict, NeighborhoodError> {
    let (fa, fb) = (n.frame(), p.frame());
    if fa.worlds() != fb.worlds() {
        return Err(NeighborhoodError::FrameMismatch("world lists differ".into()));
    }
    if fa.cells() != fb.cells() {
        return Err(NeighborhoodError::FrameMismatch("partitions differ".into()));
    }
    if (0..fa.num_worlds()).any(|w| fa.valuation(w) != fb.valuation(w)) {
        return Err(NeighborhoodError::FrameMismatch("valuations differ".into()));
    }
    for (k, cell) in fa.cells().iter().enumerate() {
        let w = cell.iter().next().expect("cells are nonempty");
        let bound = c.value() * &p.measure(cell);
        for x in cell.subsets() {
            if n.in_cell_neighborhood(k, &x) != (p.measure(&x) > bound) {
                return Ok(Verdict::Fails(Witness::Sets { world: w, x, y: None }));
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::antichains;

    fn cell_frame(n: usize) -> Frame {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Frame::from_names(&refs, &[&refs], &[]).unwrap()
    }

    fn uniform(n: usize) -> ProbabilityModel {
        ProbabilityModel::new(cell_frame(n), vec![Rational::new(1, n as i64); n]).unwrap()
    }

    /// Exhaustive oracle for (scott) at arity m over all subsets of the cell.
    fn scott_naive(m: &NeighborhoodModel, arity: usize) -> bool {
        let cell = m.frame().cells()[0].clone();
        let subs: Vec<EventSet> = cell.subsets().collect();
        let inn = |x: &EventSet| m.in_cell_neighborhood(0, x);
        let idx_tuples = |len: usize| {
            let mut out = vec![vec![]];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|t: Vec<usize>| (0..subs.len()).map(move |i| [t.clone(), vec![i]].concat()))
                    .collect();
            }
            out
        };
        for xt in idx_tuples(arity) {
            let xs: Vec<&EventSet> = xt.iter().map(|&i| &subs[i]).collect();
            if !inn(xs[0]) || xs[1..].iter().any(|x| inn(&cell.difference(x))) {
                continue;
            }
            for yt in idx_tuples(arity) {
                let ys: Vec<&EventSet> = yt.iter().map(|&i| &subs[i]).collect();
                let ok = cell.iter().all(|v| {
                    xs.iter().filter(|x| x.contains(v)).count() <= ys.iter().filter(|y| y.contains(v)).count()
                });
                if ok && ys.iter().all(|y| !inn(y)) {
                    return false;
                }
            }
        }
        true
    }

    fn d_naive(m: &NeighborhoodModel) -> bool {
        let cell = &m.frame().cells()[0];
        cell.subsets().all(|x| !m.in_cell_neighborhood(0, &x) || !m.in_cell_neighborhood(0, &cell.difference(&x)))
    }

    fn sc_naive(m: &NeighborhoodModel) -> bool {
        let cell = &m.frame().cells()[0];
        cell.subsets().all(|x| {
            m.in_cell_neighborhood(0, &cell.difference(&x))
                || cell.subsets().all(|y| !x.is_proper_subset(&y) || m.in_cell_neighborhood(0, &y))
        })
    }

    #[test]
    fn reduced_checks_match_brute_force() {
        for k in 1..=3 {
            let f = cell_frame(k);
            for gens in antichains(&f.cells()[0]) {
                let m = NeighborhoodModel::new(f.clone(), vec![gens]).unwrap();
                let r = check_mid_threshold(&m, &BruteForceBudget::with_m_max(2)).unwrap();
                assert_eq!(r.get("d").unwrap().holds(), d_naive(&m));
                assert_eq!(r.get("sc").unwrap().holds(), sc_naive(&m));
                let naive = (1..=2).all(|a| scott_naive(&m, a));
                assert_eq!(r.get("scott").unwrap().holds(), naive, "{:?}", m.generators(0));
                if let Some(Verdict::Fails(Witness::Lists { cell, xs, ys })) = r.get("scott") {
                    assert!(replay_scott_witness(&m, *cell, xs, ys));
                }
            }
        }
    }

    #[test]
    fn reduced_scott_matches_brute_force_on_four_worlds() {
        let f = cell_frame(4);
        for gens in antichains(&f.cells()[0]) {
            let m = NeighborhoodModel::new(f.clone(), vec![gens]).unwrap();
            let l = Local::new(&f.cells()[0], m.generators(0));
            assert_eq!(l.scott(2).is_none(), scott_naive(&m, 2), "{:?}", m.generators(0));
        }
    }

    #[test]
    fn derive_examples() {
        let half = Threshold::half();
        let m = uniform(3);
        let n = derive_neighborhoods(&m, &half);
        assert_eq!(n.generators(0).len(), 3);
        assert!(n.generators(0).iter().all(|g| g.len() == 2));
        let n = derive_neighborhoods(&m, &Threshold::of(2, 3));
        assert_eq!(n.generators(0), &[m.frame().cells()[0].clone()]);
        assert!(check_base_properties_model(&n).all_hold());
        assert_eq!(check_agreement(&n, &m, &Threshold::of(2, 3)).unwrap(), Verdict::Holds);
        assert!(check_mid_threshold(&derive_neighborhoods(&m, &half), &BruteForceBudget::default())
            .unwrap()
            .all_hold());
    }

    #[test]
    fn base_property_failures() {
        let f = cell_frame(2);
        let full = f.universe();
        let empty = f.empty_set();
        let sys = NeighborhoodSystem { frame: f.clone(), sets: vec![vec![empty.clone(), full.clone()]; 2] };
        let r = check_base_properties(&sys);
        assert!(!r.get("kbf").unwrap().holds());
        let sys = NeighborhoodSystem { frame: f.clone(), sets: vec![vec![EventSet::singleton(2, 0)]; 2] };
        let r = check_base_properties(&sys);
        assert!(!r.get("n").unwrap().holds());
        assert!(!r.get("kbm").unwrap().holds());
        let sys =
            NeighborhoodSystem { frame: f, sets: vec![vec![full.clone()], vec![full, EventSet::singleton(2, 1)]] };
        assert!(!check_base_properties(&sys).get("a").unwrap().holds());
    }

    #[test]
    fn d_failure_and_conjectured_parameters() {
        let f = cell_frame(2);
        let m = NeighborhoodModel::new(f, vec![vec![EventSet::singleton(2, 0), EventSet::singleton(2, 1)]]).unwrap();
        let r = check_mid_threshold(&m, &BruteForceBudget::default()).unwrap();
        assert!(!r.get("d").unwrap().holds());
        assert_eq!(conjecture_parameters(&Threshold::of(2, 3)), (Rational::from_integer(2), 2));
        assert_eq!(conjecture_parameters(&Threshold::of(3, 5)), (Rational::new(3, 2), 2));
        let r = check_conjectured(
            &derive_neighborhoods(&uniform(4), &Threshold::of(2, 3)),
            &Threshold::of(2, 3),
            &BruteForceBudget::default(),
        )
        .unwrap();
        assert_eq!(r.entries[0].0, "sc0^2");
        assert!(r.all_hold());
        let r = check_conjectured(
            &derive_neighborhoods(&uniform(4), &Threshold::of(3, 5)),
            &Threshold::of(3, 5),
            &BruteForceBudget::default(),
        )
        .unwrap();
        assert_eq!(r.entries[0].0, "sc1^2");
    }

    #[test]
    fn frame_mismatch() {
        let m = uniform(3);
        let other = uniform(2);
        let n = derive_neighborhoods(&other, &Threshold::half());
        assert!(matches!(check_agreement(&n, &m, &Threshold::half()), Err(NeighborhoodError::FrameMismatch(_))));
    }
}
