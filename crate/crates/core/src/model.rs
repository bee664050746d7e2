//! Frames, probability models and neighborhood models.
//!
//! Worlds are addressed by index in declaration order. The accessibility
//! relation is an equivalence relation and is stored as its partition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::event::EventSet;
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("frame has no worlds")]
    NoWorlds,
    #[error("duplicate world name {0:?}")]
    DuplicateWorld(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("world {0:?} has non-positive weight {1}")]
    ZeroOrNegativeWeight(String, Rational),
    #[error("no weight given for world {0:?}")]
    MissingWeight(String),
    #[error("weights sum to {0}, not 1")]
    WeightsNotNormalized(Rational),
    #[error("update by the empty event")]
    EmptyUpdate,
    #[error("expected generators for {expected} cells, got {got}")]
    WrongCellCount { expected: usize, got: usize },
    #[error("cell {0} has no generators")]
    NoGenerators(usize),
    #[error("cell {0}: the empty set cannot generate a neighborhood")]
    EmptyGenerator(usize),
    #[error("cell {0}: generator {1:?} is not inside the cell")]
    GeneratorOutsideCell(usize, Vec<String>),
    #[error("cell {0}: generators {1:?} and {2:?} are comparable")]
    NotAntichain(usize, Vec<String>, Vec<String>),
    #[error("neighborhood system violates ({0})")]
    PropertyViolated(String),
}

/// A finite S5 frame with a valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    worlds: Vec<String>,
    cells: Vec<EventSet>,
    cell_of: Vec<usize>,
    valuation: Vec<BTreeSet<String>>,
}

impl Frame {
    /// `cells` lists world indices; `valuation[w]` is the set of atoms true at `w`.
    pub fn new(
        worlds: Vec<String>,
        cells: Vec<Vec<usize>>,
        valuation: Vec<BTreeSet<String>>,
    ) -> Result<Frame, ModelError> {
        let n = worlds.len();
        if n == 0 {
            return Err(ModelError::NoWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w.as_str()) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        if valuation.len() != n {
            return Err(ModelError::BadPartition(format!(
                "valuation covers {} worlds, frame has {n}",
                valuation.len()
            )));
        }
        let mut cell_of = vec![usize::MAX; n];
        let mut sets = Vec::with_capacity(cells.len());
        for (k, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(ModelError::BadPartition(format!("cell {k} is empty")));
            }
            for &w in cell {
                if w >= n {
                    return Err(ModelError::BadPartition(format!("world index {w} out of range")));
                }
                if cell_of[w] != usize::MAX {
                    return Err(ModelError::BadPartition(format!("world {:?} lies in more than one cell", worlds[w])));
                }
                cell_of[w] = k;
            }
            sets.push(EventSet::from_indices(n, cell.iter().copied()));
        }
        if let Some(w) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(ModelError::BadPartition(format!("world {:?} lies in no cell", worlds[w])));
        }
        Ok(Frame { worlds, cells: sets, cell_of, valuation })
    }

    /// Build from names; atoms are listed per world.
    pub fn from_names(
        worlds: &[&str],
        partition: &[&[&str]],
        valuation: &[(&str, &[&str])],
    ) -> Result<Frame, ModelError> {
        let names: Vec<String> = worlds.iter().map(|s| s.to_string()).collect();
        let index = |w: &str| names.iter().position(|x| x == w).ok_or_else(|| ModelError::UnknownWorld(w.to_string()));
        let cells = partition
            .iter()
            .map(|c| c.iter().map(|w| index(w)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut val = vec![BTreeSet::new(); names.len()];
        for (w, atoms) in valuation {
            val[index(w)?].extend(atoms.iter().map(|a| a.to_string()));
        }
        Frame::new(names, cells, val)
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn cells(&self) -> &[EventSet] {
        &self.cells
    }

    pub fn cell_index(&self, w: usize) -> usize {
        self.cell_of[w]
    }

    /// The equivalence class `[w]`.
    pub fn cell(&self, w: usize) -> &EventSet {
        &self.cells[self.cell_of[w]]
    }

    pub fn valuation(&self, w: usize) -> &BTreeSet<String> {
        &self.valuation[w]
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.valuation.iter().flatten().cloned().collect()
    }

    /// Worlds where `atom` holds; empty for atoms the valuation never mentions.
    pub fn atom_extension(&self, atom: &str) -> EventSet {
        EventSet::from_indices(self.num_worlds(), (0..self.num_worlds()).filter(|&w| self.valuation[w].contains(atom)))
    }

    pub fn universe(&self) -> EventSet {
        EventSet::full(self.num_worlds())
    }

    pub fn empty_set(&self) -> EventSet {
        EventSet::empty(self.num_worlds())
    }

    /// Names of the members of `x`, in world order.
    pub fn names_of(&self, x: &EventSet) -> Vec<String> {
        x.iter().map(|w| self.worlds[w].clone()).collect()
    }

    pub fn set_of_names<S: AsRef<str>>(&self, names: &[S]) -> Result<EventSet, ModelError> {
        let mut s = self.empty_set();
        for n in names {
            let w = self.world_index(n.as_ref()).ok_or_else(|| ModelError::UnknownWorld(n.as_ref().to_string()))?;
            s.insert(w);
        }
        Ok(s)
    }

    /// Restriction to the worlds in `keep`, preserving order; cells are
    /// intersected with `keep` and empty ones dropped.
    pub fn restrict(&self, keep: &EventSet) -> Frame {
        let old: Vec<usize> = keep.to_vec();
        let new_index: BTreeMap<usize, usize> = old.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let cells = self
            .cells
            .iter()
            .map(|c| c.intersection(keep).iter().map(|w| new_index[&w]).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        Frame::new(
            old.iter().map(|&w| self.worlds[w].clone()).collect(),
            cells,
            old.iter().map(|&w| self.valuation[w].clone()).collect(),
        )
        .expect("restriction of a valid frame is valid")
    }
}

/// A frame with a full-support probability measure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProbabilityModel {
    frame: Frame,
    weights: Vec<Rational>,
}

/// Validate weights given by world name.
pub fn make_probability_model(
    frame: Frame,
    weights: &BTreeMap<String, Rational>,
) -> Result<ProbabilityModel, ModelError> {
    if let Some(k) = weights.keys().find(|k| frame.world_index(k).is_none()) {
        return Err(ModelError::UnknownWorld(k.clone()));
    }
    let mut ws = Vec::with_capacity(frame.num_worlds());
    for w in frame.worlds() {
        ws.push(weights.get(w).cloned().ok_or_else(|| ModelError::MissingWeight(w.clone()))?);
    }
    ProbabilityModel::new(frame, ws)
}

impl ProbabilityModel {
    /// Weights in world order.
    pub fn new(frame: Frame, weights: Vec<Rational>) -> Result<ProbabilityModel, ModelError> {
        if weights.len() != frame.num_worlds() {
            let w = frame.worlds().get(weights.len()).cloned().unwrap_or_default();
            return Err(ModelError::MissingWeight(w));
        }
        for (w, p) in weights.iter().enumerate() {
            if !p.is_positive() {
                return Err(ModelError::ZeroOrNegativeWeight(frame.world_name(w).to_string(), p.clone()));
            }
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(ModelError::WeightsNotNormalized(total));
        }
        Ok(ProbabilityModel { frame, weights })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn weight(&self, w: usize) -> &Rational {
        &self.weights[w]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Unconditional measure `P(X)`.
    pub fn measure(&self, x: &EventSet) -> Rational {
        x.iter().map(|w| &self.weights[w]).sum()
    }

    /// `P_w(X) = P(X ∩ [w]) / P([w])`.
    pub fn conditional_probability(&self, w: usize, x: &EventSet) -> Rational {
        let cell = self.frame.cell(w);
        self.measure(&x.intersection(cell)) / self.measure(cell)
    }

    /// Condition on `x`: keep the worlds of `x` and renormalize.
    pub fn bayesian_update(&self, x: &EventSet) -> Result<ProbabilityModel, ModelError> {
        if x.is_empty() {
            return Err(ModelError::EmptyUpdate);
        }
        let px = self.measure(x);
        let frame = self.frame.restrict(x);
        let weights = x.iter().map(|w| &self.weights[w] / &px).collect();
        ProbabilityModel::new(frame, weights)
    }
}

pub fn conditional_probability(m: &ProbabilityModel, w: usize, x: &EventSet) -> Rational {
    m.conditional_probability(w, x)
}

pub fn bayesian_update(m: &ProbabilityModel, x: &EventSet) -> Result<ProbabilityModel, ModelError> {
    m.bayesian_update(x)
}

/// A frame with a neighborhood system, stored per cell as the antichain of
/// minimal neighborhoods. `N(w)` is the upward closure within `[w]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NeighborhoodModel {
    frame: Frame,
    generators: Vec<Vec<EventSet>>,
}

impl NeighborhoodModel {
    pub fn new(frame: Frame, generators: Vec<Vec<EventSet>>) -> Result<NeighborhoodModel, ModelError> {
        if generators.len() != frame.cells().len() {
            return Err(ModelError::WrongCellCount { expected: frame.cells().len(), got: generators.len() });
        }
        let mut gens = generators;
        for (k, (cell, list)) in frame.cells().iter().zip(gens.iter_mut()).enumerate() {
            if list.is_empty() {
                return Err(ModelError::NoGenerators(k));
            }
            for g in list.iter() {
                if g.is_empty() {
                    return Err(ModelError::EmptyGenerator(k));
                }
                if !g.is_subset(cell) {
                    return Err(ModelError::GeneratorOutsideCell(k, frame.names_of(g)));
                }
            }
            list.sort();
            list.dedup();
            for (i, a) in list.iter().enumerate() {
                for b in &list[i + 1..] {
                    if a.is_subset(b) || b.is_subset(a) {
                        return Err(ModelError::NotAntichain(k, frame.names_of(a), frame.names_of(b)));
                    }
                }
            }
        }
        Ok(NeighborhoodModel { frame, generators: gens })
    }

    /// Keep only the minimal members of each cell's family; the family must
    /// be nonempty and inside the cell.
    pub fn from_families(frame: Frame, families: Vec<Vec<EventSet>>) -> Result<NeighborhoodModel, ModelError> {
        let gens = families.into_iter().map(|f| minimal_elements(&f)).collect();
        NeighborhoodModel::new(frame, gens)
    }

    /// Accept an explicit per-world system after checking the base properties.
    pub fn from_system(system: &NeighborhoodSystem) -> Result<NeighborhoodModel, ModelError> {
        let report = crate::neighborhood::check_base_properties(system);
        if let Some((name, _)) = report.first_failure() {
            return Err(ModelError::PropertyViolated(name.to_string()));
        }
        let frame = system.frame.clone();
        let families =
            frame.cells().iter().map(|c| system.sets[c.iter().next().expect("cells are nonempty")].clone()).collect();
        NeighborhoodModel::from_families(frame, families)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Minimal neighborhoods of cell `k`, in canonical order.
    pub fn generators(&self, k: usize) -> &[EventSet] {
        &self.generators[k]
    }

    pub fn all_generators(&self) -> &[Vec<EventSet>] {
        &self.generators
    }

    /// Membership of `x` in the neighborhood family of cell `k`.
    pub fn in_cell_neighborhood(&self, k: usize, x: &EventSet) -> bool {
        x.is_subset(&self.frame.cells()[k]) && self.generators[k].iter().any(|g| g.is_subset(x))
    }

    /// `X ∈ N(w)`.
    pub fn contains(&self, w: usize, x: &EventSet) -> bool {
        self.in_cell_neighborhood(self.frame.cell_index(w), x)
    }

    /// Maximal subsets of cell `k` that are not neighborhoods.
    pub fn maximal_non_neighborhoods(&self, k: usize) -> Vec<EventSet> {
        maximal_non_members(&self.frame.cells()[k], &self.generators[k])
    }

    /// The explicit upward-closed system, one family per world.
    pub fn closed_system(&self) -> NeighborhoodSystem {
        let per_cell: Vec<Vec<EventSet>> = (0..self.frame.cells().len())
            .map(|k| self.frame.cells()[k].subsets().filter(|x| self.in_cell_neighborhood(k, x)).collect())
            .collect();
        NeighborhoodSystem {
            frame: self.frame.clone(),
            sets: (0..self.frame.num_worlds()).map(|w| per_cell[self.frame.cell_index(w)].clone()).collect(),
        }
    }
}

/// An unvalidated neighborhood function: one explicit family per world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodSystem {
    pub frame: Frame,
    pub sets: Vec<Vec<EventSet>>,
}

/// Minimal members of a family, canonical order.
pub fn minimal_elements(family: &[EventSet]) -> Vec<EventSet> {
    let mut out: Vec<EventSet> =
        family.iter().filter(|x| !family.iter().any(|y| y.is_proper_subset(x))).cloned().collect();
    out.sort();
    out.dedup();
    out
}

/// Maximal subsets of `cell` containing no member of `generators`.
///
/// These are the complements (within the cell) of the minimal sets meeting
/// every generator; found by scanning the cell's powerset.
pub fn maximal_non_members(cell: &EventSet, generators: &[EventSet]) -> Vec<EventSet> {
    let member = |x: &EventSet| generators.iter().any(|g| g.is_subset(x));
    let mut out: Vec<EventSet> = cell
        .subsets()
        .filter(|x| !member(x))
        .filter(|x| {
            cell.difference(x).iter().all(|v| {
                let mut y = x.clone();
                y.insert(v);
                member(&y)
            })
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn horses() -> Frame {
        Frame::from_names(
            &["w1", "w2", "w3"],
            &[&["w1", "w2", "w3"]],
            &[("w1", &["h1"]), ("w2", &["h2"]), ("w3", &["h3"])],
        )
        .unwrap()
    }

    #[test]
    fn probability_validation() {
        let f = horses();
        let r = |s: &str| s.parse::<Rational>().unwrap();
        assert!(ProbabilityModel::new(f.clone(), vec![r("1/2"), r("1/3"), r("1/6")]).is_ok());
        assert!(matches!(
            ProbabilityModel::new(f.clone(), vec![r("1/2"), r("1/2"), r("0")]),
            Err(ModelError::ZeroOrNegativeWeight(..))
        ));
        assert!(matches!(
            ProbabilityModel::new(f, vec![r("1/2"), r("1/3"), r("1/3")]),
            Err(ModelError::WeightsNotNormalized(_))
        ));
        let one = Frame::from_names(&["w"], &[&["w"]], &[]).unwrap();
        assert!(ProbabilityModel::new(one, vec![Rational::one()]).is_ok());
    }

    #[test]
    fn bad_partitions() {
        let names = vec!["a".to_string(), "b".to_string()];
        let val = vec![BTreeSet::new(); 2];
        assert!(matches!(Frame::new(names.clone(), vec![vec![0]], val.clone()), Err(ModelError::BadPartition(_))));
        assert!(matches!(
            Frame::new(names.clone(), vec![vec![0, 1], vec![1]], val.clone()),
            Err(ModelError::BadPartition(_))
        ));
        assert!(matches!(Frame::new(names, vec![vec![0, 1], vec![]], val), Err(ModelError::BadPartition(_))));
    }

    #[test]
    fn update_renormalizes() {
        let f = horses();
        let m = ProbabilityModel::new(f, vec![Rational::new(3, 6), Rational::new(2, 6), Rational::new(1, 6)]).unwrap();
        let x = EventSet::from_indices(3, [0, 1]);
        let u = m.bayesian_update(&x).unwrap();
        assert_eq!(u.weights(), &[Rational::new(3, 5), Rational::new(2, 5)]);
        assert_eq!(m.bayesian_update(&m.frame().universe()).unwrap(), m);
        assert_eq!(m.bayesian_update(&EventSet::empty(3)), Err(ModelError::EmptyUpdate));
    }

    #[test]
    fn neighborhood_validation() {
        let f = horses();
        let s = |v: &[usize]| EventSet::from_indices(3, v.iter().copied());
        assert!(NeighborhoodModel::new(f.clone(), vec![vec![s(&[0, 1]), s(&[1, 2])]]).is_ok());
        assert!(matches!(
            NeighborhoodModel::new(f.clone(), vec![vec![s(&[0]), s(&[0, 1])]]),
            Err(ModelError::NotAntichain(..))
        ));
        assert!(matches!(NeighborhoodModel::new(f.clone(), vec![vec![]]), Err(ModelError::NoGenerators(0))));
        assert!(matches!(NeighborhoodModel::new(f, vec![vec![s(&[])]]), Err(ModelError::EmptyGenerator(0))));
    }

    #[test]
    fn closure_membership_matches_enumeration() {
        let f = Frame::from_names(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]], &[]).unwrap();
        let cell = f.cells()[0].clone();
        // every antichain over the 4-cell, checked against explicit upward closure
        let subsets: Vec<EventSet> = cell.subsets().filter(|x| !x.is_empty()).collect();
        for mask in 1u32..(1 << subsets.len()) {
            let fam: Vec<EventSet> =
                (0..subsets.len()).filter(|i| mask & (1 << i) != 0).map(|i| subsets[i].clone()).collect();
            let mins = minimal_elements(&fam);
            if mins.len() != fam.len() {
                continue;
            }
            let m = NeighborhoodModel::new(f.clone(), vec![fam.clone()]).unwrap();
            for x in cell.subsets() {
                let closure = fam.iter().any(|g| g.is_subset(&x));
                assert_eq!(m.contains(0, &x), closure);
            }
            let maxes = m.maximal_non_neighborhoods(0);
            for x in cell.subsets() {
                let non = !m.contains(0, &x);
                assert_eq!(non, maxes.iter().any(|y| x.is_subset(y)));
            }
        }
    }
}
