//! Exact feasibility for systems of linear constraints with strict rows.
//!
//! Two-phase dense simplex over rationals with Bland's rule. User variables
//! are free (split into positive and negative parts). Every strict row
//! `a·x > b` becomes `a·x − ε ≥ b` with one shared `ε ∈ [0, 1]`, and phase
//! two maximizes `ε`; the system is feasible iff the optimum is positive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        }
    }
}

/// `Σ coefficients[v]·v  relation  bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<String, Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn new<S: Into<String>>(
        terms: impl IntoIterator<Item = (S, Rational)>,
        relation: Relation,
        bound: Rational,
    ) -> LinearConstraint {
        let mut coefficients: BTreeMap<String, Rational> = BTreeMap::new();
        for (v, q) in terms {
            *coefficients.entry(v.into()).or_default() += &q;
        }
        coefficients.retain(|_, q| !q.is_zero());
        LinearConstraint { coefficients, relation, bound }
    }

    pub fn ge<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, bound: Rational) -> Self {
        Self::new(terms, Relation::Ge, bound)
    }

    pub fn gt<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, bound: Rational) -> Self {
        Self::new(terms, Relation::Gt, bound)
    }

    pub fn eq<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, bound: Rational) -> Self {
        Self::new(terms, Relation::Eq, bound)
    }

    /// `a·x ≤ b`, stored as `−a·x ≥ −b`.
    pub fn le<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, bound: Rational) -> Self {
        Self::new(terms.into_iter().map(|(v, q)| (v, -q)), Relation::Ge, -bound)
    }

    /// `a·x < b`, stored as `−a·x > −b`.
    pub fn lt<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, bound: Rational) -> Self {
        Self::new(terms.into_iter().map(|(v, q)| (v, -q)), Relation::Gt, -bound)
    }

    /// Sum of the listed variables, each with coefficient 1.
    pub fn sum_of<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Vec<(String, Rational)> {
        vars.into_iter().map(|v| (v.into(), Rational::one())).collect()
    }

    pub fn lhs(&self, assignment: &BTreeMap<String, Rational>) -> Rational {
        self.coefficients.iter().map(|(v, q)| q * assignment.get(v).unwrap_or(&Rational::zero())).sum()
    }

    pub fn satisfied_by(&self, assignment: &BTreeMap<String, Rational>) -> bool {
        let l = self.lhs(assignment);
        match self.relation {
            Relation::Ge => l >= self.bound,
            Relation::Gt => l > self.bound,
            Relation::Eq => l == self.bound,
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            write!(f, "0")?;
        }
        for (i, (v, q)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{q}*{v}")?;
        }
        write!(f, " {} {}", self.relation.symbol(), self.bound)
    }
}

/// One constraint per line; positivity requirements appear as `1*v > 0`.
pub fn dump(constraints: &[LinearConstraint], positivity: &[String]) -> String {
    let mut out = String::new();
    for c in constraints.iter().cloned().chain(positivity.iter().map(|v| positive(v))) {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

fn positive(v: &str) -> LinearConstraint {
    LinearConstraint::gt([(v, Rational::one())], Rational::zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LPResult {
    /// `slack` is the optimal shared margin of the strict rows, if any.
    Feasible {
        assignment: BTreeMap<String, Rational>,
        slack: Option<Rational>,
    },
    Infeasible,
}

impl LPResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LPResult::Feasible { .. })
    }

    pub fn assignment(&self) -> Option<&BTreeMap<String, Rational>> {
        match self {
            LPResult::Feasible { assignment, .. } => Some(assignment),
            LPResult::Infeasible => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    obj_rhs: Rational,
    allowed: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if p != Rational::one() {
            let inv = p.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let eliminate = |row: &mut Vec<Rational>, rhs: &mut Rational| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (a, b) in row.iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *a -= &(&f * b);
                }
            }
            *rhs -= &(&f * &prhs);
        };
        for i in 0..self.rows.len() {
            if i != r {
                let (mut row, mut rhs) = (std::mem::take(&mut self.rows[i]), std::mem::take(&mut self.rhs[i]));
                eliminate(&mut row, &mut rhs);
                self.rows[i] = row;
                self.rhs[i] = rhs;
            }
        }
        let (mut obj, mut orhs) = (std::mem::take(&mut self.obj), std::mem::take(&mut self.obj_rhs));
        eliminate(&mut obj, &mut orhs);
        self.obj = obj;
        self.obj_rhs = orhs;
        self.basis[r] = c;
    }

    /// Minimize the objective row; Bland's rule on both choices. The
    /// problems posed here are always bounded.
    fn optimize(&mut self) {
        loop {
            let Some(c) = (0..self.obj.len()).find(|&j| self.allowed[j] && self.obj[j].is_negative()) else {
                return;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let (r, _) = best.expect("objective is bounded");
            self.pivot(r, c);
        }
    }

    fn set_objective(&mut self, costs: Vec<Rational>) {
        self.obj = costs;
        self.obj_rhs = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = self.obj[self.basis[i]].clone();
            if !cb.is_zero() {
                for j in 0..self.obj.len() {
                    if !self.rows[i][j].is_zero() {
                        let d = &cb * &self.rows[i][j];
                        self.obj[j] -= &d;
                    }
                }
                self.obj_rhs -= &(&cb * &self.rhs[i]);
            }
        }
    }
}

/// Decide the system exactly. `positivity` variables must be strictly
/// positive. A feasible answer carries an assignment that is re-checked
/// against every constraint.
pub fn lp_feasible(constraints: &[LinearConstraint], positivity: &[String]) -> LPResult {
    let mut all: Vec<LinearConstraint> = constraints.to_vec();
    all.extend(positivity.iter().map(|v| positive(v)));

    // rows without variables are decided on the spot
    let zero = Rational::zero();
    for c in all.iter().filter(|c| c.coefficients.is_empty()) {
        let ok = match c.relation {
            Relation::Ge => zero >= c.bound,
            Relation::Gt => zero > c.bound,
            Relation::Eq => zero == c.bound,
        };
        if !ok {
            return LPResult::Infeasible;
        }
    }
    all.retain(|c| !c.coefficients.is_empty());

    let vars: Vec<String> = all
        .iter()
        .flat_map(|c| c.coefficients.keys().cloned())
        .chain(positivity.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let n = vars.len();
    let strict = all.iter().any(|c| c.relation == Relation::Gt);

    // columns: x⁺ (n), x⁻ (n), surplus per inequality row, ε, its cap slack, artificials
    let ineq: Vec<usize> = (0..all.len()).filter(|&i| all[i].relation != Relation::Eq).collect();
    let s0 = 2 * n;
    let eps = s0 + ineq.len();
    let cap = eps + 1;
    let a0 = if strict { cap + 1 } else { eps };
    let m = all.len() + usize::from(strict);
    let width = a0 + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, c) in all.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (v, q) in &c.coefficients {
            let j = index[v.as_str()];
            row[j] = q.clone();
            row[n + j] = -q.clone();
        }
        if let Some(k) = ineq.iter().position(|&r| r == i) {
            row[s0 + k] = Rational::from_integer(-1);
        }
        if c.relation == Relation::Gt {
            row[eps] = Rational::from_integer(-1);
        }
        rows.push(row);
        rhs.push(c.bound.clone());
    }
    if strict {
        let mut row = vec![Rational::zero(); width];
        row[eps] = Rational::one();
        row[cap] = Rational::one();
        rows.push(row);
        rhs.push(Rational::one());
    }
    for i in 0..m {
        if rhs[i].is_negative() {
            for a in rows[i].iter_mut() {
                *a = -a.clone();
            }
            rhs[i] = -rhs[i].clone();
        }
        rows[i][a0 + i] = Rational::one();
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis: (a0..a0 + m).collect(),
        obj: Vec::new(),
        obj_rhs: Rational::zero(),
        allowed: vec![true; width],
    };
    let mut costs = vec![Rational::zero(); width];
    for c in costs[a0..].iter_mut() {
        *c = Rational::one();
    }
    t.set_objective(costs);
    t.optimize();
    if !t.obj_rhs.is_zero() {
        return LPResult::Infeasible;
    }

    // drive remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= a0 {
            match (0..a0).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for j in a0..width {
        t.allowed[j] = false;
    }

    let slack = if strict {
        let mut costs = vec![Rational::zero(); width];
        costs[eps] = Rational::from_integer(-1);
        t.set_objective(costs);
        t.optimize();
        let best = t.obj_rhs.clone();
        if !best.is_positive() {
            return LPResult::Infeasible;
        }
        Some(best)
    } else {
        None
    };

    let mut value = vec![Rational::zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        value[b] = t.rhs[i].clone();
    }
    let assignment: BTreeMap<String, Rational> =
        vars.iter().enumerate().map(|(j, v)| (v.clone(), &value[j] - &value[n + j])).collect();
    for c in constraints.iter().cloned().chain(positivity.iter().map(|v| positive(v))) {
        assert!(c.satisfied_by(&assignment), "simplex returned an assignment violating {c}");
    }
    LPResult::Feasible { assignment, slack }
}
