//! Preference systems `[A, R1, R2]`, their normalized representation sets
//! and the component-wise embedding of mixed-scale vectors.
//!
//! R1 is a preorder on the consequences, R2 a preorder on the pairs of R1
//! (pair `(a, b)` above `(c, d)` means the step from `b` up to `a` is at least
//! as intense as the step from `d` up to `c`). A representation is a utility
//! `u` that is isotone for R1 and for the utility differences of R2; the
//! normalized set additionally fixes `u(a_*) = 0`, `u(a^*) = 1` and asks every
//! strict comparison to hold with slack at least `delta`.
//!
//! Row reduction: the LP rows are the covering pairs of the quotient orders of
//! R1 and R2 (plus one equality per non-representative class member). For
//! `delta >= 0` this describes exactly the same set as one row per strict
//! pair, because slacks add up along chains. It keeps the row count near
//! linear in the number of pairs instead of quadratic.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Comparison, LinearProgram, LpOutcome, Sense, TAU_SIGN};
use crate::order::{covering_pairs, BitMatrix, ElementId, Relation};

pub type Pair = (ElementId, ElementId);

/// The bottom `a_*` and top `a^*` of a bounded system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub bottom: ElementId,
    pub top: ElementId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceSystem {
    elements: Vec<ElementId>,
    r1: Relation,
    r2: Relation<Pair>,
    /// Element indices of every R2 universe item, aligned with `r2.universe()`.
    pair_index: Vec<(usize, usize)>,
    bounds: Option<(usize, usize)>,
    synthetic: Vec<bool>,
    notes: Vec<String>,
}

/// Builds a system from raw pairs; both relations are replaced by their
/// reflexive-transitive closures and bounds are auto-detected.
pub fn build_system(
    elements: Vec<ElementId>,
    r1_pairs: &[Pair],
    r2_pairs: &[(Pair, Pair)],
) -> Result<PreferenceSystem> {
    let mut r1 = Relation::empty(elements.clone())?;
    for (a, b) in r1_pairs {
        r1.insert(a, b)?;
    }
    let r1 = r1.reflexive_transitive_closure();
    let pair_index = r1.index_pairs();
    let pair_universe: Vec<Pair> = pair_index
        .iter()
        .map(|&(i, j)| (elements[i].clone(), elements[j].clone()))
        .collect();
    let mut r2 = Relation::empty(pair_universe)?;
    for (p, q) in r2_pairs {
        for side in [p, q] {
            r1.position(&side.0)?;
            r1.position(&side.1)?;
            if !r1.contains(&side.0, &side.1) {
                return Err(Error::DanglingR2Pair(format!("({}, {})", side.0, side.1)));
            }
        }
        r2.insert(p, q)?;
    }
    let r2 = r2.reflexive_transitive_closure();
    let synthetic = vec![false; elements.len()];
    Ok(PreferenceSystem::assemble(elements, r1, r2, pair_index, synthetic))
}

impl PreferenceSystem {
    fn assemble(
        elements: Vec<ElementId>,
        r1: Relation,
        r2: Relation<Pair>,
        pair_index: Vec<(usize, usize)>,
        synthetic: Vec<bool>,
    ) -> Self {
        let mut ps = Self {
            elements,
            r1,
            r2,
            pair_index,
            bounds: None,
            synthetic,
            notes: Vec::new(),
        };
        ps.detect_bounds();
        ps
    }

    fn detect_bounds(&mut self) {
        let n = self.elements.len();
        let m = self.r1.matrix();
        let pick = |cands: Vec<usize>, what: &str, notes: &mut Vec<String>| -> Option<usize> {
            let best = cands.iter().copied().min_by(|&a, &b| self.elements[a].cmp(&self.elements[b]))?;
            if cands.len() > 1 {
                let names: Vec<&str> = cands.iter().map(|&i| self.elements[i].as_str()).collect();
                notes.push(format!(
                    "{what} candidates {names:?} are mutually indifferent; picked {}",
                    self.elements[best]
                ));
            }
            Some(best)
        };
        let tops: Vec<usize> = (0..n).filter(|&a| (0..n).all(|x| m.get(a, x))).collect();
        let bottoms: Vec<usize> = (0..n).filter(|&a| (0..n).all(|x| m.get(x, a))).collect();
        let mut notes = Vec::new();
        let top = pick(tops, "top", &mut notes);
        let bottom = pick(bottoms, "bottom", &mut notes);
        if let (Some(t), Some(b)) = (top, bottom) {
            if !m.get(b, t) {
                self.bounds = Some((b, t));
                self.notes.extend(notes);
            }
        }
    }

    /// Overrides the detected bounds; the pair must satisfy the bound axioms.
    pub fn with_bounds(mut self, bottom: &ElementId, top: &ElementId) -> Result<Self> {
        let b = self.r1.position(bottom)?;
        let t = self.r1.position(top)?;
        let n = self.elements.len();
        let m = self.r1.matrix();
        let ok = (0..n).all(|a| m.get(t, a) && m.get(a, b)) && !m.get(b, t);
        if !ok {
            return Err(Error::InvalidInput(format!(
                "({bottom}, {top}) are not bounds of r1"
            )));
        }
        self.bounds = Some((b, t));
        Ok(self)
    }

    /// Adds a fresh top above and a fresh bottom below every element
    /// (R2 is carried over unchanged). Useful for systems elicited without
    /// global extremes.
    pub fn with_synthetic_bounds(&self, bottom: ElementId, top: ElementId) -> Result<Self> {
        let mut elements = self.elements.clone();
        elements.push(top.clone());
        elements.push(bottom.clone());
        let mut r1_pairs = self.r1.pairs();
        for a in &self.elements {
            r1_pairs.push((top.clone(), a.clone()));
            r1_pairs.push((a.clone(), bottom.clone()));
        }
        r1_pairs.push((top.clone(), bottom.clone()));
        let r2_pairs: Vec<(Pair, Pair)> = self.r2.pairs();
        let mut ps = build_system(elements, &r1_pairs, &r2_pairs)?;
        let n = ps.elements.len();
        ps.synthetic[n - 2] = true;
        ps.synthetic[n - 1] = true;
        ps.bounds = Some((n - 1, n - 2));
        Ok(ps)
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, id: &ElementId) -> Option<usize> {
        self.r1.index_of(id)
    }

    pub fn position(&self, id: &ElementId) -> Result<usize> {
        self.r1.position(id)
    }

    pub fn r1(&self) -> &Relation {
        &self.r1
    }

    pub fn r2(&self) -> &Relation<Pair> {
        &self.r2
    }

    pub fn bounds(&self) -> Option<Bounds> {
        self.bounds.map(|(b, t)| Bounds {
            bottom: self.elements[b].clone(),
            top: self.elements[t].clone(),
        })
    }

    pub fn bound_indices(&self) -> Option<(usize, usize)> {
        self.bounds
    }

    pub fn is_synthetic(&self, i: usize) -> bool {
        self.synthetic[i]
    }

    /// Provenance notes collected while building (bound choices and such).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// True if R2 carries no information beyond reflexivity.
    pub fn has_trivial_r2(&self) -> bool {
        let n = self.r2.universe().len();
        self.r2.len() == n
    }
}

/// Assignment of utilities to elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationVector {
    pub assignment: BTreeMap<ElementId, f64>,
}

impl RepresentationVector {
    pub fn from_values(elements: &[ElementId], values: &[f64]) -> Self {
        Self {
            assignment: elements.iter().cloned().zip(values.iter().copied()).collect(),
        }
    }

    pub fn get(&self, id: &ElementId) -> Option<f64> {
        self.assignment.get(id).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowKind {
    /// `terms >= delta`
    Strict,
    /// `terms = 0`
    Equal,
}

/// One row of the representation set. Coefficients are integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub terms: Vec<(usize, i32)>,
    pub kind: RowKind,
}

impl Row {
    pub fn activity(&self, u: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a as f64 * u[j]).sum()
    }
}

fn merge_terms(raw: &[(usize, i32)]) -> Vec<(usize, i32)> {
    let mut acc: BTreeMap<usize, i32> = BTreeMap::new();
    for &(j, a) in raw {
        *acc.entry(j).or_insert(0) += a;
    }
    acc.into_iter().filter(|&(_, a)| a != 0).collect()
}

/// Row set of the normalized representation set at a given `delta`,
/// reusable across objectives.
#[derive(Clone, Debug)]
pub struct RepresentationConstraintSet {
    elements: Vec<ElementId>,
    delta: f64,
    bottom: usize,
    top: usize,
    rows: Vec<Row>,
    dual: LinearProgram,
}

/// Partition of a preorder into indifference classes: representative
/// (smallest index) per item.
fn class_representatives(m: &BitMatrix) -> Vec<usize> {
    let n = m.size();
    let mut rep: Vec<usize> = (0..n).collect();
    for i in 0..n {
        if rep[i] != i {
            continue;
        }
        for j in i + 1..n {
            if rep[j] == j && m.get(i, j) && m.get(j, i) {
                rep[j] = i;
            }
        }
    }
    rep
}

pub fn constraints_for(ps: &PreferenceSystem, delta: f64) -> Result<RepresentationConstraintSet> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta {delta} outside [0, 1)")));
    }
    let (bottom, top) = ps.bounds.ok_or(Error::MissingBounds)?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |row: Row, rows: &mut Vec<Row>| {
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    };

    // R1: equalities inside indifference classes, strict rows on covers.
    let m1 = ps.r1.matrix();
    let rep1 = class_representatives(m1);
    for (i, &r) in rep1.iter().enumerate() {
        if r != i {
            push(Row { terms: merge_terms(&[(i, 1), (r, -1)]), kind: RowKind::Equal }, &mut rows);
        }
    }
    let skip1: Vec<bool> = rep1.iter().enumerate().map(|(i, &r)| r != i).collect();
    for (a, b) in covering_pairs(m1, Some(&skip1)) {
        push(Row { terms: merge_terms(&[(a, 1), (b, -1)]), kind: RowKind::Strict }, &mut rows);
    }

    // R2: same over pairs, with difference terms.
    let diff = |p: usize, q: usize| -> Vec<(usize, i32)> {
        let (c, d) = ps.pair_index[p];
        let (e, f) = ps.pair_index[q];
        merge_terms(&[(c, 1), (d, -1), (e, -1), (f, 1)])
    };
    let m2 = ps.r2.matrix();
    let rep2 = class_representatives(m2);
    for (p, &r) in rep2.iter().enumerate() {
        if r != p {
            let terms = diff(p, r);
            if !terms.is_empty() {
                push(Row { terms, kind: RowKind::Equal }, &mut rows);
            }
        }
    }
    let skip2: Vec<bool> = rep2.iter().enumerate().map(|(i, &r)| r != i).collect();
    for (p, q) in covering_pairs(m2, Some(&skip2)) {
        push(Row { terms: diff(p, q), kind: RowKind::Strict }, &mut rows);
    }

    let dual = dual_template(ps.elements.len(), &rows, delta, bottom, top)?;
    Ok(RepresentationConstraintSet {
        elements: ps.elements.clone(),
        delta,
        bottom,
        top,
        rows,
        dual,
    })
}

/// Box bounds of the normalized problem.
fn variable_bounds(n: usize, bottom: usize, top: usize) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, 1.0); n];
    b[bottom] = (0.0, 0.0);
    b[top] = (1.0, 1.0);
    b
}

/// Rows as `g.u >= h` with equalities split in two.
fn ge_rows(rows: &[Row], delta: f64) -> Vec<(Vec<(usize, f64)>, f64)> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let g: Vec<(usize, f64)> = row.terms.iter().map(|&(j, a)| (j, a as f64)).collect();
        match row.kind {
            RowKind::Strict => out.push((g, delta)),
            RowKind::Equal => {
                let neg = g.iter().map(|&(j, a)| (j, -a)).collect();
                out.push((g, 0.0));
                out.push((neg, 0.0));
            }
        }
    }
    out
}

/// Dual of `min c.u s.t. G u >= h, l <= u <= ub` with the objective `c` as
/// right-hand side (initially zero):
/// `max h.y + l.t - ub.s s.t. G^T y + t - s = c, y, t, s >= 0`.
/// The row multipliers of its optimum are an optimal `u`.
fn dual_from_ge(
    n: usize,
    ge: &[(Vec<(usize, f64)>, f64)],
    bounds: &[(f64, f64)],
) -> Result<LinearProgram> {
    let k = ge.len();
    let mut dual = LinearProgram::new(k + 2 * n, Sense::Maximize);
    let mut obj: Vec<f64> = ge.iter().map(|(_, h)| *h).collect();
    obj.extend(bounds.iter().map(|b| b.0));
    obj.extend(bounds.iter().map(|b| -b.1));
    dual.set_objective(obj)?;
    let mut cols: Vec<Vec<f64>> = vec![vec![0.0; k + 2 * n]; n];
    for (i, (g, _)) in ge.iter().enumerate() {
        for &(j, a) in g {
            cols[j][i] += a;
        }
    }
    for (j, mut row) in cols.into_iter().enumerate() {
        row[k + j] = 1.0;
        row[k + n + j] = -1.0;
        dual.add_constraint(row, Comparison::Eq, 0.0)?;
    }
    Ok(dual)
}

fn dual_template(n: usize, rows: &[Row], delta: f64, bottom: usize, top: usize) -> Result<LinearProgram> {
    dual_from_ge(n, &ge_rows(rows, delta), &variable_bounds(n, bottom, top))
}

/// Minimizes `c.u` through a dual template. `None` when the primal is
/// infeasible.
fn minimize_with(dual: &LinearProgram, c: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
    let mut lp = dual.clone();
    for (j, &cj) in c.iter().enumerate() {
        lp.set_rhs(j, cj)?;
    }
    match lp::solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(Some((sol.objective_value, sol.duals))),
        // An unbounded dual certifies an empty primal; an infeasible dual
        // cannot happen for a nonempty box-bounded primal.
        LpOutcome::Unbounded | LpOutcome::Infeasible => Ok(None),
    }
}

/// Optimum of a linear objective over the representation set.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub u: Vec<f64>,
}

impl RepresentationConstraintSet {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn variable(&self, id: &ElementId) -> Option<usize> {
        self.elements.iter().position(|e| e == id)
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.bottom, self.top)
    }

    /// The row set as a feasibility program (zero objective).
    pub fn to_linear_program(&self) -> LinearProgram {
        let n = self.elements.len();
        let mut lp = LinearProgram::new(n, Sense::Minimize);
        for (j, &(lo, hi)) in variable_bounds(n, self.bottom, self.top).iter().enumerate() {
            lp.set_bounds(j, lo, hi).expect("valid bounds");
        }
        for row in &self.rows {
            let terms: Vec<(usize, f64)> = row.terms.iter().map(|&(j, a)| (j, a as f64)).collect();
            let (cmp, rhs) = match row.kind {
                RowKind::Strict => (Comparison::Ge, self.delta),
                RowKind::Equal => (Comparison::Eq, 0.0),
            };
            lp.add_sparse_constraint(&terms, cmp, rhs).expect("indices in range");
        }
        lp
    }

    /// True if `u` satisfies every row and the normalization within `tol`.
    pub fn is_satisfied_by(&self, u: &[f64], tol: f64) -> bool {
        if u.len() != self.elements.len() {
            return false;
        }
        let boxed = u.iter().all(|&x| (-tol..=1.0 + tol).contains(&x));
        let norm = u[self.bottom].abs() <= tol && (u[self.top] - 1.0).abs() <= tol;
        boxed
            && norm
            && self.rows.iter().all(|r| {
                let v = r.activity(u);
                match r.kind {
                    RowKind::Strict => v >= self.delta - tol,
                    RowKind::Equal => v.abs() <= tol,
                }
            })
    }

    /// `min c.u` over the set. Fails with `InconsistentAtDelta` if empty.
    pub fn minimize(&self, c: &[f64]) -> Result<Minimum> {
        if c.len() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                got: c.len(),
            });
        }
        match minimize_with(&self.dual, c)? {
            Some((value, u)) => {
                let u = u.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
                Ok(Minimum { value, u })
            }
            None => Err(Error::InconsistentAtDelta(self.delta)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub delta: f64,
    /// Whether the normalized representation set at `delta` is nonempty.
    pub feasible: bool,
    pub witness: Option<RepresentationVector>,
    /// Largest uniform slack of the strict rows; `None` if even the closed
    /// (slack 0) system is infeasible.
    pub delta_max: Option<f64>,
    /// Consistency with strict comparisons, i.e. `delta_max > TAU_SIGN`.
    pub consistent: bool,
    pub bounds: Bounds,
    pub notes: Vec<String>,
}

/// Solves `max eps` s.t. every strict row has slack `>= eps`. Returns the
/// optimal `eps` and an optimal `u`, or `None` if infeasible at `eps = 0`.
fn max_slack(ps: &PreferenceSystem) -> Result<Option<(f64, Vec<f64>)>> {
    let set = constraints_for(ps, 0.0)?;
    let n = ps.elements.len();
    let mut ge = Vec::new();
    for row in &set.rows {
        let g: Vec<(usize, f64)> = row.terms.iter().map(|&(j, a)| (j, a as f64)).collect();
        match row.kind {
            RowKind::Strict => {
                let mut g = g;
                g.push((n, -1.0));
                ge.push((g, 0.0));
            }
            RowKind::Equal => {
                ge.push((g.iter().map(|&(j, a)| (j, -a)).collect(), 0.0));
                ge.push((g, 0.0));
            }
        }
    }
    let mut bounds = variable_bounds(n, set.bottom, set.top);
    bounds.push((0.0, 1.0));
    let dual = dual_from_ge(n + 1, &ge, &bounds)?;
    let mut c = vec![0.0; n + 1];
    c[n] = -1.0;
    Ok(minimize_with(&dual, &c)?.map(|(v, mut u)| {
        u.truncate(n);
        (-v, u.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
    }))
}

pub fn check_consistency(ps: &PreferenceSystem, delta: f64) -> Result<ConsistencyReport> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta {delta} outside [0, 1)")));
    }
    let bounds = ps.bounds().ok_or(Error::MissingBounds)?;
    let best = max_slack(ps)?;
    let delta_max = best.as_ref().map(|(e, _)| *e);
    let feasible = delta_max.is_some_and(|e| delta <= e + TAU_SIGN);
    let witness = match (&best, feasible) {
        (Some((_, u)), true) => Some(RepresentationVector::from_values(&ps.elements, u)),
        _ => None,
    };
    let mut notes = ps.notes.clone();
    if ps.synthetic.iter().any(|&s| s) {
        let names: Vec<&str> = ps
            .elements
            .iter()
            .zip(&ps.synthetic)
            .filter(|(_, &s)| s)
            .map(|(e, _)| e.as_str())
            .collect();
        notes.push(format!("synthetic bound points: {names:?}"));
    }
    Ok(ConsistencyReport {
        delta,
        feasible,
        witness,
        delta_max,
        consistent: delta_max.is_some_and(|e| e > TAU_SIGN),
        bounds,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Mixed-scale embedding

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "snake_case")]
pub enum Scale {
    Cardinal,
    /// Levels listed from worst to best (before applying the direction).
    Ordinal { levels: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub scale: Scale,
    pub direction: Direction,
}

impl Dimension {
    pub fn cardinal(name: &str) -> Self {
        Self {
            name: name.into(),
            scale: Scale::Cardinal,
            direction: Direction::HigherBetter,
        }
    }

    pub fn ordinal(name: &str, levels: &[&str]) -> Self {
        Self {
            name: name.into(),
            scale: Scale::Ordinal {
                levels: levels.iter().map(|s| s.to_string()).collect(),
            },
            direction: Direction::HigherBetter,
        }
    }

    pub fn lower_better(mut self) -> Self {
        self.direction = Direction::LowerBetter;
        self
    }

    pub fn is_cardinal(&self) -> bool {
        matches!(self.scale, Scale::Cardinal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaleSpec {
    pub dimensions: Vec<Dimension>,
}

/// One raw coordinate: a number on cardinal scales, a level name on ordinal ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Number(f64),
    Level(String),
}

impl std::fmt::Display for MetricValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricValue::Number(x) => write!(f, "{x}"),
            MetricValue::Level(s) => f.write_str(s),
        }
    }
}

impl ScaleSpec {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::InvalidInput("scale spec needs at least one dimension".into()));
        }
        Ok(Self { dimensions })
    }

    pub fn r(&self) -> usize {
        self.dimensions.len()
    }

    pub fn cardinal_mask(&self) -> Vec<bool> {
        self.dimensions.iter().map(Dimension::is_cardinal).collect()
    }

    /// Maps a raw vector to oriented coordinates (larger is better);
    /// ordinal levels become ranks.
    pub fn encode(&self, point: &[MetricValue]) -> Result<Vec<f64>> {
        if point.len() != self.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                got: point.len(),
            });
        }
        let mut out = Vec::with_capacity(point.len());
        for (dim, v) in self.dimensions.iter().zip(point) {
            let x = match (&dim.scale, v) {
                (Scale::Cardinal, MetricValue::Number(x)) if x.is_finite() => *x,
                (Scale::Cardinal, other) => {
                    return Err(Error::InvalidInput(format!(
                        "dimension {} expects a finite number, got {other}",
                        dim.name
                    )))
                }
                (Scale::Ordinal { levels }, v) => {
                    let name = v.to_string();
                    let rank = levels.iter().position(|l| *l == name).ok_or_else(|| {
                        Error::UnknownOrdinalLevel {
                            dimension: dim.name.clone(),
                            level: name.clone(),
                        }
                    })?;
                    rank as f64
                }
            };
            out.push(match dim.direction {
                Direction::HigherBetter => x,
                Direction::LowerBetter => -x,
            });
        }
        Ok(out)
    }

    /// Inverse of [`encode`](Self::encode) for display.
    pub fn decode(&self, coords: &[f64]) -> Vec<MetricValue> {
        self.dimensions
            .iter()
            .zip(coords)
            .map(|(dim, &x)| {
                let x = match dim.direction {
                    Direction::HigherBetter => x,
                    Direction::LowerBetter => -x,
                };
                match &dim.scale {
                    Scale::Cardinal => MetricValue::Number(x),
                    Scale::Ordinal { levels } => MetricValue::Level(levels[x as usize].clone()),
                }
            })
            .collect()
    }
}

/// Result of [`embed_vectors`].
#[derive(Clone, Debug)]
pub struct EmbeddedSystem {
    pub system: PreferenceSystem,
    /// Element index of every input point.
    pub point_element: Vec<usize>,
    /// Oriented coordinates of every element.
    pub coords: Vec<Vec<f64>>,
}

pub const SYNTHETIC_TOP: &str = "a^*";
pub const SYNTHETIC_BOTTOM: &str = "a_*";

fn label(spec: &ScaleSpec, coords: &[f64]) -> String {
    let parts: Vec<String> = spec.decode(coords).iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Does `x` dominate `y` component-wise?
fn dominates(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a >= b)
}

/// Embeds observed vectors into the component-wise preference system:
/// R1 is component-wise dominance, and `(x, y)` is at least as intense as
/// `(x', y')` when the difference dominates on cardinal coordinates and
/// `x >= x' >= y' >= y` on ordinal ones. Component-wise maximum and minimum
/// are added as bounds when not observed.
pub fn embed_vectors(points: &[Vec<MetricValue>], spec: &ScaleSpec) -> Result<EmbeddedSystem> {
    let encoded: Vec<Vec<f64>> = points.iter().map(|p| spec.encode(p)).collect::<Result<_>>()?;
    embed_encoded(&encoded, spec)
}

/// As [`embed_vectors`], on already oriented coordinates.
pub fn embed_encoded(encoded: &[Vec<f64>], spec: &ScaleSpec) -> Result<EmbeddedSystem> {
    let r = spec.r();
    if encoded.is_empty() {
        return Err(Error::InvalidInput("no points to embed".into()));
    }
    for p in encoded {
        if p.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: p.len() });
        }
    }
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut point_element = Vec::with_capacity(encoded.len());
    let mut lookup: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for p in encoded {
        // -0.0 and 0.0 are the same point
        let key: Vec<u64> = p.iter().map(|x| (x + 0.0).to_bits()).collect();
        let idx = *lookup.entry(key).or_insert_with(|| {
            coords.push(p.clone());
            coords.len() - 1
        });
        point_element.push(idx);
    }
    let hi: Vec<f64> = (0..r).map(|j| coords.iter().map(|c| c[j]).fold(f64::MIN, f64::max)).collect();
    let lo: Vec<f64> = (0..r).map(|j| coords.iter().map(|c| c[j]).fold(f64::MAX, f64::min)).collect();
    if hi == lo {
        return Err(Error::MissingBounds);
    }
    let mut synthetic = vec![false; coords.len()];
    let mut fixed_names: Vec<Option<&str>> = vec![None; coords.len()];
    for (extreme, name) in [(hi, SYNTHETIC_TOP), (lo, SYNTHETIC_BOTTOM)] {
        if !coords.iter().any(|c| *c == extreme) {
            coords.push(extreme);
            synthetic.push(true);
            fixed_names.push(Some(name));
        }
    }

    let mut elements = Vec::with_capacity(coords.len());
    let mut used = HashSet::new();
    for (c, fixed) in coords.iter().zip(&fixed_names) {
        let mut name = fixed.map_or_else(|| label(spec, c), str::to_string);
        while !used.insert(name.clone()) {
            name.push('\'');
        }
        elements.push(ElementId::new(name)?);
    }

    let n = coords.len();
    let mut m1 = BitMatrix::new(n);
    for i in 0..n {
        for j in 0..n {
            if dominates(&coords[i], &coords[j]) {
                m1.set(i, j, true);
            }
        }
    }
    let r1 = Relation::from_matrix(elements.clone(), m1)?;
    let pair_index = r1.index_pairs();

    let mask = spec.cardinal_mask();
    let eps: Vec<f64> = (0..r)
        .map(|j| 1e-9 * (1.0 + coords.iter().map(|c| c[j].abs()).fold(0.0, f64::max)))
        .collect();
    let more_intense = |p: (usize, usize), q: (usize, usize)| -> bool {
        let (x, y, xp, yp) = (&coords[p.0], &coords[p.1], &coords[q.0], &coords[q.1]);
        (0..r).all(|j| {
            if mask[j] {
                (x[j] - y[j]) - (xp[j] - yp[j]) >= -eps[j]
            } else {
                x[j] >= xp[j] && xp[j] >= yp[j] && yp[j] >= y[j]
            }
        })
    };
    let k = pair_index.len();
    let mut m2 = BitMatrix::new(k);
    for (a, &p) in pair_index.iter().enumerate() {
        for (b, &q) in pair_index.iter().enumerate() {
            if more_intense(p, q) {
                m2.set(a, b, true);
            }
        }
    }
    // The tolerance can break exact transitivity; close to stay a preorder.
    let m2 = m2.closure();
    let pair_universe: Vec<Pair> = pair_index
        .iter()
        .map(|&(i, j)| (elements[i].clone(), elements[j].clone()))
        .collect();
    let r2 = Relation::from_matrix(pair_universe, m2)?;
    let system = PreferenceSystem::assemble(elements, r1, r2, pair_index, synthetic);
    debug_assert!(system.bounds.is_some());
    Ok(EmbeddedSystem {
        system,
        point_element,
        coords,
    })
}
