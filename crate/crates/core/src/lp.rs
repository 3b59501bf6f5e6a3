//! Dense two-phase simplex.
//!
//! Bounded-variable primal simplex on a dense tableau. Variable bounds are
//! handled natively (nonbasic variables sit at either bound), so box bounds
//! never become rows. Rows that already carry a usable unit column (a slack,
//! or a structural column that only appears in that row) start basic on that
//! column; the remaining rows get artificials and go through phase 1.
//!
//! Pricing starts with the steepest reduced cost (lowest index on ties). After
//! a run of degenerate pivots it switches to Bland's rule (lowest eligible
//! column enters, lowest basic column leaves among ratio ties) and stays
//! there, which keeps the anti-cycling guarantee. Both rules are
//! deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primal feasibility tolerance.
pub const TAU_FEAS: f64 = 1e-9;
/// Reduced-cost optimality tolerance.
pub const TAU_OPT: f64 = 1e-9;
/// Tolerance for semantic sign decisions made on LP optima.
pub const TAU_SIGN: f64 = 1e-7;

const PIVOT_EPS: f64 = 1e-11;
/// Consecutive degenerate pivots tolerated under steepest pricing before
/// switching to Bland's rule for good.
const DEGENERATE_STREAK_LIMIT: usize = 50;
/// Pivots between refactorizations of the tableau.
const REFACTOR_INTERVAL: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub cmp: Comparison,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    num_vars: usize,
    sense: Sense,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// New program with zero objective and every variable in `[0, +inf)`.
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            num_vars,
            sense,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn set_objective(&mut self, coeffs: Vec<f64>) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: coeffs.len(),
            });
        }
        self.objective = coeffs;
        Ok(())
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, cmp: Comparison, rhs: f64) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: coeffs.len(),
            });
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite constraint data".into()));
        }
        self.constraints.push(Constraint { coeffs, cmp, rhs });
        Ok(())
    }

    /// Convenience for sparse rows given as `(variable, coefficient)`.
    pub fn add_sparse_constraint(
        &mut self,
        terms: &[(usize, f64)],
        cmp: Comparison,
        rhs: f64,
    ) -> Result<()> {
        let mut coeffs = vec![0.0; self.num_vars];
        for &(j, a) in terms {
            if j >= self.num_vars {
                return Err(Error::InvalidInput(format!("variable {j} out of range")));
            }
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, cmp, rhs)
    }

    /// Replaces the right-hand side of constraint `row`.
    pub fn set_rhs(&mut self, row: usize, rhs: f64) -> Result<()> {
        if !rhs.is_finite() {
            return Err(Error::InvalidInput("non-finite constraint data".into()));
        }
        let c = self
            .constraints
            .get_mut(row)
            .ok_or_else(|| Error::InvalidInput(format!("constraint {row} out of range")))?;
        c.rhs = rhs;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::InvalidInput(format!("variable {var} out of range")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidInput(format!(
                "invalid bounds [{lower}, {upper}] for variable {var}"
            )));
        }
        self.bounds[var] = (lower, upper);
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective".into()));
        }
        Ok(())
    }
}

/// Optimal point of a program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub objective_value: f64,
    pub values: Vec<f64>,
    /// One multiplier per constraint, in the program's own sense: at the
    /// optimum `objective = sum(duals[i] * rhs[i]) + bound terms`.
    pub duals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn objective_value(&self) -> Option<f64> {
        self.optimal().map(|s| s.objective_value)
    }
}

/// Solves `lp` to optimality.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let mut t = Tableau::build(lp);
    if !t.run_phase_one()? {
        return Ok(LpOutcome::Infeasible);
    }
    if !t.run_phase_two()? {
        return Ok(LpOutcome::Unbounded);
    }
    t.extract(lp).map(LpOutcome::Optimal)
}

/// True iff the constraint set of `lp` admits a point (phase 1 only).
pub fn feasible(lp: &LinearProgram) -> Result<bool> {
    lp.validate()?;
    Tableau::build(lp).run_phase_one()
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// x = offset + x'
    Shift(f64),
    /// x = offset - x'
    Mirror(f64),
    /// x = x'(col) - x'(col + 1)
    Split,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ColState {
    Basic,
    Lower,
    Upper,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// B^-1 A, row-major.
    t: Vec<f64>,
    /// Values of the basic variables, by row.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    upper: Vec<f64>,
    artificial: Vec<bool>,
    /// Phase-2 costs (minimization form).
    cost: Vec<f64>,
    /// Reduced costs for the active phase.
    reduced: Vec<f64>,
    /// Per row: the column that formed the initial basis, and its coefficient.
    start_col: Vec<(usize, f64)>,
    /// Per row: -1 if the row was negated to make its rhs nonnegative.
    row_sign: Vec<f64>,
    /// Per structural variable: its mapping and first column.
    var_map: Vec<(VarMap, usize)>,
    iterations: usize,
    max_iterations: usize,
    /// Once set, pricing stays on Bland's rule for the rest of the solve.
    bland: bool,
    degenerate_streak: usize,
    /// Initial tableau and basic values, kept for refactorization.
    t0: Vec<f64>,
    beta0: Vec<f64>,
    since_refactor: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();

        // Structural columns after bound substitution.
        let mut var_map = Vec::with_capacity(n);
        let mut upper = Vec::new();
        let mut cost = Vec::new();
        let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        for j in 0..n {
            let (l, u) = lp.bounds[j];
            let c = sign * lp.objective[j];
            let col = upper.len();
            if l.is_finite() {
                var_map.push((VarMap::Shift(l), col));
                upper.push(u - l);
                cost.push(c);
            } else if u.is_finite() {
                var_map.push((VarMap::Mirror(u), col));
                upper.push(f64::INFINITY);
                cost.push(-c);
            } else {
                var_map.push((VarMap::Split, col));
                upper.extend([f64::INFINITY, f64::INFINITY]);
                cost.extend([c, -c]);
            }
        }
        let n_struct = upper.len();

        // Transformed rows (dense over structural columns) and rhs.
        let mut a = vec![0.0; m * n_struct];
        let mut rhs = vec![0.0; m];
        for (i, con) in lp.constraints.iter().enumerate() {
            let mut b = con.rhs;
            let row = &mut a[i * n_struct..(i + 1) * n_struct];
            for (j, &coef) in con.coeffs.iter().enumerate() {
                if coef == 0.0 {
                    continue;
                }
                let (map, col) = var_map[j];
                match map {
                    VarMap::Shift(l) => {
                        b -= coef * l;
                        row[col] = coef;
                    }
                    VarMap::Mirror(u) => {
                        b -= coef * u;
                        row[col] = -coef;
                    }
                    VarMap::Split => {
                        row[col] = coef;
                        row[col + 1] = -coef;
                    }
                }
            }
            rhs[i] = b;
        }

        // Slack columns.
        let mut slack_of_row = vec![None; m];
        for (i, con) in lp.constraints.iter().enumerate() {
            match con.cmp {
                Comparison::Le => slack_of_row[i] = Some((upper.len(), 1.0)),
                Comparison::Ge => slack_of_row[i] = Some((upper.len(), -1.0)),
                Comparison::Eq => continue,
            }
            upper.push(f64::INFINITY);
            cost.push(0.0);
        }
        let n_before_art = upper.len();

        let row_sign: Vec<f64> = rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();

        // Structural columns that are (scaled) unit vectors.
        let mut unit_struct: Vec<Option<(usize, usize)>> = vec![None; m];
        for col in 0..n_struct {
            let mut nz = None;
            let mut count = 0;
            for i in 0..m {
                if a[i * n_struct + col] != 0.0 {
                    count += 1;
                    nz = Some(i);
                    if count > 1 {
                        break;
                    }
                }
            }
            if count == 1 {
                let i = nz.unwrap();
                let coef = a[i * n_struct + col] * row_sign[i];
                let b = rhs[i] * row_sign[i];
                if coef > 0.0 && b / coef <= upper[col] && unit_struct[i].is_none() {
                    unit_struct[i] = Some((col, 0));
                }
            }
        }

        // Choose a starting column per row; artificials where none fits.
        let mut start_col = vec![(0usize, 0.0); m];
        let mut artificial_rows = Vec::new();
        for i in 0..m {
            let b = rhs[i] * row_sign[i];
            if let Some((col, s)) = slack_of_row[i] {
                let coef = s * row_sign[i];
                if coef > 0.0 {
                    start_col[i] = (col, coef);
                    continue;
                }
                if b == 0.0 {
                    // -s = 0 is satisfied with the slack basic at zero.
                    start_col[i] = (col, coef);
                    continue;
                }
            }
            if let Some((col, _)) = unit_struct[i] {
                start_col[i] = (col, a[i * n_struct + col] * row_sign[i]);
                continue;
            }
            artificial_rows.push(i);
        }
        let cols = n_before_art + artificial_rows.len();
        let mut artificial = vec![false; cols];
        for (k, &i) in artificial_rows.iter().enumerate() {
            let col = n_before_art + k;
            artificial[col] = true;
            start_col[i] = (col, 1.0);
            upper.push(f64::INFINITY);
            cost.push(0.0);
        }

        // Assemble B0^-1 A with B0 = diag(start coefficients).
        let mut t = vec![0.0; m * cols];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        for i in 0..m {
            let (col0, coef0) = start_col[i];
            let s = row_sign[i] / coef0;
            let row = &mut t[i * cols..(i + 1) * cols];
            for j in 0..n_struct {
                row[j] = a[i * n_struct + j] * s;
            }
            if let Some((col, sc)) = slack_of_row[i] {
                row[col] = sc * s;
            }
            if artificial[col0] {
                row[col0] = 1.0;
            }
            beta[i] = rhs[i] * s;
            basis[i] = col0;
        }
        let mut state = vec![ColState::Lower; cols];
        for &b in &basis {
            state[b] = ColState::Basic;
        }

        let max_iterations = 50_000 + 200 * (m + cols);
        let (t0, beta0) = (t.clone(), beta.clone());
        Tableau {
            rows: m,
            cols,
            t,
            beta,
            basis,
            state,
            upper,
            artificial,
            cost,
            reduced: vec![0.0; cols],
            start_col,
            row_sign,
            var_map,
            iterations: 0,
            max_iterations,
            bland: false,
            degenerate_streak: 0,
            t0,
            beta0,
            since_refactor: 0,
        }
    }

    fn phase_costs(&self, phase_one: bool) -> Vec<f64> {
        if phase_one {
            self.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect()
        } else {
            self.cost.clone()
        }
    }

    /// Recomputes B^-1 A and the basic values from the initial tableau, which
    /// discards the rounding error accumulated by product-form updates.
    /// Returns false (tableau untouched) if the basis looks singular.
    fn refactor(&mut self) -> bool {
        let (m, cols) = (self.rows, self.cols);
        let mut mat = self.t0.clone();
        let mut rhs = self.beta0.clone();
        for j in 0..cols {
            if self.state[j] == ColState::Upper && self.upper[j] != 0.0 {
                let u = self.upper[j];
                for i in 0..m {
                    rhs[i] -= mat[i * cols + j] * u;
                }
            }
        }
        let mut used = vec![false; m];
        let mut row_of = vec![0usize; m];
        for k in 0..m {
            let c = self.basis[k];
            let mut best = None;
            let mut best_abs = 1e-9;
            for i in 0..m {
                let v = mat[i * cols + c].abs();
                if !used[i] && v > best_abs {
                    best_abs = v;
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                return false;
            };
            used[r] = true;
            row_of[k] = r;
            let inv = 1.0 / mat[r * cols + c];
            for v in &mut mat[r * cols..(r + 1) * cols] {
                *v *= inv;
            }
            mat[r * cols + c] = 1.0;
            rhs[r] *= inv;
            let pivot_row: Vec<f64> = mat[r * cols..(r + 1) * cols].to_vec();
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = mat[i * cols + c];
                if f != 0.0 {
                    for (v, &pr) in mat[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                        *v -= f * pr;
                    }
                    mat[i * cols + c] = 0.0;
                    rhs[i] -= f * rhs[r];
                }
            }
        }
        for k in 0..m {
            let r = row_of[k];
            self.t[k * cols..(k + 1) * cols].copy_from_slice(&mat[r * cols..(r + 1) * cols]);
            self.beta[k] = rhs[r];
        }
        self.since_refactor = 0;
        true
    }

    fn set_reduced_costs(&mut self, costs: &[f64]) {
        self.reduced.copy_from_slice(costs);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (d, &v) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * v;
                }
            }
        }
        for i in 0..self.rows {
            self.reduced[self.basis[i]] = 0.0;
        }
    }

    /// Returns false if infeasible.
    fn run_phase_one(&mut self) -> Result<bool> {
        if !self.artificial.iter().any(|&a| a) {
            return Ok(true);
        }
        let costs: Vec<f64> = self.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        self.set_reduced_costs(&costs);
        if !self.iterate(true)? {
            return Err(Error::NumericFailure("phase 1 reported unbounded".into()));
        }
        let infeas: f64 = (0..self.rows)
            .filter(|&i| self.artificial[self.basis[i]])
            .map(|i| self.beta[i].max(0.0))
            .sum();
        let scale = 1.0 + self.beta.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeas > TAU_FEAS * scale {
            return Ok(false);
        }
        // Move remaining basic artificials out where possible.
        for r in 0..self.rows {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            let row = &self.t[r * self.cols..(r + 1) * self.cols];
            let q = (0..self.cols)
                .find(|&j| !self.artificial[j] && self.state[j] != ColState::Basic && row[j].abs() > 1e-9);
            if let Some(q) = q {
                let value = if self.state[q] == ColState::Upper { self.upper[q] } else { 0.0 };
                self.pivot(r, q);
                self.beta[r] = value;
            }
        }
        for j in 0..self.cols {
            if self.artificial[j] {
                self.upper[j] = 0.0;
                if self.state[j] != ColState::Basic {
                    self.state[j] = ColState::Lower;
                }
            }
        }
        for i in 0..self.rows {
            if self.artificial[self.basis[i]] {
                self.beta[i] = 0.0;
            }
        }
        Ok(true)
    }

    /// Returns false if unbounded.
    fn run_phase_two(&mut self) -> Result<bool> {
        let costs = self.cost.clone();
        self.set_reduced_costs(&costs);
        self.iterate(false)
    }

    /// Simplex iterations on the current reduced costs. Returns false on an
    /// unbounded ray.
    fn iterate(&mut self, phase_one: bool) -> Result<bool> {
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::NumericFailure("simplex iteration limit reached".into()));
            }
            if self.since_refactor >= REFACTOR_INTERVAL && self.refactor() {
                self.set_reduced_costs(&self.phase_costs(phase_one));
            }
            let entering = if self.bland {
                self.entering_bland(phase_one)
            } else {
                self.entering_dantzig(phase_one)
            };
            let Some((q, dir)) = entering else {
                // Confirm optimality on a freshly factored tableau.
                if self.since_refactor > 0 && self.refactor() {
                    self.set_reduced_costs(&self.phase_costs(phase_one));
                    continue;
                }
                return Ok(true);
            };

            // Ratio test.
            let mut theta = self.upper[q];
            let mut leave: Option<(usize, bool)> = None; // (row, leaves at upper)
            for i in 0..self.rows {
                let alpha = dir * self.t[i * self.cols + q];
                let b = self.basis[i];
                let (ratio, at_upper) = if alpha > PIVOT_EPS {
                    ((self.beta[i].max(0.0)) / alpha, false)
                } else if alpha < -PIVOT_EPS && self.upper[b].is_finite() {
                    (((self.upper[b] - self.beta[i]).max(0.0)) / -alpha, true)
                } else {
                    continue;
                };
                let take = match leave {
                    None => ratio < theta,
                    Some((r, _)) => ratio < theta || (ratio == theta && b < self.basis[r]),
                };
                if take {
                    theta = ratio;
                    leave = Some((i, at_upper));
                }
            }
            if !theta.is_finite() {
                if self.since_refactor > 0 && self.refactor() {
                    self.set_reduced_costs(&self.phase_costs(phase_one));
                    continue;
                }
                return Ok(false);
            }
            if theta > 0.0 {
                self.degenerate_streak = 0;
            } else {
                self.degenerate_streak += 1;
                if self.degenerate_streak > DEGENERATE_STREAK_LIMIT {
                    self.bland = true;
                }
            }

            // Move along the edge.
            if theta > 0.0 {
                for i in 0..self.rows {
                    let a = self.t[i * self.cols + q];
                    if a != 0.0 {
                        self.beta[i] -= dir * theta * a;
                    }
                }
            }
            let start = if self.state[q] == ColState::Upper { self.upper[q] } else { 0.0 };
            let entering_value = start + dir * theta;
            match leave {
                None => {
                    // Bound flip.
                    self.state[q] = if dir > 0.0 { ColState::Upper } else { ColState::Lower };
                }
                Some((r, at_upper)) => {
                    let out = self.basis[r];
                    self.pivot(r, q);
                    self.state[out] = if at_upper { ColState::Upper } else { ColState::Lower };
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    fn eligible(&self, j: usize, phase_one: bool) -> Option<f64> {
        if !phase_one && self.artificial[j] {
            return None;
        }
        let d = self.reduced[j];
        match self.state[j] {
            ColState::Lower if d < -TAU_OPT && self.upper[j] > 0.0 => Some(1.0),
            ColState::Upper if d > TAU_OPT => Some(-1.0),
            _ => None,
        }
    }

    /// Lowest-index improving column.
    fn entering_bland(&self, phase_one: bool) -> Option<(usize, f64)> {
        (0..self.cols).find_map(|j| self.eligible(j, phase_one).map(|dir| (j, dir)))
    }

    /// Steepest reduced cost, lowest index on ties.
    fn entering_dantzig(&self, phase_one: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.cols {
            if let Some(dir) = self.eligible(j, phase_one) {
                let score = self.reduced[j].abs();
                if score > best_score {
                    best_score = score;
                    best = Some((j, dir));
                }
            }
        }
        best
    }

    /// Makes column `q` basic in row `r`. Values in `beta` other than row `r`
    /// are left untouched (the caller moved along the edge already).
    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + q];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            let inv = 1.0 / p;
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for chunk in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)) {
            let f = chunk[q];
            if f != 0.0 {
                for (v, &pr) in chunk.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pr;
                }
                chunk[q] = 0.0;
            }
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for (d, &pr) in self.reduced.iter_mut().zip(pivot_row.iter()) {
                *d -= f * pr;
            }
            self.reduced[q] = 0.0;
        }
        self.since_refactor += 1;
        let out = self.basis[r];
        self.basis[r] = q;
        self.state[q] = ColState::Basic;
        if self.state[out] == ColState::Basic {
            self.state[out] = ColState::Lower;
        }
    }

    fn column_values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.cols)
            .map(|j| match self.state[j] {
                ColState::Upper => self.upper[j],
                _ => 0.0,
            })
            .collect();
        for i in 0..self.rows {
            x[self.basis[i]] = self.beta[i];
        }
        x
    }

    fn extract(&self, lp: &LinearProgram) -> Result<Solution> {
        let x = self.column_values();
        let values: Vec<f64> = self
            .var_map
            .iter()
            .map(|&(map, col)| match map {
                VarMap::Shift(l) => l + x[col],
                VarMap::Mirror(u) => u - x[col],
                VarMap::Split => x[col] - x[col + 1],
            })
            .collect();

        // Row duals: y_i = (c_j - d_j) / a_ij for the starting column j of row i.
        let sense_sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let duals: Vec<f64> = (0..self.rows)
            .map(|i| {
                let (col, coef) = self.start_col[i];
                let y = (self.cost[col] - self.reduced[col]) / coef;
                y * self.row_sign[i] * sense_sign
            })
            .collect();

        for (i, con) in lp.constraints.iter().enumerate() {
            let lhs: f64 = con.coeffs.iter().zip(&values).map(|(a, v)| a * v).sum();
            let mag: f64 = con.coeffs.iter().zip(&values).map(|(a, v)| (a * v).abs()).sum();
            let tol = 1e-7 * (1.0 + con.rhs.abs() + mag);
            let viol = match con.cmp {
                Comparison::Le => lhs - con.rhs,
                Comparison::Ge => con.rhs - lhs,
                Comparison::Eq => (lhs - con.rhs).abs(),
            };
            if viol > tol {
                return Err(Error::NumericFailure(format!(
                    "row {i} violated by {viol:e} at the reported optimum"
                )));
            }
        }
        let objective_value = lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();
        Ok(Solution {
            objective_value,
            values,
            duals,
        })
    }
}
