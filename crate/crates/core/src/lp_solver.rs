//! Dense two-phase primal simplex for the small linear programs built by the
//! DEA estimators.
//!
//! The solver works on a condensed (dictionary) tableau: one row per
//! constraint and one column per nonbasic variable. DEA multiplier programs
//! have `N + 1` rows but only `M + S` structural columns, so keeping slack
//! columns implicit makes a pivot `O(N * (M + S))` instead of `O(N^2)`.
//!
//! Pivoting follows Bland's rule (lowest-index entering variable, lowest-index
//! leaving variable on ratio ties), which terminates on degenerate programs.

use std::fmt;

use thiserror::Error;

/// Minimum magnitude of an admissible pivot element.
pub const PIVOT_TOLERANCE: f64 = 1e-9;
/// Primal feasibility and dual optimality tolerance.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;
/// Tolerance used when reporting two computed quantities as equal.
pub const EQUALITY_TOLERANCE: f64 = 1e-6;

const RATIO_TIE_TOLERANCE: f64 = 1e-12;
const MIN_ITERATION_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("simplex iteration limit ({0}) exceeded")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintSense {
    LessEqual,
    Equal,
    GreaterEqual,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::LessEqual => "<=",
            ConstraintSense::Equal => "=",
            ConstraintSense::GreaterEqual => ">=",
        })
    }
}

/// A linear program in row form: optimize `c . x` subject to
/// `A x (<=|=|>=) b` and `l <= x <= u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective_sense: ObjectiveSense,
    pub objective_coefficients: Vec<f64>,
    pub constraint_matrix: Vec<Vec<f64>>,
    pub constraint_senses: Vec<ConstraintSense>,
    pub right_hand_sides: Vec<f64>,
    pub variable_lower_bounds: Vec<f64>,
    pub variable_upper_bounds: Vec<f64>,
}

impl LinearProgram {
    /// New program with no constraints and default bounds `0 <= x < inf`.
    pub fn new(objective_sense: ObjectiveSense, objective_coefficients: Vec<f64>) -> Self {
        let n = objective_coefficients.len();
        Self {
            objective_sense,
            objective_coefficients,
            constraint_matrix: Vec::new(),
            constraint_senses: Vec::new(),
            right_hand_sides: Vec::new(),
            variable_lower_bounds: vec![0.0; n],
            variable_upper_bounds: vec![f64::INFINITY; n],
        }
    }

    pub fn n_variables(&self) -> usize {
        self.objective_coefficients.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraint_matrix.len()
    }

    pub fn add_constraint(&mut self, row: Vec<f64>, sense: ConstraintSense, rhs: f64) -> &mut Self {
        self.constraint_matrix.push(row);
        self.constraint_senses.push(sense);
        self.right_hand_sides.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, variable: usize, lower: f64, upper: f64) -> &mut Self {
        self.variable_lower_bounds[variable] = lower;
        self.variable_upper_bounds[variable] = upper;
        self
    }

    /// Checks dimensions and finiteness.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_variables();
        let m = self.n_constraints();
        let malformed = |msg: String| Err(LpError::MalformedProgram(msg));
        if self.constraint_senses.len() != m || self.right_hand_sides.len() != m {
            return malformed(format!(
                "{} constraint rows but {} senses and {} right-hand sides",
                m,
                self.constraint_senses.len(),
                self.right_hand_sides.len()
            ));
        }
        if self.variable_lower_bounds.len() != n || self.variable_upper_bounds.len() != n {
            return malformed(format!(
                "{} variables but {} lower and {} upper bounds",
                n,
                self.variable_lower_bounds.len(),
                self.variable_upper_bounds.len()
            ));
        }
        if let Some(j) = self
            .objective_coefficients
            .iter()
            .position(|c| !c.is_finite())
        {
            return malformed(format!("objective coefficient {j} is not finite"));
        }
        for (i, row) in self.constraint_matrix.iter().enumerate() {
            if row.len() != n {
                return malformed(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            if let Some(j) = row.iter().position(|a| !a.is_finite()) {
                return malformed(format!("coefficient ({i}, {j}) is not finite"));
            }
            if !self.right_hand_sides[i].is_finite() {
                return malformed(format!("right-hand side {i} is not finite"));
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.variable_lower_bounds[j], self.variable_upper_bounds[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return malformed(format!("variable {j} has invalid bounds [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

/// Solver result. `primal_values` is empty and `dual_values` is `None`
/// unless the status is `Optimal`.
///
/// Dual values are shadow prices `d(objective) / d(rhs_i)` of the original
/// constraint rows, in the sense of the original objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    pub primal_values: Vec<f64>,
    pub dual_values: Option<Vec<f64>>,
}

impl LpSolution {
    fn without_point(status: LpStatus, objective_value: f64) -> Self {
        Self {
            status,
            objective_value,
            primal_values: Vec::new(),
            dual_values: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `lp` with the two-phase primal simplex method.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let standard = match StandardForm::build(lp) {
        Some(s) => s,
        None => return Ok(LpSolution::without_point(LpStatus::Infeasible, f64::NAN)),
    };
    let mut dict = Dictionary::new(&standard);

    let limit = MIN_ITERATION_LIMIT.max(50 * (dict.n_rows() + dict.n_cols()));

    // Phase 1: drive the artificial variables to zero.
    if dict.n_artificial > 0 {
        dict.load_phase_one_objective();
        match dict.optimize(limit)? {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => unreachable!("phase-1 objective is bounded above by zero"),
        }
        let scale = 1.0 + standard.rhs.iter().fold(0.0_f64, |acc, b| acc.max(b.abs()));
        if dict.objective_value < -FEASIBILITY_TOLERANCE * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, f64::NAN));
        }
        dict.expel_artificials();
    }

    // Phase 2.
    dict.load_phase_two_objective(&standard.objective);
    if let PhaseOutcome::Unbounded = dict.optimize(limit)? {
        let value = match lp.objective_sense {
            ObjectiveSense::Maximize => f64::INFINITY,
            ObjectiveSense::Minimize => f64::NEG_INFINITY,
        };
        return Ok(LpSolution::without_point(LpStatus::Unbounded, value));
    }

    let internal = dict.primal_point(standard.n_columns);
    let primal_values = standard.recover_primal(&internal);
    let objective_value = lp
        .objective_coefficients
        .iter()
        .zip(&primal_values)
        .map(|(c, x)| c * x)
        .sum();
    let dual_values = standard.recover_duals(&dict.row_duals());
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value,
        primal_values,
        dual_values: Some(dual_values),
    })
}

/// How an original variable maps onto nonnegative internal columns.
#[derive(Debug, Clone, Copy)]
enum VariableMap {
    /// `x = offset + col`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - col`
    Mirrored { col: usize, offset: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

/// `max c'x s.t. A x (sense) b, x >= 0, b >= 0`, plus bookkeeping to map
/// results back to the caller's program.
struct StandardForm {
    n_columns: usize,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<ConstraintSense>,
    rhs: Vec<f64>,
    /// -1.0 where the row was negated to make its right-hand side nonnegative.
    row_sign: Vec<f64>,
    n_original_rows: usize,
    variables: Vec<VariableMap>,
    objective_sign: f64,
}

impl StandardForm {
    /// `None` when some variable has an empty bound interval.
    fn build(lp: &LinearProgram) -> Option<Self> {
        let objective_sign = match lp.objective_sense {
            ObjectiveSense::Maximize => 1.0,
            ObjectiveSense::Minimize => -1.0,
        };
        let mut variables = Vec::with_capacity(lp.n_variables());
        let mut n_columns = 0;
        // (column, upper bound on the column) rows added for finite boxes
        let mut box_rows = Vec::new();
        for j in 0..lp.n_variables() {
            let (lo, hi) = (lp.variable_lower_bounds[j], lp.variable_upper_bounds[j]);
            if lo > hi {
                return None;
            }
            let map = if lo.is_finite() {
                if hi.is_finite() {
                    box_rows.push((n_columns, hi - lo));
                }
                VariableMap::Shifted {
                    col: n_columns,
                    offset: lo,
                }
            } else if hi.is_finite() {
                VariableMap::Mirrored {
                    col: n_columns,
                    offset: hi,
                }
            } else {
                n_columns += 1;
                VariableMap::Split {
                    pos: n_columns - 1,
                    neg: n_columns,
                }
            };
            n_columns += 1;
            variables.push(map);
        }

        let mut objective = vec![0.0; n_columns];
        for (j, map) in variables.iter().enumerate() {
            let c = objective_sign * lp.objective_coefficients[j];
            match *map {
                VariableMap::Shifted { col, .. } => objective[col] += c,
                VariableMap::Mirrored { col, .. } => objective[col] -= c,
                VariableMap::Split { pos, neg } => {
                    objective[pos] += c;
                    objective[neg] -= c;
                }
            }
        }

        let total_rows = lp.n_constraints() + box_rows.len();
        let mut rows = Vec::with_capacity(total_rows);
        let mut senses = Vec::with_capacity(total_rows);
        let mut rhs = Vec::with_capacity(total_rows);
        for (i, original) in lp.constraint_matrix.iter().enumerate() {
            let mut row = vec![0.0; n_columns];
            let mut b = lp.right_hand_sides[i];
            for (j, &a) in original.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match variables[j] {
                    VariableMap::Shifted { col, offset } => {
                        row[col] += a;
                        b -= a * offset;
                    }
                    VariableMap::Mirrored { col, offset } => {
                        row[col] -= a;
                        b -= a * offset;
                    }
                    VariableMap::Split { pos, neg } => {
                        row[pos] += a;
                        row[neg] -= a;
                    }
                }
            }
            rows.push(row);
            senses.push(lp.constraint_senses[i]);
            rhs.push(b);
        }
        for &(col, width) in &box_rows {
            let mut row = vec![0.0; n_columns];
            row[col] = 1.0;
            rows.push(row);
            senses.push(ConstraintSense::LessEqual);
            rhs.push(width);
        }

        let mut row_sign = vec![1.0; total_rows];
        for i in 0..total_rows {
            if rhs[i] < 0.0 {
                row_sign[i] = -1.0;
                rhs[i] = -rhs[i];
                rows[i].iter_mut().for_each(|a| *a = -*a);
                senses[i] = match senses[i] {
                    ConstraintSense::LessEqual => ConstraintSense::GreaterEqual,
                    ConstraintSense::GreaterEqual => ConstraintSense::LessEqual,
                    ConstraintSense::Equal => ConstraintSense::Equal,
                };
            }
        }

        Some(Self {
            n_columns,
            objective,
            rows,
            senses,
            rhs,
            row_sign,
            n_original_rows: lp.n_constraints(),
            variables,
            objective_sign,
        })
    }

    fn recover_primal(&self, internal: &[f64]) -> Vec<f64> {
        self.variables
            .iter()
            .map(|map| match *map {
                VariableMap::Shifted { col, offset } => offset + internal[col],
                VariableMap::Mirrored { col, offset } => offset - internal[col],
                VariableMap::Split { pos, neg } => internal[pos] - internal[neg],
            })
            .collect()
    }

    fn recover_duals(&self, internal: &[f64]) -> Vec<f64> {
        (0..self.n_original_rows)
            .map(|i| self.objective_sign * self.row_sign[i] * internal[i])
            .collect()
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Condensed tableau. Row `i` reads
/// `x[basis[i]] + sum_j table[i][j] * x[nonbasic[j]] = rhs[i]`
/// and the objective row reads `z + sum_j reduced[j] * x[nonbasic[j]] = objective_value`,
/// so a negative `reduced[j]` marks an improving column.
///
/// Variable numbering: structural columns, then one logical variable per row
/// (slack for `<=`, surplus for `>=`; equality rows have none, their index is
/// unused), then one artificial per `>=` / `=` row.
struct Dictionary {
    table: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    reduced: Vec<f64>,
    objective_value: f64,
    /// Variable that forms the initial identity column of each row.
    identity: Vec<usize>,
    artificial_start: usize,
    n_artificial: usize,
    n_total: usize,
}

impl Dictionary {
    fn new(sf: &StandardForm) -> Self {
        let m = sf.rows.len();
        let n = sf.n_columns;
        let artificial_start = n + m;
        let mut n_artificial = 0;
        let mut basis = Vec::with_capacity(m);
        let mut nonbasic: Vec<usize> = (0..n).collect();
        let mut surplus_rows = Vec::new();
        for (i, sense) in sf.senses.iter().enumerate() {
            match sense {
                ConstraintSense::LessEqual => basis.push(n + i),
                ConstraintSense::GreaterEqual => {
                    nonbasic.push(n + i);
                    surplus_rows.push(i);
                    basis.push(artificial_start + n_artificial);
                    n_artificial += 1;
                }
                ConstraintSense::Equal => {
                    basis.push(artificial_start + n_artificial);
                    n_artificial += 1;
                }
            }
        }
        let identity = basis.clone();
        let cols = nonbasic.len();
        let mut table = vec![0.0; m * cols];
        for i in 0..m {
            table[i * cols..i * cols + n].copy_from_slice(&sf.rows[i]);
        }
        for (k, &i) in surplus_rows.iter().enumerate() {
            table[i * cols + n + k] = -1.0;
        }
        Self {
            table,
            rhs: sf.rhs.clone(),
            basis,
            nonbasic,
            reduced: vec![0.0; cols],
            objective_value: 0.0,
            identity,
            artificial_start,
            n_artificial,
            n_total: artificial_start + n_artificial,
        }
    }

    fn n_rows(&self) -> usize {
        self.basis.len()
    }

    fn n_cols(&self) -> usize {
        self.nonbasic.len()
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.artificial_start
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.table[row * self.n_cols() + col]
    }

    /// Maximize `-sum(artificials)`.
    fn load_phase_one_objective(&mut self) {
        let cols = self.n_cols();
        self.reduced = vec![0.0; cols];
        self.objective_value = 0.0;
        for i in 0..self.n_rows() {
            if self.is_artificial(self.basis[i]) {
                for j in 0..cols {
                    self.reduced[j] -= self.table[i * cols + j];
                }
                self.objective_value -= self.rhs[i];
            }
        }
    }

    fn load_phase_two_objective(&mut self, objective: &[f64]) {
        let cost = |var: usize| objective.get(var).copied().unwrap_or(0.0);
        let cols = self.n_cols();
        self.reduced = self.nonbasic.iter().map(|&var| -cost(var)).collect();
        self.objective_value = 0.0;
        for i in 0..self.n_rows() {
            let cb = cost(self.basis[i]);
            if cb == 0.0 {
                continue;
            }
            for j in 0..cols {
                self.reduced[j] += cb * self.table[i * cols + j];
            }
            self.objective_value += cb * self.rhs[i];
        }
    }

    fn optimize(&mut self, limit: usize) -> Result<PhaseOutcome, LpError> {
        for _ in 0..limit {
            let Some(col) = self.entering_column() else {
                return Ok(PhaseOutcome::Optimal);
            };
            let Some(row) = self.leaving_row(col) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit(limit))
    }

    /// Bland: lowest-index improving variable; artificials never re-enter.
    fn entering_column(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (j, &var) in self.nonbasic.iter().enumerate() {
            if self.is_artificial(var) || self.reduced[j] >= -FEASIBILITY_TOLERANCE {
                continue;
            }
            if best.is_none_or(|b| var < self.nonbasic[b]) {
                best = Some(j);
            }
        }
        best
    }

    /// Minimum ratio test, ties to the lowest basic variable index.
    fn leaving_row(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.n_rows() {
            let a = self.at(i, col);
            if a <= PIVOT_TOLERANCE {
                continue;
            }
            let ratio = self.rhs[i].max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((r, min)) => {
                    let tie = (ratio - min).abs() <= RATIO_TIE_TOLERANCE * (1.0 + min.abs());
                    if (tie && self.basis[i] < self.basis[r]) || (!tie && ratio < min) {
                        Some((i, ratio))
                    } else {
                        Some((r, min))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let cols = self.n_cols();
        let p = self.table[row * cols + col];
        let inv = 1.0 / p;
        {
            let pivot_row = &mut self.table[row * cols..(row + 1) * cols];
            pivot_row.iter_mut().for_each(|a| *a *= inv);
            pivot_row[col] = inv;
        }
        self.rhs[row] *= inv;
        let pivot_row: Vec<f64> = self.table[row * cols..(row + 1) * cols].to_vec();
        let pivot_rhs = self.rhs[row];

        for i in 0..self.n_rows() {
            if i == row {
                continue;
            }
            let factor = self.table[i * cols + col];
            if factor == 0.0 {
                continue;
            }
            let target = &mut self.table[i * cols..(i + 1) * cols];
            for (t, &pr) in target.iter_mut().zip(&pivot_row) {
                *t -= factor * pr;
            }
            target[col] = -factor * inv;
            self.rhs[i] -= factor * pivot_rhs;
        }

        let factor = self.reduced[col];
        if factor != 0.0 {
            for (t, &pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *t -= factor * pr;
            }
            self.reduced[col] = -factor * inv;
            self.objective_value -= factor * pivot_rhs;
        }

        std::mem::swap(&mut self.basis[row], &mut self.nonbasic[col]);
    }

    /// After phase 1, pivot zero-level artificials out of the basis where a
    /// non-artificial column has a usable entry. Rows where none exists are
    /// redundant and keep their artificial at zero.
    fn expel_artificials(&mut self) {
        for row in 0..self.n_rows() {
            if !self.is_artificial(self.basis[row]) {
                continue;
            }
            let mut candidate: Option<usize> = None;
            for (j, &var) in self.nonbasic.iter().enumerate() {
                if self.is_artificial(var) || self.at(row, j).abs() <= PIVOT_TOLERANCE {
                    continue;
                }
                if candidate.is_none_or(|c| var < self.nonbasic[c]) {
                    candidate = Some(j);
                }
            }
            if let Some(col) = candidate {
                self.pivot(row, col);
            }
        }
    }

    fn primal_point(&self, n_structural: usize) -> Vec<f64> {
        let mut values = vec![0.0; self.n_total];
        for (i, &var) in self.basis.iter().enumerate() {
            values[var] = self.rhs[i];
        }
        values.truncate(n_structural);
        values
    }

    /// Internal-max shadow prices of the standard-form rows. The identity
    /// column of row `i` has zero cost, so its reduced cost is `-y_i`.
    fn row_duals(&self) -> Vec<f64> {
        self.identity
            .iter()
            .map(|&var| match self.nonbasic.iter().position(|&v| v == var) {
                Some(j) => self.reduced[j],
                None => 0.0,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ConstraintSense::*;
    use ObjectiveSense::*;

    #[test]
    fn single_bound_constraint() {
        let mut lp = LinearProgram::new(Maximize, vec![1.0]);
        lp.add_constraint(vec![1.0], LessEqual, 3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective_value, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal_values[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.dual_values.unwrap()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::new(Maximize, vec![1.0]);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert!(sol.dual_values.is_none());
        assert!(sol.primal_values.is_empty());
    }

    #[test]
    fn one_dmu_multiplier_program() {
        // max u  s.t. v = 1, u - v <= 0
        let mut lp = LinearProgram::new(Maximize, vec![1.0, 0.0]);
        lp.add_constraint(vec![0.0, 1.0], Equal, 1.0);
        lp.add_constraint(vec![1.0, -1.0], LessEqual, 0.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective_value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal_values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal_values[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::new(Minimize, vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, 1.0], LessEqual, 1.0);
        lp.add_constraint(vec![1.0, 1.0], GreaterEqual, 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.dual_values.is_none());
    }

    #[test]
    fn empty_bound_interval_is_infeasible() {
        let mut lp = LinearProgram::new(Minimize, vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn minimize_with_ge_rows() {
        // min 2x + 3y  s.t. x + y >= 4, x + 3y >= 6  -> (3, 1), value 9
        let mut lp = LinearProgram::new(Minimize, vec![2.0, 3.0]);
        lp.add_constraint(vec![1.0, 1.0], GreaterEqual, 4.0);
        lp.add_constraint(vec![1.0, 3.0], GreaterEqual, 6.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective_value, 9.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.primal_values[0], 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.primal_values[1], 1.0, epsilon = 1e-9);
        let y = sol.dual_values.unwrap();
        // b . y = 9
        assert_abs_diff_eq!(4.0 * y[0] + 6.0 * y[1], 9.0, epsilon = 1e-9);
        assert!(y.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn free_and_boxed_variables() {
        // min x  s.t. x >= -5 (as a row), x free  -> -5
        let mut lp = LinearProgram::new(Minimize, vec![1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![1.0], GreaterEqual, -5.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective_value, -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.dual_values.unwrap()[0], 1.0, epsilon = 1e-12);

        // max x + y  s.t. x + y <= 10, 1 <= x <= 2, y <= 3 with y >= -inf
        let mut lp = LinearProgram::new(Maximize, vec![1.0, 1.0]);
        lp.set_bounds(0, 1.0, 2.0)
            .set_bounds(1, f64::NEG_INFINITY, 3.0);
        lp.add_constraint(vec![1.0, 1.0], LessEqual, 10.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective_value, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal_values[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.primal_values[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        // the second equality duplicates the first
        let mut lp = LinearProgram::new(Maximize, vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Equal, 1.0);
        lp.add_constraint(vec![2.0, 2.0], Equal, 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective_value, 2.0, epsilon = 1e-12);
        let y = sol.dual_values.unwrap();
        assert_abs_diff_eq!(y[0] + 2.0 * y[1], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(Maximize, vec![0.75, -150.0, 0.02, -6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], LessEqual, 0.0);
        lp.add_constraint(vec![0.5, -90.0, -0.02, 3.0], LessEqual, 0.0);
        lp.add_constraint(vec![0.0, 0.0, 1.0, 0.0], LessEqual, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective_value, 0.05, epsilon = 1e-9);
    }

    #[test]
    fn malformed_programs_are_rejected() {
        let mut lp = LinearProgram::new(Maximize, vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], LessEqual, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));

        let mut lp = LinearProgram::new(Maximize, vec![f64::NAN]);
        lp.add_constraint(vec![1.0], LessEqual, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));

        let mut lp = LinearProgram::new(Maximize, vec![1.0]);
        lp.add_constraint(vec![1.0], LessEqual, f64::INFINITY);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));

        let mut lp = LinearProgram::new(Maximize, vec![1.0]);
        lp.right_hand_sides.push(1.0);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));
    }
}
