//! Observed data and the classical input-oriented estimators.
//!
//! Technologies by axiom set:
//!
//! | technology | axioms                                   | intensity weights        |
//! |------------|------------------------------------------|--------------------------|
//! | FDH        | free disposability                       | `λ ∈ {0,1}`, `Σλ = 1`    |
//! | BCC (VRS)  | free disposability, convexity            | `λ ≥ 0`, `Σλ = 1`        |
//! | CCR (CRS)  | free disposability, convexity, CRS       | `λ ≥ 0`                  |

use serde::{Deserialize, Serialize};

use crate::error::DeaError;
use crate::fp_dea::{FpStructure, SupportBranch};
use crate::lp_solver::{solve, ConstraintSense, LinearProgram, LpStatus, ObjectiveSense};

/// `N` DMUs with `M` inputs and `S` outputs. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmuPanel {
    labels: Vec<String>,
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
    n_inputs: usize,
    n_outputs: usize,
}

impl DmuPanel {
    /// Validates shape, finiteness and nonnegativity.
    ///
    /// Rows without a strictly positive input or output are accepted here and
    /// rejected with [`DeaError::DegenerateDmu`] when they are evaluated.
    pub fn new(
        labels: Vec<String>,
        inputs: Vec<Vec<f64>>,
        outputs: Vec<Vec<f64>>,
    ) -> Result<Self, DeaError> {
        let invalid = |msg: String| Err(DeaError::InvalidPanel(msg));
        let n = inputs.len();
        if n == 0 {
            return invalid("panel has no DMUs".into());
        }
        if outputs.len() != n || labels.len() != n {
            return invalid(format!(
                "{n} input rows, {} output rows and {} labels",
                outputs.len(),
                labels.len()
            ));
        }
        let n_inputs = inputs[0].len();
        let n_outputs = outputs[0].len();
        if n_inputs == 0 || n_outputs == 0 {
            return invalid("panel needs at least one input and one output".into());
        }
        for (idx, (x, y)) in inputs.iter().zip(&outputs).enumerate() {
            if x.len() != n_inputs || y.len() != n_outputs {
                return invalid(format!("DMU {idx} has a ragged row"));
            }
            if let Some(v) = x.iter().chain(y).find(|v| !v.is_finite() || **v < 0.0) {
                return invalid(format!(
                    "DMU {idx} has entry {v}; data must be finite and >= 0"
                ));
            }
        }
        Ok(Self {
            labels,
            inputs,
            outputs,
            n_inputs,
            n_outputs,
        })
    }

    /// Panel with labels `DMU1..DMUN`.
    pub fn from_rows(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self, DeaError> {
        let labels = (1..=inputs.len()).map(|i| format!("DMU{i}")).collect();
        Self::new(labels, inputs, outputs)
    }

    pub fn n_dmus(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn input(&self, dmu: usize) -> &[f64] {
        &self.inputs[dmu]
    }

    pub fn output(&self, dmu: usize) -> &[f64] {
        &self.outputs[dmu]
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    pub fn label(&self, dmu: usize) -> &str {
        &self.labels[dmu]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), DeaError> {
        if index < self.n_dmus() {
            Ok(())
        } else {
            Err(DeaError::IndexOutOfRange {
                index,
                n_dmus: self.n_dmus(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReturnsToScale {
    /// CCR
    Crs,
    /// BCC
    Vrs,
    /// Free disposal hull, binary intensity weights
    Fdh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Technology {
    pub returns_to_scale: ReturnsToScale,
    pub orientation: Orientation,
}

impl Technology {
    pub const CRS: Technology = Technology {
        returns_to_scale: ReturnsToScale::Crs,
        orientation: Orientation::Input,
    };
    pub const VRS: Technology = Technology {
        returns_to_scale: ReturnsToScale::Vrs,
        orientation: Orientation::Input,
    };
    pub const FDH: Technology = Technology {
        returns_to_scale: ReturnsToScale::Fdh,
        orientation: Orientation::Input,
    };
}

/// Radial Farrell input efficiency of one DMU and the certificate that
/// produced it.
///
/// Multiplier runs report the optimal `(u, v)` and take `λ` from the duals of
/// the DMU constraints; envelopment runs report `λ` and take `(u, v)` from the
/// duals of the input and output rows. Weight vectors are one optimal vertex
/// among possibly many.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyResult {
    pub theta: f64,
    pub input_weights: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub intensity_weights: Vec<f64>,
    pub support_branch: Option<SupportBranch>,
}

fn has_positive(values: &[f64]) -> bool {
    values.iter().any(|&v| v > 0.0)
}

pub(crate) fn check_dmu(panel: &DmuPanel, index: usize) -> Result<(), DeaError> {
    panel.check_index(index)?;
    if has_positive(panel.input(index)) && has_positive(panel.output(index)) {
        Ok(())
    } else {
        Err(DeaError::DegenerateDmu { index })
    }
}

/// Pairs of weights forced equal, as (first, second) positions in the
/// respective active column lists.
#[derive(Default)]
pub(crate) struct WeightTies {
    pub inputs: Vec<(usize, usize)>,
    pub outputs: Vec<(usize, usize)>,
}

/// Multiplier-form CCR program for DMU `dmu` over the given input and output
/// columns. Variables: `u` for `output_cols`, then `v` for `input_cols`.
///
/// ```text
/// max  Σ_s u_s y_s0
/// s.t. Σ_m v_m x_m0 = 1
///      Σ_s u_s y_sj - Σ_m v_m x_mj <= 0   for every DMU j
///      u, v >= 0
/// ```
pub(crate) fn multiplier_program(
    panel: &DmuPanel,
    dmu: usize,
    input_cols: &[usize],
    output_cols: &[usize],
    ties: &WeightTies,
) -> LinearProgram {
    let n_u = output_cols.len();
    let n_vars = n_u + input_cols.len();
    let y0 = panel.output(dmu);
    let x0 = panel.input(dmu);

    let mut objective = vec![0.0; n_vars];
    for (k, &s) in output_cols.iter().enumerate() {
        objective[k] = y0[s];
    }
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize, objective);

    let mut normalization = vec![0.0; n_vars];
    for (k, &m) in input_cols.iter().enumerate() {
        normalization[n_u + k] = x0[m];
    }
    lp.add_constraint(normalization, ConstraintSense::Equal, 1.0);

    for j in 0..panel.n_dmus() {
        let (xj, yj) = (panel.input(j), panel.output(j));
        let mut row = vec![0.0; n_vars];
        for (k, &s) in output_cols.iter().enumerate() {
            row[k] = yj[s];
        }
        for (k, &m) in input_cols.iter().enumerate() {
            row[n_u + k] = -xj[m];
        }
        lp.add_constraint(row, ConstraintSense::LessEqual, 0.0);
    }

    for &(a, b) in &ties.outputs {
        let mut row = vec![0.0; n_vars];
        row[a] = 1.0;
        row[b] = -1.0;
        lp.add_constraint(row, ConstraintSense::Equal, 0.0);
    }
    for &(a, b) in &ties.inputs {
        let mut row = vec![0.0; n_vars];
        row[n_u + a] = 1.0;
        row[n_u + b] = -1.0;
        lp.add_constraint(row, ConstraintSense::Equal, 0.0);
    }
    lp
}

/// Solves [`multiplier_program`] and scatters the weights back to full-length
/// vectors (zero on inactive columns).
pub(crate) fn solve_multiplier(
    panel: &DmuPanel,
    dmu: usize,
    input_cols: &[usize],
    output_cols: &[usize],
    ties: &WeightTies,
) -> Result<EfficiencyResult, DeaError> {
    let lp = multiplier_program(panel, dmu, input_cols, output_cols, ties);
    let sol = solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::UnexpectedStatus(sol.status));
    }
    let n_u = output_cols.len();
    let mut output_weights = vec![0.0; panel.n_outputs()];
    for (k, &s) in output_cols.iter().enumerate() {
        output_weights[s] = sol.primal_values[k];
    }
    let mut input_weights = vec![0.0; panel.n_inputs()];
    for (k, &m) in input_cols.iter().enumerate() {
        input_weights[m] = sol.primal_values[n_u + k];
    }
    let duals = sol.dual_values.unwrap_or_default();
    let intensity_weights = duals[1..=panel.n_dmus()]
        .iter()
        .map(|d| d.max(0.0))
        .collect();
    Ok(EfficiencyResult {
        theta: sol.objective_value,
        input_weights,
        output_weights,
        intensity_weights,
        support_branch: None,
    })
}

/// CCR efficiency of DMU `dmu_index` from the multiplier form.
pub fn score_ccr_multiplier(
    panel: &DmuPanel,
    dmu_index: usize,
) -> Result<EfficiencyResult, DeaError> {
    check_dmu(panel, dmu_index)?;
    let inputs: Vec<usize> = (0..panel.n_inputs()).collect();
    let outputs: Vec<usize> = (0..panel.n_outputs()).collect();
    solve_multiplier(panel, dmu_index, &inputs, &outputs, &WeightTies::default())
}

/// Envelopment-form efficiency of a panel DMU (which is part of its own
/// reference set).
pub fn score_envelopment(
    panel: &DmuPanel,
    dmu_index: usize,
    tech: Technology,
) -> Result<EfficiencyResult, DeaError> {
    check_dmu(panel, dmu_index)?;
    score_envelopment_point(panel, panel.input(dmu_index), panel.output(dmu_index), tech)
}

/// Envelopment-form efficiency of an arbitrary point `(x0, y0)` against the
/// technology spanned by `panel`.
///
/// For CRS/VRS this solves `min θ s.t. Σλx <= θ x0, Σλy >= y0, λ >= 0`
/// (plus `Σλ = 1` for VRS). FDH is evaluated by enumeration.
pub fn score_envelopment_point(
    panel: &DmuPanel,
    x0: &[f64],
    y0: &[f64],
    tech: Technology,
) -> Result<EfficiencyResult, DeaError> {
    if x0.len() != panel.n_inputs() || y0.len() != panel.n_outputs() {
        return Err(DeaError::InvalidPanel(format!(
            "point has {} inputs and {} outputs, panel has {} and {}",
            x0.len(),
            y0.len(),
            panel.n_inputs(),
            panel.n_outputs()
        )));
    }
    if !has_positive(x0) || !has_positive(y0) {
        return Err(DeaError::DegeneratePoint);
    }
    match tech.returns_to_scale {
        ReturnsToScale::Fdh => score_fdh(panel, x0, y0),
        ReturnsToScale::Crs | ReturnsToScale::Vrs => score_convex(panel, x0, y0, tech),
    }
}

fn score_convex(
    panel: &DmuPanel,
    x0: &[f64],
    y0: &[f64],
    tech: Technology,
) -> Result<EfficiencyResult, DeaError> {
    let n = panel.n_dmus();
    // variables: θ, λ_1..λ_N
    let mut objective = vec![0.0; n + 1];
    objective[0] = 1.0;
    let mut lp = LinearProgram::new(ObjectiveSense::Minimize, objective);
    for m in 0..panel.n_inputs() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(-x0[m]);
        row.extend(panel.inputs().iter().map(|x| x[m]));
        lp.add_constraint(row, ConstraintSense::LessEqual, 0.0);
    }
    for s in 0..panel.n_outputs() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(0.0);
        row.extend(panel.outputs().iter().map(|y| y[s]));
        lp.add_constraint(row, ConstraintSense::GreaterEqual, y0[s]);
    }
    if tech.returns_to_scale == ReturnsToScale::Vrs {
        let mut row = vec![1.0; n + 1];
        row[0] = 0.0;
        lp.add_constraint(row, ConstraintSense::Equal, 1.0);
    }

    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(DeaError::NoDominator),
        LpStatus::Unbounded => return Err(DeaError::UnexpectedStatus(sol.status)),
    }
    let duals = sol.dual_values.unwrap_or_default();
    let m = panel.n_inputs();
    Ok(EfficiencyResult {
        theta: sol.objective_value,
        input_weights: duals[..m].iter().map(|d| (-d).max(0.0)).collect(),
        output_weights: duals[m..m + panel.n_outputs()]
            .iter()
            .map(|d| d.max(0.0))
            .collect(),
        intensity_weights: sol.primal_values[1..].to_vec(),
        support_branch: None,
    })
}

/// `θ = min over output-dominating DMUs j of max_m x_mj / x_m0`.
fn score_fdh(panel: &DmuPanel, x0: &[f64], y0: &[f64]) -> Result<EfficiencyResult, DeaError> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..panel.n_dmus() {
        if panel.output(j).iter().zip(y0).any(|(yj, y)| yj < y) {
            continue;
        }
        let mut theta = 0.0_f64;
        let mut reachable = true;
        for (&xj, &x) in panel.input(j).iter().zip(x0) {
            if x > 0.0 {
                theta = theta.max(xj / x);
            } else if xj > 0.0 {
                // no radial contraction of a zero input covers a positive one
                reachable = false;
                break;
            }
        }
        if reachable && best.is_none_or(|(_, b)| theta < b) {
            best = Some((j, theta));
        }
    }
    let (winner, theta) = best.ok_or(DeaError::NoDominator)?;
    let mut intensity_weights = vec![0.0; panel.n_dmus()];
    intensity_weights[winner] = 1.0;
    Ok(EfficiencyResult {
        theta,
        input_weights: vec![0.0; panel.n_inputs()],
        output_weights: vec![0.0; panel.n_outputs()],
        intensity_weights,
        support_branch: None,
    })
}

/// CCR multiplier model with equal weights imposed on every declared input
/// pair (`v_m = v_m'`) and output pair (`u_s = u_s'`).
///
/// Tying weights makes the tied columns perfect substitutes: the program is
/// the CCR model on a panel where each tied group is summed into one column.
pub fn score_barnum(
    panel: &DmuPanel,
    dmu_index: usize,
    fp: &FpStructure,
) -> Result<EfficiencyResult, DeaError> {
    fp.validate(panel.n_inputs(), panel.n_outputs())?;
    check_dmu(panel, dmu_index)?;
    let inputs: Vec<usize> = (0..panel.n_inputs()).collect();
    let outputs: Vec<usize> = (0..panel.n_outputs()).collect();
    let ties = WeightTies {
        inputs: fp.input_disjunctions().iter().copied().collect(),
        outputs: fp.output_disjunctions().iter().copied().collect(),
    };
    solve_multiplier(panel, dmu_index, &inputs, &outputs, &ties)
}
