//! Test-only oracles and generators shared by the integration suites.
#![allow(dead_code)]

use fpdea::isoquant::{normalized_points, EstimatorTag, IsoquantPolyline};
use fpdea::lp_solver::{ConstraintSense, ObjectiveSense};
use fpdea::{
    score_envelopment_point, solve, DmuPanel, FpStructure, LinearProgram, LpStatus, Technology,
};
use rand::Rng;

/// Panel with entries drawn from `U[lo, hi]`.
pub fn random_panel<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    s: usize,
    lo: f64,
    hi: f64,
) -> DmuPanel {
    let inputs = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(lo..=hi)).collect())
        .collect();
    let outputs = (0..n)
        .map(|_| (0..s).map(|_| rng.random_range(lo..=hi)).collect())
        .collect();
    DmuPanel::from_rows(inputs, outputs).unwrap()
}

/// Random pair declarations over `m` inputs and `s` outputs.
pub fn random_fp<R: Rng>(rng: &mut R, m: usize, s: usize) -> FpStructure {
    let pairs = |rng: &mut R, n: usize| -> Vec<(usize, usize)> {
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|_| rng.random_bool(0.5))
            .collect::<Vec<_>>()
    };
    let ins = pairs(rng, m);
    let outs = pairs(rng, s);
    FpStructure::new(ins, outs).unwrap()
}

fn components(n: usize, pairs: &std::collections::BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    // naive relabeling until stable
    loop {
        let mut changed = false;
        for &(a, b) in pairs {
            let l = label[a].min(label[b]);
            if label[a] != l || label[b] != l {
                label[a] = l;
                label[b] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| label[k] == root).collect();
        if !members.is_empty() {
            groups.push(members);
        }
    }
    groups
}

/// Panel where each group of tied inputs (outputs) is summed into a single
/// column: the perfect-substitutability reading of equal weights.
pub fn aggregate_tied_columns(panel: &DmuPanel, fp: &FpStructure) -> DmuPanel {
    let in_groups = components(panel.n_inputs(), fp.input_disjunctions());
    let out_groups = components(panel.n_outputs(), fp.output_disjunctions());
    let sum = |row: &[f64], groups: &[Vec<usize>]| -> Vec<f64> {
        groups
            .iter()
            .map(|g| g.iter().map(|&k| row[k]).sum())
            .collect()
    };
    DmuPanel::from_rows(
        (0..panel.n_dmus())
            .map(|j| sum(panel.input(j), &in_groups))
            .collect(),
        (0..panel.n_dmus())
            .map(|j| sum(panel.output(j), &out_groups))
            .collect(),
    )
    .unwrap()
}

/// Multiplier program over all columns with the zeroed weights pinned by
/// bounds `[0, 0]`. Variables: `u` then `v`.
fn pinned_multiplier_lp(
    panel: &DmuPanel,
    dmu: usize,
    zero_in: u32,
    zero_out: u32,
) -> LinearProgram {
    let (m, s) = (panel.n_inputs(), panel.n_outputs());
    let mut obj = vec![0.0; s + m];
    obj[..s].copy_from_slice(panel.output(dmu));
    let mut lp = LinearProgram::new(ObjectiveSense::Maximize, obj);
    let mut norm = vec![0.0; s + m];
    norm[s..].copy_from_slice(panel.input(dmu));
    lp.add_constraint(norm, ConstraintSense::Equal, 1.0);
    for j in 0..panel.n_dmus() {
        let mut row = panel.output(j).to_vec();
        row.extend(panel.input(j).iter().map(|x| -x));
        lp.add_constraint(row, ConstraintSense::LessEqual, 0.0);
    }
    for k in 0..s {
        if zero_out & (1 << k) != 0 {
            lp.set_bounds(k, 0.0, 0.0);
        }
    }
    for k in 0..m {
        if zero_in & (1 << k) != 0 {
            lp.set_bounds(s + k, 0.0, 0.0);
        }
    }
    lp
}

/// Maximum over every zero pattern satisfying the disjunctions (no
/// minimality pruning) of the pinned multiplier program.
pub fn exhaustive_fp_theta(panel: &DmuPanel, dmu: usize, fp: &FpStructure) -> f64 {
    let (m, s) = (panel.n_inputs(), panel.n_outputs());
    let hits = |mask: u32, pairs: &std::collections::BTreeSet<(usize, usize)>| {
        pairs
            .iter()
            .all(|&(a, b)| mask & (1 << a) != 0 || mask & (1 << b) != 0)
    };
    let mut best = f64::NEG_INFINITY;
    for zi in 0..(1u32 << m) {
        if zi == (1 << m) - 1 || !hits(zi, fp.input_disjunctions()) {
            continue;
        }
        for zo in 0..(1u32 << s) {
            if zo == (1 << s) - 1 || !hits(zo, fp.output_disjunctions()) {
                continue;
            }
            let sol = solve(&pinned_multiplier_lp(panel, dmu, zi, zo)).unwrap();
            if sol.status == LpStatus::Optimal {
                best = best.max(sol.objective_value);
            }
        }
    }
    best
}

/// Single-output CCR with one input kept: `(y0/x_m0) / max_j (y_j/x_mj)`.
pub fn single_input_ratio_score(panel: &DmuPanel, dmu: usize, input: usize) -> f64 {
    let best = (0..panel.n_dmus())
        .map(|j| panel.output(j)[0] / panel.input(j)[input])
        .fold(f64::NEG_INFINITY, f64::max);
    panel.output(dmu)[0] / panel.input(dmu)[input] / best
}

pub const GRID: usize = 200;

/// Radial input efficiency of the unit-output bundle `g` under the
/// estimator's technology, from envelopment programs (CCR, FP per kept input,
/// BG on the summed input) or closed form (TRUE). `g` is in the unit-output
/// requirement set iff the score is `<= 1`.
pub fn unit_bundle_score(panel: &DmuPanel, tag: EstimatorTag, g: (f64, f64)) -> f64 {
    let column = |f: &dyn Fn(&[f64]) -> f64| -> DmuPanel {
        DmuPanel::from_rows(
            (0..panel.n_dmus())
                .map(|j| vec![f(panel.input(j))])
                .collect(),
            panel.outputs().to_vec(),
        )
        .unwrap()
    };
    let crs = |p: &DmuPanel, x: f64| {
        score_envelopment_point(p, &[x], &[1.0], Technology::CRS)
            .unwrap()
            .theta
    };
    match tag {
        EstimatorTag::True => 1.0 / g.0.min(g.1),
        EstimatorTag::Ccr => {
            score_envelopment_point(panel, &[g.0, g.1], &[1.0], Technology::CRS)
                .unwrap()
                .theta
        }
        EstimatorTag::Fp => crs(&column(&|x| x[0]), g.0).max(crs(&column(&|x| x[1]), g.1)),
        EstimatorTag::Bg => crs(&column(&|x| x[0] + x[1]), g.0 + g.1),
    }
}

/// Grid cells (out of `GRID^2`) where polyline membership disagrees with the
/// LP membership oracle, ignoring cells within `1e-6` of the boundary.
pub fn grid_mismatches(panel: &DmuPanel, line: &IsoquantPolyline) -> Vec<(f64, f64)> {
    let points = normalized_points(panel).unwrap();
    let max = points
        .iter()
        .chain(line.vertices.iter())
        .fold(1.0f64, |m, p| m.max(p.0).max(p.1));
    let extent = 1.1 * max;
    let step = extent / GRID as f64;
    let mut bad = Vec::new();
    for a in 0..GRID {
        for b in 0..GRID {
            let g = ((a as f64 + 0.5) * step, (b as f64 + 0.5) * step);
            let score = unit_bundle_score(panel, line.estimator, g);
            if (score - 1.0).abs() <= 1e-6 {
                continue;
            }
            if (score <= 1.0) != line.contains(g, 0.0) {
                bad.push(g);
            }
        }
    }
    bad
}
