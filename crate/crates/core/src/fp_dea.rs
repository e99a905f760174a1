//! CCR with fixed-proportion restrictions: for each declared input pair
//! `{m, m'}` either `v_m = 0` or `v_m' = 0`, and likewise for output pairs.
//!
//! The disjunctive program is solved by enumerating weight-support branches.
//! A branch fixes a set of weights to zero that hits every declared pair; each
//! branch is an ordinary CCR multiplier program over the surviving columns, and
//! the estimate is the best branch. With two non-substitutable inputs this is
//! the familiar "drop input 1, drop input 2, keep the larger score" procedure.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dea_models::{check_dmu, solve_multiplier, DmuPanel, EfficiencyResult, WeightTies};
use crate::error::DeaError;

/// Branches whose scores differ by no more than this are treated as tied.
const BRANCH_TIE_TOLERANCE: f64 = 1e-12;

/// Declared non-substitutable input pairs and non-transformable output pairs.
/// Pairs are stored as `(low, high)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpStructure {
    input_disjunctions: BTreeSet<(usize, usize)>,
    output_disjunctions: BTreeSet<(usize, usize)>,
}

fn normalize_pair((a, b): (usize, usize)) -> Result<(usize, usize), DeaError> {
    if a == b {
        Err(DeaError::InvalidStructure(format!(
            "pair ({a}, {b}) repeats an index"
        )))
    } else {
        Ok((a.min(b), a.max(b)))
    }
}

impl FpStructure {
    pub fn new(
        input_pairs: impl IntoIterator<Item = (usize, usize)>,
        output_pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DeaError> {
        Ok(Self {
            input_disjunctions: input_pairs
                .into_iter()
                .map(normalize_pair)
                .collect::<Result<_, _>>()?,
            output_disjunctions: output_pairs
                .into_iter()
                .map(normalize_pair)
                .collect::<Result<_, _>>()?,
        })
    }

    /// Every pair among the first `n_inputs` inputs is non-substitutable.
    pub fn all_input_pairs(n_inputs: usize) -> Self {
        let input_disjunctions = (0..n_inputs)
            .flat_map(|a| (a + 1..n_inputs).map(move |b| (a, b)))
            .collect();
        Self {
            input_disjunctions,
            output_disjunctions: BTreeSet::new(),
        }
    }

    pub fn input_disjunctions(&self) -> &BTreeSet<(usize, usize)> {
        &self.input_disjunctions
    }

    pub fn output_disjunctions(&self) -> &BTreeSet<(usize, usize)> {
        &self.output_disjunctions
    }

    pub fn is_empty(&self) -> bool {
        self.input_disjunctions.is_empty() && self.output_disjunctions.is_empty()
    }

    /// Checks that every index is in range for the given dimensions.
    pub fn validate(&self, n_inputs: usize, n_outputs: usize) -> Result<(), DeaError> {
        let check = |pairs: &BTreeSet<(usize, usize)>, n: usize, kind: &str| match pairs
            .iter()
            .find(|&&(_, hi)| hi >= n)
        {
            Some(&(lo, hi)) => Err(DeaError::InvalidStructure(format!(
                "{kind} pair ({lo}, {hi}) out of range for {n} {kind}s"
            ))),
            None => Ok(()),
        };
        check(&self.input_disjunctions, n_inputs, "input")?;
        check(&self.output_disjunctions, n_outputs, "output")
    }
}

/// Weights forced to zero in one branch. Ordered lexicographically by
/// `(zeroed_inputs, zeroed_outputs)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SupportBranch {
    pub zeroed_inputs: BTreeSet<usize>,
    pub zeroed_outputs: BTreeSet<usize>,
}

impl SupportBranch {
    pub fn surviving_inputs(&self, n_inputs: usize) -> Vec<usize> {
        (0..n_inputs)
            .filter(|m| !self.zeroed_inputs.contains(m))
            .collect()
    }

    pub fn surviving_outputs(&self, n_outputs: usize) -> Vec<usize> {
        (0..n_outputs)
            .filter(|s| !self.zeroed_outputs.contains(s))
            .collect()
    }
}

/// Inclusion-minimal index sets hitting every pair, sorted.
///
/// Branches only on pairs not yet covered, so every generated set is a cover
/// and every minimal cover is generated; non-minimal ones are filtered after.
fn minimal_covers(pairs: &BTreeSet<(usize, usize)>) -> Vec<BTreeSet<usize>> {
    fn extend(
        pairs: &[(usize, usize)],
        chosen: &mut BTreeSet<usize>,
        out: &mut BTreeSet<BTreeSet<usize>>,
    ) {
        let Some(pos) = pairs
            .iter()
            .position(|(a, b)| !chosen.contains(a) && !chosen.contains(b))
        else {
            out.insert(chosen.clone());
            return;
        };
        let (a, b) = pairs[pos];
        for side in [a, b] {
            chosen.insert(side);
            extend(&pairs[pos + 1..], chosen, out);
            chosen.remove(&side);
        }
    }

    let pairs: Vec<_> = pairs.iter().copied().collect();
    let mut covers = BTreeSet::new();
    extend(&pairs, &mut BTreeSet::new(), &mut covers);
    let covers: Vec<_> = covers.into_iter().collect();
    covers
        .iter()
        .filter(|c| !covers.iter().any(|o| o != *c && o.is_subset(c)))
        .cloned()
        .collect()
}

/// Minimal weight-support branches for `fp`, in lexicographic order.
///
/// A branch that zeroes a superset of another branch's weights can never
/// score higher, so only minimal branches are returned. No disjunctions
/// yields the single empty branch (plain CCR).
pub fn enumerate_branches(
    fp: &FpStructure,
    n_inputs: usize,
    n_outputs: usize,
) -> Result<Vec<SupportBranch>, DeaError> {
    fp.validate(n_inputs, n_outputs)?;
    let input_covers = minimal_covers(&fp.input_disjunctions);
    let output_covers = minimal_covers(&fp.output_disjunctions);
    let mut branches = Vec::with_capacity(input_covers.len() * output_covers.len());
    for zi in &input_covers {
        if zi.len() >= n_inputs {
            continue;
        }
        for zo in &output_covers {
            if zo.len() >= n_outputs {
                continue;
            }
            branches.push(SupportBranch {
                zeroed_inputs: zi.clone(),
                zeroed_outputs: zo.clone(),
            });
        }
    }
    if branches.is_empty() {
        return Err(DeaError::NoFeasibleBranch);
    }
    branches.sort();
    Ok(branches)
}

/// FP-constrained CCR efficiency of DMU `dmu_index`: the best CCR multiplier
/// score over the support branches of `fp`.
///
/// Branches that leave the evaluated DMU with no positive surviving input or
/// output are skipped; if every branch is skipped the DMU is degenerate.
/// Ties go to the lexicographically first branch.
pub fn score_fp(
    panel: &DmuPanel,
    dmu_index: usize,
    fp: &FpStructure,
) -> Result<EfficiencyResult, DeaError> {
    panel.check_index(dmu_index)?;
    let branches = enumerate_branches(fp, panel.n_inputs(), panel.n_outputs())?;
    check_dmu(panel, dmu_index)?;
    let (x0, y0) = (panel.input(dmu_index), panel.output(dmu_index));

    let mut best: Option<EfficiencyResult> = None;
    for branch in branches {
        let inputs = branch.surviving_inputs(panel.n_inputs());
        let outputs = branch.surviving_outputs(panel.n_outputs());
        if !inputs.iter().any(|&m| x0[m] > 0.0) || !outputs.iter().any(|&s| y0[s] > 0.0) {
            continue;
        }
        let mut result =
            solve_multiplier(panel, dmu_index, &inputs, &outputs, &WeightTies::default())?;
        if best
            .as_ref()
            .is_none_or(|b| result.theta > b.theta + BRANCH_TIE_TOLERANCE)
        {
            result.support_branch = Some(branch);
            best = Some(result);
        }
    }
    best.ok_or(DeaError::DegenerateDmu { index: dmu_index })
}
