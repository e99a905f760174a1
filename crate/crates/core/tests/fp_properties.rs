mod common;

use common::{exhaustive_fp_theta, random_fp, random_panel, single_input_ratio_score};
use fpdea::simulation::{generate_sample, ScenarioConfig};
use fpdea::{score_ccr_multiplier, score_fp, DmuPanel, FpStructure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

fn instance() -> impl Strategy<Value = (DmuPanel, FpStructure)> {
    (1usize..12, 1usize..4, 1usize..3, any::<u64>()).prop_map(|(n, m, s, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let panel = random_panel(&mut rng, n, m, s, 1.0, 100.0);
        let fp = random_fp(&mut rng, m, s);
        (panel, fp)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn matches_exhaustive_zero_patterns((panel, fp) in instance()) {
        for i in 0..panel.n_dmus() {
            let got = score_fp(&panel, i, &fp).unwrap().theta;
            let oracle = exhaustive_fp_theta(&panel, i, &fp);
            prop_assert!((got - oracle).abs() <= 1e-9, "dmu {i}: {got} vs {oracle}");
        }
    }

    #[test]
    fn disjunctions_hold_and_scores_are_restricted((panel, fp) in instance()) {
        for i in 0..panel.n_dmus() {
            let r = score_fp(&panel, i, &fp).unwrap();
            let ccr = score_ccr_multiplier(&panel, i).unwrap().theta;
            prop_assert!(r.theta <= ccr + TOL);
            prop_assert!(r.theta > 0.0);
            for &(a, b) in fp.input_disjunctions() {
                prop_assert_eq!(r.input_weights[a] * r.input_weights[b], 0.0);
            }
            for &(a, b) in fp.output_disjunctions() {
                prop_assert_eq!(r.output_weights[a] * r.output_weights[b], 0.0);
            }
            let branch = r.support_branch.unwrap();
            for &m in &branch.zeroed_inputs {
                prop_assert_eq!(r.input_weights[m], 0.0);
            }
        }
    }

    #[test]
    fn input_units_do_not_matter((panel, fp) in instance(), col in 0usize..3, factor in 0.001f64..1000.0) {
        let col = col % panel.n_inputs();
        let inputs = panel.inputs().iter().map(|x| {
            let mut x = x.clone();
            x[col] *= factor;
            x
        }).collect();
        let rescaled = DmuPanel::from_rows(inputs, panel.outputs().to_vec()).unwrap();
        for i in 0..panel.n_dmus() {
            let a = score_fp(&panel, i, &fp).unwrap().theta;
            let b = score_fp(&rescaled, i, &fp).unwrap().theta;
            prop_assert!((a - b).abs() <= TOL);
        }
    }

    #[test]
    fn adding_a_dmu_never_raises_scores((panel, fp) in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = random_panel(&mut rng, 1, panel.n_inputs(), panel.n_outputs(), 1.0, 100.0);
        let mut inputs = panel.inputs().to_vec();
        let mut outputs = panel.outputs().to_vec();
        inputs.push(extra.input(0).to_vec());
        outputs.push(extra.output(0).to_vec());
        let grown = DmuPanel::from_rows(inputs, outputs).unwrap();
        for i in 0..panel.n_dmus() {
            let before = score_fp(&panel, i, &fp).unwrap().theta;
            let after = score_fp(&grown, i, &fp).unwrap().theta;
            prop_assert!(after <= before + TOL);
        }
    }

    #[test]
    fn leontief_panels_follow_the_ratio_formula(m in 2usize..4, n in 2usize..40, sigma in 0.0f64..3.0, seed in any::<u64>()) {
        let cfg = ScenarioConfig::new(m, n, sigma).with_seed(seed);
        let sample = generate_sample(&cfg, 0);
        let fp = FpStructure::all_input_pairs(m);
        for i in 0..n {
            let got = score_fp(&sample.panel, i, &fp).unwrap().theta;
            let oracle = (0..m)
                .map(|k| single_input_ratio_score(&sample.panel, i, k))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((got - oracle).abs() <= 1e-9, "{got} vs {oracle}");
            if sigma == 0.0 {
                prop_assert!((got - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn toy_panel_branch_scores() {
    // A = (1,1 -> 1), C = (1,2 -> 1); keep x1: C scores 1, keep x2: C scores 0.5
    let panel = DmuPanel::from_rows(
        vec![vec![1.0, 1.0], vec![1.0, 2.0]],
        vec![vec![1.0], vec![1.0]],
    )
    .unwrap();
    assert_eq!(single_input_ratio_score(&panel, 1, 0), 1.0);
    assert_eq!(single_input_ratio_score(&panel, 1, 1), 0.5);
    let r = score_fp(&panel, 1, &FpStructure::all_input_pairs(2)).unwrap();
    assert!((r.theta - 1.0).abs() < 1e-12);
    assert!(r.support_branch.unwrap().zeroed_inputs.contains(&1));
}

#[test]
fn true_frontier_present_gives_exact_efficiency() {
    // When every input has an on-frontier DMU whose minimum sits on it, the
    // best single-input ratio is 1 and FP recovers y / min(x).
    let mut inputs = vec![
        vec![10.0, 40.0, 70.0],
        vec![55.0, 20.0, 90.0],
        vec![80.0, 60.0, 30.0],
    ];
    let mut outputs = vec![vec![10.0], vec![20.0], vec![30.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let extra = random_panel(&mut rng, 25, 3, 1, 1.0, 100.0);
    for j in 0..extra.n_dmus() {
        let x = extra.input(j).to_vec();
        let min = x.iter().copied().fold(f64::INFINITY, f64::min);
        let eff = 0.2 + 0.8 * extra.output(j)[0] / 100.0;
        outputs.push(vec![min * eff]);
        inputs.push(x);
    }
    let panel = DmuPanel::from_rows(inputs, outputs).unwrap();
    let fp = FpStructure::all_input_pairs(3);
    for i in 0..panel.n_dmus() {
        let x = panel.input(i);
        let min = x.iter().copied().fold(f64::INFINITY, f64::min);
        let truth = panel.output(i)[0] / min;
        let got = score_fp(&panel, i, &fp).unwrap().theta;
        assert!((got - truth).abs() <= 1e-9, "dmu {i}: {got} vs {truth}");
    }
}
