//! Properties of the empirical statistics, tests and fronts.

use gsd_core::preference::{check_consistency, Dimension, MetricValue, ScaleSpec};
use gsd_core::stats::{
    embed_samples, empirical_statistic, front_from_margins, gsd_front, pairwise_margins, pareto_front,
    permutation_test, robust_statistic, robust_test, Design, EvaluationTable, TableEngine, TestConfig,
    WeightedSample,
};
use proptest::prelude::*;

fn spec2() -> ScaleSpec {
    ScaleSpec::new(vec![
        Dimension::cardinal("acc"),
        Dimension::ordinal("cost", &["low", "mid", "high"]).lower_better(),
    ])
    .unwrap()
}

fn sample() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec((0..=10i32, 0..3i32), 3..8)
        .prop_map(|v| v.into_iter().map(|(a, b)| vec![a as f64 / 10.0, -(b as f64)]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn statistic_is_antisymmetric_up_to_ambiguity(x in sample(), y in sample()) {
        let (e, xi, yi) = embed_samples(&x, &y, &spec2()).unwrap();
        let sx = WeightedSample::uniform(&xi).unwrap();
        let sy = WeightedSample::uniform(&yi).unwrap();
        let a = empirical_statistic(&sx, &sy, &e.system, 0.0).unwrap();
        let b = empirical_statistic(&sy, &sx, &e.system, 0.0).unwrap();
        prop_assert!(a + b <= 1e-9);
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&a));
    }

    #[test]
    fn robust_statistic_is_affine_in_zeta(x in sample(), y in sample(), z in 0..=10i32) {
        let (e, xi, yi) = embed_samples(&x, &y, &spec2()).unwrap();
        let sx = WeightedSample::uniform(&xi).unwrap();
        let sy = WeightedSample::uniform(&yi).unwrap();
        let zeta = z as f64 / 10.0;
        let d0 = empirical_statistic(&sx, &sy, &e.system, 0.0).unwrap();
        let dz = robust_statistic(&sx, &sy, &e.system, 0.0, zeta, zeta).unwrap();
        prop_assert!((dz - ((1.0 - zeta) * d0 - zeta)).abs() <= 1e-6);
    }
}

#[test]
fn p_values_are_valid_and_reproducible() {
    let x: Vec<Vec<f64>> = (0..8).map(|i| vec![0.5 + i as f64 / 20.0, -1.0]).collect();
    let y: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 20.0, -2.0]).collect();
    let (e, xi, yi) = embed_samples(&x, &y, &spec2()).unwrap();
    for design in [Design::Paired, Design::TwoSample] {
        let cfg = TestConfig { delta: 0.0, design, replicates: 99, seed: 42 };
        let a = permutation_test(&xi, &yi, &e.system, &cfg).unwrap();
        let b = permutation_test(&xi, &yi, &e.system, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.p_value >= 0.01 && a.p_value <= 1.0);
        assert!(a.statistic > 0.0);
        assert!(a.p_value <= 0.05, "{design:?}: {}", a.p_value);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = one.install(|| permutation_test(&xi, &yi, &e.system, &cfg)).unwrap();
        let d = three.install(|| permutation_test(&xi, &yi, &e.system, &cfg)).unwrap();
        assert_eq!(c, d);
        assert_eq!(a, c);
    }
}

#[test]
fn robust_p_values_are_monotone() {
    let x: Vec<Vec<f64>> = (0..10).map(|i| vec![0.4 + i as f64 / 20.0, -0.0]).collect();
    let y: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 20.0, -1.0]).collect();
    let (e, xi, yi) = embed_samples(&x, &y, &spec2()).unwrap();
    let cfg = TestConfig { delta: 0.0, design: Design::TwoSample, replicates: 199, seed: 3 };
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let r = robust_test(&xi, &yi, &e.system, &cfg, &grid, 0.05).unwrap();
    assert!(r.grid.windows(2).all(|w| w[0].p_value <= w[1].p_value));
    assert_eq!(r.grid.last().unwrap().p_value, 1.0);
    let star = r.zeta_star.expect("significant at zeta = 0");
    assert!(r.grid.iter().all(|g| (g.p_value <= 0.05) == (g.zeta <= star)));
}

fn table(rows: &[Vec<(i32, usize)>]) -> EvaluationTable {
    let levels = ["low", "mid", "high"];
    let subjects = (0..rows.len()).map(|i| format!("c{i}")).collect();
    let instances = (0..rows[0].len()).map(|d| format!("d{d}")).collect();
    let values = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(a, b)| vec![MetricValue::Number(a as f64 / 10.0), MetricValue::Level(levels[b].into())])
                .collect()
        })
        .collect();
    EvaluationTable::new(subjects, instances, spec2(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fronts_nest(rows in prop::collection::vec(prop::collection::vec((0..=10i32, 0..3usize), 4), 3)) {
        let t = table(&rows);
        let engine = match TableEngine::new(&t, 0.0) {
            Ok(e) => e,
            Err(_) => return Ok(()),
        };
        let dmax = check_consistency(engine.system(), 0.0).unwrap().delta_max.unwrap();
        let f = gsd_front(&t, dmax / 2.0, 0.0).unwrap();
        for s in &f.gsd_front {
            prop_assert!(f.pareto_front.contains(s));
        }
        prop_assert_eq!(
            f.pareto_front.iter().map(|s| t.subject_index(s).unwrap()).collect::<Vec<_>>(),
            pareto_front(&t)
        );
        let m = pairwise_margins(&t, dmax / 2.0).unwrap();
        let mut prev: Vec<usize> = Vec::new();
        for k in 0..5 {
            let front = front_from_margins(&m.margins, k as f64 * 0.05);
            prop_assert!(prev.iter().all(|i| front.contains(i)));
            prev = front;
        }
    }
}
