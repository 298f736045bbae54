use meoh::dsl::{parse, ExecLimits};
use meoh::problem::bpp::{
    evaluate_bpp, generate_weibull_instance, lower_bound, simulate_online, BppInstance, UnusedBinRule,
};
use meoh::problem::ObjectiveMode;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Weibull};

mod common;

#[test]
fn best_fit_fixture_matches_independent_simulator() {
    let tree = parse(common::BEST_FIT).unwrap();
    for seed in 0..5 {
        let inst = generate_weibull_instance(5000, 100, seed);
        let out = simulate_online(&inst, &tree, &ExecLimits::default(), UnusedBinRule::NotCounted).unwrap();
        assert_eq!(out.bins_used, common::best_fit_bins(100, inst.items()));
        assert_eq!(lower_bound(&inst), common::lower_bound(100, inst.items()));
    }
}

#[test]
fn weibull_items_have_the_expected_mean() {
    // E[clamp(ceil X, 1, 100)] = 1 + sum_{k=1}^{99} P(X > k)
    let w = Weibull::new(3.0, 45.0).unwrap();
    let expected = 1.0 + (1..100).map(|k| w.sf(f64::from(k))).sum::<f64>();
    let items: Vec<u32> = (0..20).flat_map(|s| generate_weibull_instance(5000, 100, s).items().to_vec()).collect();
    let mean = items.iter().map(|&i| f64::from(i)).sum::<f64>() / items.len() as f64;
    // the item standard deviation is about 15, so 4 standard errors is under 0.2
    assert!((mean - expected).abs() < 0.2, "{mean} vs {expected}");
    assert!(items.iter().all(|&i| (1..=100).contains(&i)));
}

#[test]
fn first_fit_is_cheaper_and_no_better() {
    let instances: Vec<BppInstance> = (0..2).map(|s| generate_weibull_instance(1000, 100, s)).collect();
    let limits = ExecLimits::default();
    let run = |src: &str| {
        evaluate_bpp(&parse(src).unwrap(), &instances, ObjectiveMode::StepCost, &limits, UnusedBinRule::NotCounted)
            .unwrap()
            .0
    };
    let best = run(common::BEST_FIT);
    let first = run(common::FIRST_FIT);
    assert!(first.objectives[1] < best.objectives[1]);
    assert!(first.objectives[0] >= best.objectives[0]);
}

proptest! {
    #[test]
    fn small_instances_match_best_fit(items in prop::collection::vec(1u32..=20, 1..60)) {
        let inst = BppInstance::new(20, items.clone()).unwrap();
        let tree = parse(common::BEST_FIT).unwrap();
        let out = simulate_online(&inst, &tree, &ExecLimits::default(), UnusedBinRule::NotCounted).unwrap();
        prop_assert_eq!(out.bins_used, common::best_fit_bins(20, &items));
        prop_assert!(out.bins_used >= common::lower_bound(20, &items));
    }

    #[test]
    fn elementwise_shortcut_is_invisible(items in prop::collection::vec(1u32..=30, 1..40), c in 0.0f64..3.0) {
        // the `for` loop disables the untouched-bin shortcut without changing scores
        let plain = parse(&format!("fn score(item, bins) {{ return bins * {c} - item * bins; }}")).unwrap();
        let looped = parse(&format!(
            "fn score(item, bins) {{ let s = bins * {c} - item * bins; for k in 0..0 {{ s[k] = 0; }} return s; }}"
        )).unwrap();
        let inst = BppInstance::new(30, items).unwrap();
        let limits = ExecLimits::default();
        let a = simulate_online(&inst, &plain, &limits, UnusedBinRule::NotCounted).unwrap();
        let b = simulate_online(&inst, &looped, &limits, UnusedBinRule::NotCounted).unwrap();
        prop_assert_eq!(a.bins_used, b.bins_used);
    }
}
