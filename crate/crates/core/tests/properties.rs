//! Property-style checks that sweep randomized inputs: CSV persistence,
//! fold-plan structure, bootstrap statistics, and class-imbalance behavior.

use bracelet_core::dataset::{load_csv, save_csv, Dataset, Sample};
use bracelet_core::ensemble::{bootstrap_indices, fit_adaboost_rows, fit_rusboost_rows};
use bracelet_core::eval::FoldPlan;
use bracelet_core::rng::derive_rng;
use proptest::prelude::*;

proptest! {
    #[test]
    fn csv_round_trip_preserves_every_sample(
        raw in prop::collection::vec((0.0f64..1.0, 0.0f64..2.0, 0u8..2), 1..60)
    ) {
        let samples: Vec<Sample> = raw
            .iter()
            .map(|&(bac, pulse, target)| Sample::new(bac, pulse, target).unwrap())
            .collect();
        let ds = Dataset::new("prop", samples);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        save_csv(&ds, &path).unwrap();
        let reloaded = load_csv(&path).unwrap();
        prop_assert_eq!(&reloaded.samples, &ds.samples);

        // a second save of the reload is byte-identical
        let path2 = dir.path().join("ds2.csv");
        save_csv(&reloaded, &path2).unwrap();
        prop_assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }
}

fn random_dataset(seed: u64, n0: usize, n1: usize) -> Dataset {
    let mut rng = derive_rng(seed, "properties/dataset");
    let mut samples = Vec::new();
    for target in [0u8, 1] {
        let n = if target == 0 { n0 } else { n1 };
        let shift = f64::from(target) * 0.4;
        for _ in 0..n {
            samples.push(
                Sample::new(
                    rng.gen_range(0.0..0.3) + shift * 0.2,
                    rng.gen_range(0.2..1.2) + shift,
                    target,
                )
                .unwrap(),
            );
        }
    }
    Dataset::new(format!("random-{seed}"), samples)
}

use rand::Rng as _;

#[test]
fn stratified_folds_balanced_over_random_datasets() {
    let mut rng = derive_rng(2001, "properties/folds");
    for case in 0..100 {
        let n0 = rng.gen_range(5..=120);
        let n1 = rng.gen_range(5..=120);
        let k = *[2usize, 5, 10].iter().nth(case % 3).unwrap();
        if n0 < k || n1 < k {
            continue;
        }
        let ds = random_dataset(3000 + case as u64, n0, n1);
        let plan = FoldPlan::stratified(&ds, k, case as u64).unwrap();
        assert_eq!(plan.assignments.len(), ds.len());

        // fold sizes differ by at most one, overall and per class
        let sizes = plan.fold_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), ds.len());
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for class in 0..2u8 {
            let mut per_fold = vec![0usize; k];
            for (s, &f) in ds.samples.iter().zip(&plan.assignments) {
                if s.target == class {
                    per_fold[f] += 1;
                }
            }
            let spread = per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap();
            assert!(spread <= 1, "class {class} fold spread {spread} (case {case})");
        }
    }
}

#[test]
fn bootstrap_resamples_have_expected_distinct_count() {
    // n draws with replacement cover n(1 - 1/e) ~ 125.8 of 199 indices
    let n = 199;
    let mut total_distinct = 0usize;
    let members = 1000;
    for member in 0..members {
        let indices = bootstrap_indices(42, member, n);
        assert_eq!(indices.len(), n);
        assert!(indices.iter().all(|&i| i < n));
        let mut seen = vec![false; n];
        for &i in &indices {
            seen[i] = true;
        }
        total_distinct += seen.iter().filter(|&&s| s).count();
    }
    let mean = total_distinct as f64 / members as f64;
    let expected = n as f64 * (1.0 - (-1.0f64).exp());
    assert!(
        (mean - expected).abs() <= 2.0,
        "mean distinct {mean}, expected about {expected}"
    );
}

#[test]
fn rusboost_recalls_minority_at_least_as_well_as_adaboost() {
    // On imbalanced data the undersampling variant should not trail the
    // plain boosted ensemble on minority-class recall (median over seeds).
    let mut deltas = Vec::new();
    for seed in 0..20u64 {
        let train = random_dataset(4000 + seed, 150, 25);
        let test = random_dataset(5000 + seed, 150, 25);
        let rows = train.feature_rows();
        let labels = train.labels();
        let ada = fit_adaboost_rows(&rows, &labels, 30, 0.1, 20).unwrap();
        let rus = fit_rusboost_rows(&rows, &labels, 30, 0.1, seed).unwrap();
        let recall = |model: &bracelet_core::ensemble::EnsembleModel| {
            let mut hit = 0usize;
            let mut total = 0usize;
            for s in &test.samples {
                if s.target == 1 {
                    total += 1;
                    if model.predict(&s.features()).unwrap().0 == 1 {
                        hit += 1;
                    }
                }
            }
            hit as f64 / total as f64
        };
        deltas.push(recall(&rus) - recall(&ada));
    }
    deltas.sort_by(f64::total_cmp);
    let median = deltas[deltas.len() / 2];
    assert!(
        median >= 0.0,
        "median minority-recall delta {median} (rusboost - adaboost)"
    );
}
