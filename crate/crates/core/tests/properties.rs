use proptest::prelude::*;

use strata_bench::classifiers::{distance_schema, mixed_distance, train_knn, train_naive_bayes};
use strata_bench::evaluator::{accuracy, split_train_test};
use strata_bench::parser::{format_record, load_dictionary, parse_records, row_values, Value};
use strata_bench::preprocess::{correlation_filter, information_gain_filter, remove_missing, RowPolicy};
use strata_bench::sampler::{build_strata, largest_remainder, random_sample, stratified_sample};
use strata_bench::synthgen::{generate, SynthSpec};
use strata_bench::{Cell, Column, Dataset};

const DICT: &str = "record_length=16
id|1|6|numeric|admin
sex|7|1|nominal|demographic|missing=9|recode=1:M,2:F
grade|8|2|nominal|tumor|missing=99
size|10|5|numeric|tumor|missing=99999
site|15|2|nominal|tumor
";

fn value_row() -> impl Strategy<Value = Vec<Value>> {
    (
        (0u32..1_000_000).prop_map(|x| Value::Number(f64::from(x))),
        prop_oneof![
            Just(Value::Missing),
            Just(Value::Text("M".into())),
            Just(Value::Text("F".into()))
        ],
        prop_oneof![Just(Value::Missing), "[A-Z0-8][A-Z0-8]?".prop_map(Value::Text)],
        prop_oneof![
            Just(Value::Missing),
            (0u32..10_000).prop_map(|x| Value::Number(f64::from(x) / 10.0))
        ],
        "[a-z][a-z]?".prop_map(Value::Text),
    )
        .prop_map(|(a, b, c, d, e)| vec![a, b, c, d, e])
}

/// Nominal and numeric predictors with missing cells and a nominal label.
fn small_dataset() -> impl Strategy<Value = Dataset> {
    let cell = prop_oneof![1 => Just(None), 6 => (0u8..4).prop_map(Some)];
    let row = (cell.clone(), cell.clone(), cell, 0u8..3, proptest::option::of(0u8..20));
    proptest::collection::vec(row, 8..60).prop_map(|rows| {
        let mut ds = Dataset::new(vec![
            Column::nominal("a").with_category("x"),
            Column::nominal("b").with_category("x"),
            Column::nominal("c"),
            Column::nominal("y"),
            Column::numeric("n").with_category("x"),
        ])
        .unwrap();
        for (a, b, c, y, n) in rows {
            let txt = |v: Option<u8>| v.map(|v| format!("v{v}"));
            ds.push_text_row(&[txt(a), txt(b), txt(c), Some(format!("y{y}")), n.map(|n| n.to_string())])
                .unwrap();
        }
        ds
    })
}

fn labelled_counts() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0usize..40, 1..5)
}

fn dataset_from_counts(counts: &[usize]) -> Dataset {
    let names: Vec<String> = (0..counts.len()).map(|c| format!("c{c}")).collect();
    let mut ds = Dataset::new(vec![
        Column::numeric("id"),
        Column::nominal("y").with_categories(&names),
    ])
    .unwrap();
    let mut id = 0;
    // Interleave classes so strata are not contiguous.
    for round in 0..counts.iter().copied().max().unwrap_or(0) {
        for (c, &k) in counts.iter().enumerate() {
            if round < k {
                ds.push_row(vec![Cell::Numeric(f64::from(id)), Cell::Nominal(c as u32)])
                    .unwrap();
                id += 1;
            }
        }
    }
    ds
}

fn ids(ds: &Dataset) -> Vec<f64> {
    (0..ds.n_rows()).map(|r| ds.row(r)[0].as_numeric().unwrap()).collect()
}

proptest! {
    #[test]
    fn fixed_width_round_trip(rows in proptest::collection::vec(value_row(), 1..30)) {
        let dict = load_dictionary(DICT).unwrap();
        let lines: Vec<String> = rows.iter().map(|r| format_record(&dict, r).unwrap()).collect();
        let out = parse_records(&lines, &dict, 7).unwrap();
        prop_assert!(out.rejected.is_empty());
        prop_assert_eq!(out.dataset.n_rows(), rows.len());
        for (i, want) in rows.iter().enumerate() {
            prop_assert_eq!(&row_values(&out.dataset, i), want);
        }
    }

    #[test]
    fn filters_are_idempotent(ds in small_dataset(), threshold in 0.05f64..1.0) {
        let (once, _) = remove_missing(&ds, 0.5, RowPolicy::DropAnyMissing).unwrap();
        let (twice, report) = remove_missing(&once, 0.5, RowPolicy::DropAnyMissing).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(report.is_empty());

        let (once, _) = correlation_filter(&ds, threshold).unwrap();
        let (twice, report) = correlation_filter(&once, threshold).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(report.is_empty());

        if let Ok((once, _)) = information_gain_filter(&ds, "y", 0.01, 4) {
            let (twice, report) = information_gain_filter(&once, "y", 0.01, 4).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(report.is_empty());
        }
    }

    #[test]
    fn random_sample_is_an_ordered_subset(counts in labelled_counts(), frac in 0.0f64..=1.0, seed: u64) {
        let ds = dataset_from_counts(&counts);
        prop_assume!(ds.n_rows() > 0);
        let n = ((ds.n_rows() as f64 * frac) as usize).max(1);
        let s = random_sample(&ds, n, seed).unwrap();
        let got = ids(&s);
        prop_assert_eq!(got.len(), n);
        prop_assert!(got.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(&s, &random_sample(&ds, n, seed).unwrap());
    }

    #[test]
    fn stratified_counts_follow_largest_remainder(counts in labelled_counts(), frac in 0.0f64..=1.0, seed: u64) {
        let ds = dataset_from_counts(&counts);
        prop_assume!(ds.n_rows() > 0);
        let n = ((ds.n_rows() as f64 * frac) as usize).max(1);
        let s = stratified_sample(&ds, "y", n, seed).unwrap();
        let index = build_strata(&ds, "y").unwrap();
        let sizes: Vec<usize> = index.sizes().iter().map(|s| s.1).collect();
        let quotas = largest_remainder(&sizes, n);
        let drawn = build_strata(&s, "y").unwrap();
        for ((class, _), q) in index.sizes().into_iter().zip(quotas) {
            let got = drawn.stratum(class).map_or(0, |s| s.rows.len());
            prop_assert_eq!(got, q);
        }
    }

    #[test]
    fn distance_is_a_symmetric_bounded_metric(ds in small_dataset(), i in 0usize..8, j in 0usize..8) {
        let ds = ds.with_label("y").unwrap();
        let schema = distance_schema(&ds);
        let (a, b) = (ds.row(i % ds.n_rows()), ds.row(j % ds.n_rows()));
        let d = mixed_distance(a, b, &schema);
        prop_assert_eq!(d, mixed_distance(b, a, &schema));
        prop_assert!(d >= 0.0 && d <= (schema.len() as f64).sqrt() + 1e-12);
        if !a.iter().any(Cell::is_missing) {
            prop_assert_eq!(mixed_distance(a, a, &schema), 0.0);
        }
    }

    #[test]
    fn naive_bayes_posterior_is_a_distribution(ds in small_dataset(), alpha in 0.0f64..3.0, q in 0usize..60) {
        let ds = ds.with_label("y").unwrap();
        let model = train_naive_bayes(&ds, alpha).unwrap();
        let (class, post) = model.predict(ds.row(q % ds.n_rows())).unwrap();
        prop_assert_eq!(post.len(), ds.class_names().len());
        prop_assert!(post.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(post.iter().all(|&p| p <= post[class as usize]));
    }

    #[test]
    fn naive_bayes_ignores_row_duplication(ds in small_dataset(), q in 0usize..60) {
        // Without smoothing every estimate is a ratio of counts or a moment,
        // all unchanged when each row appears twice.
        let ds = ds.with_label("y").unwrap();
        let mut doubled = ds.empty_like();
        for r in 0..ds.n_rows() {
            doubled.push_row(ds.row(r).to_vec()).unwrap();
            doubled.push_row(ds.row(r).to_vec()).unwrap();
        }
        let query = ds.row(q % ds.n_rows());
        let (_, a) = train_naive_bayes(&ds, 0.0).unwrap().predict(query).unwrap();
        let (_, b) = train_naive_bayes(&doubled, 0.0).unwrap().predict(query).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn one_nearest_neighbour_memorises(ds in small_dataset()) {
        let ds = ds.with_label("y").unwrap();
        // Complete rows with distinct predictors, so each row is its own
        // unique nearest neighbour.
        let mut train = ds.empty_like();
        let mut seen = Vec::new();
        for r in 0..ds.n_rows() {
            let row = ds.row(r);
            let key: Vec<Cell> = row[..3].iter().chain(&row[4..]).cloned().collect();
            if !row.iter().any(Cell::is_missing) && !seen.contains(&key) {
                seen.push(key);
                train.push_row(row.to_vec()).unwrap();
            }
        }
        prop_assume!(train.n_rows() > 0);
        let model = train_knn(&train, 1).unwrap();
        for r in 0..train.n_rows() {
            prop_assert_eq!(Some(model.predict(train.row(r)).unwrap()), train.label_of(r));
        }
    }
}

fn learnability(signal: f64) -> f64 {
    let spec = SynthSpec::parse(&format!(
        "rows = 600\nsignal = {signal}\n[label y]\nclasses = a, b, c\nproportions = 0.5, 0.3, 0.2\n\
         [attribute u]\nkind = nominal\nvalues = p, q, r\nbase = 0.34, 0.33, 0.33\n\
         class.a = 0.8, 0.1, 0.1\nclass.b = 0.1, 0.8, 0.1\nclass.c = 0.1, 0.1, 0.8\n\
         [attribute v]\nkind = numeric\nbase = 0, 1\nclass.a = -2, 1\nclass.b = 0, 1\nclass.c = 2, 1\n"
    ))
    .unwrap();
    let mut total = 0.0;
    for seed in 0..5 {
        let ds = generate(&spec, seed).unwrap();
        let (train, test) = split_train_test(&ds, 0.6, seed, false).unwrap();
        let model = train_naive_bayes(&train, 1.0).unwrap();
        let pred: Vec<u32> = (0..test.n_rows())
            .map(|r| model.predict_class(test.row(r)).unwrap())
            .collect();
        let truth: Vec<u32> = (0..test.n_rows()).map(|r| test.label_of(r).unwrap()).collect();
        total += accuracy(&pred, &truth).unwrap();
    }
    total / 5.0
}

#[test]
fn stronger_signal_is_easier_to_learn() {
    let acc: Vec<f64> = [0.0, 0.5, 1.0].into_iter().map(learnability).collect();
    assert!(acc[0] < acc[1] && acc[1] < acc[2], "{acc:?}");
}
