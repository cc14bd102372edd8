use kgaudit_core::detector::{default_kernels, detect, DetectOptions};
use kgaudit_core::matrix::{FeatureMatrix, MatrixKind, RowKey, SparseRow};
use kgaudit_core::svm::{train_ocsvm, KernelKind, KernelSpec};
use kgaudit_core::term::TermId;
use proptest::prelude::*;

const COLS: usize = 12;

fn sparse_row() -> impl Strategy<Value = SparseRow> {
    prop::collection::vec(0u32..COLS as u32, 0..6).prop_map(SparseRow::from_unsorted)
}

fn matrix(rows: Vec<SparseRow>) -> FeatureMatrix {
    FeatureMatrix {
        kind: MatrixKind::EntityMatrix,
        row_keys: (0..rows.len())
            .map(|i| RowKey::Entity(TermId(i as u32)))
            .collect(),
        catalog: (0..COLS).map(|c| format!("f{c}")).collect(),
        rows,
    }
}

fn kernel() -> impl Strategy<Value = KernelSpec> {
    prop::sample::select(KernelKind::ALL.to_vec()).prop_map(|k| KernelSpec::with_defaults(k, COLS))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_symmetric(x in sparse_row(), y in sparse_row(), k in kernel()) {
        prop_assert_eq!(k.eval(&x, &y), k.eval(&y, &x));
        if let KernelSpec::Linear = k {
            prop_assert_eq!(k.eval(&x, &y), x.dot(&y) as f64);
        }
        if let KernelSpec::Rbf { .. } = k {
            prop_assert_eq!(k.eval(&x, &x), 1.0);
            prop_assert!(k.eval(&x, &y) > 0.0 && k.eval(&x, &y) <= 1.0);
        }
    }

    #[test]
    fn row_permutation_permutes_scores(rows in prop::collection::vec(sparse_row(), 12..40), rotate in 1usize..11) {
        let n = rows.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + rotate) % n).collect();
        let permuted: Vec<SparseRow> = perm.iter().map(|&i| rows[i].clone()).collect();
        let budget = n / 4;
        let a = detect(&matrix(rows), &default_kernels(COLS), budget, &DetectOptions::default()).unwrap();
        let b = detect(&matrix(permuted), &default_kernels(COLS), budget, &DetectOptions::default()).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert!((a.ensemble[i] - b.ensemble[j]).abs() < 1e-6, "row {i}: {} vs {}", a.ensemble[i], b.ensemble[j]);
            prop_assert_eq!(a.votes[i], b.votes[j]);
        }
    }

    #[test]
    fn doubling_every_row_keeps_the_decision_function(rows in prop::collection::vec(sparse_row(), 8..30), k in kernel(), nu in 0.1f64..0.6) {
        let single = matrix(rows.clone());
        let doubled = matrix(rows.iter().chain(&rows).cloned().collect());
        let a = train_ocsvm(&single, k, nu).unwrap();
        let b = train_ocsvm(&doubled, k, nu).unwrap();
        let scale = rows.iter().map(|r| k.eval(r, r)).fold(1.0f64, f64::max);
        for r in &rows {
            prop_assert!((a.decision(r) - b.decision(r)).abs() < 1e-3 * scale, "{} vs {}", a.decision(r), b.decision(r));
        }
    }

    #[test]
    fn flagged_rows_respect_budget(rows in prop::collection::vec(sparse_row(), 10..40), frac in 0.1f64..0.5) {
        let n = rows.len();
        let budget = ((n as f64 * frac) as usize).max(2);
        let d = detect(&matrix(rows), &default_kernels(COLS), budget, &DetectOptions::default()).unwrap();
        prop_assert!(d.anomalies.len() <= budget);
        prop_assert!(d.anomalies.windows(2).all(|w| w[0].ensemble_score <= w[1].ensemble_score));
        prop_assert!(d.ensemble.iter().all(|x| (-1.0..=1.0).contains(x)));
        let majority = d.models.len() / 2 + 1;
        prop_assert!(d.anomalies.iter().all(|r| r.votes >= majority));
    }
}
