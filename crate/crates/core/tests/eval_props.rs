use kgaudit_core::eval::{exact_auc, recall_curve};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Probability that a random positive scores below a random negative, ties
/// counted half, by enumerating every pair.
fn pairwise_auc(scores: &[f64], truth: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &ti) in truth.iter().enumerate() {
        for (j, &tj) in truth.iter().enumerate() {
            if ti && !tj {
                pairs += 1.0;
                if scores[i] < scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

proptest! {
    #[test]
    fn auc_matches_pair_enumeration(cells in prop::collection::vec((0u8..6, any::<bool>()), 2..60)) {
        let scores: Vec<f64> = cells.iter().map(|c| f64::from(c.0) / 2.0).collect();
        let truth: Vec<bool> = cells.iter().map(|c| c.1).collect();
        match exact_auc(&scores, &truth) {
            Some(auc) => prop_assert!((auc - pairwise_auc(&scores, &truth)).abs() < 1e-12),
            None => prop_assert!(truth.iter().all(|&t| t) || truth.iter().all(|&t| !t)),
        }
    }

    #[test]
    fn recall_curve_is_monotone(truth in prop::collection::vec(any::<bool>(), 1..50), seed in any::<u64>()) {
        let mut ranking: Vec<usize> = (0..truth.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..ranking.len()).rev() {
            ranking.swap(i, rng.gen_range(0..=i));
        }
        let curve = recall_curve(&ranking, &truth);
        prop_assert_eq!(curve.len(), ranking.len());
        prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
        if truth.iter().any(|&t| t) {
            prop_assert!((curve.last().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn random_scores_give_auc_near_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let scores: Vec<f64> = (0..4000).map(|_| rng.gen()).collect();
    let truth: Vec<bool> = (0..4000).map(|_| rng.gen_bool(0.2)).collect();
    let auc = exact_auc(&scores, &truth).unwrap();
    assert!((auc - 0.5).abs() < 0.03, "{auc}");
}
