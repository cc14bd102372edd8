//! Ranking quality against corruption ground truth, and run comparison.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::matrix::{FeatureMatrix, RowKey};
use crate::synth::CorruptionLog;

/// Per-row labels for a fact matrix: rows whose triple appears in the log.
pub fn fact_truth(log: &CorruptionLog, m: &FeatureMatrix) -> Vec<bool> {
    let corrupted = log.corrupted_triples();
    m.row_keys
        .iter()
        .map(|k| matches!(k, RowKey::Triple(t) if corrupted.contains(t)))
        .collect()
}

/// Per-row labels for an entity matrix: rows whose entity is the subject of
/// some logged triple.
pub fn entity_truth(log: &CorruptionLog, g: &KnowledgeGraph, m: &FeatureMatrix) -> Vec<bool> {
    let subjects = log.corrupted_subjects(g);
    m.row_keys
        .iter()
        .map(|k| matches!(k, RowKey::Entity(e) if subjects.contains(e)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    pub precision: f64,
    pub recall: f64,
    /// Probability that a corrupted row scores below a clean one, ties
    /// counting one half.
    pub auc: f64,
    pub flagged: usize,
    pub true_positives: usize,
    pub positives: usize,
}

/// Exact AUC where lower scores mean more abnormal. `None` when either class
/// is empty.
pub fn exact_auc(scores: &[f64], truth: &[bool]) -> Option<f64> {
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // walk tie groups from most to least abnormal
    let mut wins = 0.0f64;
    let mut negatives_above = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0usize, 0usize);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if truth[order[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        // positives here beat every negative still below them
        let below = negatives - negatives_above - neg;
        wins += pos as f64 * (below as f64 + 0.5 * neg as f64);
        negatives_above += neg;
        i = j;
    }
    Some(wins / (positives as f64 * negatives as f64))
}

/// Precision and recall of the first `budget` entries of `anomalies` plus the
/// exact AUC of the full score vector.
pub fn precision_recall_at_budget(
    anomalies: &[usize],
    scores: &[f64],
    truth: &[bool],
    budget: usize,
) -> Result<Quality> {
    let positives = truth.iter().filter(|&&t| t).count();
    if positives == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let flagged: BTreeSet<usize> = anomalies.iter().copied().take(budget).collect();
    let true_positives = flagged
        .iter()
        .filter(|&&r| truth.get(r).copied().unwrap_or(false))
        .count();
    let precision = if flagged.is_empty() {
        0.0
    } else {
        true_positives as f64 / flagged.len() as f64
    };
    Ok(Quality {
        precision,
        recall: true_positives as f64 / positives as f64,
        auc: exact_auc(scores, truth).unwrap_or(0.5),
        flagged: flagged.len(),
        true_positives,
        positives,
    })
}

/// One labeled run: named metrics and per-stage wall time in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub metrics: BTreeMap<String, f64>,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub run: String,
    pub measure: String,
    pub value: f64,
    /// Difference to the first run, when it reports the same measure.
    pub delta: Option<f64>,
}

/// Lines up every run's metrics and timings against the first run.
pub fn compare_runs(runs: &[RunRecord]) -> Result<Vec<ComparisonRow>> {
    let Some(first) = runs.first() else {
        return Err(Error::Config(String::from("no runs to compare")));
    };
    let mut rows = Vec::new();
    for run in runs {
        for (name, &value) in &run.metrics {
            rows.push(ComparisonRow {
                run: run.label.clone(),
                measure: name.clone(),
                value,
                delta: first.metrics.get(name).map(|base| value - base),
            });
        }
        for (stage, &ms) in &run.timings_ms {
            rows.push(ComparisonRow {
                run: run.label.clone(),
                measure: alloc::format!("time_ms:{stage}"),
                value: ms as f64,
                delta: first
                    .timings_ms
                    .get(stage)
                    .map(|&base| ms as f64 - base as f64),
            });
        }
    }
    Ok(rows)
}

/// Recall after each prefix of `ranking`; used to check monotonicity.
pub fn recall_curve(ranking: &[usize], truth: &[bool]) -> Vec<f64> {
    let positives = truth.iter().filter(|&&t| t).count().max(1) as f64;
    let mut seen = vec![false; truth.len()];
    let mut hits = 0usize;
    ranking
        .iter()
        .map(|&r| {
            if !seen[r] && truth[r] {
                hits += 1;
            }
            seen[r] = true;
            hits as f64 / positives
        })
        .collect()
}
