//! Multi-kernel one-class SVM ensemble with budgeted, explained output.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, TripleId, TripleKind};
use crate::matrix::{FeatureMatrix, MatrixKind, RowKey, SparseRow};
use crate::par::map_range;
use crate::rules::{correction_for, Correction, RuleHit, TaxoLabel};
use crate::svm::{score, train_ocsvm_with, KernelKind, KernelSpec, SolverOptions, SvmModel};
use crate::term::TermId;

pub const DEFAULT_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubjectKind {
    Fact,
    Entity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyRecord {
    pub subject_kind: SubjectKind,
    pub row: usize,
    pub key: RowKey,
    /// Mean of the normalized per-kernel distances; lower is more abnormal.
    pub ensemble_score: f64,
    pub kernel_scores: Vec<f64>,
    pub votes: usize,
    pub explanation: Vec<String>,
    pub taxo_class: Option<TaxoLabel>,
    pub correction: Option<Correction>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectOptions {
    pub solver: SolverOptions,
    /// Overrides ν = b/n.
    pub nu: Option<f64>,
    /// Group id per row; explanations compare against normal rows of the
    /// same group when it has any.
    pub row_groups: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub nu: f64,
    pub budget: usize,
    pub models: Vec<SvmModel>,
    /// Raw distances, one vector per kernel.
    pub kernel_scores: Vec<Vec<f64>>,
    pub ensemble: Vec<f64>,
    pub votes: Vec<usize>,
    /// Ranked abnormal records, ascending by ensemble score.
    pub anomalies: Vec<AnomalyRecord>,
    pub normal: Vec<usize>,
}

impl Detection {
    /// Every row ordered from most to least abnormal (ties by row index).
    pub fn full_ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ensemble.len()).collect();
        order.sort_by(|&a, &b| {
            self.ensemble[a]
                .total_cmp(&self.ensemble[b])
                .then(a.cmp(&b))
        });
        order
    }
}

pub fn default_kernels(n_cols: usize) -> Vec<KernelSpec> {
    KernelKind::ALL
        .iter()
        .map(|&k| KernelSpec::with_defaults(k, n_cols))
        .collect()
}

/// Scales negatives by the most negative value and positives by the largest,
/// mapping into [-1, 1] while keeping the sign of every value.
pub fn normalize_signed(d: &[f64]) -> Vec<f64> {
    let min = d.iter().copied().fold(0.0f64, f64::min);
    let max = d.iter().copied().fold(0.0f64, f64::max);
    d.iter()
        .map(|&x| {
            if x < 0.0 {
                x / -min
            } else if x > 0.0 {
                x / max
            } else {
                0.0
            }
        })
        .collect()
}

/// Predicate id of each fact row, for grouping explanations.
pub fn fact_row_groups(g: &KnowledgeGraph, m: &FeatureMatrix) -> Vec<u32> {
    m.row_keys
        .iter()
        .map(|k| match k {
            RowKey::Triple(t) => g.triple(*t).p.0,
            RowKey::Entity(_) => u32::MAX,
        })
        .collect()
}

/// Trains one model per kernel with ν = b/n and ranks rows by the
/// normalized ensemble. A row is abnormal when a strict majority of kernels
/// score it below zero; the abnormal set is cut to the `budget` lowest scores.
pub fn detect(
    m: &FeatureMatrix,
    kernels: &[KernelSpec],
    budget: usize,
    opts: &DetectOptions,
) -> Result<Detection> {
    let n = m.n_rows();
    if n == 0 {
        return Ok(Detection {
            nu: 0.0,
            budget,
            models: Vec::new(),
            kernel_scores: Vec::new(),
            ensemble: Vec::new(),
            votes: Vec::new(),
            anomalies: Vec::new(),
            normal: Vec::new(),
        });
    }
    if budget <= 1 || budget > n {
        return Err(Error::BudgetOutOfRange { budget, rows: n });
    }
    if kernels.is_empty() {
        return Err(Error::Config(String::from(
            "at least one kernel is required",
        )));
    }
    let nu = opts.nu.unwrap_or(budget as f64 / n as f64);
    let trained: Vec<Result<(SvmModel, Vec<f64>)>> = map_range(kernels.len(), |k| {
        let model = train_ocsvm_with(m, kernels[k], nu, &opts.solver)?;
        let d = score(&model, m)?;
        Ok((model, d))
    });
    let mut models = Vec::with_capacity(kernels.len());
    let mut kernel_scores = Vec::with_capacity(kernels.len());
    for r in trained {
        let (model, d) = r?;
        models.push(model);
        kernel_scores.push(d);
    }

    let normalized: Vec<Vec<f64>> = kernel_scores.iter().map(|d| normalize_signed(d)).collect();
    let k = kernels.len();
    let ensemble: Vec<f64> = (0..n)
        .map(|i| normalized.iter().map(|d| d[i]).sum::<f64>() / k as f64)
        .collect();
    // d <= 0 is an outlier; rows within solver precision of the margin count as on it
    let margins: Vec<f64> = kernels
        .iter()
        .map(|kernel| {
            opts.solver.tolerance
                * m.rows
                    .iter()
                    .map(|r| kernel.eval(r, r))
                    .fold(0.0f64, f64::max)
        })
        .collect();
    let votes: Vec<usize> = (0..n)
        .map(|i| {
            kernel_scores
                .iter()
                .zip(&margins)
                .filter(|(d, &eps)| d[i] <= eps)
                .count()
        })
        .collect();
    let majority = k / 2 + 1;

    let mut candidates: Vec<usize> = (0..n).filter(|&i| votes[i] >= majority).collect();
    candidates.sort_by(|&a, &b| ensemble[a].total_cmp(&ensemble[b]).then(a.cmp(&b)));
    candidates.truncate(budget);

    // rows that no kernel majority flagged form the reference mass
    let reference: Vec<usize> = (0..n).filter(|&i| votes[i] < majority).collect();
    let reference_rows: BTreeSet<&SparseRow> = reference.iter().map(|&i| &m.rows[i]).collect();

    let subject_kind = match m.kind {
        MatrixKind::FactMatrix => SubjectKind::Fact,
        MatrixKind::EntityMatrix => SubjectKind::Entity,
    };
    let mut anomalies = Vec::with_capacity(candidates.len());
    let mut in_a = alloc::vec![false; n];
    for &row in &candidates {
        if reference_rows.contains(&m.rows[row]) {
            continue;
        }
        in_a[row] = true;
        anomalies.push(AnomalyRecord {
            subject_kind,
            row,
            key: m.row_keys[row],
            ensemble_score: ensemble[row],
            kernel_scores: kernel_scores.iter().map(|d| d[row]).collect(),
            votes: votes[row],
            explanation: explain(row, m, &reference, opts.row_groups.as_deref()),
            taxo_class: None,
            correction: None,
        });
    }
    let normal = (0..n).filter(|&i| !in_a[i]).collect();
    Ok(Detection {
        nu,
        budget,
        models,
        kernel_scores,
        ensemble,
        votes,
        anomalies,
        normal,
    })
}

/// Columns where `row` departs from the majority value of the reference
/// rows, rarest disagreement first. The reference is the normal rows of the
/// same group when there are any, otherwise all normal rows. If the row
/// matches the majority pattern it is compared with its nearest normal row.
pub fn explain(
    row: usize,
    m: &FeatureMatrix,
    normal: &[usize],
    groups: Option<&[u32]>,
) -> Vec<String> {
    let same_group: Vec<usize> = match groups {
        Some(gr) => normal
            .iter()
            .copied()
            .filter(|&i| gr[i] == gr[row])
            .collect(),
        None => Vec::new(),
    };
    let reference: &[usize] = if same_group.is_empty() {
        normal
    } else {
        &same_group
    };
    if reference.is_empty() {
        return Vec::new();
    }
    let target = &m.rows[row];
    if reference.iter().any(|&i| m.rows[i] == *target) {
        return Vec::new();
    }
    let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
    for &i in reference {
        for &c in m.rows[i].columns() {
            *freq.entry(c).or_insert(0) += 1;
        }
    }
    let total = reference.len();
    // (agreeing share, column)
    let mut diffs: Vec<(f64, u32)> = Vec::new();
    for &c in target.columns() {
        let f = freq.get(&c).copied().unwrap_or(0);
        if 2 * f <= total {
            diffs.push((f as f64 / total as f64, c));
        }
    }
    for (&c, &f) in &freq {
        if 2 * f > total && !target.contains(c) {
            diffs.push(((total - f) as f64 / total as f64, c));
        }
    }
    if diffs.is_empty() {
        let nearest = reference
            .iter()
            .copied()
            .min_by_key(|&i| (m.rows[i].hamming(target), i))
            .expect("non-empty reference");
        let other = &m.rows[nearest];
        for &c in target.columns() {
            if !other.contains(c) {
                diffs.push((freq.get(&c).copied().unwrap_or(0) as f64 / total as f64, c));
            }
        }
        for &c in other.columns() {
            if !target.contains(c) {
                diffs.push(((total - freq[&c]) as f64 / total as f64, c));
            }
        }
    }
    diffs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| m.catalog[a.1 as usize].cmp(&m.catalog[b.1 as usize]))
    });
    diffs
        .into_iter()
        .map(|(_, c)| m.catalog[c as usize].clone())
        .collect()
}

/// Rule hits indexed by the triples and entities they mention.
pub struct HitIndex<'a> {
    hits: &'a [RuleHit],
    by_triple: BTreeMap<TripleId, Vec<usize>>,
    by_entity: BTreeMap<TermId, Vec<usize>>,
}

impl<'a> HitIndex<'a> {
    pub fn new(g: &KnowledgeGraph, hits: &'a [RuleHit]) -> Self {
        let mut by_triple: BTreeMap<TripleId, Vec<usize>> = BTreeMap::new();
        let mut by_entity: BTreeMap<TermId, Vec<usize>> = BTreeMap::new();
        for (i, h) in hits.iter().enumerate() {
            for &t in &h.triples {
                by_triple.entry(t).or_default().push(i);
                by_entity.entry(g.triple(t).s).or_default().push(i);
            }
            if let Some(e) = h.entity {
                by_entity.entry(e).or_default().push(i);
            }
        }
        for v in by_triple.values_mut().chain(by_entity.values_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        HitIndex {
            hits,
            by_triple,
            by_entity,
        }
    }

    /// First hit concerning `key`, in rule order.
    pub fn first(&self, key: RowKey) -> Option<&'a RuleHit> {
        let idx = match key {
            RowKey::Triple(t) => self.by_triple.get(&t),
            RowKey::Entity(e) => self.by_entity.get(&e),
        }?;
        idx.iter().map(|&i| &self.hits[i]).min_by_key(|h| h.rule)
    }
}

/// Assigns the taxonomy label of the first matching rule hit, or the
/// unclassified fallback for the record's matrix.
pub fn classify_taxo(
    record: &AnomalyRecord,
    g: &KnowledgeGraph,
    index: &HitIndex<'_>,
) -> (TaxoLabel, Correction) {
    match index.first(record.key) {
        Some(h) => {
            let literal = h
                .triples
                .first()
                .is_some_and(|&t| g.triple(t).kind == TripleKind::LiteralTriple);
            (h.label, correction_for(h.label, literal))
        }
        None => {
            let label = match record.subject_kind {
                SubjectKind::Fact => TaxoLabel::UnclassifiedStructural,
                SubjectKind::Entity => TaxoLabel::UnclassifiedContent,
            };
            (label, Correction::HumanEvaluation)
        }
    }
}

pub fn classify_all(detection: &mut Detection, g: &KnowledgeGraph, hits: &[RuleHit]) {
    let index = HitIndex::new(g, hits);
    for rec in &mut detection.anomalies {
        let (label, correction) = classify_taxo(rec, g, &index);
        rec.taxo_class = Some(label);
        rec.correction = Some(correction);
    }
}
