//! TransE link prediction with filtered ranking metrics, and the
//! Original / Random / AD removal ablation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, TripleId};
use crate::par::map_range;
use crate::synth::CorruptionLog;
use crate::term::TermId;

pub const HITS_CUTOFF: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Norm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransEConfig {
    pub dim: usize,
    pub margin: f64,
    pub norm: Norm,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TransEConfig {
    fn default() -> Self {
        TransEConfig {
            dim: 32,
            margin: 1.0,
            norm: Norm::L2,
            epochs: 200,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

impl TransEConfig {
    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Config(alloc::format!(
                "embedding dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if !(self.margin >= 0.0 && self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(String::from(
                "margin must be >= 0 and learning rate > 0",
            )));
        }
        Ok(())
    }
}

/// Triple over dense entity and relation indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EncodedTriple {
    pub head: u32,
    pub relation: u32,
    pub tail: u32,
}

/// Dense index spaces for the entities and predicates of entity triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub entities: Vec<TermId>,
    pub relations: Vec<TermId>,
    entity_index: BTreeMap<TermId, u32>,
    relation_index: BTreeMap<TermId, u32>,
}

impl Vocabulary {
    pub fn from_graph(g: &KnowledgeGraph) -> Self {
        let mut entities = BTreeSet::new();
        let mut relations = BTreeSet::new();
        for t in g.entity_triples() {
            entities.insert(t.s);
            entities.insert(t.o);
            relations.insert(t.p);
        }
        let entities: Vec<TermId> = entities.into_iter().collect();
        let relations: Vec<TermId> = relations.into_iter().collect();
        Vocabulary {
            entity_index: entities
                .iter()
                .enumerate()
                .map(|(i, &e)| (e, i as u32))
                .collect(),
            relation_index: relations
                .iter()
                .enumerate()
                .map(|(i, &r)| (r, i as u32))
                .collect(),
            entities,
            relations,
        }
    }

    pub fn encode(&self, g: &KnowledgeGraph, id: TripleId) -> Option<EncodedTriple> {
        let t = g.triple(id);
        Some(EncodedTriple {
            head: *self.entity_index.get(&t.s)?,
            relation: *self.relation_index.get(&t.p)?,
            tail: *self.entity_index.get(&t.o)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingModel {
    pub dim: usize,
    pub norm: Norm,
    pub margin: f64,
    /// Row-major, `dim` values per entity.
    pub entity_vectors: Vec<f64>,
    pub relation_vectors: Vec<f64>,
    /// Mean margin loss of each epoch.
    pub epoch_losses: Vec<f64>,
}

impl EmbeddingModel {
    pub fn n_entities(&self) -> usize {
        self.entity_vectors.len() / self.dim
    }

    fn entity(&self, e: u32) -> &[f64] {
        let at = e as usize * self.dim;
        &self.entity_vectors[at..at + self.dim]
    }

    fn relation(&self, r: u32) -> &[f64] {
        let at = r as usize * self.dim;
        &self.relation_vectors[at..at + self.dim]
    }

    /// ‖head + relation − tail‖ under the model norm; lower is more plausible.
    pub fn distance(&self, head: u32, relation: u32, tail: u32) -> f64 {
        let (h, r, t) = (
            self.entity(head),
            self.relation(relation),
            self.entity(tail),
        );
        translation_norm(self.norm, (0..self.dim).map(|i| h[i] + r[i] - t[i]))
    }

    /// Plausibility score, `-distance`.
    pub fn score(&self, triple: EncodedTriple) -> f64 {
        -self.distance(triple.head, triple.relation, triple.tail)
    }
}

fn translation_norm(norm: Norm, diff: impl Iterator<Item = f64>) -> f64 {
    match norm {
        Norm::L1 => diff.map(libm::fabs).sum(),
        Norm::L2 => libm::sqrt(diff.map(|x| x * x).sum()),
    }
}

fn normalize(v: &mut [f64]) {
    let len = libm::sqrt(v.iter().map(|x| x * x).sum());
    if len > 0.0 {
        v.iter_mut().for_each(|x| *x /= len);
    }
}

/// Margin-ranking TransE trained by SGD, one corrupted triple per positive
/// (head or tail replaced uniformly, each with probability one half).
pub fn train_transe(
    train: &[EncodedTriple],
    n_entities: usize,
    n_relations: usize,
    config: &TransEConfig,
) -> Result<EmbeddingModel> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if n_entities < 2 {
        return Err(Error::Config(String::from(
            "link prediction needs at least two entities",
        )));
    }
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 6.0 / libm::sqrt(dim as f64);
    let mut entity_vectors: Vec<f64> = (0..n_entities * dim)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    let mut relation_vectors: Vec<f64> = (0..n_relations * dim)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    relation_vectors.chunks_mut(dim).for_each(normalize);

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut grad_pos = vec![0.0f64; dim];
    let mut grad_neg = vec![0.0f64; dim];
    for _ in 0..config.epochs {
        entity_vectors.chunks_mut(dim).for_each(normalize);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let pos = train[i];
            let mut neg = pos;
            let corrupt_head = rng.gen_bool(0.5);
            loop {
                let e = rng.gen_range(0..n_entities as u32);
                if corrupt_head && e != pos.head {
                    neg.head = e;
                    break;
                }
                if !corrupt_head && e != pos.tail {
                    neg.tail = e;
                    break;
                }
            }
            let d_pos = distance_of(&entity_vectors, &relation_vectors, dim, config.norm, pos);
            let d_neg = distance_of(&entity_vectors, &relation_vectors, dim, config.norm, neg);
            let loss = config.margin + d_pos - d_neg;
            if loss <= 0.0 {
                continue;
            }
            total += loss;
            gradient(
                &entity_vectors,
                &relation_vectors,
                config.norm,
                pos,
                d_pos,
                &mut grad_pos,
            );
            gradient(
                &entity_vectors,
                &relation_vectors,
                config.norm,
                neg,
                d_neg,
                &mut grad_neg,
            );
            // descend on d_pos, ascend on d_neg
            for (triple, grad, step) in [
                (pos, &grad_pos, config.learning_rate),
                (neg, &grad_neg, -config.learning_rate),
            ] {
                let (h, r, t) = (
                    triple.head as usize * dim,
                    triple.relation as usize * dim,
                    triple.tail as usize * dim,
                );
                for k in 0..dim {
                    entity_vectors[h + k] -= step * grad[k];
                    relation_vectors[r + k] -= step * grad[k];
                    entity_vectors[t + k] += step * grad[k];
                }
            }
        }
        epoch_losses.push(total / train.len() as f64);
    }
    entity_vectors.chunks_mut(dim).for_each(normalize);
    Ok(EmbeddingModel {
        dim,
        norm: config.norm,
        margin: config.margin,
        entity_vectors,
        relation_vectors,
        epoch_losses,
    })
}

/// d‖h + r − t‖ / d(h + r − t), written into `out`.
fn gradient(
    entities: &[f64],
    relations: &[f64],
    norm: Norm,
    t: EncodedTriple,
    distance: f64,
    out: &mut [f64],
) {
    let dim = out.len();
    let (h, r, o) = (
        t.head as usize * dim,
        t.relation as usize * dim,
        t.tail as usize * dim,
    );
    for (k, g) in out.iter_mut().enumerate() {
        let x = entities[h + k] + relations[r + k] - entities[o + k];
        *g = match norm {
            Norm::L1 if x > 0.0 => 1.0,
            Norm::L1 if x < 0.0 => -1.0,
            Norm::L1 => 0.0,
            Norm::L2 if distance > 0.0 => x / distance,
            Norm::L2 => 0.0,
        };
    }
}

fn distance_of(
    entities: &[f64],
    relations: &[f64],
    dim: usize,
    norm: Norm,
    t: EncodedTriple,
) -> f64 {
    let (h, r, o) = (
        t.head as usize * dim,
        t.relation as usize * dim,
        t.tail as usize * dim,
    );
    translation_norm(
        norm,
        (0..dim).map(|k| entities[h + k] + relations[r + k] - entities[o + k]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankMetrics {
    pub hits_at_10: f64,
    pub mrr: f64,
    /// Number of ranked queries (two per test triple).
    pub queries: usize,
}

/// Filtered rank of the true entity: one plus the candidates strictly closer,
/// plus half the tied candidates, skipping candidates that form a known triple.
fn filtered_rank(
    model: &EmbeddingModel,
    query: EncodedTriple,
    replace_head: bool,
    known: &BTreeSet<EncodedTriple>,
) -> f64 {
    let truth = model.distance(query.head, query.relation, query.tail);
    let (mut better, mut tied) = (0usize, 0usize);
    for e in 0..model.n_entities() as u32 {
        let candidate = if replace_head {
            EncodedTriple { head: e, ..query }
        } else {
            EncodedTriple { tail: e, ..query }
        };
        if candidate == query || known.contains(&candidate) {
            continue;
        }
        let d = model.distance(candidate.head, candidate.relation, candidate.tail);
        if d < truth {
            better += 1;
        } else if d == truth {
            tied += 1;
        }
    }
    1.0 + better as f64 + tied as f64 / 2.0
}

/// Filtered Hits@10 and MRR over head and tail prediction for every test
/// triple. `known` holds every triple that must not count as a competitor.
pub fn rank_metrics(
    model: &EmbeddingModel,
    test: &[EncodedTriple],
    known: &BTreeSet<EncodedTriple>,
) -> RankMetrics {
    let ranks: Vec<[f64; 2]> = map_range(test.len(), |i| {
        [
            filtered_rank(model, test[i], false, known),
            filtered_rank(model, test[i], true, known),
        ]
    });
    let queries = ranks.len() * 2;
    if queries == 0 {
        return RankMetrics {
            hits_at_10: 0.0,
            mrr: 0.0,
            queries,
        };
    }
    let all = ranks.iter().flatten();
    let hits = all.clone().filter(|&&r| r <= HITS_CUTOFF).count();
    let mrr = all.map(|r| 1.0 / r).sum::<f64>() / queries as f64;
    RankMetrics {
        hits_at_10: hits as f64 / queries as f64,
        mrr,
        queries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Particular {
    Original,
    Random,
    #[serde(rename = "AD")]
    Ad,
}

impl Particular {
    pub const ALL: [Particular; 3] = [Particular::Original, Particular::Random, Particular::Ad];

    pub fn as_str(self) -> &'static str {
        match self {
            Particular::Original => "Original",
            Particular::Random => "Random",
            Particular::Ad => "AD",
        }
    }
}

/// One row of the comparison table: `(model, measure, particular, value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub model: String,
    pub measure: String,
    pub particular: Particular,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub transe: TransEConfig,
    /// Share of clean entity triples held out for evaluation.
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            transe: TransEConfig::default(),
            test_fraction: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub metrics: BTreeMap<Particular, RankMetrics>,
    pub test_triples: usize,
    pub train_triples: usize,
    /// Triples removed from the shared training split by each arm.
    pub removed: BTreeMap<Particular, usize>,
}

impl AblationReport {
    pub fn metric(&self, particular: Particular) -> RankMetrics {
        self.metrics[&particular]
    }
}

/// Trains and evaluates three arms on one split: the corrupted graph as is,
/// minus the detector's anomalies, and minus as many random triples.
pub fn ablation_run(
    g: &KnowledgeGraph,
    log: &CorruptionLog,
    anomalies: &[TripleId],
    config: &AblationConfig,
) -> Result<AblationReport> {
    if !(config.test_fraction > 0.0 && config.test_fraction < 1.0) {
        return Err(Error::Config(alloc::format!(
            "test fraction must lie in (0, 1), got {}",
            config.test_fraction
        )));
    }
    let vocab = Vocabulary::from_graph(g);
    let corrupted = log.corrupted_triples();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let entity_ids: Vec<TripleId> = g.entity_triples().map(|t| t.id).collect();
    let mut clean: Vec<TripleId> = entity_ids
        .iter()
        .copied()
        .filter(|id| !corrupted.contains(id))
        .collect();
    clean.shuffle(&mut rng);
    let n_test = libm::round(clean.len() as f64 * config.test_fraction) as usize;
    let test_ids: BTreeSet<TripleId> = clean[..n_test].iter().copied().collect();
    let train_ids: Vec<TripleId> = entity_ids
        .iter()
        .copied()
        .filter(|id| !test_ids.contains(id))
        .collect();

    let flagged: BTreeSet<TripleId> = anomalies.iter().copied().collect();
    let ad_removed: BTreeSet<TripleId> = train_ids
        .iter()
        .copied()
        .filter(|id| flagged.contains(id))
        .collect();
    let mut shuffled = train_ids.clone();
    shuffled.shuffle(&mut rng);
    let random_removed: BTreeSet<TripleId> = shuffled.into_iter().take(ad_removed.len()).collect();

    let encode = |ids: &mut dyn Iterator<Item = TripleId>| -> Vec<EncodedTriple> {
        ids.filter_map(|id| vocab.encode(g, id)).collect()
    };
    let arms: [(Particular, Vec<EncodedTriple>); 3] = [
        (Particular::Original, encode(&mut train_ids.iter().copied())),
        (
            Particular::Random,
            encode(
                &mut train_ids
                    .iter()
                    .copied()
                    .filter(|id| !random_removed.contains(id)),
            ),
        ),
        (
            Particular::Ad,
            encode(
                &mut train_ids
                    .iter()
                    .copied()
                    .filter(|id| !ad_removed.contains(id)),
            ),
        ),
    ];
    let test = encode(&mut test_ids.iter().copied());
    let known: BTreeSet<EncodedTriple> = encode(&mut entity_ids.iter().copied())
        .into_iter()
        .collect();

    let transe = TransEConfig {
        seed: config.seed,
        ..config.transe
    };
    let results: Vec<Result<RankMetrics>> = map_range(arms.len(), |i| {
        let model = train_transe(
            &arms[i].1,
            vocab.entities.len(),
            vocab.relations.len(),
            &transe,
        )?;
        Ok(rank_metrics(&model, &test, &known))
    });
    let mut metrics = BTreeMap::new();
    let mut rows = Vec::new();
    for ((particular, _), result) in arms.iter().zip(results) {
        let m = result?;
        metrics.insert(*particular, m);
        for (measure, value) in [("Hits@10", m.hits_at_10), ("MRR", m.mrr)] {
            rows.push(AblationRow {
                model: String::from("TransE"),
                measure: String::from(measure),
                particular: *particular,
                value,
            });
        }
    }
    let removed = BTreeMap::from([
        (Particular::Original, 0),
        (Particular::Random, random_removed.len()),
        (Particular::Ad, ad_removed.len()),
    ]);
    Ok(AblationReport {
        rows,
        metrics,
        test_triples: test.len(),
        train_triples: train_ids.len(),
        removed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn chain(n: usize) -> Vec<EncodedTriple> {
        (0..n as u32 - 1)
            .map(|i| EncodedTriple {
                head: i,
                relation: 0,
                tail: i + 1,
            })
            .collect()
    }

    #[test]
    fn chain_positive_outscores_corruptions() {
        let train = chain(3);
        let model = train_transe(
            &train,
            3,
            1,
            &TransEConfig {
                dim: 8,
                ..Default::default()
            },
        )
        .unwrap();
        for t in &train {
            let swapped = EncodedTriple {
                head: t.tail,
                tail: t.head,
                ..*t
            };
            assert!(model.score(*t) > model.score(swapped));
        }
    }

    #[test]
    fn same_seed_same_loss() {
        let cfg = TransEConfig {
            epochs: 20,
            ..Default::default()
        };
        let a = train_transe(&chain(6), 6, 1, &cfg).unwrap();
        let b = train_transe(&chain(6), 6, 1, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_margin_loss_vanishes() {
        let cfg = TransEConfig {
            margin: 0.0,
            epochs: 100,
            ..Default::default()
        };
        let model = train_transe(&chain(5), 5, 1, &cfg).unwrap();
        assert!(*model.epoch_losses.last().unwrap() < 1e-3);
    }

    #[test]
    fn memorized_small_graph_has_full_hits() {
        let triples: Vec<EncodedTriple> = (0..10u32)
            .map(|i| EncodedTriple {
                head: i,
                relation: i % 2,
                tail: (i + 3) % 10,
            })
            .collect();
        let model = train_transe(&triples, 10, 2, &TransEConfig::default()).unwrap();
        let m = rank_metrics(&model, &triples, &BTreeSet::new());
        assert_eq!(m.hits_at_10, 1.0);
        assert!(m.mrr > 0.0 && m.mrr <= 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            train_transe(&[], 3, 1, &TransEConfig::default()),
            Err(Error::EmptyTrainingSet)
        ));
        let cfg = TransEConfig {
            dim: 1,
            ..Default::default()
        };
        assert!(train_transe(&chain(3), 3, 1, &cfg).is_err());
    }

    #[test]
    fn zero_removal_arms_agree() {
        let iri = |s: &str| Term::iri(alloc::format!("http://x/{s}"));
        let triples = (0..40)
            .map(|i| {
                (
                    iri(&alloc::format!("e{i}")),
                    iri(if i % 2 == 0 { "r" } else { "q" }),
                    iri(&alloc::format!("e{}", (i * 7 + 1) % 40)),
                )
            })
            .collect();
        let g = KnowledgeGraph::from_terms(triples).unwrap();
        let log = CorruptionLog {
            seed: 0,
            entries: Vec::new(),
        };
        let cfg = AblationConfig {
            transe: TransEConfig {
                epochs: 10,
                ..Default::default()
            },
            test_fraction: 0.2,
            seed: 1,
        };
        let report = ablation_run(&g, &log, &[], &cfg).unwrap();
        let original = report.metric(Particular::Original);
        assert_eq!(report.metric(Particular::Random), original);
        assert_eq!(report.metric(Particular::Ad), original);
        assert_eq!(report.rows.len(), 6);
    }
}
