use std::collections::BTreeSet;

use kgaudit_core::kgc::{rank_metrics, train_transe, EncodedTriple, TransEConfig, Vocabulary};
use kgaudit_core::synth::{gen_synthetic, SchemaSpec};

fn encoded_family() -> (Vec<EncodedTriple>, usize, usize) {
    let kg = gen_synthetic(&SchemaSpec::family().scaled(0.15), 2).unwrap();
    let vocab = Vocabulary::from_graph(&kg.graph);
    let triples: Vec<EncodedTriple> = kg
        .graph
        .entity_triples()
        .filter_map(|t| vocab.encode(&kg.graph, t.id))
        .collect();
    (triples, vocab.entities.len(), vocab.relations.len())
}

#[test]
fn loss_falls_over_training() {
    let (triples, entities, relations) = encoded_family();
    let model = train_transe(
        &triples,
        entities,
        relations,
        &TransEConfig {
            epochs: 60,
            ..TransEConfig::default()
        },
    )
    .unwrap();
    let losses = &model.epoch_losses;
    assert_eq!(losses.len(), 60);
    let head: f64 = losses[..5].iter().sum::<f64>() / 5.0;
    let tail: f64 = losses[losses.len() - 5..].iter().sum::<f64>() / 5.0;
    assert!(tail < 0.8 * head, "first {head:.3} last {tail:.3}");
}

#[test]
fn rank_metrics_stay_in_bounds() {
    let (triples, entities, relations) = encoded_family();
    let split = triples.len() * 9 / 10;
    let (train, test) = triples.split_at(split);
    let known: BTreeSet<EncodedTriple> = triples.iter().copied().collect();
    for epochs in [1, 30] {
        let model = train_transe(
            train,
            entities,
            relations,
            &TransEConfig {
                epochs,
                ..TransEConfig::default()
            },
        )
        .unwrap();
        let m = rank_metrics(&model, test, &known);
        assert_eq!(m.queries, 2 * test.len());
        assert!((0.0..=1.0).contains(&m.hits_at_10));
        // the worst filtered rank is the entity count
        assert!(m.mrr >= 1.0 / entities as f64 && m.mrr <= 1.0);
    }
}
