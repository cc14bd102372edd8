use std::collections::BTreeSet;

use kgaudit_core::graph::KnowledgeGraph;
use kgaudit_core::synth::{
    catalog_for, corrupt_facts, corrupt_literals, gen_synthetic, CorruptionKind, SchemaSpec,
};
use kgaudit_core::typegen::{
    build_predicate_profiles, infer_entity_types, DeclaredTypes, TypeLabel,
};
use proptest::prelude::*;

fn triple_text(g: &KnowledgeGraph) -> Vec<String> {
    g.triples()
        .iter()
        .map(|t| {
            format!(
                "{} {} {}",
                g.term(t.s).to_ntriples(),
                g.term(t.p).to_ntriples(),
                g.term(t.o).to_ntriples()
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        let spec = SchemaSpec::family().scaled(0.15);
        let (a, b) = (gen_synthetic(&spec, seed).unwrap(), gen_synthetic(&spec, seed).unwrap());
        prop_assert_eq!(a.to_ntriples(&spec.base), b.to_ntriples(&spec.base));
    }

    #[test]
    fn corruption_reverts_to_the_clean_graph(seed in any::<u64>(), rate in 0.05f64..0.4) {
        let kg = gen_synthetic(&SchemaSpec::family().scaled(0.15), seed).unwrap();
        let catalog = kg.catalog(0.5).unwrap();
        let c = corrupt_facts(&kg.graph, &catalog, rate, &[CorruptionKind::ObjectSwap, CorruptionKind::PredicateSwap], seed).unwrap();
        let again = corrupt_facts(&kg.graph, &catalog, rate, &[CorruptionKind::ObjectSwap, CorruptionKind::PredicateSwap], seed).unwrap();
        prop_assert_eq!(triple_text(&c.graph), triple_text(&again.graph));
        let restored = c.log.revert(&c.graph).unwrap();
        prop_assert_eq!(triple_text(&restored), triple_text(&kg.graph));

        let l = corrupt_literals(&kg.graph, &catalog, 4, 0.5, seed).unwrap();
        prop_assert_eq!(triple_text(&l.log.revert(&l.graph).unwrap()), triple_text(&kg.graph));
    }

    #[test]
    fn raising_theta_never_adds_types(seed in any::<u64>(), keep_every in 2usize..5) {
        let kg = gen_synthetic(&SchemaSpec::family().scaled(0.15), seed).unwrap();
        let mut partial = DeclaredTypes::default();
        for (i, (entity, labels)) in kg.declared.0.iter().enumerate() {
            if i % keep_every == 0 {
                for l in labels {
                    partial.insert(entity.clone(), l.clone());
                }
            }
        }
        let profiles = build_predicate_profiles(&kg.graph, &partial);
        let loose = infer_entity_types(&profiles, &kg.graph, 0.55).unwrap();
        let strict = infer_entity_types(&profiles, &kg.graph, 0.85).unwrap();
        for &e in kg.graph.entities() {
            let types = |c: &kgaudit_core::typegen::TypeCatalog| c.types_of(e).map(|(t, _)| t.clone()).collect::<BTreeSet<TypeLabel>>();
            prop_assert!(types(&strict).is_subset(&types(&loose)));
        }
    }
}

#[test]
fn declared_catalog_covers_every_generated_entity() {
    let kg = gen_synthetic(&SchemaSpec::family().scaled(0.2), 9).unwrap();
    let catalog = catalog_for(&kg.graph, &kg.declared, 0.5).unwrap();
    for &e in kg.graph.entities() {
        assert!(catalog.has_declared_type(e), "{:?}", kg.graph.term(e));
    }
}
