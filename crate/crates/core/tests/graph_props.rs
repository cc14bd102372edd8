use std::collections::BTreeSet;

use kgaudit_core::graph::{KnowledgeGraph, Pattern};
use kgaudit_core::ingest::{parse_ntriples, scan_document, FileAnomalyKind};
use kgaudit_core::rules::string_similarity;
use kgaudit_core::term::{Term, TermId};
use proptest::prelude::*;

fn term_triples() -> impl Strategy<Value = Vec<(Term, Term, Term)>> {
    let triple = (0u8..12, 0u8..4, 0u8..14, any::<bool>()).prop_map(|(s, p, o, literal)| {
        let object = if literal {
            Term::literal(format!("v{o}"))
        } else {
            Term::iri(format!("e{o}"))
        };
        (
            Term::iri(format!("e{s}")),
            Term::iri(format!("p{p}")),
            object,
        )
    });
    prop::collection::vec(triple, 0..80)
}

fn graph(input: &[(Term, Term, Term)]) -> KnowledgeGraph {
    KnowledgeGraph::from_terms(input.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn lookup_matches_scan(input in term_triples(), s in 0u8..14, p in 0u8..5, o in 0u8..15, mask in 0u8..8) {
        let g = graph(&input);
        let pick = |bit: u8, t: Term| if mask & bit != 0 { Some(g.term_id(&t).unwrap_or(TermId(u32::MAX))) } else { None };
        let pat = Pattern { s: pick(1, Term::iri(format!("e{s}"))), p: pick(2, Term::iri(format!("p{p}"))), o: pick(4, Term::iri(format!("e{o}"))) };
        let scanned: Vec<_> = g
            .triples()
            .iter()
            .filter(|t| pat.s.is_none_or(|x| x == t.s) && pat.p.is_none_or(|x| x == t.p) && pat.o.is_none_or(|x| x == t.o))
            .map(|t| t.id)
            .collect();
        prop_assert_eq!(g.lookup(pat), scanned);
    }

    #[test]
    fn neighborhoods_match_brute_force(input in term_triples()) {
        let g = graph(&input);
        for &v in g.entities() {
            let brute: BTreeSet<TermId> = g
                .triples()
                .iter()
                .filter_map(|t| if t.s == v { Some(t.o) } else if t.o == v { Some(t.s) } else { None })
                .collect();
            let found: BTreeSet<TermId> = g.neighbors(v).into_iter().collect();
            prop_assert_eq!(&found, &brute);
            for u in found.iter().filter(|&&u| g.is_entity(u)) {
                prop_assert!(g.neighbors(*u).contains(&v));
            }
        }
    }

    #[test]
    fn shuffled_input_builds_same_graph(input in term_triples(), seed in any::<u64>()) {
        let mut shuffled = input.clone();
        let n = shuffled.len();
        if n > 1 {
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
            }
        }
        let (a, b) = (graph(&input), graph(&shuffled));
        let text = |g: &KnowledgeGraph| g.triples().iter().map(|t| (g.term(t.s).clone(), g.term(t.p).clone(), g.term(t.o).clone())).collect::<Vec<_>>();
        prop_assert_eq!(text(&a), text(&b));
    }

    #[test]
    fn literal_terms_round_trip(lexical in "[ -~\\n\\t\"\\\\é]{0,20}", lang in prop::option::of("[a-z]{2}")) {
        let term = match &lang {
            Some(l) => Term::lang_literal(lexical.clone(), l.clone()),
            None => Term::literal(lexical.clone()),
        };
        let line = format!("<http://x/s> <http://x/p> {} .", term.to_ntriples());
        let doc = parse_ntriples(&line);
        prop_assert_eq!(doc.statements.len(), 1);
        let st = &doc.statements[0];
        prop_assert!(st.well_formed);
        prop_assert_eq!(doc.term(st.object.unwrap()), &term);
    }

    #[test]
    fn repeated_lines_are_reported_once(copies in 2usize..6, others in 0usize..5) {
        let mut lines: Vec<String> = (0..others).map(|i| format!("<a{i}> <p> <b> .")).collect();
        lines.extend((0..copies).map(|_| String::from("<x> <p> <y> .")));
        let found = scan_document(&parse_ntriples(&lines.join("\n")));
        prop_assert_eq!(found.len(), 1);
        prop_assert_eq!(found[0].kind, FileAnomalyKind::DuplicateStatement);
        prop_assert_eq!(found[0].lines.clone(), (others + 1..=others + copies).collect::<Vec<_>>());
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in "[a-zA-Z -]{0,12}", b in "[a-zA-Z -]{0,12}") {
        let (ab, ba) = (string_similarity(&a, &b), string_similarity(&b, &a));
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(string_similarity(&a, &a), 1.0);
    }
}
