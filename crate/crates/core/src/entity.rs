//! Entity feature matrix: neighborhood predicates, literal quality bits, and
//! the union of the entity's fact rows.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::cpa::Direction;
use crate::graph::{degree_stats, KnowledgeGraph};
use crate::matrix::{FeatureMatrix, MatrixKind, RowKey, SparseRow};
use crate::par::map_range;
use crate::term::{DatatypeTag, TermId};
use crate::typegen::{TypeCatalog, TypeLabel};

pub const CONTENT_COLUMNS: [&str; 4] = [
    "content:has_empty_literal",
    "content:has_invalid_literal",
    "content:has_redundant_sp",
    "content:rich_entity",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContentFeatureVector {
    pub has_empty_literal: bool,
    pub has_invalid_literal: bool,
    pub has_redundant_sp: bool,
    pub rich_entity: bool,
}

impl ContentFeatureVector {
    pub fn bits(&self) -> [bool; 4] {
        [
            self.has_empty_literal,
            self.has_invalid_literal,
            self.has_redundant_sp,
            self.rich_entity,
        ]
    }
}

/// Literal quality bits for every entity. Entities without literal triples get
/// the all-zero vector.
pub fn content_features(
    g: &KnowledgeGraph,
    catalog: &TypeCatalog,
) -> BTreeMap<TermId, ContentFeatureVector> {
    let median = degree_stats(g).median_literal_count.unwrap_or(0.0);
    g.entities()
        .iter()
        .map(|&e| {
            let mut v = ContentFeatureVector::default();
            let literals = g.literal_triples_of(e);
            for &tid in literals {
                let t = g.triple(tid);
                let tag = g.term(t.o).datatype().unwrap_or(DatatypeTag::Other);
                if tag == DatatypeTag::Empty {
                    v.has_empty_literal = true;
                } else if catalog
                    .expected_datatype(t.p)
                    .is_some_and(|expected| expected != tag)
                {
                    v.has_invalid_literal = true;
                }
                if g.out_edges(e).iter().filter(|x| x.predicate == t.p).count() > 1 {
                    v.has_redundant_sp = true;
                }
            }
            v.rich_entity = !literals.is_empty() && literals.len() as f64 > median;
            (e, v)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum StructuralFeature {
    Neighbor(TermId, Direction),
    HalfS(TermId),
}

impl StructuralFeature {
    fn name(&self, g: &KnowledgeGraph) -> String {
        match *self {
            StructuralFeature::Neighbor(p, Direction::Fwd) => {
                alloc::format!("out:<{}>", g.term(p).text())
            }
            StructuralFeature::Neighbor(p, Direction::Inv) => {
                alloc::format!("in:<{}>", g.term(p).text())
            }
            StructuralFeature::HalfS(p) => alloc::format!("halfs:<{}>", g.term(p).text()),
        }
    }
}

/// Entity matrix with the column ranges of its three blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMatrix {
    pub matrix: FeatureMatrix,
    pub structural: Range<usize>,
    pub content: Range<usize>,
    pub paths: Range<usize>,
}

fn structural_features(g: &KnowledgeGraph, e: TermId) -> BTreeSet<StructuralFeature> {
    let mut set = BTreeSet::new();
    let mut out_preds = BTreeSet::new();
    for edge in g.out_edges(e) {
        set.insert(StructuralFeature::Neighbor(edge.predicate, Direction::Fwd));
        out_preds.insert(edge.predicate);
    }
    for edge in g.in_edges(e) {
        set.insert(StructuralFeature::Neighbor(edge.predicate, Direction::Inv));
    }
    if out_preds.len() > 1 {
        set.extend(out_preds.into_iter().map(StructuralFeature::HalfS));
    }
    set
}

/// Builds the entity matrix over every entity of `g`, in term-id order.
/// `fx` must be the fact matrix of the same graph.
pub fn build_entity_matrix(
    g: &KnowledgeGraph,
    catalog: &TypeCatalog,
    fx: &FeatureMatrix,
) -> EntityMatrix {
    let entities = g.entities();
    let structural: Vec<BTreeSet<StructuralFeature>> =
        map_range(entities.len(), |i| structural_features(g, entities[i]));
    let mut names: Vec<(String, StructuralFeature)> = structural
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|f| (f.name(g), f))
        .collect();
    names.sort();
    let index: BTreeMap<StructuralFeature, u32> = names
        .iter()
        .enumerate()
        .map(|(i, (_, f))| (*f, i as u32))
        .collect();

    let n_struct = names.len();
    let content_start = n_struct;
    let paths_start = n_struct + CONTENT_COLUMNS.len();
    let content = content_features(g, catalog);

    let mut fx_rows_by_subject: BTreeMap<TermId, Vec<usize>> = BTreeMap::new();
    for (row, key) in fx.row_keys.iter().enumerate() {
        if let RowKey::Triple(t) = key {
            fx_rows_by_subject
                .entry(g.triple(*t).s)
                .or_default()
                .push(row);
        }
    }

    let rows: Vec<SparseRow> = map_range(entities.len(), |i| {
        let e = entities[i];
        let mut cols: Vec<u32> = structural[i].iter().map(|f| index[f]).collect();
        if let Some(v) = content.get(&e) {
            for (j, bit) in v.bits().into_iter().enumerate() {
                if bit {
                    cols.push((content_start + j) as u32);
                }
            }
        }
        let mut union = SparseRow::new();
        for &r in fx_rows_by_subject.get(&e).map(Vec::as_slice).unwrap_or(&[]) {
            union = union.union(&fx.rows[r]);
        }
        cols.extend(union.columns().iter().map(|&c| c + paths_start as u32));
        SparseRow::from_unsorted(cols)
    });

    let mut catalog_names: Vec<String> = names.into_iter().map(|(n, _)| n).collect();
    catalog_names.extend(CONTENT_COLUMNS.iter().map(|c| c.to_string()));
    catalog_names.extend(fx.catalog.iter().cloned());
    EntityMatrix {
        matrix: FeatureMatrix {
            kind: MatrixKind::EntityMatrix,
            row_keys: entities.iter().map(|&e| RowKey::Entity(e)).collect(),
            catalog: catalog_names,
            rows,
        },
        structural: 0..n_struct,
        content: content_start..paths_start,
        paths: paths_start..paths_start + fx.n_cols(),
    }
}

/// Entity-matrix rows grouped by the entity's first informative type;
/// untyped entities fall under [`TypeLabel::Other`].
pub fn rows_by_type(m: &FeatureMatrix, catalog: &TypeCatalog) -> BTreeMap<TypeLabel, Vec<usize>> {
    let mut groups: BTreeMap<TypeLabel, Vec<usize>> = BTreeMap::new();
    for (row, key) in m.row_keys.iter().enumerate() {
        let label = match key {
            RowKey::Entity(e) => catalog.informative_types(*e).into_iter().next(),
            RowKey::Triple(_) => None,
        };
        groups
            .entry(label.unwrap_or(TypeLabel::Other))
            .or_default()
            .push(row);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpa::{build_fact_matrix, CpaConfig};
    use crate::ingest::parse_ntriples;
    use crate::typegen::{build_predicate_profiles, DeclaredTypes};

    const FIG1: &str = "<John> <livesIn> <Canada> .\n<John> <citizenOf> <Canada> .\n<John> <citizenOf> <Ontario> .\n<Ontario> <locatedIn> <Canada> .\n<Mary> <livesIn> <Canada> .\n<Kim> <name> \"Kim\" .\n";

    fn setup(text: &str) -> (KnowledgeGraph, TypeCatalog) {
        let g = KnowledgeGraph::build(&parse_ntriples(text)).unwrap();
        let catalog = build_predicate_profiles(&g, &DeclaredTypes::default());
        (g, catalog)
    }

    #[test]
    fn empty_and_invalid_literals() {
        let mut text = String::new();
        for i in 0..5 {
            text.push_str(&alloc::format!("<p{i}> <bornOn> \"190{i}-01-01\" .\n"));
        }
        text.push_str("<Plato> <bornOn> \"Athens\" .\n<SQL> <hasDefinition> \"\" .\n");
        let (g, catalog) = setup(&text);
        let content = content_features(&g, &catalog);
        assert!(content[&g.iri_id("Plato").unwrap()].has_invalid_literal);
        assert!(!content[&g.iri_id("Plato").unwrap()].has_empty_literal);
        assert!(content[&g.iri_id("SQL").unwrap()].has_empty_literal);
        assert!(!content[&g.iri_id("SQL").unwrap()].has_invalid_literal);
        assert!(!content[&g.iri_id("p0").unwrap()].has_invalid_literal);
    }

    #[test]
    fn rich_entity_against_median() {
        let text = "<a> <l1> \"x\" .\n<a> <l2> \"y\" .\n<a> <l3> \"z\" .\n<b> <l1> \"x\" .\n<b> <l2> \"y\" .\n<b> <l3> \"z\" .\n<c> <l1> \"q\" .\n";
        let (g, catalog) = setup(text);
        let content = content_features(&g, &catalog);
        assert!(!content[&g.iri_id("c").unwrap()].rich_entity);
        assert!(!content[&g.iri_id("a").unwrap()].rich_entity);
    }

    #[test]
    fn entity_rows_and_disjunction() {
        let (g, catalog) = setup(FIG1);
        let fx = build_fact_matrix(&g, &CpaConfig::default());
        let fy = build_entity_matrix(&g, &catalog, &fx);
        assert!(fy.matrix.is_consistent());
        assert_eq!(fy.matrix.n_rows(), g.entities().len());
        assert_eq!(&fy.matrix.catalog[fy.paths.clone()], fx.catalog.as_slice());
        // Kim has only a literal: a row exists with an empty path block
        let kim = fy
            .matrix
            .row_of(RowKey::Entity(g.iri_id("Kim").unwrap()))
            .unwrap();
        assert!(fy.matrix.rows[kim]
            .columns()
            .iter()
            .all(|&c| !fy.paths.contains(&(c as usize))));
        // Mary is subject of one triple: path block equals that fact row
        let mary = g.iri_id("Mary").unwrap();
        let t = g
            .find(
                mary,
                g.iri_id("livesIn").unwrap(),
                g.iri_id("Canada").unwrap(),
            )
            .unwrap();
        let fx_row = &fx.rows[fx.row_of(RowKey::Triple(t)).unwrap()];
        let fy_row = &fy.matrix.rows[fy.matrix.row_of(RowKey::Entity(mary)).unwrap()];
        let block: Vec<u32> = fy_row
            .columns()
            .iter()
            .filter(|&&c| fy.paths.contains(&(c as usize)))
            .map(|&c| c - fy.paths.start as u32)
            .collect();
        assert_eq!(block, fx_row.columns());
    }

    #[test]
    fn half_s_needs_two_predicates() {
        let (g, catalog) = setup(FIG1);
        let fx = build_fact_matrix(&g, &CpaConfig::default());
        let fy = build_entity_matrix(&g, &catalog, &fx);
        let john = fy
            .matrix
            .row_of(RowKey::Entity(g.iri_id("John").unwrap()))
            .unwrap();
        let mary = fy
            .matrix
            .row_of(RowKey::Entity(g.iri_id("Mary").unwrap()))
            .unwrap();
        assert!(fy.matrix.column_names(john).any(|c| c == "halfs:<livesIn>"));
        assert!(!fy
            .matrix
            .column_names(mary)
            .any(|c| c.starts_with("halfs:")));
        assert!(fy.matrix.column_names(mary).any(|c| c == "out:<livesIn>"));
    }
}
