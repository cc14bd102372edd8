//! Corroborative paths between the endpoints of a triple.
//!
//! A triple `(s, p, o)` is described by the binary set of alternative ways its
//! subject and object are connected: half paths (the subject uses `p` with
//! another object), direct alternative edges, and two-step paths through an
//! intermediate entity. Every step records its direction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph, TripleId, TripleKind};
use crate::matrix::{FeatureMatrix, MatrixKind, RowKey, SparseRow};
use crate::par::map_range;
use crate::term::TermId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Fwd,
    Inv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub predicate: TermId,
    pub direction: Direction,
}

impl Step {
    pub fn fwd(predicate: TermId) -> Step {
        Step {
            predicate,
            direction: Direction::Fwd,
        }
    }

    pub fn inv(predicate: TermId) -> Step {
        Step {
            predicate,
            direction: Direction::Inv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathKind {
    HalfSp,
    HalfS,
    AltDirect,
    Length2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PathSignature {
    /// The subject uses the triple's own predicate with another object
    /// (`Fwd`), or with the object-side variant, another subject uses it with
    /// the same object (`Inv`).
    HalfSp(Step),
    /// The subject also carries this other predicate.
    HalfS(TermId),
    AltDirect(Step),
    Length2(Step, Step),
}

impl PathSignature {
    pub fn kind(&self) -> PathKind {
        match self {
            PathSignature::HalfSp(_) => PathKind::HalfSp,
            PathSignature::HalfS(_) => PathKind::HalfS,
            PathSignature::AltDirect(_) => PathKind::AltDirect,
            PathSignature::Length2(..) => PathKind::Length2,
        }
    }

    /// Unique text form, e.g. `alt:^<marriedTo>` or `len2:<citizenOf>/<locatedIn>`.
    pub fn canonical(&self, g: &KnowledgeGraph) -> String {
        let mut out = String::new();
        let step = |out: &mut String, s: &Step| {
            if s.direction == Direction::Inv {
                out.push('^');
            }
            let _ = write!(out, "<{}>", g.term(s.predicate).text());
        };
        match self {
            PathSignature::HalfSp(s) => {
                out.push_str("half:");
                step(&mut out, s);
            }
            PathSignature::HalfS(p) => {
                let _ = write!(out, "halfs:<{}>", g.term(*p).text());
            }
            PathSignature::AltDirect(s) => {
                out.push_str("alt:");
                step(&mut out, s);
            }
            PathSignature::Length2(a, b) => {
                out.push_str("len2:");
                step(&mut out, a);
                out.push('/');
                step(&mut out, b);
            }
        }
        out
    }
}

/// Maximum path length considered: 0.5 (half paths), 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PathDepth {
    Half,
    One,
    Two,
}

impl PathDepth {
    pub fn parse(s: &str) -> Result<PathDepth> {
        match s {
            "0.5" => Ok(PathDepth::Half),
            "1" => Ok(PathDepth::One),
            "2" => Ok(PathDepth::Two),
            other => Err(Error::Config(alloc::format!(
                "path depth must be 0.5, 1 or 2, got {other}"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PathDepth::Half => "0.5",
            PathDepth::One => "1",
            PathDepth::Two => "2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpaConfig {
    pub depth: PathDepth,
    /// Also emit an object-side half path when another subject reaches the
    /// same object through the triple's predicate.
    pub symmetric_half: bool,
    /// Upper bound on distinct intermediate entities examined per triple.
    pub fan_out_cap: Option<usize>,
    /// Columns present in fewer rows are dropped from the catalog.
    pub min_support: usize,
}

impl Default for CpaConfig {
    fn default() -> Self {
        CpaConfig {
            depth: PathDepth::Two,
            symmetric_half: false,
            fan_out_cap: None,
            min_support: 1,
        }
    }
}

/// Edges between `v` and `target` as steps oriented from `v`.
fn steps_between(g: &KnowledgeGraph, v: TermId, target: TermId, out: &mut Vec<Step>) {
    for e in edges_to(g.out_edges(v), target) {
        out.push(Step::fwd(e.predicate));
    }
    for e in edges_to(g.in_edges(v), target) {
        out.push(Step::inv(e.predicate));
    }
}

fn edges_to(adj: &[Edge], target: TermId) -> &[Edge] {
    let lo = adj.partition_point(|e| e.neighbor < target);
    let hi = adj.partition_point(|e| e.neighbor <= target);
    &adj[lo..hi]
}

/// Entity neighbors of `v` other than `s` and `o`, ascending and distinct.
fn intermediates(g: &KnowledgeGraph, v: TermId, s: TermId, o: TermId) -> Vec<TermId> {
    let mut zs: Vec<TermId> = g
        .out_edges(v)
        .iter()
        .chain(g.in_edges(v))
        .map(|e| e.neighbor)
        .filter(|&z| z != s && z != o && g.is_entity(z))
        .collect();
    zs.sort_unstable();
    zs.dedup();
    zs
}

/// All corroborating path signatures for the triple `(s, own_p, o)`.
pub fn enumerate_paths(
    g: &KnowledgeGraph,
    s: TermId,
    o: TermId,
    own_p: TermId,
    config: &CpaConfig,
) -> BTreeSet<PathSignature> {
    let mut out = BTreeSet::new();
    if s.index() >= g.terms().len() || o.index() >= g.terms().len() || !g.is_entity(s) {
        return out;
    }

    if g.out_edges(s)
        .iter()
        .any(|e| e.predicate == own_p && e.neighbor != o && g.is_entity(e.neighbor))
    {
        out.insert(PathSignature::HalfSp(Step::fwd(own_p)));
    }
    if config.symmetric_half
        && g.in_edges(o)
            .iter()
            .any(|e| e.predicate == own_p && e.neighbor != s)
    {
        out.insert(PathSignature::HalfSp(Step::inv(own_p)));
    }
    if config.depth == PathDepth::Half {
        return out;
    }

    let mut direct = Vec::new();
    steps_between(g, s, o, &mut direct);
    for step in direct {
        let own = step.predicate == own_p && (step.direction == Direction::Fwd || s == o);
        if !own {
            out.insert(PathSignature::AltDirect(step));
        }
    }
    if config.depth == PathDepth::One || !g.is_entity(o) {
        return out;
    }

    let mut first = Vec::new();
    let mut second = Vec::new();
    let from_subject = config.fan_out_cap.is_some()
        || g.out_edges(s).len() + g.in_edges(s).len() <= g.out_edges(o).len() + g.in_edges(o).len();
    let mut zs = intermediates(g, if from_subject { s } else { o }, s, o);
    if let Some(cap) = config.fan_out_cap {
        zs.truncate(cap);
    }
    for z in zs {
        first.clear();
        second.clear();
        // first: s -> z steps, second: z -> o steps
        steps_between(g, s, z, &mut first);
        if first.is_empty() {
            continue;
        }
        steps_between(g, z, o, &mut second);
        for a in &first {
            for b in &second {
                out.insert(PathSignature::Length2(*a, *b));
            }
        }
    }
    out
}

/// Rows of path signatures for the given triples plus the column catalog.
fn signature_rows(
    g: &KnowledgeGraph,
    triples: &[TripleId],
    config: &CpaConfig,
) -> Vec<BTreeSet<PathSignature>> {
    map_range(triples.len(), |i| {
        let t = g.triple(triples[i]);
        enumerate_paths(g, t.s, t.o, t.p, config)
    })
}

/// Assembles a matrix from per-row feature sets keyed by canonical name.
pub(crate) fn assemble<K: Ord + Copy>(
    g: &KnowledgeGraph,
    kind: MatrixKind,
    row_keys: Vec<RowKey>,
    rows: &[BTreeSet<K>],
    name: impl Fn(&KnowledgeGraph, &K) -> String,
    min_support: usize,
) -> FeatureMatrix {
    let mut support: BTreeMap<K, usize> = BTreeMap::new();
    for row in rows {
        for f in row {
            *support.entry(*f).or_insert(0) += 1;
        }
    }
    let mut named: Vec<(String, K)> = support
        .into_iter()
        .filter(|&(_, n)| n >= min_support)
        .map(|(f, _)| (name(g, &f), f))
        .collect();
    named.sort();
    let index: BTreeMap<K, u32> = named
        .iter()
        .enumerate()
        .map(|(i, (_, f))| (*f, i as u32))
        .collect();
    let sparse = rows
        .iter()
        .map(|row| {
            SparseRow::from_unsorted(row.iter().filter_map(|f| index.get(f).copied()).collect())
        })
        .collect();
    FeatureMatrix {
        kind,
        row_keys,
        catalog: named.into_iter().map(|(n, _)| n).collect(),
        rows: sparse,
    }
}

/// Fact matrix with one row per entity triple, in triple-id order.
pub fn build_fact_matrix(g: &KnowledgeGraph, config: &CpaConfig) -> FeatureMatrix {
    let triples: Vec<TripleId> = g
        .triples()
        .iter()
        .filter(|t| t.kind == TripleKind::EntityTriple)
        .map(|t| t.id)
        .collect();
    let rows = signature_rows(g, &triples, config);
    assemble(
        g,
        MatrixKind::FactMatrix,
        triples.iter().map(|&t| RowKey::Triple(t)).collect(),
        &rows,
        |g, sig| sig.canonical(g),
        config.min_support,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_ntriples;

    const FIG1: &str = "<John> <livesIn> <Canada> .\n<John> <citizenOf> <Canada> .\n<John> <citizenOf> <Ontario> .\n<Ontario> <locatedIn> <Canada> .\n<Mary> <livesIn> <Canada> .\n";

    fn graph(text: &str) -> KnowledgeGraph {
        KnowledgeGraph::build(&parse_ntriples(text)).unwrap()
    }

    #[test]
    fn lives_in_paths() {
        let g = graph(FIG1);
        let id = |s: &str| g.iri_id(s).unwrap();
        let paths = enumerate_paths(
            &g,
            id("John"),
            id("Canada"),
            id("livesIn"),
            &CpaConfig::default(),
        );
        let expected: BTreeSet<_> = [
            PathSignature::AltDirect(Step::fwd(id("citizenOf"))),
            PathSignature::Length2(Step::fwd(id("citizenOf")), Step::fwd(id("locatedIn"))),
        ]
        .into_iter()
        .collect();
        assert_eq!(paths, expected);
    }

    #[test]
    fn half_path_for_repeated_predicate() {
        let g = graph(FIG1);
        let id = |s: &str| g.iri_id(s).unwrap();
        let paths = enumerate_paths(
            &g,
            id("John"),
            id("Canada"),
            id("citizenOf"),
            &CpaConfig::default(),
        );
        assert!(paths.contains(&PathSignature::HalfSp(Step::fwd(id("citizenOf")))));
        assert!(paths.contains(&PathSignature::AltDirect(Step::fwd(id("livesIn")))));
    }

    #[test]
    fn isolated_pair_has_no_alternatives() {
        let g = graph("<a> <p> <b> .\n<c> <q> <d> .");
        let id = |s: &str| g.iri_id(s).unwrap();
        assert!(enumerate_paths(&g, id("a"), id("b"), id("p"), &CpaConfig::default()).is_empty());
    }

    #[test]
    fn fact_matrix_lives_in_row() {
        let g = graph(FIG1);
        let m = build_fact_matrix(&g, &CpaConfig::default());
        assert!(m.is_consistent());
        assert_eq!(m.n_rows(), 5);
        let t = g
            .find(
                g.iri_id("John").unwrap(),
                g.iri_id("livesIn").unwrap(),
                g.iri_id("Canada").unwrap(),
            )
            .unwrap();
        let row = m.row_of(RowKey::Triple(t)).unwrap();
        let names: Vec<&str> = m.column_names(row).collect();
        assert_eq!(names, ["alt:<citizenOf>", "len2:<citizenOf>/<locatedIn>"]);
        let mut sorted = m.catalog.clone();
        sorted.sort();
        assert_eq!(sorted, m.catalog);
    }

    #[test]
    fn inverse_own_predicate_counts_as_alternative() {
        let g = graph("<a> <knows> <b> .\n<b> <knows> <a> .");
        let id = |s: &str| g.iri_id(s).unwrap();
        let paths = enumerate_paths(&g, id("a"), id("b"), id("knows"), &CpaConfig::default());
        assert_eq!(
            paths.into_iter().collect::<Vec<_>>(),
            [PathSignature::AltDirect(Step::inv(id("knows")))]
        );
    }

    #[test]
    fn catalog_grows_with_depth() {
        let g = graph(FIG1);
        let shallow = build_fact_matrix(
            &g,
            &CpaConfig {
                depth: PathDepth::One,
                ..Default::default()
            },
        );
        let deep = build_fact_matrix(&g, &CpaConfig::default());
        assert!(shallow.catalog.iter().all(|c| deep.catalog.contains(c)));
        let half = build_fact_matrix(
            &g,
            &CpaConfig {
                depth: PathDepth::Half,
                ..Default::default()
            },
        );
        assert_eq!(half.catalog, ["half:<citizenOf>"]);
    }

    #[test]
    fn symmetric_half_flag() {
        let g = graph(FIG1);
        let id = |s: &str| g.iri_id(s).unwrap();
        let cfg = CpaConfig {
            symmetric_half: true,
            ..Default::default()
        };
        let paths = enumerate_paths(&g, id("Mary"), id("Canada"), id("livesIn"), &cfg);
        assert!(paths.contains(&PathSignature::HalfSp(Step::inv(id("livesIn")))));
    }

    #[test]
    fn min_support_prunes_rare_columns() {
        let g = graph(FIG1);
        let m = build_fact_matrix(
            &g,
            &CpaConfig {
                min_support: 2,
                ..Default::default()
            },
        );
        assert!(m.is_consistent());
        assert!(m.catalog.len() < build_fact_matrix(&g, &CpaConfig::default()).catalog.len());
    }
}
