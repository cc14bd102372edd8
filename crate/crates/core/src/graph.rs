//! Immutable, fully indexed in-memory knowledge graph.
//!
//! Terms are re-interned in sorted order on build and triples are numbered in
//! `(s, p, o)` order, so the same set of statements always yields the same
//! graph regardless of input order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ParsedDocument, RawStatement};
use crate::term::{Interner, Term, TermId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TripleId(pub u32);

impl TripleId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TripleKind {
    EntityTriple,
    LiteralTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub id: TripleId,
    pub s: TermId,
    pub p: TermId,
    pub o: TermId,
    pub kind: TripleKind,
}

/// One adjacency entry: the edge predicate, the node at the other end, and the
/// triple that carries the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub predicate: TermId,
    pub neighbor: TermId,
    pub triple: TripleId,
}

/// Triple pattern; `None` is a wildcard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Pattern {
    pub s: Option<TermId>,
    pub p: Option<TermId>,
    pub o: Option<TermId>,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    terms: Vec<Term>,
    lookup: HashMap<Term, TermId>,
    triples: Vec<Triple>,
    idx_pos: Vec<TripleId>,
    idx_osp: Vec<TripleId>,
    out_adj: Vec<Vec<Edge>>,
    in_adj: Vec<Vec<Edge>>,
    literal_by_subject: Vec<Vec<TripleId>>,
    entities: Vec<TermId>,
    predicates: Vec<TermId>,
}

impl KnowledgeGraph {
    /// Builds a graph from well-formed statements. Exact duplicates collapse.
    pub fn build(doc: &ParsedDocument) -> Result<Self> {
        Self::build_from(&doc.terms, &doc.statements)
    }

    pub fn build_from(terms: &Interner, statements: &[RawStatement]) -> Result<Self> {
        let mut triples = Vec::with_capacity(statements.len());
        for st in statements {
            match (st.well_formed, st.key()) {
                (true, Some((s, p, o))) => triples.push((
                    terms.resolve(s).clone(),
                    terms.resolve(p).clone(),
                    terms.resolve(o).clone(),
                )),
                _ => return Err(Error::MalformedStatement { line: st.line }),
            }
        }
        Self::from_terms(triples)
    }

    /// Builds from owned term triples. Subjects must be IRIs or blank nodes and
    /// predicates IRIs.
    pub fn from_terms(input: Vec<(Term, Term, Term)>) -> Result<Self> {
        for (i, (s, p, _)) in input.iter().enumerate() {
            if s.is_literal() || !p.is_iri() {
                return Err(Error::MalformedStatement { line: i + 1 });
            }
        }
        let mut all: Vec<&Term> = Vec::with_capacity(input.len() * 3);
        for (s, p, o) in &input {
            all.push(s);
            all.push(p);
            all.push(o);
        }
        all.sort_unstable();
        all.dedup();
        let terms: Vec<Term> = all.into_iter().cloned().collect();
        let lookup: HashMap<Term, TermId> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), TermId(i as u32)))
            .collect();

        let mut keys: Vec<(TermId, TermId, TermId)> = input
            .iter()
            .map(|(s, p, o)| (lookup[s], lookup[p], lookup[o]))
            .collect();
        keys.sort_unstable();
        keys.dedup();

        let triples: Vec<Triple> = keys
            .iter()
            .enumerate()
            .map(|(i, &(s, p, o))| Triple {
                id: TripleId(i as u32),
                s,
                p,
                o,
                kind: if terms[o.index()].is_literal() {
                    TripleKind::LiteralTriple
                } else {
                    TripleKind::EntityTriple
                },
            })
            .collect();

        let mut idx_pos: Vec<TripleId> = triples.iter().map(|t| t.id).collect();
        idx_pos.sort_unstable_by_key(|&id| {
            let t = &triples[id.index()];
            (t.p, t.o, t.s)
        });
        let mut idx_osp: Vec<TripleId> = triples.iter().map(|t| t.id).collect();
        idx_osp.sort_unstable_by_key(|&id| {
            let t = &triples[id.index()];
            (t.o, t.s, t.p)
        });

        let n = terms.len();
        let mut out_adj = alloc::vec![Vec::new(); n];
        let mut in_adj = alloc::vec![Vec::new(); n];
        let mut literal_by_subject = alloc::vec![Vec::new(); n];
        let mut is_entity = alloc::vec![false; n];
        let mut is_predicate = alloc::vec![false; n];
        for t in &triples {
            out_adj[t.s.index()].push(Edge {
                predicate: t.p,
                neighbor: t.o,
                triple: t.id,
            });
            in_adj[t.o.index()].push(Edge {
                predicate: t.p,
                neighbor: t.s,
                triple: t.id,
            });
            is_entity[t.s.index()] = true;
            is_predicate[t.p.index()] = true;
            match t.kind {
                TripleKind::EntityTriple => is_entity[t.o.index()] = true,
                TripleKind::LiteralTriple => literal_by_subject[t.s.index()].push(t.id),
            }
        }
        for adj in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            adj.sort_unstable_by_key(|e| (e.neighbor, e.predicate, e.triple));
        }
        let entities = (0..n)
            .filter(|&i| is_entity[i])
            .map(|i| TermId(i as u32))
            .collect();
        let predicates = (0..n)
            .filter(|&i| is_predicate[i])
            .map(|i| TermId(i as u32))
            .collect();

        Ok(KnowledgeGraph {
            terms,
            lookup,
            triples,
            idx_pos,
            idx_osp,
            out_adj,
            in_adj,
            literal_by_subject,
            entities,
            predicates,
        })
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id.index()]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_id(&self, term: &Term) -> Option<TermId> {
        self.lookup.get(term).copied()
    }

    pub fn iri_id(&self, iri: &str) -> Option<TermId> {
        self.term_id(&Term::iri(iri))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triple(&self, id: TripleId) -> &Triple {
        &self.triples[id.index()]
    }

    pub fn find(&self, s: TermId, p: TermId, o: TermId) -> Option<TripleId> {
        self.triples
            .binary_search_by_key(&(s, p, o), |t| (t.s, t.p, t.o))
            .ok()
            .map(|i| TripleId(i as u32))
    }

    /// IRIs and blank nodes that occur as a subject or as an entity object.
    pub fn entities(&self) -> &[TermId] {
        &self.entities
    }

    pub fn predicates(&self) -> &[TermId] {
        &self.predicates
    }

    pub fn is_entity(&self, id: TermId) -> bool {
        self.terms[id.index()].is_entity()
    }

    pub fn entity_triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples
            .iter()
            .filter(|t| t.kind == TripleKind::EntityTriple)
    }

    pub fn literal_triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples
            .iter()
            .filter(|t| t.kind == TripleKind::LiteralTriple)
    }

    /// Outgoing edges of `v`, sorted by neighbor, including literal objects.
    pub fn out_edges(&self, v: TermId) -> &[Edge] {
        self.out_adj
            .get(v.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Incoming edges of `v`, sorted by neighbor.
    pub fn in_edges(&self, v: TermId) -> &[Edge] {
        self.in_adj.get(v.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn literal_triples_of(&self, v: TermId) -> &[TripleId] {
        self.literal_by_subject
            .get(v.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Nodes adjacent to `v` in either direction.
    pub fn neighbors(&self, v: TermId) -> Vec<TermId> {
        let mut out: Vec<TermId> = self
            .out_edges(v)
            .iter()
            .chain(self.in_edges(v))
            .map(|e| e.neighbor)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples matching every bound slot, ordered by triple id.
    pub fn lookup(&self, pat: Pattern) -> Vec<TripleId> {
        let t = |id: &TripleId| &self.triples[id.index()];
        let mut out: Vec<TripleId> = match (pat.s, pat.p, pat.o) {
            (None, None, None) => self.triples.iter().map(|t| t.id).collect(),
            (Some(s), p, o) if o.is_none() || p.is_some() => {
                let lo = self.triples.partition_point(|x| x.s < s);
                let hi = self.triples.partition_point(|x| x.s <= s);
                self.triples[lo..hi]
                    .iter()
                    .filter(|x| p.is_none_or(|p| x.p == p) && o.is_none_or(|o| x.o == o))
                    .map(|x| x.id)
                    .collect()
            }
            (s, None, Some(o)) => {
                let lo = self.idx_osp.partition_point(|id| t(id).o < o);
                let hi = self.idx_osp.partition_point(|id| t(id).o <= o);
                self.idx_osp[lo..hi]
                    .iter()
                    .copied()
                    .filter(|id| s.is_none_or(|s| t(id).s == s))
                    .collect()
            }
            (None, Some(p), o) => {
                let lo = self.idx_pos.partition_point(|id| t(id).p < p);
                let hi = self.idx_pos.partition_point(|id| t(id).p <= p);
                self.idx_pos[lo..hi]
                    .iter()
                    .copied()
                    .filter(|id| o.is_none_or(|o| t(id).o == o))
                    .collect()
            }
            (Some(_), _, _) => unreachable!(),
        };
        out.sort_unstable();
        out
    }

    /// Indexes in (s,p,o), (p,o,s) and (o,s,p) order, as triple ids.
    pub fn index_contents(&self) -> (Vec<TripleId>, &[TripleId], &[TripleId]) {
        (
            self.triples.iter().map(|t| t.id).collect(),
            &self.idx_pos,
            &self.idx_osp,
        )
    }

    /// Resolves a pattern given as terms; unknown terms give an empty result.
    pub fn lookup_terms(
        &self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Vec<TripleId> {
        let mut pat = Pattern::default();
        for (slot, term) in [(&mut pat.s, s), (&mut pat.p, p), (&mut pat.o, o)] {
            if let Some(term) = term {
                match self.term_id(term) {
                    Some(id) => *slot = Some(id),
                    None => return Vec::new(),
                }
            }
        }
        self.lookup(pat)
    }
}

/// Per-entity triple counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityDegree {
    pub entity: TermId,
    /// Triples with the entity as subject or object.
    pub total: usize,
    pub out_degree: usize,
    pub in_degree: usize,
    pub literal_count: usize,
    pub out_by_predicate: BTreeMap<TermId, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub per_entity: Vec<EntityDegree>,
    /// Aggregates over `total`; `None` for a graph without entities.
    pub total: Option<Aggregate>,
    /// Median literal count over entities with at least one literal.
    pub median_literal_count: Option<f64>,
}

impl DegreeStats {
    pub fn get(&self, v: TermId) -> Option<&EntityDegree> {
        self.per_entity
            .binary_search_by_key(&v, |d| d.entity)
            .ok()
            .map(|i| &self.per_entity[i])
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

pub fn degree_stats(g: &KnowledgeGraph) -> DegreeStats {
    let mut per_entity = Vec::with_capacity(g.entities().len());
    for &v in g.entities() {
        let out = g.out_edges(v);
        let inc = g.in_edges(v);
        let mut by_pred = BTreeMap::new();
        for e in out {
            *by_pred.entry(e.predicate).or_insert(0) += 1;
        }
        per_entity.push(EntityDegree {
            entity: v,
            total: out.len() + inc.len() - out.iter().filter(|e| e.neighbor == v).count(),
            out_degree: out.len(),
            in_degree: inc.len(),
            literal_count: g.literal_triples_of(v).len(),
            out_by_predicate: by_pred,
        });
    }
    let totals: Vec<f64> = per_entity.iter().map(|d| d.total as f64).collect();
    let total = if totals.is_empty() {
        None
    } else {
        let n = totals.len() as f64;
        let mean = totals.iter().sum::<f64>() / n;
        let var = totals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let mut sorted = totals.clone();
        Some(Aggregate {
            mean,
            median: median(&mut sorted).unwrap_or(0.0),
            std_dev: libm::sqrt(var),
        })
    };
    let mut lits: Vec<f64> = per_entity
        .iter()
        .filter(|d| d.literal_count > 0)
        .map(|d| d.literal_count as f64)
        .collect();
    DegreeStats {
        per_entity,
        total,
        median_literal_count: median(&mut lits),
    }
}
