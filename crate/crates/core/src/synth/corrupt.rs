//! Labeled corruption of existing graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, TripleId, TripleKind};
use crate::term::{DatatypeTag, Term, TermId};
use crate::typegen::{Slot, TypeCatalog, TypeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CorruptionKind {
    ObjectSwap,
    PredicateSwap,
    LiteralTypeCorrupt,
    LiteralRemove,
    ContradictionInject,
    DuplicateInject,
    RedundancyInject,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 7] = [
        CorruptionKind::ObjectSwap,
        CorruptionKind::PredicateSwap,
        CorruptionKind::LiteralTypeCorrupt,
        CorruptionKind::LiteralRemove,
        CorruptionKind::ContradictionInject,
        CorruptionKind::DuplicateInject,
        CorruptionKind::RedundancyInject,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorruptionKind::ObjectSwap => "OBJECT_SWAP",
            CorruptionKind::PredicateSwap => "PREDICATE_SWAP",
            CorruptionKind::LiteralTypeCorrupt => "LITERAL_TYPE_CORRUPT",
            CorruptionKind::LiteralRemove => "LITERAL_REMOVE",
            CorruptionKind::ContradictionInject => "CONTRADICTION_INJECT",
            CorruptionKind::DuplicateInject => "DUPLICATE_INJECT",
            CorruptionKind::RedundancyInject => "REDUNDANCY_INJECT",
        }
    }

    pub fn parse(s: &str) -> Result<CorruptionKind> {
        CorruptionKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(alloc::format!("unknown corruption kind {s:?}")))
    }
}

/// Fact corruption kinds used when none are requested: random entity
/// replacement in the object slot.
pub const DEFAULT_FACT_KINDS: [CorruptionKind; 1] = [CorruptionKind::ObjectSwap];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermTriple {
    pub s: Term,
    pub p: Term,
    pub o: Term,
}

impl TermTriple {
    fn of(g: &KnowledgeGraph, s: TermId, p: TermId, o: TermId) -> TermTriple {
        TermTriple {
            s: g.term(s).clone(),
            p: g.term(p).clone(),
            o: g.term(o).clone(),
        }
    }

    pub fn to_ntriples(&self) -> String {
        alloc::format!(
            "{} {} {} .",
            self.s.to_ntriples(),
            self.p.to_ntriples(),
            self.o.to_ntriples()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionEntry {
    /// Id of the corrupted triple in the corrupted graph.
    pub triple: TripleId,
    pub kind: CorruptionKind,
    /// `None` for injected triples.
    pub original: Option<TermTriple>,
    pub corrupted: TermTriple,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorruptionLog {
    pub seed: u64,
    pub entries: Vec<CorruptionEntry>,
}

impl CorruptionLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn corrupted_triples(&self) -> BTreeSet<TripleId> {
        self.entries.iter().map(|e| e.triple).collect()
    }

    /// Subjects of corrupted triples, resolved in `g`.
    pub fn corrupted_subjects(&self, g: &KnowledgeGraph) -> BTreeSet<TermId> {
        self.entries
            .iter()
            .filter_map(|e| g.term_id(&e.corrupted.s))
            .collect()
    }

    /// Undoes every entry, newest first.
    pub fn revert(&self, g: &KnowledgeGraph) -> Result<KnowledgeGraph> {
        let mut set: BTreeSet<TermTriple> = g
            .triples()
            .iter()
            .map(|t| TermTriple::of(g, t.s, t.p, t.o))
            .collect();
        for e in self.entries.iter().rev() {
            set.remove(&e.corrupted);
            if let Some(orig) = &e.original {
                set.insert(orig.clone());
            }
        }
        KnowledgeGraph::from_terms(set.into_iter().map(|t| (t.s, t.p, t.o)).collect())
    }
}

#[derive(Debug, Clone)]
pub struct Corrupted {
    pub graph: KnowledgeGraph,
    pub log: CorruptionLog,
    pub warnings: Vec<String>,
}

type Key = (TermId, TermId, TermId);

/// A planted triple whose object is either an existing term or an index into `new_terms`.
type PlannedTriple = (TermId, TermId, Result<TermId, usize>);

/// Pending edits against the source graph, tracked in its term space.
struct Edits<'a> {
    g: &'a KnowledgeGraph,
    /// Every triple that exists or has existed, so nothing is ever recreated.
    seen: HashSet<Key>,
    new_terms: Vec<Term>,
    ops: Vec<(CorruptionKind, Option<Key>, PlannedTriple)>,
}

impl<'a> Edits<'a> {
    fn new(g: &'a KnowledgeGraph) -> Self {
        let seen = g.triples().iter().map(|t| (t.s, t.p, t.o)).collect();
        Edits {
            g,
            seen,
            new_terms: Vec::new(),
            ops: Vec::new(),
        }
    }

    fn exists(&self, key: Key) -> bool {
        self.seen.contains(&key)
    }

    fn record(&mut self, kind: CorruptionKind, original: Option<Key>, new: Key) {
        self.seen.insert(new);
        self.ops.push((kind, original, (new.0, new.1, Ok(new.2))));
    }

    /// Replacement with an object literal that may not exist in the graph yet.
    fn record_literal(&mut self, kind: CorruptionKind, original: Key, literal: Term) {
        let object = match self.g.term_id(&literal) {
            Some(id) => Ok(id),
            None => {
                self.new_terms.push(literal);
                Err(self.new_terms.len() - 1)
            }
        };
        if let Ok(id) = object {
            self.seen.insert((original.0, original.1, id));
        }
        self.ops
            .push((kind, Some(original), (original.0, original.1, object)));
    }

    fn literal_taken(&self, s: TermId, p: TermId, literal: &Term) -> bool {
        match self.g.term_id(literal) {
            Some(id) => self.exists((s, p, id)),
            None => self.ops.iter().any(|(_, _, (s2, p2, o))| {
                *s2 == s && *p2 == p && matches!(o, Err(i) if self.new_terms[*i] == *literal)
            }),
        }
    }

    fn finish(self, seed: u64, warnings: Vec<String>) -> Result<Corrupted> {
        let g = self.g;
        let term = |id: TermId| g.term(id).clone();
        let removed: HashSet<Key> = self.ops.iter().filter_map(|op| op.1).collect();
        let mut triples: Vec<(Term, Term, Term)> = g
            .triples()
            .iter()
            .filter(|t| !removed.contains(&(t.s, t.p, t.o)))
            .map(|t| (term(t.s), term(t.p), term(t.o)))
            .collect();
        let mut pending = Vec::with_capacity(self.ops.len());
        for (kind, original, (s, p, o)) in &self.ops {
            let object = match o {
                Ok(id) => term(*id),
                Err(i) => self.new_terms[*i].clone(),
            };
            let corrupted = TermTriple {
                s: term(*s),
                p: term(*p),
                o: object,
            };
            triples.push((
                corrupted.s.clone(),
                corrupted.p.clone(),
                corrupted.o.clone(),
            ));
            let original = original.map(|(s, p, o)| TermTriple::of(g, s, p, o));
            pending.push((*kind, original, corrupted));
        }
        let graph = KnowledgeGraph::from_terms(triples)?;
        let mut entries = Vec::with_capacity(pending.len());
        for (kind, original, corrupted) in pending {
            let id = graph
                .lookup_terms(Some(&corrupted.s), Some(&corrupted.p), Some(&corrupted.o))
                .first()
                .copied()
                .expect("corrupted triple is present");
            entries.push(CorruptionEntry {
                triple: id,
                kind,
                original,
                corrupted,
            });
        }
        Ok(Corrupted {
            graph,
            log: CorruptionLog { seed, entries },
            warnings,
        })
    }
}

fn target_count(rate: f64, population: usize) -> usize {
    libm::ceil(rate * population as f64 - 1e-9).max(0.0) as usize
}

/// Schema view derived from the type catalog.
struct SchemaView<'a> {
    g: &'a KnowledgeGraph,
    catalog: &'a TypeCatalog,
    entity_predicates: Vec<TermId>,
    majority: BTreeMap<(TermId, Slot), BTreeSet<TypeLabel>>,
    /// Predicate pairs observed on one entity pair: (min p, same direction, max p).
    pair_keys: BTreeSet<(TermId, bool, TermId)>,
}

impl<'a> SchemaView<'a> {
    fn new(g: &'a KnowledgeGraph, catalog: &'a TypeCatalog) -> Self {
        let entity_predicates: BTreeSet<TermId> = g.entity_triples().map(|t| t.p).collect();
        let mut majority = BTreeMap::new();
        for &p in &entity_predicates {
            for slot in [Slot::Subject, Slot::Object] {
                majority.insert((p, slot), catalog.slot_majority(p, slot));
            }
        }
        let mut pair_keys = BTreeSet::new();
        for &a in g.entities() {
            let mut between: BTreeMap<TermId, Vec<(TermId, bool)>> = BTreeMap::new();
            for e in g.out_edges(a) {
                if e.neighbor > a && g.is_entity(e.neighbor) {
                    between
                        .entry(e.neighbor)
                        .or_default()
                        .push((e.predicate, true));
                }
            }
            for e in g.in_edges(a) {
                if e.neighbor > a {
                    between
                        .entry(e.neighbor)
                        .or_default()
                        .push((e.predicate, false));
                }
            }
            for edges in between.values() {
                for i in 0..edges.len() {
                    for j in i + 1..edges.len() {
                        let ((p1, f1), (p2, f2)) = (edges[i], edges[j]);
                        pair_keys.insert((p1.min(p2), f1 == f2, p1.max(p2)));
                    }
                }
            }
        }
        SchemaView {
            g,
            catalog,
            entity_predicates: entity_predicates.into_iter().collect(),
            majority,
            pair_keys,
        }
    }

    fn slot_fits(&self, p: TermId, slot: Slot, x: TermId) -> bool {
        let expected = &self.majority[&(p, slot)];
        let types = self.catalog.informative_types(x);
        expected.is_empty() || types.is_empty() || types.iter().any(|t| expected.contains(t))
    }

    fn fits(&self, s: TermId, p: TermId, o: TermId) -> bool {
        self.slot_fits(p, Slot::Subject, s) && self.slot_fits(p, Slot::Object, o)
    }

    /// Entities whose types rule them out of `p`'s object slot.
    fn foreign_objects(&self, p: TermId) -> Vec<TermId> {
        let expected = &self.majority[&(p, Slot::Object)];
        if expected.is_empty() {
            return Vec::new();
        }
        self.g
            .entities()
            .iter()
            .copied()
            .filter(|&e| {
                let types = self.catalog.informative_types(e);
                !types.is_empty() && types.is_disjoint(expected)
            })
            .collect()
    }
}

fn object_swap(
    edits: &mut Edits<'_>,
    view: &SchemaView<'_>,
    cache: &mut BTreeMap<TermId, Vec<TermId>>,
    key: Key,
    rng: &mut ChaCha8Rng,
) -> bool {
    let (s, p, o) = key;
    let pool = cache.entry(p).or_insert_with(|| view.foreign_objects(p));
    for _ in 0..32 {
        let Some(&candidate) = pool.choose(rng) else {
            return false;
        };
        if candidate != s && candidate != o && !edits.exists((s, p, candidate)) {
            edits.record(CorruptionKind::ObjectSwap, Some(key), (s, p, candidate));
            return true;
        }
    }
    false
}

fn predicate_swap(
    edits: &mut Edits<'_>,
    view: &SchemaView<'_>,
    key: Key,
    rng: &mut ChaCha8Rng,
) -> bool {
    let (s, p, o) = key;
    let candidates: Vec<TermId> = view
        .entity_predicates
        .iter()
        .copied()
        .filter(|&q| q != p && !view.fits(s, q, o) && !edits.exists((s, q, o)))
        .collect();
    match candidates.choose(rng) {
        Some(&q) => {
            edits.record(CorruptionKind::PredicateSwap, Some(key), (s, q, o));
            true
        }
        None => false,
    }
}

fn contradiction_inject(
    edits: &mut Edits<'_>,
    view: &SchemaView<'_>,
    key: Key,
    rng: &mut ChaCha8Rng,
) -> bool {
    let (s, p, o) = key;
    if s == o {
        return false;
    }
    let mut candidates = Vec::new();
    for &q in &view.entity_predicates {
        for forward in [true, false] {
            if q == p && forward {
                continue;
            }
            let new = if forward { (s, q, o) } else { (o, q, s) };
            let pair_key = (p.min(q), forward, p.max(q));
            if !view.pair_keys.contains(&pair_key)
                && view.fits(new.0, q, new.2)
                && !edits.exists(new)
            {
                candidates.push(new);
            }
        }
    }
    match candidates.choose(rng) {
        Some(&new) => {
            edits.record(CorruptionKind::ContradictionInject, None, new);
            true
        }
        None => false,
    }
}

/// Swaps one letter near the middle, keeping the form recognisably the same.
fn near_copy(lexical: &str, rng: &mut ChaCha8Rng) -> Option<String> {
    let chars: Vec<char> = lexical.chars().collect();
    let letters: Vec<usize> = (0..chars.len())
        .filter(|&i| chars[i].is_ascii_lowercase())
        .collect();
    if chars.len() < 6 || letters.is_empty() {
        return None;
    }
    let at = letters[letters.len() / 2];
    let mut out = chars.clone();
    let shift = rng.gen_range(1..26u8);
    out[at] = (b'a' + (chars[at] as u8 - b'a' + shift) % 26) as char;
    Some(out.into_iter().collect())
}

fn redundancy_inject(edits: &mut Edits<'_>, key: Key, rng: &mut ChaCha8Rng) -> bool {
    let g = edits.g;
    let s = key.0;
    let mut literals: Vec<TripleId> = g
        .literal_triples_of(s)
        .iter()
        .copied()
        .filter(|&t| g.term(g.triple(t).o).datatype() == Some(DatatypeTag::String))
        .collect();
    literals.shuffle(rng);
    for t in literals {
        let t = *g.triple(t);
        let Some(copy) = near_copy(g.term(t.o).text(), rng) else {
            continue;
        };
        let literal = Term::literal(copy);
        if edits.literal_taken(t.s, t.p, &literal) {
            continue;
        }
        let object = match g.term_id(&literal) {
            Some(id) => Ok(id),
            None => {
                edits.new_terms.push(literal);
                Err(edits.new_terms.len() - 1)
            }
        };
        edits
            .ops
            .push((CorruptionKind::RedundancyInject, None, (t.s, t.p, object)));
        return true;
    }
    false
}

/// Alters exactly ⌈rate·|entity triples|⌉ distinct entity triples, cycling
/// through `kinds`. A kind that cannot apply to a triple hands over to the
/// next one; a triple no kind can alter is skipped.
pub fn corrupt_facts(
    g: &KnowledgeGraph,
    catalog: &TypeCatalog,
    rate: f64,
    kinds: &[CorruptionKind],
    seed: u64,
) -> Result<Corrupted> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Config(alloc::format!(
            "corruption rate must lie in (0, 1), got {rate}"
        )));
    }
    let kinds: Vec<CorruptionKind> = if kinds.is_empty() {
        DEFAULT_FACT_KINDS.to_vec()
    } else {
        kinds.to_vec()
    };
    if let Some(k) = kinds.iter().find(|k| {
        matches!(
            k,
            CorruptionKind::LiteralTypeCorrupt
                | CorruptionKind::LiteralRemove
                | CorruptionKind::DuplicateInject
        )
    }) {
        return Err(Error::Config(alloc::format!(
            "{} is not a fact corruption",
            k.as_str()
        )));
    }
    let mut order: Vec<Key> = g.entity_triples().map(|t| (t.s, t.p, t.o)).collect();
    let target = target_count(rate, order.len());
    if target == 0 {
        return Err(Error::NothingToCorrupt);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let view = SchemaView::new(g, catalog);
    let mut edits = Edits::new(g);
    let mut pools = BTreeMap::new();
    let mut done = 0usize;
    for key in order {
        if done == target {
            break;
        }
        for step in 0..kinds.len() {
            let kind = kinds[(done + step) % kinds.len()];
            let applied = match kind {
                CorruptionKind::ObjectSwap => {
                    object_swap(&mut edits, &view, &mut pools, key, &mut rng)
                }
                CorruptionKind::PredicateSwap => predicate_swap(&mut edits, &view, key, &mut rng),
                CorruptionKind::ContradictionInject => {
                    contradiction_inject(&mut edits, &view, key, &mut rng)
                }
                CorruptionKind::RedundancyInject => redundancy_inject(&mut edits, key, &mut rng),
                _ => false,
            };
            if applied {
                done += 1;
                break;
            }
        }
    }
    if done < target {
        return Err(Error::NothingToCorrupt);
    }
    edits.finish(seed, Vec::new())
}

/// A lexical form whose heuristic tag differs from `avoid`.
fn junk_for(avoid: DatatypeTag, rng: &mut ChaCha8Rng) -> String {
    if matches!(
        avoid,
        DatatypeTag::String | DatatypeTag::Url | DatatypeTag::Other
    ) {
        rng.gen_range(10_000..100_000u32).to_string()
    } else {
        let mut s = String::from("x");
        for _ in 0..7 {
            s.push((b'a' + rng.gen_range(0..26u8)) as char);
        }
        s
    }
}

/// Picks up to `per_type` entities of each inferred type and corrupts
/// ⌈fraction·k⌉ of each one's `k` literal triples, alternating between a
/// datatype-violating value and an empty one.
pub fn corrupt_literals(
    g: &KnowledgeGraph,
    catalog: &TypeCatalog,
    per_type: usize,
    fraction: f64,
    seed: u64,
) -> Result<Corrupted> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(alloc::format!(
            "literal fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut by_type: BTreeMap<TypeLabel, Vec<TermId>> = BTreeMap::new();
    for &e in g.entities() {
        if g.literal_triples_of(e).is_empty() {
            continue;
        }
        if let Some(label) = catalog.informative_types(e).into_iter().next() {
            by_type.entry(label).or_default().push(e);
        }
    }
    if by_type.is_empty() {
        return Err(Error::NothingToCorrupt);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let mut edits = Edits::new(g);
    let mut counter = 0usize;
    for (label, mut members) in by_type {
        if members.len() < per_type {
            warnings.push(alloc::format!(
                "only {} {} entities with literals, wanted {per_type}",
                members.len(),
                label.as_str()
            ));
        }
        members.shuffle(&mut rng);
        members.truncate(per_type);
        members.sort_unstable();
        for e in members {
            let mut literals = g.literal_triples_of(e).to_vec();
            let take = target_count(fraction, literals.len());
            literals.shuffle(&mut rng);
            for t in literals.into_iter().take(take) {
                let t = *g.triple(t);
                debug_assert_eq!(t.kind, TripleKind::LiteralTriple);
                let original = g.term(t.o);
                let tag = original.datatype().unwrap_or(DatatypeTag::Other);
                let kind = if counter.is_multiple_of(2) {
                    CorruptionKind::LiteralTypeCorrupt
                } else {
                    CorruptionKind::LiteralRemove
                };
                counter += 1;
                let mut attempt = 0usize;
                let replacement = loop {
                    let candidate = match kind {
                        CorruptionKind::LiteralTypeCorrupt => {
                            let avoid = catalog.expected_datatype(t.p).unwrap_or(tag);
                            Term::literal(junk_for(avoid, &mut rng))
                        }
                        _ => Term::literal(" ".repeat(attempt)),
                    };
                    if !edits.literal_taken(t.s, t.p, &candidate) && candidate != *original {
                        break candidate;
                    }
                    attempt += 1;
                };
                edits.record_literal(kind, (t.s, t.p, t.o), replacement);
            }
        }
    }
    edits.finish(seed, warnings)
}

/// Line numbers (1-based, in the output) of planted stream anomalies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedLines {
    /// Each planted copy, paired with the line it repeats.
    pub duplicates: Vec<(usize, usize)>,
    pub missing: Vec<usize>,
}

/// The first two whitespace-separated tokens of a statement line. Literal
/// objects may contain spaces, so the cut is made after the predicate.
fn subject_and_predicate(line: &str) -> &str {
    let line = line.trim_start();
    let mut end = 0;
    let mut tokens = 0;
    let mut in_token = false;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if in_token {
                tokens += 1;
                if tokens == 2 {
                    break;
                }
            }
            in_token = false;
        } else {
            in_token = true;
            end = i + c.len_utf8();
        }
    }
    &line[..end]
}

/// Truncates `missing` lines to lose their last element in place and appends
/// verbatim copies of `duplicates` other lines at the end.
pub fn plant_stream_anomalies(
    lines: &[String],
    duplicates: usize,
    missing: usize,
    seed: u64,
) -> Result<(Vec<String>, PlantedLines)> {
    if duplicates + missing > lines.len() {
        return Err(Error::NothingToCorrupt);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = (0..lines.len()).collect();
    picks.shuffle(&mut rng);
    let (dup_src, rest) = picks.split_at(duplicates);
    let broken: BTreeSet<usize> = rest[..missing].iter().copied().collect();
    let mut out: Vec<String> = Vec::with_capacity(lines.len() + duplicates);
    let mut planted = PlantedLines::default();
    for (i, line) in lines.iter().enumerate() {
        if broken.contains(&i) {
            out.push(alloc::format!("{} .", subject_and_predicate(line)));
            planted.missing.push(out.len());
        } else {
            out.push(line.clone());
        }
    }
    let mut sources: Vec<usize> = dup_src.to_vec();
    sources.sort_unstable();
    for src in sources {
        out.push(lines[src].clone());
        planted.duplicates.push((out.len(), src + 1));
    }
    Ok((out, planted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_synthetic, SchemaSpec};

    fn fixture() -> (KnowledgeGraph, TypeCatalog) {
        let kg = gen_synthetic(&SchemaSpec::family().scaled(0.2), 11).unwrap();
        let catalog = kg.catalog(0.5).unwrap();
        (kg.graph, catalog)
    }

    #[test]
    fn exact_count_and_reversible() {
        let (g, catalog) = fixture();
        let n = g.entity_triples().count();
        let kinds = [
            CorruptionKind::ObjectSwap,
            CorruptionKind::PredicateSwap,
            CorruptionKind::ContradictionInject,
        ];
        let c = corrupt_facts(&g, &catalog, 0.1, &kinds, 5).unwrap();
        assert_eq!(c.log.len(), target_count(0.1, n));
        for k in kinds {
            assert!(c.log.entries.iter().any(|e| e.kind == k));
        }
        for e in &c.log.entries {
            let t = c.graph.triple(e.triple);
            assert_eq!(c.graph.term(t.s), &e.corrupted.s);
            assert_eq!(c.graph.term(t.o), &e.corrupted.o);
        }
        let restored = c.log.revert(&c.graph).unwrap();
        assert_eq!(restored.triples().len(), g.triples().len());
        for t in g.triples() {
            assert!(
                restored
                    .lookup_terms(Some(g.term(t.s)), Some(g.term(t.p)), Some(g.term(t.o)))
                    .len()
                    == 1
            );
        }
    }

    #[test]
    fn object_swaps_leave_the_slot_type() {
        let (g, catalog) = fixture();
        let c = corrupt_facts(&g, &catalog, 0.2, &[CorruptionKind::ObjectSwap], 9).unwrap();
        for e in &c.log.entries {
            let p = g.term_id(&e.corrupted.p).unwrap();
            let o = g.term_id(&e.corrupted.o).unwrap();
            let expected = catalog.slot_majority(p, Slot::Object);
            assert!(catalog.informative_types(o).is_disjoint(&expected));
        }
    }

    #[test]
    fn literal_corruption_halves_each_entity() {
        let (g, catalog) = fixture();
        let c = corrupt_literals(&g, &catalog, 5, 0.5, 2).unwrap();
        let mut per_subject: BTreeMap<&Term, usize> = BTreeMap::new();
        for e in &c.log.entries {
            *per_subject.entry(&e.corrupted.s).or_insert(0) += 1;
            let tag = e.corrupted.o.datatype().unwrap();
            match e.kind {
                CorruptionKind::LiteralRemove => assert_eq!(tag, DatatypeTag::Empty),
                CorruptionKind::LiteralTypeCorrupt => {
                    assert_ne!(tag, e.original.as_ref().unwrap().o.datatype().unwrap())
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(per_subject.len(), 5 * 3);
        for (s, n) in per_subject {
            let id = g.term_id(s).unwrap();
            assert_eq!(n, target_count(0.5, g.literal_triples_of(id).len()));
        }
        let restored = c.log.revert(&c.graph).unwrap();
        assert_eq!(restored.triples().len(), g.triples().len());
    }

    #[test]
    fn truncation_keeps_subject_and_predicate() {
        assert_eq!(subject_and_predicate("<a> <b> \"x y z\" ."), "<a> <b>");
        assert_eq!(subject_and_predicate("  <a>\t<b>   <c> ."), "<a>\t<b>");
    }

    #[test]
    fn invalid_rates() {
        let (g, catalog) = fixture();
        assert!(corrupt_facts(&g, &catalog, 0.0, &[], 1).is_err());
        assert!(corrupt_facts(&g, &catalog, 1.0, &[], 1).is_err());
        assert!(corrupt_facts(&g, &catalog, 0.1, &[CorruptionKind::LiteralRemove], 1).is_err());
    }

    #[test]
    fn planting_reports_lines() {
        let lines: Vec<String> = (0..20)
            .map(|i| alloc::format!("<a{i}> <p> <b{i}> ."))
            .collect();
        let (out, planted) = plant_stream_anomalies(&lines, 3, 2, 4).unwrap();
        assert_eq!(out.len(), 23);
        assert_eq!(planted.duplicates.len(), 3);
        for &(copy, src) in &planted.duplicates {
            assert_eq!(out[copy - 1], out[src - 1]);
        }
        for &m in &planted.missing {
            assert_eq!(out[m - 1].split_whitespace().count(), 3);
        }
    }
}
