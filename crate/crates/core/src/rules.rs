//! Rule-based anomaly detection over the graph and the raw statement stream.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{degree_stats, KnowledgeGraph, TripleId, TripleKind};
use crate::ingest::{scan_document, FileAnomalyKind, ParsedDocument};
use crate::par::map_range;
use crate::term::{DatatypeTag, Term, TermId};
use crate::typegen::{Provenance, Slot, TypeCatalog, TypeLabel};

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Missingness,
    IncorrectLiteral,
    Inconsistency,
    EntityAmbiguity,
    PredicateAmbiguity,
    Contradiction,
    RareEntity,
    ProlificEntity,
    Redundancy,
    Duplicate,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Missingness,
        Rule::IncorrectLiteral,
        Rule::Inconsistency,
        Rule::EntityAmbiguity,
        Rule::PredicateAmbiguity,
        Rule::Contradiction,
        Rule::RareEntity,
        Rule::ProlificEntity,
        Rule::Redundancy,
        Rule::Duplicate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Missingness => "MISSINGNESS",
            Rule::IncorrectLiteral => "INCORRECT_LITERAL",
            Rule::Inconsistency => "INCONSISTENCY",
            Rule::EntityAmbiguity => "ENTITY_AMBIGUITY",
            Rule::PredicateAmbiguity => "PREDICATE_AMBIGUITY",
            Rule::Contradiction => "CONTRADICTION",
            Rule::RareEntity => "RARE_ENTITY",
            Rule::ProlificEntity => "PROLIFIC_ENTITY",
            Rule::Redundancy => "REDUNDANCY",
            Rule::Duplicate => "DUPLICATE",
        }
    }
}

/// Anomaly names from the taxonomy, plus fallbacks for unexplained findings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TaxoLabel {
    MissingSubject,
    MissingPredicate,
    MissingObject,
    MissingLiteral,
    IncorrectLiteral,
    PartiallyCorrectLiteral,
    InvalidPredicate,
    EntityAmbiguity,
    PredicateAmbiguity,
    ContradictingFacts,
    RareEntity,
    ProlificEntity,
    RedundantFacts,
    DuplicateFacts,
    UnclassifiedStructural,
    UnclassifiedContent,
}

impl TaxoLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TaxoLabel::MissingSubject => "MISSING_SUBJECT",
            TaxoLabel::MissingPredicate => "MISSING_PREDICATE",
            TaxoLabel::MissingObject => "MISSING_OBJECT",
            TaxoLabel::MissingLiteral => "MISSING_LITERAL",
            TaxoLabel::IncorrectLiteral => "INCORRECT_LITERAL",
            TaxoLabel::PartiallyCorrectLiteral => "PARTIALLY_CORRECT_LITERAL",
            TaxoLabel::InvalidPredicate => "INVALID_PREDICATE",
            TaxoLabel::EntityAmbiguity => "ENTITY_AMBIGUITY",
            TaxoLabel::PredicateAmbiguity => "PREDICATE_AMBIGUITY",
            TaxoLabel::ContradictingFacts => "CONTRADICTING_FACTS",
            TaxoLabel::RareEntity => "RARE_ENTITY",
            TaxoLabel::ProlificEntity => "PROLIFIC_ENTITY",
            TaxoLabel::RedundantFacts => "REDUNDANT_FACTS",
            TaxoLabel::DuplicateFacts => "DUPLICATE_FACTS",
            TaxoLabel::UnclassifiedStructural => "UNCLASSIFIED_STRUCTURAL",
            TaxoLabel::UnclassifiedContent => "UNCLASSIFIED_CONTENT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Correction {
    Automatic,
    HumanEvaluation,
    RemoveRdfEntry,
    None,
}

impl Correction {
    pub fn as_str(self) -> &'static str {
        match self {
            Correction::Automatic => "AUTOMATIC",
            Correction::HumanEvaluation => "HUMAN_EVALUATION",
            Correction::RemoveRdfEntry => "REMOVE_RDF_ENTRY",
            Correction::None => "NONE",
        }
    }
}

/// Suggested correction for a label; `literal` selects the entity-to-literal
/// variant where the two differ.
pub fn correction_for(label: TaxoLabel, literal: bool) -> Correction {
    match label {
        TaxoLabel::MissingSubject if literal => Correction::RemoveRdfEntry,
        TaxoLabel::MissingSubject | TaxoLabel::MissingPredicate | TaxoLabel::MissingObject => {
            Correction::Automatic
        }
        TaxoLabel::MissingLiteral => Correction::Automatic,
        TaxoLabel::IncorrectLiteral | TaxoLabel::PartiallyCorrectLiteral => {
            Correction::HumanEvaluation
        }
        TaxoLabel::InvalidPredicate if literal => Correction::HumanEvaluation,
        TaxoLabel::InvalidPredicate => Correction::Automatic,
        TaxoLabel::EntityAmbiguity => Correction::Automatic,
        TaxoLabel::PredicateAmbiguity => Correction::HumanEvaluation,
        TaxoLabel::ContradictingFacts => Correction::RemoveRdfEntry,
        TaxoLabel::RareEntity | TaxoLabel::ProlificEntity => Correction::None,
        TaxoLabel::RedundantFacts => Correction::HumanEvaluation,
        TaxoLabel::DuplicateFacts => Correction::RemoveRdfEntry,
        TaxoLabel::UnclassifiedStructural | TaxoLabel::UnclassifiedContent => {
            Correction::HumanEvaluation
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleHit {
    pub rule: Rule,
    pub label: TaxoLabel,
    /// Offending graph triples, ascending.
    pub triples: Vec<TripleId>,
    pub entity: Option<TermId>,
    /// Source lines for hits read from the statement stream.
    pub lines: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesConfig {
    /// Minimum relative frequency for a type to co-occur with a slot.
    pub support_threshold: f64,
    /// Predicate pairs seen on fewer other entity pairs are contradictory.
    pub contradiction_tau: usize,
    /// `None` derives (mean + 2·stddev) / mean from the degree distribution.
    pub prolific_multiplier: Option<f64>,
    /// Flag every entity with at least the average triple count.
    pub average_prolific: bool,
    pub subsumption_predicate: Option<String>,
    pub similarity_threshold: f64,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig {
            support_threshold: 0.05,
            contradiction_tau: 1,
            prolific_multiplier: None,
            average_prolific: false,
            subsumption_predicate: None,
            similarity_threshold: 0.8,
        }
    }
}

impl RulesConfig {
    pub fn effective_prolific_multiplier(&self, mean: f64, std_dev: f64) -> f64 {
        if self.average_prolific {
            1.0
        } else if let Some(m) = self.prolific_multiplier {
            m
        } else if mean > 0.0 {
            (mean + 2.0 * std_dev) / mean
        } else {
            1.0
        }
    }
}

fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Lowercases, turns punctuation into spaces and collapses whitespace.
fn normalize(s: &str) -> Vec<char> {
    let mut out = Vec::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// `1 − edit distance / longer length` after normalization; two empty
/// strings are identical.
pub fn string_similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (normalize(a), normalize(b));
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

/// Slot statistics with one entity's own contribution removed.
struct SlotView<'a> {
    catalog: &'a TypeCatalog,
    /// Occurrences of each entity per (predicate, slot).
    occupancy: BTreeMap<(TermId, Slot, TermId), usize>,
    sigma: f64,
}

impl<'a> SlotView<'a> {
    fn new(g: &KnowledgeGraph, catalog: &'a TypeCatalog, sigma: f64) -> Self {
        let mut occupancy = BTreeMap::new();
        for t in g.triples() {
            *occupancy.entry((t.p, Slot::Subject, t.s)).or_insert(0) += 1;
            if t.kind == TripleKind::EntityTriple {
                *occupancy.entry((t.p, Slot::Object, t.o)).or_insert(0) += 1;
            }
        }
        SlotView {
            catalog,
            occupancy,
            sigma,
        }
    }

    fn declared(&self, x: TermId) -> BTreeSet<&TypeLabel> {
        self.catalog
            .types_of(x)
            .filter(|(_, p)| *p == Provenance::Declared)
            .map(|(t, _)| t)
            .collect()
    }

    /// Types supported by at least σ of the slot's typed occurrences, not
    /// counting occurrences of `x` itself.
    fn support_excluding(&self, p: TermId, slot: Slot, x: TermId) -> Option<BTreeSet<TypeLabel>> {
        let profile = self.catalog.profile(p)?;
        let declared = self.declared(x);
        let own = if declared.is_empty() {
            0
        } else {
            self.occupancy.get(&(p, slot, x)).copied().unwrap_or(0)
        };
        let typed = profile.typed(slot).saturating_sub(own);
        if typed == 0 {
            return None;
        }
        let set = profile
            .types(slot)
            .iter()
            .filter(|(t, _)| **t != TypeLabel::Other)
            .filter_map(|(t, &n)| {
                let n = n - if declared.contains(t) { own } else { 0 };
                (n as f64 >= self.sigma * typed as f64 && n > 0).then(|| t.clone())
            })
            .collect::<BTreeSet<_>>();
        (!set.is_empty()).then_some(set)
    }

    fn co_occur(&self, p: TermId, slot: Slot, x: TermId) -> bool {
        let types = self.catalog.informative_types(x);
        if types.is_empty() {
            return true;
        }
        match self.support_excluding(p, slot, x) {
            Some(support) => types.iter().any(|t| support.contains(t)),
            None => true,
        }
    }
}

/// True if some type of `x` reaches the support threshold σ in `p`'s slot
/// distribution. Untyped entities and slots without typed evidence pass.
pub fn co_occur(
    catalog: &TypeCatalog,
    g: &KnowledgeGraph,
    p: TermId,
    slot: Slot,
    x: TermId,
    sigma: f64,
) -> bool {
    SlotView::new(g, catalog, sigma).co_occur(p, slot, x)
}

fn hit(rule: Rule, label: TaxoLabel, triples: Vec<TripleId>, detail: String) -> RuleHit {
    let mut triples = triples;
    triples.sort_unstable();
    triples.dedup();
    RuleHit {
        rule,
        label,
        triples,
        entity: None,
        lines: Vec::new(),
        detail,
    }
}

fn text(g: &KnowledgeGraph, id: TermId) -> &str {
    g.term(id).text()
}

struct Context<'a> {
    g: &'a KnowledgeGraph,
    catalog: &'a TypeCatalog,
    doc: &'a ParsedDocument,
    config: &'a RulesConfig,
    slots: SlotView<'a>,
}

impl Context<'_> {
    fn graph_triple(&self, s: TermId, p: TermId, o: TermId) -> Option<TripleId> {
        let (s, p, o) = (
            self.g.term_id(self.doc.term(s))?,
            self.g.term_id(self.doc.term(p))?,
            self.g.term_id(self.doc.term(o))?,
        );
        self.g.find(s, p, o)
    }

    fn missingness(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for a in scan_document(self.doc) {
            let label = match a.kind {
                FileAnomalyKind::MissingSubject => TaxoLabel::MissingSubject,
                FileAnomalyKind::MissingPredicate => TaxoLabel::MissingPredicate,
                FileAnomalyKind::MissingObject => TaxoLabel::MissingObject,
                FileAnomalyKind::DuplicateStatement => continue,
            };
            let mut h = hit(
                Rule::Missingness,
                label,
                Vec::new(),
                String::from(a.kind.as_str()),
            );
            h.lines = a.lines;
            out.push(h);
        }
        for t in self.g.literal_triples() {
            if self.g.term(t.o).datatype() == Some(DatatypeTag::Empty) {
                out.push(hit(
                    Rule::Missingness,
                    TaxoLabel::MissingLiteral,
                    alloc::vec![t.id],
                    String::from("MISSING_LITERAL"),
                ));
            }
        }
        out
    }

    fn incorrect_literal(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for t in self.g.literal_triples() {
            let Some(tag) = self.g.term(t.o).datatype() else {
                continue;
            };
            if tag == DatatypeTag::Empty {
                continue;
            }
            let Some(expected) = self.catalog.expected_datatype(t.p) else {
                continue;
            };
            if tag != expected {
                let label = if tag == DatatypeTag::PartialDate && expected == DatatypeTag::Date {
                    TaxoLabel::PartiallyCorrectLiteral
                } else {
                    TaxoLabel::IncorrectLiteral
                };
                let detail =
                    alloc::format!("expected {} found {}", expected.as_str(), tag.as_str());
                out.push(hit(
                    Rule::IncorrectLiteral,
                    label,
                    alloc::vec![t.id],
                    detail,
                ));
            }
        }
        out
    }

    fn inconsistency(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for t in self.g.triples() {
            let subject_ok = self.slots.co_occur(t.p, Slot::Subject, t.s);
            let object_ok =
                t.kind == TripleKind::LiteralTriple || self.slots.co_occur(t.p, Slot::Object, t.o);
            if !(subject_ok && object_ok) {
                let which = match (subject_ok, object_ok) {
                    (false, false) => "subject and object",
                    (false, true) => "subject",
                    _ => "object",
                };
                let detail =
                    alloc::format!("{which} type does not co-occur with {}", text(self.g, t.p));
                out.push(hit(
                    Rule::Inconsistency,
                    TaxoLabel::InvalidPredicate,
                    alloc::vec![t.id],
                    detail,
                ));
            }
        }
        out
    }

    fn entity_ambiguity(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for t in self.g.entity_triples() {
            if t.s == t.o {
                out.push(hit(
                    Rule::EntityAmbiguity,
                    TaxoLabel::EntityAmbiguity,
                    alloc::vec![t.id],
                    String::from("self reference"),
                ));
            }
        }
        // slots each term occupies, with one representative triple
        let mut occupied: BTreeMap<TermId, BTreeMap<(TermId, Slot), TripleId>> = BTreeMap::new();
        for t in self.g.entity_triples() {
            occupied
                .entry(t.s)
                .or_default()
                .entry((t.p, Slot::Subject))
                .or_insert(t.id);
            occupied
                .entry(t.o)
                .or_default()
                .entry((t.p, Slot::Object))
                .or_insert(t.id);
        }
        for (x, slots) in occupied {
            let supports: Vec<((TermId, Slot), TripleId, BTreeSet<TypeLabel>)> = slots
                .into_iter()
                .filter_map(|(key, tid)| {
                    self.slots
                        .support_excluding(key.0, key.1, x)
                        .map(|s| (key, tid, s))
                })
                .collect();
            for i in 0..supports.len() {
                for j in i + 1..supports.len() {
                    let (a, b) = (&supports[i], &supports[j]);
                    if a.2.is_disjoint(&b.2) && a.1 != b.1 {
                        let detail = alloc::format!(
                            "{} used as {} and {}",
                            text(self.g, x),
                            a.2.iter()
                                .map(TypeLabel::as_str)
                                .collect::<Vec<_>>()
                                .join("|"),
                            b.2.iter()
                                .map(TypeLabel::as_str)
                                .collect::<Vec<_>>()
                                .join("|"),
                        );
                        let mut h = hit(
                            Rule::EntityAmbiguity,
                            TaxoLabel::EntityAmbiguity,
                            alloc::vec![a.1, b.1],
                            detail,
                        );
                        h.entity = Some(x);
                        out.push(h);
                    }
                }
            }
        }
        out
    }

    fn predicate_ambiguity(&self) -> Vec<RuleHit> {
        let Some(sub_iri) = &self.config.subsumption_predicate else {
            return Vec::new();
        };
        let sub_term = Term::iri(sub_iri.as_str());
        let mut parents: BTreeMap<&Term, BTreeSet<&Term>> = BTreeMap::new();
        for st in self.doc.well_formed() {
            let Some((s, p, o)) = st.key() else { continue };
            if *self.doc.term(p) == sub_term && self.doc.term(o).is_entity() {
                parents
                    .entry(self.doc.term(s))
                    .or_default()
                    .insert(self.doc.term(o));
            }
        }
        let is_a = |child: &Term, ancestor: &Term| {
            let mut stack: Vec<&Term> = alloc::vec![child];
            let mut seen: BTreeSet<&Term> = BTreeSet::new();
            while let Some(c) = stack.pop() {
                for &p in parents.get(c).into_iter().flatten() {
                    if p == ancestor {
                        return true;
                    }
                    if seen.insert(p) {
                        stack.push(p);
                    }
                }
            }
            false
        };
        let mut out = Vec::new();
        for &s in self.g.entities() {
            let edges = self.g.out_edges(s);
            for (i, a) in edges.iter().enumerate() {
                for b in &edges[i + 1..] {
                    if a.predicate != b.predicate || self.g.term(a.predicate) == &sub_term {
                        continue;
                    }
                    let (oa, ob) = (self.g.term(a.neighbor), self.g.term(b.neighbor));
                    if is_a(oa, ob) || is_a(ob, oa) {
                        let detail = alloc::format!(
                            "{} and {} are related by {}",
                            oa.text(),
                            ob.text(),
                            sub_iri
                        );
                        out.push(hit(
                            Rule::PredicateAmbiguity,
                            TaxoLabel::PredicateAmbiguity,
                            alloc::vec![a.triple, b.triple],
                            detail,
                        ));
                    }
                }
            }
        }
        out
    }

    fn contradiction(&self) -> Vec<RuleHit> {
        // (min p, orientation, max p) -> pairs exhibiting it
        type Key = (TermId, bool, TermId);
        type Witness = (Key, TripleId, TripleId);
        let mut pair_keys: BTreeMap<(TermId, TermId), Vec<Witness>> = BTreeMap::new();
        for &a in self.g.entities() {
            let mut between: BTreeMap<TermId, Vec<(TermId, bool, TripleId)>> = BTreeMap::new();
            for e in self.g.out_edges(a) {
                if e.neighbor > a && self.g.is_entity(e.neighbor) {
                    between
                        .entry(e.neighbor)
                        .or_default()
                        .push((e.predicate, true, e.triple));
                }
            }
            for e in self.g.in_edges(a) {
                if e.neighbor > a {
                    between
                        .entry(e.neighbor)
                        .or_default()
                        .push((e.predicate, false, e.triple));
                }
            }
            for (b, edges) in between {
                if edges.len() < 2 {
                    continue;
                }
                let list = pair_keys.entry((a, b)).or_default();
                for i in 0..edges.len() {
                    for j in i + 1..edges.len() {
                        let (p1, f1, t1) = edges[i];
                        let (p2, f2, t2) = edges[j];
                        let same = f1 == f2;
                        let key = (p1.min(p2), same, p1.max(p2));
                        list.push((key, t1, t2));
                    }
                }
            }
        }
        let mut counts: BTreeMap<Key, usize> = BTreeMap::new();
        for keys in pair_keys.values() {
            let distinct: BTreeSet<Key> = keys.iter().map(|k| k.0).collect();
            for k in distinct {
                *counts.entry(k).or_insert(0) += 1;
            }
        }
        let mut out = Vec::new();
        for keys in pair_keys.values() {
            for &(key, t1, t2) in keys {
                if counts[&key] - 1 < self.config.contradiction_tau {
                    let orient = if key.1 {
                        "same direction"
                    } else {
                        "opposite directions"
                    };
                    let detail = alloc::format!(
                        "{} and {} in {orient}",
                        text(self.g, key.0),
                        text(self.g, key.2)
                    );
                    out.push(hit(
                        Rule::Contradiction,
                        TaxoLabel::ContradictingFacts,
                        alloc::vec![t1, t2],
                        detail,
                    ));
                }
            }
        }
        out
    }

    fn unusual(&self) -> Vec<RuleHit> {
        let stats = degree_stats(self.g);
        let Some(total) = stats.total else {
            return Vec::new();
        };
        let multiplier = self
            .config
            .effective_prolific_multiplier(total.mean, total.std_dev);
        let bar = multiplier * total.mean;
        let mut out = Vec::new();
        for d in &stats.per_entity {
            let (rule, label, detail) = if d.total <= 1 {
                (
                    Rule::RareEntity,
                    TaxoLabel::RareEntity,
                    alloc::format!("{} triple(s)", d.total),
                )
            } else if d.total as f64 >= bar {
                (
                    Rule::ProlificEntity,
                    TaxoLabel::ProlificEntity,
                    alloc::format!("{} triples, threshold {bar:.2}", d.total),
                )
            } else {
                continue;
            };
            let mut h = hit(rule, label, Vec::new(), detail);
            h.entity = Some(d.entity);
            out.push(h);
        }
        out
    }

    fn label_of(&self, v: TermId) -> String {
        let term = self.g.term(v);
        if term.is_literal() {
            return String::from(term.text());
        }
        let mut labels: Vec<&str> = self
            .g
            .literal_triples_of(v)
            .iter()
            .map(|&tid| self.g.triple(tid))
            .filter(|t| {
                let p = self.g.term(t.p);
                p.text() == RDFS_LABEL || matches!(p.local_name(), "label" | "name")
            })
            .map(|t| self.g.term(t.o).text())
            .collect();
        labels.sort_unstable();
        match labels.first() {
            Some(l) => String::from(*l),
            None => String::from(term.local_name()),
        }
    }

    fn redundancy(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for &s in self.g.entities() {
            let edges = self.g.out_edges(s);
            let mut by_pred: BTreeMap<TermId, Vec<(TermId, TripleId)>> = BTreeMap::new();
            for e in edges {
                by_pred
                    .entry(e.predicate)
                    .or_default()
                    .push((e.neighbor, e.triple));
            }
            for (p, objs) in by_pred {
                if objs.len() < 2 {
                    continue;
                }
                let labels: Vec<(bool, String)> = objs
                    .iter()
                    .map(|&(o, _)| (self.g.term(o).is_literal(), self.label_of(o)))
                    .collect();
                for i in 0..objs.len() {
                    for j in i + 1..objs.len() {
                        if labels[i].0 != labels[j].0 {
                            continue;
                        }
                        let sim = string_similarity(&labels[i].1, &labels[j].1);
                        if sim >= self.config.similarity_threshold {
                            let detail = alloc::format!("{}: similarity {sim:.3}", text(self.g, p));
                            out.push(hit(
                                Rule::Redundancy,
                                TaxoLabel::RedundantFacts,
                                alloc::vec![objs[i].1, objs[j].1],
                                detail,
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    fn duplicate(&self) -> Vec<RuleHit> {
        let mut out = Vec::new();
        for a in scan_document(self.doc) {
            if a.kind != FileAnomalyKind::DuplicateStatement {
                continue;
            }
            let st = a.statement;
            let triples = st
                .key()
                .and_then(|(s, p, o)| self.graph_triple(s, p, o))
                .into_iter()
                .collect();
            let mut h = hit(
                Rule::Duplicate,
                TaxoLabel::DuplicateFacts,
                triples,
                alloc::format!("{} copies", a.lines.len()),
            );
            h.lines = a.lines;
            out.push(h);
        }
        out
    }

    fn family(&self, rule: Rule) -> Vec<RuleHit> {
        match rule {
            Rule::Missingness => self.missingness(),
            Rule::IncorrectLiteral => self.incorrect_literal(),
            Rule::Inconsistency => self.inconsistency(),
            Rule::EntityAmbiguity => self.entity_ambiguity(),
            Rule::PredicateAmbiguity => self.predicate_ambiguity(),
            Rule::Contradiction => self.contradiction(),
            Rule::RareEntity => self
                .unusual()
                .into_iter()
                .filter(|h| h.rule == Rule::RareEntity)
                .collect(),
            Rule::ProlificEntity => self
                .unusual()
                .into_iter()
                .filter(|h| h.rule == Rule::ProlificEntity)
                .collect(),
            Rule::Redundancy => self.redundancy(),
            Rule::Duplicate => self.duplicate(),
        }
    }
}

/// Runs every rule family. `doc` is the raw statement stream the graph was
/// built from; hits come back sorted by rule, then subjects.
pub fn run_rules(
    g: &KnowledgeGraph,
    catalog: &TypeCatalog,
    doc: &ParsedDocument,
    config: &RulesConfig,
) -> Vec<RuleHit> {
    let ctx = Context {
        g,
        catalog,
        doc,
        config,
        slots: SlotView::new(g, catalog, config.support_threshold),
    };
    let families = map_range(Rule::ALL.len(), |i| ctx.family(Rule::ALL[i]));
    let mut hits: Vec<RuleHit> = families.into_iter().flatten().collect();
    hits.sort();
    hits.dedup();
    hits
}
