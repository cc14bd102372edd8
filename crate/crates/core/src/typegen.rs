//! Entity typing and predicate slot profiles.
//!
//! Types come from explicit declarations (`rdf:type`-like statements) and are
//! propagated to untyped entities through the predicate slots they occupy.

use alloc::collections::{btree_map, BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, TripleKind};
use crate::ingest::{ParsedDocument, RawStatement, RDF_TYPE};
use crate::term::{DatatypeTag, Term, TermId};

pub const DEFAULT_THETA: f64 = 0.5;
pub const MAX_INFERENCE_ROUNDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum TypeLabel {
    Person,
    Location,
    Organization,
    Date,
    Number,
    Work,
    Other,
    /// A declared class IRI outside the closed set.
    Declared(String),
}

impl TypeLabel {
    pub fn as_str(&self) -> &str {
        match self {
            TypeLabel::Person => "PERSON",
            TypeLabel::Location => "LOCATION",
            TypeLabel::Organization => "ORGANIZATION",
            TypeLabel::Date => "DATE",
            TypeLabel::Number => "NUMBER",
            TypeLabel::Work => "WORK",
            TypeLabel::Other => "OTHER",
            TypeLabel::Declared(iri) => iri,
        }
    }

    /// Maps a class IRI onto the closed label set by its local name, keeping
    /// unknown classes as [`TypeLabel::Declared`].
    pub fn from_class_iri(iri: &str) -> TypeLabel {
        let local = Term::iri(iri).local_name().to_ascii_lowercase();
        match local.as_str() {
            "person" | "human" => TypeLabel::Person,
            "location" | "place" | "city" | "country" => TypeLabel::Location,
            "organization" | "organisation" | "company" => TypeLabel::Organization,
            "date" => TypeLabel::Date,
            "number" => TypeLabel::Number,
            "work" | "creativework" => TypeLabel::Work,
            "other" => TypeLabel::Other,
            _ => TypeLabel::Declared(iri.to_string()),
        }
    }
}

impl From<String> for TypeLabel {
    fn from(s: String) -> Self {
        match s.as_str() {
            "PERSON" => TypeLabel::Person,
            "LOCATION" => TypeLabel::Location,
            "ORGANIZATION" => TypeLabel::Organization,
            "DATE" => TypeLabel::Date,
            "NUMBER" => TypeLabel::Number,
            "WORK" => TypeLabel::Work,
            "OTHER" => TypeLabel::Other,
            _ => TypeLabel::Declared(s),
        }
    }
}

impl From<TypeLabel> for String {
    fn from(t: TypeLabel) -> Self {
        t.as_str().to_string()
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Declared,
    Inferred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Slot {
    Subject,
    Object,
}

/// Declared entity types keyed by term, before graph ids exist.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredTypes(pub BTreeMap<Term, BTreeSet<TypeLabel>>);

impl DeclaredTypes {
    pub fn insert(&mut self, entity: Term, label: TypeLabel) {
        self.0.entry(entity).or_default().insert(label);
    }

    pub fn get(&self, entity: &Term) -> Option<&BTreeSet<TypeLabel>> {
        self.0.get(entity)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// True for predicates that declare a class: `rdf:type` or any IRI whose
/// local name is `type` or `isa`.
pub fn is_type_predicate(term: &Term) -> bool {
    match term {
        Term::Iri(iri) => iri == RDF_TYPE || matches!(term.local_name(), "type" | "isa" | "is_a"),
        _ => false,
    }
}

/// Separates well-formed type declarations with an IRI object from the other
/// statements. Literal-object `isa` statements stay as ordinary facts.
pub fn split_type_declarations(doc: &ParsedDocument) -> (Vec<RawStatement>, DeclaredTypes) {
    let mut rest = Vec::with_capacity(doc.statements.len());
    let mut declared = DeclaredTypes::default();
    for st in &doc.statements {
        if let (true, Some((s, p, o))) = (st.well_formed, st.key()) {
            let object = doc.term(o);
            if is_type_predicate(doc.term(p)) && object.is_iri() {
                declared.insert(
                    doc.term(s).clone(),
                    TypeLabel::from_class_iri(object.text()),
                );
                continue;
            }
        }
        rest.push(*st);
    }
    (rest, declared)
}

/// Type and datatype frequencies of one predicate's argument slots.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PredicateProfile {
    pub subject_types: BTreeMap<TypeLabel, usize>,
    pub object_types: BTreeMap<TypeLabel, usize>,
    pub object_datatypes: BTreeMap<DatatypeTag, usize>,
    /// Triples whose subject carries at least one declared type.
    pub typed_subjects: usize,
    /// Entity-object triples whose object carries at least one declared type.
    pub typed_objects: usize,
    pub subject_occurrences: usize,
    pub object_occurrences: usize,
    pub literal_occurrences: usize,
}

impl PredicateProfile {
    pub fn types(&self, slot: Slot) -> &BTreeMap<TypeLabel, usize> {
        match slot {
            Slot::Subject => &self.subject_types,
            Slot::Object => &self.object_types,
        }
    }

    pub fn typed(&self, slot: Slot) -> usize {
        match slot {
            Slot::Subject => self.typed_subjects,
            Slot::Object => self.typed_objects,
        }
    }

    pub fn occurrences(&self, slot: Slot) -> usize {
        match slot {
            Slot::Subject => self.subject_occurrences,
            Slot::Object => self.object_occurrences,
        }
    }

    /// Share of typed occurrences in `slot` that carry `label`.
    pub fn relative_frequency(&self, slot: Slot, label: &TypeLabel) -> f64 {
        let typed = self.typed(slot);
        if typed == 0 {
            return 0.0;
        }
        self.types(slot).get(label).copied().unwrap_or(0) as f64 / typed as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCatalog {
    pub theta: f64,
    pub entity_types: BTreeMap<TermId, BTreeMap<TypeLabel, Provenance>>,
    pub profiles: BTreeMap<TermId, PredicateProfile>,
}

impl Default for TypeCatalog {
    fn default() -> Self {
        TypeCatalog {
            theta: DEFAULT_THETA,
            entity_types: BTreeMap::new(),
            profiles: BTreeMap::new(),
        }
    }
}

impl TypeCatalog {
    pub fn profile(&self, p: TermId) -> Option<&PredicateProfile> {
        self.profiles.get(&p)
    }

    pub fn types_of(&self, entity: TermId) -> impl Iterator<Item = (&TypeLabel, Provenance)> {
        self.entity_types
            .get(&entity)
            .into_iter()
            .flat_map(|m| m.iter().map(|(t, p)| (t, *p)))
    }

    /// Types of `entity` that carry information, i.e. everything but OTHER.
    pub fn informative_types(&self, entity: TermId) -> BTreeSet<TypeLabel> {
        self.types_of(entity)
            .filter(|(t, _)| **t != TypeLabel::Other)
            .map(|(t, _)| t.clone())
            .collect()
    }

    pub fn has_declared_type(&self, entity: TermId) -> bool {
        self.types_of(entity)
            .any(|(_, p)| p == Provenance::Declared)
    }

    /// Modal object datatype of `p` if its share among non-empty literal
    /// objects reaches θ; `None` means undecided.
    pub fn expected_datatype(&self, p: TermId) -> Option<DatatypeTag> {
        let profile = self.profiles.get(&p)?;
        let mut total = 0usize;
        let mut best: Option<(DatatypeTag, usize)> = None;
        for (&tag, &count) in &profile.object_datatypes {
            if tag == DatatypeTag::Empty {
                continue;
            }
            total += count;
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((tag, count));
            }
        }
        let (tag, count) = best?;
        (count as f64 >= self.theta * total as f64).then_some(tag)
    }

    /// Majority types of a slot: labels whose relative frequency reaches θ.
    pub fn slot_majority(&self, p: TermId, slot: Slot) -> BTreeSet<TypeLabel> {
        let Some(profile) = self.profiles.get(&p) else {
            return BTreeSet::new();
        };
        profile
            .types(slot)
            .keys()
            .filter(|t| {
                **t != TypeLabel::Other && profile.relative_frequency(slot, t) >= self.theta
            })
            .cloned()
            .collect()
    }
}

/// Counts slot types from declared types and object datatype tags.
pub fn build_predicate_profiles(g: &KnowledgeGraph, declared: &DeclaredTypes) -> TypeCatalog {
    let mut entity_types: BTreeMap<TermId, BTreeMap<TypeLabel, Provenance>> = BTreeMap::new();
    for (term, labels) in &declared.0 {
        if let Some(id) = g.term_id(term) {
            let entry = entity_types.entry(id).or_default();
            for label in labels {
                entry.insert(label.clone(), Provenance::Declared);
            }
        }
    }
    let mut profiles: BTreeMap<TermId, PredicateProfile> = BTreeMap::new();
    for t in g.triples() {
        let profile = profiles.entry(t.p).or_default();
        profile.subject_occurrences += 1;
        if let Some(types) = entity_types.get(&t.s) {
            profile.typed_subjects += 1;
            for label in types.keys() {
                *profile.subject_types.entry(label.clone()).or_insert(0) += 1;
            }
        }
        match t.kind {
            TripleKind::EntityTriple => {
                profile.object_occurrences += 1;
                if let Some(types) = entity_types.get(&t.o) {
                    profile.typed_objects += 1;
                    for label in types.keys() {
                        *profile.object_types.entry(label.clone()).or_insert(0) += 1;
                    }
                }
            }
            TripleKind::LiteralTriple => {
                profile.literal_occurrences += 1;
                if let Some(tag) = g.term(t.o).datatype() {
                    *profile.object_datatypes.entry(tag).or_insert(0) += 1;
                }
            }
        }
    }
    TypeCatalog {
        theta: DEFAULT_THETA,
        entity_types,
        profiles,
    }
}

/// Propagates slot majority types to entities without a declared type.
///
/// Each round counts, per slot, how many occurrences already carry a type
/// (declared or inferred) and divides by a denominator fixed before the first
/// round: the declared-typed occurrences of the slot, or all occurrences when
/// none are typed. Because the denominator never moves, type sets only grow
/// across rounds and a larger θ admits a subset of what a smaller θ admits.
/// OTHER is never propagated.
pub fn infer_entity_types(
    catalog: &TypeCatalog,
    g: &KnowledgeGraph,
    theta: f64,
) -> Result<TypeCatalog> {
    if !(0.5..=1.0).contains(&theta) {
        return Err(Error::Config(alloc::format!(
            "theta must lie in [0.5, 1], got {theta}"
        )));
    }
    let mut out = catalog.clone();
    out.theta = theta;
    let frozen: BTreeSet<TermId> = catalog
        .entity_types
        .iter()
        .filter(|(_, m)| {
            m.iter()
                .any(|(t, p)| *p == Provenance::Declared && *t != TypeLabel::Other)
        })
        .map(|(id, _)| *id)
        .collect();
    let denominators: BTreeMap<(TermId, Slot), usize> = catalog
        .profiles
        .iter()
        .flat_map(|(&p, prof)| {
            [Slot::Subject, Slot::Object].map(|slot| {
                let d = if prof.typed(slot) > 0 {
                    prof.typed(slot)
                } else {
                    prof.occurrences(slot)
                };
                ((p, slot), d)
            })
        })
        .collect();

    for _ in 0..MAX_INFERENCE_ROUNDS {
        let mut counts: BTreeMap<(TermId, Slot), BTreeMap<TypeLabel, usize>> = BTreeMap::new();
        for t in g.entity_triples() {
            for (slot, v) in [(Slot::Subject, t.s), (Slot::Object, t.o)] {
                for label in out.informative_types(v) {
                    *counts
                        .entry((t.p, slot))
                        .or_default()
                        .entry(label)
                        .or_insert(0) += 1;
                }
            }
        }
        let mut additions: Vec<(TermId, TypeLabel)> = Vec::new();
        for t in g.entity_triples() {
            for (slot, v) in [(Slot::Subject, t.s), (Slot::Object, t.o)] {
                if frozen.contains(&v) {
                    continue;
                }
                let (Some(slot_counts), Some(&d)) =
                    (counts.get(&(t.p, slot)), denominators.get(&(t.p, slot)))
                else {
                    continue;
                };
                for (label, &n) in slot_counts {
                    if d > 0 && n as f64 >= theta * d as f64 {
                        additions.push((v, label.clone()));
                    }
                }
            }
        }
        let mut changed = false;
        for (v, label) in additions {
            let entry = out.entity_types.entry(v).or_default();
            if let btree_map::Entry::Vacant(slot) = entry.entry(label) {
                slot.insert(Provenance::Inferred);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(out)
}
