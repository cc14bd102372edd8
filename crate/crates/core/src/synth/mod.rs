//! Seeded synthetic knowledge graphs with labeled corruptions.

mod corrupt;
mod schema;

pub use corrupt::{
    corrupt_facts, corrupt_literals, plant_stream_anomalies, Corrupted, CorruptionEntry,
    CorruptionKind, CorruptionLog, PlantedLines, TermTriple, DEFAULT_FACT_KINDS,
};
pub use schema::{
    AttributeSpec, Cardinality, Constraint, EntityGroup, Hop, RelationSpec, SchemaSpec,
    FAMILY_SCHEMA,
};

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::ingest::RDF_TYPE;
use crate::term::{DatatypeTag, Term};
use crate::typegen::{
    build_predicate_profiles, infer_entity_types, DeclaredTypes, TypeCatalog, TypeLabel,
};

/// A generated graph and the type declarations that go with it. Declarations
/// are kept out of the graph itself, matching how typed input files are split
/// on load.
#[derive(Debug, Clone)]
pub struct SyntheticKg {
    pub graph: KnowledgeGraph,
    pub declared: DeclaredTypes,
    pub seed: u64,
}

fn class_name(label: &TypeLabel) -> &str {
    match label {
        TypeLabel::Person => "Person",
        TypeLabel::Location => "Location",
        TypeLabel::Organization => "Organization",
        TypeLabel::Date => "Date",
        TypeLabel::Number => "Number",
        TypeLabel::Work => "Work",
        TypeLabel::Other => "Other",
        TypeLabel::Declared(iri) => iri,
    }
}

impl SyntheticKg {
    /// `rdf:type` statements for every declared entity, sorted.
    pub fn type_statements(&self, base: &str) -> Vec<(Term, Term, Term)> {
        let mut out = Vec::new();
        for (entity, labels) in &self.declared.0 {
            for label in labels {
                let class = match label {
                    TypeLabel::Declared(iri) => iri.clone(),
                    other => alloc::format!("{base}class/{}", class_name(other)),
                };
                out.push((entity.clone(), Term::iri(RDF_TYPE), Term::iri(class)));
            }
        }
        out
    }

    /// N-Triples text: graph triples in id order, then type declarations.
    pub fn to_ntriples(&self, base: &str) -> String {
        let mut out = String::new();
        let g = &self.graph;
        let lines = g
            .triples()
            .iter()
            .map(|t| {
                (
                    g.term(t.s).clone(),
                    g.term(t.p).clone(),
                    g.term(t.o).clone(),
                )
            })
            .chain(self.type_statements(base));
        for (s, p, o) in lines {
            out.push_str(&alloc::format!(
                "{} {} {} .\n",
                s.to_ntriples(),
                p.to_ntriples(),
                o.to_ntriples()
            ));
        }
        out
    }

    pub fn catalog(&self, theta: f64) -> Result<TypeCatalog> {
        catalog_for(&self.graph, &self.declared, theta)
    }
}

/// Predicate profiles plus inferred entity types for a graph.
pub fn catalog_for(
    g: &KnowledgeGraph,
    declared: &DeclaredTypes,
    theta: f64,
) -> Result<TypeCatalog> {
    infer_entity_types(&build_predicate_profiles(g, declared), g, theta)
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

fn word(rng: &mut ChaCha8Rng) -> String {
    let mut w = String::new();
    for _ in 0..rng.gen_range(2..=3) {
        w.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char);
        w.push(VOWELS[rng.gen_range(0..VOWELS.len())] as char);
    }
    if rng.gen_bool(0.5) {
        w.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char);
    }
    let mut chars = w.chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
        None => w,
    }
}

/// Two-word names, unique across the whole graph. Random syllable strings of
/// this length sit far below the redundancy similarity bar.
struct NameSource {
    used: BTreeSet<String>,
}

impl NameSource {
    fn next(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let name = alloc::format!("{} {}", word(rng), word(rng));
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn literal_value(datatype: DatatypeTag, rng: &mut ChaCha8Rng, names: &mut NameSource) -> String {
    match datatype {
        DatatypeTag::Integer => rng.gen_range(1_000..5_000_000u32).to_string(),
        DatatypeTag::Decimal => alloc::format!("{:.2}", rng.gen_range(0.0..1000.0f64)),
        DatatypeTag::Date => {
            alloc::format!(
                "{:04}-{:02}-{:02}",
                rng.gen_range(1900..2021),
                rng.gen_range(1..=12),
                rng.gen_range(1..=28)
            )
        }
        DatatypeTag::Url => {
            let slug = names.next(rng).to_ascii_lowercase().replace(' ', "-");
            alloc::format!("http://www.{slug}.example.org/")
        }
        _ => names.next(rng),
    }
}

/// Adjacency of one generated relation over global entity indices.
#[derive(Debug, Clone)]
struct Edges {
    out: Vec<Vec<usize>>,
    inv: Vec<Vec<usize>>,
}

impl Edges {
    fn new(n: usize) -> Self {
        Edges {
            out: vec![Vec::new(); n],
            inv: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, s: usize, o: usize) {
        self.out[s].push(o);
        self.inv[o].push(s);
    }
}

struct Generator<'a> {
    spec: &'a SchemaSpec,
    members: Vec<Vec<usize>>,
    position: Vec<usize>,
    relations: Vec<Edges>,
    /// Unordered entity pairs already joined by some relation.
    linked: HashSet<(usize, usize)>,
    rng: ChaCha8Rng,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Generator<'_> {
    fn relation(&self, name: &str) -> &Edges {
        let i = self
            .spec
            .relations
            .iter()
            .position(|r| r.predicate == name)
            .expect("validated relation");
        &self.relations[i]
    }

    fn group_members(&self, name: &str) -> &[usize] {
        let i = self
            .spec
            .groups
            .iter()
            .position(|g| g.name == name)
            .expect("validated group");
        &self.members[i]
    }

    fn generate(&mut self, index: usize) -> Result<Edges> {
        let rel = &self.spec.relations[index];
        let n = self.position.len();
        let mut edges = Edges::new(n);
        let subjects = self.group_members(&rel.subject).to_vec();
        let objects = self.group_members(&rel.object).to_vec();

        if let Some(Constraint::Compose(chain)) = rel
            .constraints
            .iter()
            .find(|c| matches!(c, Constraint::Compose(..)))
        {
            let mut added = Vec::new();
            for &s in &subjects {
                if !self.rng.gen_bool(rel.fill) {
                    continue;
                }
                let mut frontier = vec![s];
                for name in chain {
                    let hop = self.relation(name);
                    frontier = frontier
                        .iter()
                        .flat_map(|&x| hop.out[x].iter().copied())
                        .collect();
                    frontier.sort_unstable();
                    frontier.dedup();
                }
                added.extend(frontier.into_iter().map(|o| (s, o)));
            }
            for (s, o) in added {
                edges.add(s, o);
                self.linked.insert(pair(s, o));
            }
            return Ok(edges);
        }

        if rel.has(|c| matches!(c, Constraint::Symmetric)) {
            let mut order = subjects;
            order.shuffle(&mut self.rng);
            for chunk in order.chunks(2) {
                if let [a, b] = *chunk {
                    if self.rng.gen_bool(rel.fill) && !self.linked.contains(&pair(a, b)) {
                        edges.add(a, b);
                        edges.add(b, a);
                        self.linked.insert(pair(a, b));
                    }
                }
            }
            return Ok(edges);
        }

        let acyclic = rel.has(|c| matches!(c, Constraint::Acyclic));
        let unique = rel.has(|c| matches!(c, Constraint::UniqueObject));
        let shared = rel.constraints.iter().find_map(|c| match c {
            Constraint::Shared(r) => Some(r.clone()),
            _ => None,
        });
        let inherit = rel.constraints.iter().find_map(|c| match c {
            Constraint::Inherit(hops) => Some(hops.clone()),
            _ => None,
        });
        let matching = rel.constraints.iter().find_map(|c| match c {
            Constraint::Match(a, b) => Some((a.clone(), b.clone())),
            _ => None,
        });
        let mut cover: VecDeque<usize> = VecDeque::new();
        if rel.has(|c| matches!(c, Constraint::Cover)) {
            let mut shuffled = objects.clone();
            shuffled.shuffle(&mut self.rng);
            cover.extend(shuffled);
        }
        let mut used = vec![false; n];

        for &s in &subjects {
            if !edges.out[s].is_empty() {
                continue;
            }
            if !self.rng.gen_bool(rel.fill) {
                continue;
            }
            let k = self.rng.gen_range(rel.card.min..=rel.card.max) as usize;
            if k == 0 {
                continue;
            }
            if let Some(hops) = &inherit {
                let mut source = None;
                for hop in hops {
                    let hop_edges = self.relation(&hop.relation);
                    let list = if hop.inverse {
                        &hop_edges.inv[s]
                    } else {
                        &hop_edges.out[s]
                    };
                    if let Some(&x) = list.iter().find(|&&x| !edges.out[x].is_empty()) {
                        source = Some(x);
                        break;
                    }
                }
                if let Some(x) = source {
                    for o in edges.out[x].clone() {
                        if o != s && !self.linked.contains(&pair(s, o)) {
                            edges.add(s, o);
                            self.linked.insert(pair(s, o));
                        }
                    }
                    if !edges.out[s].is_empty() {
                        continue;
                    }
                }
            }
            let partners: Vec<usize> = match &shared {
                Some(r) => self.relation(r).out[s].clone(),
                None => Vec::new(),
            };
            let holders: Vec<usize> = core::iter::once(s)
                .chain(partners.iter().copied())
                .collect();
            let valid = |gen: &Generator<'_>, o: usize, chosen: &[usize]| -> bool {
                if holders.contains(&o) || chosen.contains(&o) || (unique && used[o]) {
                    return false;
                }
                if acyclic && holders.iter().any(|&h| gen.position[o] <= gen.position[h]) {
                    return false;
                }
                if holders.iter().any(|&h| gen.linked.contains(&pair(h, o))) {
                    return false;
                }
                if let Some((first, second)) = &matching {
                    let mine = &gen.relation(first).out[s];
                    if !gen.relation(second).out[o].iter().any(|x| mine.contains(x)) {
                        return false;
                    }
                }
                true
            };
            let mut chosen: Vec<usize> = Vec::with_capacity(k);
            while chosen.len() < k {
                let from_cover = cover.iter().position(|&o| valid(self, o, &chosen));
                let pick = match from_cover {
                    Some(i) => cover.remove(i),
                    None => {
                        let candidates: Vec<usize> = objects
                            .iter()
                            .copied()
                            .filter(|&o| valid(self, o, &chosen))
                            .collect();
                        candidates.choose(&mut self.rng).copied()
                    }
                };
                match pick {
                    Some(o) => chosen.push(o),
                    None => break,
                }
            }
            if chosen.len() < rel.card.min as usize && rel.fill >= 1.0 {
                return Err(Error::Unsatisfiable(alloc::format!(
                    "{}: only {} of {} required objects available",
                    rel.predicate,
                    chosen.len(),
                    rel.card.min
                )));
            }
            for o in chosen {
                used[o] = true;
                for &h in &holders {
                    edges.add(h, o);
                    self.linked.insert(pair(h, o));
                }
            }
        }
        Ok(edges)
    }
}

/// Generates a graph that satisfies `spec`. The same spec and seed always
/// give the same graph.
pub fn gen_synthetic(spec: &SchemaSpec, seed: u64) -> Result<SyntheticKg> {
    let mut iris = Vec::new();
    let mut labels = Vec::new();
    let mut members = Vec::with_capacity(spec.groups.len());
    let mut position = Vec::new();
    for group in &spec.groups {
        let width = group.count.to_string().len().max(4);
        let mut list = Vec::with_capacity(group.count);
        for i in 0..group.count {
            list.push(iris.len());
            position.push(i);
            iris.push(Term::iri(alloc::format!(
                "{}{}_{:0width$}",
                spec.base,
                group.name,
                i + 1
            )));
            labels.push(group.label.clone());
        }
        members.push(list);
    }

    let mut gen = Generator {
        spec,
        members,
        position,
        relations: Vec::with_capacity(spec.relations.len()),
        linked: HashSet::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    for i in 0..spec.relations.len() {
        let edges = gen.generate(i)?;
        gen.relations.push(edges);
    }

    let mut triples = Vec::new();
    for (rel, edges) in spec.relations.iter().zip(&gen.relations) {
        let p = Term::iri(alloc::format!("{}{}", spec.base, rel.predicate));
        for (s, objs) in edges.out.iter().enumerate() {
            for &o in objs {
                triples.push((iris[s].clone(), p.clone(), iris[o].clone()));
            }
        }
    }
    let mut names = NameSource {
        used: BTreeSet::new(),
    };
    for attr in &spec.attributes {
        let p = Term::iri(alloc::format!("{}{}", spec.base, attr.predicate));
        for (gi, group) in spec.groups.iter().enumerate() {
            if attr.subject.as_ref().is_some_and(|g| *g != group.name) {
                continue;
            }
            for &e in &gen.members[gi] {
                if gen.rng.gen_bool(attr.fill) {
                    let value = literal_value(attr.datatype, &mut gen.rng, &mut names);
                    triples.push((iris[e].clone(), p.clone(), Term::literal(value)));
                }
            }
        }
    }

    let graph = KnowledgeGraph::from_terms(triples)?;
    let mut declared = DeclaredTypes::default();
    for (iri, label) in iris.into_iter().zip(labels) {
        if graph.term_id(&iri).is_some() {
            declared.insert(iri, label);
        }
    }
    Ok(SyntheticKg {
        graph,
        declared,
        seed,
    })
}
