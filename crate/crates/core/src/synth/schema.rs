//! Line-oriented schema files for the synthetic generator.
//!
//! ```text
//! base http://example.org/family/
//! entity Person PERSON 1000
//! relation marriedTo Person Person card=0..1 fill=0.6 symmetric
//! relation citizenOf Person Country compose=livesIn/locatedIn
//! attribute name * STRING
//! ```
//!
//! Relations are generated in declaration order, so any relation named by a
//! constraint must be declared before the relation that uses it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::term::DatatypeTag;
use crate::typegen::TypeLabel;

/// A named population of entities sharing one type label.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityGroup {
    pub name: String,
    pub label: TypeLabel,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cardinality {
    pub min: u32,
    pub max: u32,
}

impl Cardinality {
    pub const ONE: Cardinality = Cardinality { min: 1, max: 1 };
}

/// One hop over an already generated relation, optionally against its
/// direction (`^name`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub relation: String,
    pub inverse: bool,
}

impl Hop {
    fn parse(s: &str) -> Hop {
        match s.strip_prefix('^') {
            Some(rest) => Hop {
                relation: rest.to_string(),
                inverse: true,
            },
            None => Hop {
                relation: s.to_string(),
                inverse: false,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// Edges come in mirrored pairs; at most one partner per entity.
    Symmetric,
    /// Objects come later than their subject in group order.
    Acyclic,
    /// No entity is the object of this relation twice.
    UniqueObject,
    /// Every object-group member is used before any is reused.
    Cover,
    /// Each new edge is copied to the subject's partners over this relation.
    Shared(String),
    /// Copy the objects of the first neighbor (over these hops, in order)
    /// that already has this relation.
    Inherit(Vec<Hop>),
    /// Object set is exactly what the chain of relations reaches from `s`.
    Compose(Vec<String>),
    /// Objects `o` must satisfy `second(o) ∩ first(s) ≠ ∅`.
    Match(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpec {
    pub predicate: String,
    pub subject: String,
    pub object: String,
    pub card: Cardinality,
    /// Probability that a subject takes part at all.
    pub fill: f64,
    pub constraints: Vec<Constraint>,
}

impl RelationSpec {
    pub fn has(&self, probe: impl Fn(&Constraint) -> bool) -> bool {
        self.constraints.iter().any(probe)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub predicate: String,
    /// `None` applies to every group.
    pub subject: Option<String>,
    pub datatype: DatatypeTag,
    pub fill: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaSpec {
    pub base: String,
    pub groups: Vec<EntityGroup>,
    pub relations: Vec<RelationSpec>,
    pub attributes: Vec<AttributeSpec>,
}

/// Family schema with four entity groups, about five entity triples per person.
pub const FAMILY_SCHEMA: &str = "\
base http://example.org/family/
entity Person PERSON 1000
entity Country LOCATION 25
entity City LOCATION 100
entity Company ORGANIZATION 150
relation locatedIn City Country card=1 cover
relation headquarteredIn Company City card=1 cover
relation operatesIn Company Country compose=headquarteredIn/locatedIn
relation marriedTo Person Person card=0..1 fill=0.6 symmetric
relation hasChild Person Person card=1..3 fill=0.5 acyclic unique-object shared=marriedTo
relation livesIn Person City card=1 inherit=marriedTo,^hasChild
relation citizenOf Person Country compose=livesIn/locatedIn
relation bornIn Person City fill=0.7 compose=livesIn
relation worksFor Person Company card=1 inherit=marriedTo match=livesIn/headquarteredIn
attribute name * STRING
attribute birthDate Person DATE
attribute population City INTEGER
attribute population Country INTEGER
attribute founded Company DATE
attribute homepage Company URL
";

fn schema_err(line: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        line,
        message: message.into(),
    }
}

fn parse_fraction(line: usize, v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(f) if (0.0..=1.0).contains(&f) => Ok(f),
        _ => Err(schema_err(
            line,
            alloc::format!("fill must be a number in [0, 1], got {v:?}"),
        )),
    }
}

fn parse_card(line: usize, v: &str) -> Result<Cardinality> {
    let bad = || schema_err(line, alloc::format!("bad cardinality {v:?}"));
    let (min, max) = match v.split_once("..") {
        Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        None => {
            let n = v.parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if min > max {
        return Err(bad());
    }
    Ok(Cardinality { min, max })
}

fn parse_pair(line: usize, v: &str) -> Result<(String, String)> {
    v.split_once('/')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| schema_err(line, alloc::format!("expected first/second, got {v:?}")))
}

impl SchemaSpec {
    pub fn family() -> SchemaSpec {
        SchemaSpec::parse(FAMILY_SCHEMA).expect("built-in schema parses")
    }

    pub fn parse(text: &str) -> Result<SchemaSpec> {
        let mut spec = SchemaSpec {
            base: String::from("http://example.org/synth/"),
            groups: Vec::new(),
            relations: Vec::new(),
            attributes: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            match words[0] {
                "base" if words.len() == 2 => spec.base = words[1].to_string(),
                "entity" if words.len() == 4 => {
                    let label = TypeLabel::from(words[2].to_string());
                    if matches!(label, TypeLabel::Declared(_)) {
                        return Err(schema_err(
                            line,
                            alloc::format!("unknown type {}", words[2]),
                        ));
                    }
                    let count = words[3]
                        .parse()
                        .map_err(|_| schema_err(line, "entity count must be an integer"))?;
                    spec.groups.push(EntityGroup {
                        name: words[1].to_string(),
                        label,
                        count,
                    });
                }
                "relation" if words.len() >= 4 => {
                    let mut rel = RelationSpec {
                        predicate: words[1].to_string(),
                        subject: words[2].to_string(),
                        object: words[3].to_string(),
                        card: Cardinality::ONE,
                        fill: 1.0,
                        constraints: Vec::new(),
                    };
                    for opt in &words[4..] {
                        let (key, value) = opt.split_once('=').unwrap_or((opt, ""));
                        match key {
                            "card" => rel.card = parse_card(line, value)?,
                            "fill" => rel.fill = parse_fraction(line, value)?,
                            "symmetric" => rel.constraints.push(Constraint::Symmetric),
                            "acyclic" => rel.constraints.push(Constraint::Acyclic),
                            "unique-object" => rel.constraints.push(Constraint::UniqueObject),
                            "cover" => rel.constraints.push(Constraint::Cover),
                            "shared" => rel.constraints.push(Constraint::Shared(value.to_string())),
                            "inherit" => rel.constraints.push(Constraint::Inherit(
                                value.split(',').map(Hop::parse).collect(),
                            )),
                            "compose" => rel.constraints.push(Constraint::Compose(
                                value.split('/').map(String::from).collect(),
                            )),
                            "match" => {
                                let (a, b) = parse_pair(line, value)?;
                                rel.constraints.push(Constraint::Match(a, b));
                            }
                            _ => {
                                return Err(schema_err(
                                    line,
                                    alloc::format!("unknown relation option {opt:?}"),
                                ))
                            }
                        }
                    }
                    spec.relations.push(rel);
                }
                "attribute" if words.len() >= 4 => {
                    let datatype = DatatypeTag::parse(words[3])
                        .filter(|t| {
                            !matches!(
                                t,
                                DatatypeTag::Empty | DatatypeTag::Other | DatatypeTag::PartialDate
                            )
                        })
                        .ok_or_else(|| {
                            schema_err(line, alloc::format!("unsupported datatype {}", words[3]))
                        })?;
                    let mut fill = 1.0;
                    for opt in &words[4..] {
                        match opt.split_once('=') {
                            Some(("fill", v)) => fill = parse_fraction(line, v)?,
                            _ => {
                                return Err(schema_err(
                                    line,
                                    alloc::format!("unknown attribute option {opt:?}"),
                                ))
                            }
                        }
                    }
                    let subject = (words[2] != "*").then(|| words[2].to_string());
                    spec.attributes.push(AttributeSpec {
                        predicate: words[1].to_string(),
                        subject,
                        datatype,
                        fill,
                    });
                }
                _ => return Err(schema_err(line, alloc::format!("cannot parse {content:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn group(&self, name: &str) -> Option<&EntityGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Multiplies every group size by `factor`, keeping at least one member.
    pub fn scaled(&self, factor: f64) -> SchemaSpec {
        let mut out = self.clone();
        for g in &mut out.groups {
            g.count = libm::round(g.count as f64 * factor).max(1.0) as usize;
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let unsat = |m: String| Err(Error::Unsatisfiable(m));
        for (i, g) in self.groups.iter().enumerate() {
            if self.groups[..i].iter().any(|h| h.name == g.name) {
                return unsat(alloc::format!("group {} declared twice", g.name));
            }
        }
        for (i, rel) in self.relations.iter().enumerate() {
            let earlier = &self.relations[..i];
            let known = |name: &str| earlier.iter().any(|r| r.predicate == name);
            for group in [&rel.subject, &rel.object] {
                if self.group(group).is_none() {
                    return unsat(alloc::format!("{}: unknown group {group}", rel.predicate));
                }
            }
            for c in &rel.constraints {
                match c {
                    Constraint::Symmetric if rel.subject != rel.object || rel.card.max > 1 => {
                        return unsat(alloc::format!(
                            "{}: symmetric needs one group and card at most 1",
                            rel.predicate
                        ));
                    }
                    Constraint::Acyclic if rel.subject != rel.object => {
                        return unsat(alloc::format!("{}: acyclic needs one group", rel.predicate));
                    }
                    Constraint::Shared(r) if !known(r) => {
                        return unsat(alloc::format!(
                            "{}: shared relation {r} is not declared earlier",
                            rel.predicate
                        ));
                    }
                    Constraint::Inherit(hops) => {
                        if let Some(h) = hops.iter().find(|h| !known(&h.relation)) {
                            return unsat(alloc::format!(
                                "{}: inherit relation {} is not declared earlier",
                                rel.predicate,
                                h.relation
                            ));
                        }
                    }
                    Constraint::Compose(chain) => {
                        if let Some(r) = chain.iter().find(|r| !known(r)) {
                            return unsat(alloc::format!(
                                "{}: composed relation {r} is not declared earlier",
                                rel.predicate
                            ));
                        }
                    }
                    Constraint::Match(a, b) if !known(a) || !known(b) => {
                        return unsat(alloc::format!(
                            "{}: {a}/{b} must be declared earlier",
                            rel.predicate
                        ));
                    }
                    _ => {}
                }
            }
        }
        for attr in &self.attributes {
            if let Some(g) = &attr.subject {
                if self.group(g).is_none() {
                    return unsat(alloc::format!("{}: unknown group {g}", attr.predicate));
                }
            }
        }
        Ok(())
    }
}
