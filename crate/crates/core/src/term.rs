//! RDF terms, datatype tagging and term interning.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

/// Coarse datatype of a literal, used for content checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DatatypeTag {
    String,
    Integer,
    Decimal,
    Date,
    PartialDate,
    Url,
    Empty,
    Other,
}

impl DatatypeTag {
    pub const ALL: [DatatypeTag; 8] = [
        DatatypeTag::String,
        DatatypeTag::Integer,
        DatatypeTag::Decimal,
        DatatypeTag::Date,
        DatatypeTag::PartialDate,
        DatatypeTag::Url,
        DatatypeTag::Empty,
        DatatypeTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatatypeTag::String => "STRING",
            DatatypeTag::Integer => "INTEGER",
            DatatypeTag::Decimal => "DECIMAL",
            DatatypeTag::Date => "DATE",
            DatatypeTag::PartialDate => "PARTIAL_DATE",
            DatatypeTag::Url => "URL",
            DatatypeTag::Empty => "EMPTY",
            DatatypeTag::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<DatatypeTag> {
        DatatypeTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
    }

    /// Heuristic tag for an untyped lexical form.
    pub fn detect(lexical: &str) -> DatatypeTag {
        let s = lexical.trim();
        if s.is_empty() {
            DatatypeTag::Empty
        } else if is_iso_date(s) {
            DatatypeTag::Date
        } else if is_masked_date(s) {
            DatatypeTag::PartialDate
        } else if is_integer(s) {
            DatatypeTag::Integer
        } else if is_decimal(s) {
            DatatypeTag::Decimal
        } else if s.starts_with("http://") || s.starts_with("https://") {
            DatatypeTag::Url
        } else {
            DatatypeTag::String
        }
    }

    /// Tag implied by an explicit `^^` datatype IRI. `None` means the IRI is not
    /// one we map, and the caller should fall back to [`DatatypeTag::Other`].
    pub fn from_datatype_iri(iri: &str) -> Option<DatatypeTag> {
        let local = iri.rsplit(['#', '/', ':']).next().unwrap_or(iri);
        Some(match local {
            "string" | "langString" | "normalizedString" | "token" => DatatypeTag::String,
            "integer" | "int" | "long" | "short" | "byte" | "nonNegativeInteger"
            | "positiveInteger" | "negativeInteger" | "nonPositiveInteger" | "unsignedInt"
            | "unsignedLong" => DatatypeTag::Integer,
            "decimal" | "double" | "float" => DatatypeTag::Decimal,
            "date" | "dateTime" => DatatypeTag::Date,
            "gYear" | "gYearMonth" | "gMonthDay" => DatatypeTag::PartialDate,
            "anyURI" => DatatypeTag::Url,
            _ => return None,
        })
    }
}

impl fmt::Display for DatatypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    if !(all_digits(&s[0..4]) && all_digits(&s[5..7]) && all_digits(&s[8..10])) {
        return false;
    }
    let month: u32 = s[5..7].parse().unwrap_or(0);
    let day: u32 = s[8..10].parse().unwrap_or(0);
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

// `1961-##-##` style: a year followed by masked month and/or day. LaTeX-escaped
// masks (`\#`) are accepted too.
fn is_masked_date(s: &str) -> bool {
    let cleaned: String = s.replace("\\#", "#");
    let parts: Vec<&str> = cleaned.split('-').collect();
    if parts.len() != 3 || parts[0].len() != 4 || !all_digits(parts[0]) {
        return false;
    }
    let field_ok = |p: &str| p.len() == 2 && (all_digits(p) || p == "##");
    field_ok(parts[1]) && field_ok(parts[2]) && (parts[1] == "##" || parts[2] == "##")
}

fn is_integer(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    all_digits(digits)
}

fn is_decimal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    if let Some(exp) = exponent {
        if !is_integer(exp) {
            return false;
        }
    }
    match mantissa.split_once('.') {
        Some((int, frac)) => {
            (int.is_empty() || all_digits(int))
                && (frac.is_empty() || all_digits(frac))
                && !(int.is_empty() && frac.is_empty())
        }
        None => exponent.is_some() && all_digits(mantissa),
    }
}

/// An RDF term. IRIs are stored without angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(String),
    Literal {
        lexical: String,
        datatype: DatatypeTag,
        /// Language tag (`@en`) or datatype IRI (`^^<...>`) as written, kept so
        /// that serialization round-trips.
        annotation: Option<LiteralAnnotation>,
    },
    Blank(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LiteralAnnotation {
    Lang(String),
    Datatype(String),
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn blank(s: impl Into<String>) -> Term {
        Term::Blank(s.into())
    }

    /// Plain literal with a heuristic datatype tag.
    pub fn literal(lexical: impl Into<String>) -> Term {
        let lexical = lexical.into();
        let datatype = DatatypeTag::detect(&lexical);
        Term::Literal {
            lexical,
            datatype,
            annotation: None,
        }
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Term {
        let lexical = lexical.into();
        let datatype = DatatypeTag::detect(&lexical);
        Term::Literal {
            lexical,
            datatype,
            annotation: Some(LiteralAnnotation::Lang(lang.into())),
        }
    }

    /// Literal with an explicit datatype IRI, which overrides the heuristics.
    pub fn typed_literal(lexical: impl Into<String>, datatype_iri: impl Into<String>) -> Term {
        let lexical = lexical.into();
        let iri = datatype_iri.into();
        let datatype = if lexical.trim().is_empty() {
            DatatypeTag::Empty
        } else {
            DatatypeTag::from_datatype_iri(&iri).unwrap_or(DatatypeTag::Other)
        };
        Term::Literal {
            lexical,
            datatype,
            annotation: Some(LiteralAnnotation::Datatype(iri)),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    /// IRIs and blank nodes.
    pub fn is_entity(&self) -> bool {
        !self.is_literal()
    }

    pub fn datatype(&self) -> Option<DatatypeTag> {
        match self {
            Term::Literal { datatype, .. } => Some(*datatype),
            _ => None,
        }
    }

    /// IRI text, lexical form, or blank label.
    pub fn text(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Blank(s) => s,
            Term::Literal { lexical, .. } => lexical,
        }
    }

    /// Short human name: the IRI fragment or last path segment.
    pub fn local_name(&self) -> &str {
        match self {
            Term::Iri(s) => {
                let trimmed = s.trim_end_matches(['/', '#']);
                let tail = trimmed.rsplit(['#', '/']).next().unwrap_or(trimmed);
                if tail.is_empty() {
                    s
                } else {
                    tail
                }
            }
            other => other.text(),
        }
    }

    /// N-Triples rendering.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        write_term(&mut out, self);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

pub(crate) fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(s) => {
            out.push('<');
            out.push_str(s);
            out.push('>');
        }
        Term::Blank(s) => {
            out.push_str("_:");
            out.push_str(s);
        }
        Term::Literal {
            lexical,
            annotation,
            ..
        } => {
            out.push('"');
            for c in lexical.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            match annotation {
                Some(LiteralAnnotation::Lang(l)) => {
                    out.push('@');
                    out.push_str(l);
                }
                Some(LiteralAnnotation::Datatype(d)) => {
                    out.push_str("^^<");
                    out.push_str(d);
                    out.push('>');
                }
                None => {}
            }
        }
    }
}

/// Dense identifier of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Maps equal terms to equal ids.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    pub fn get(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn resolve(&self, id: TermId) -> &Term {
        &self.terms[id.index()]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
}
