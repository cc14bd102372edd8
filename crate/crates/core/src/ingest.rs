//! Line-oriented N-Triples / Turtle-subset ingestion and storage-file scanning.
//!
//! Every non-blank, non-comment line becomes exactly one [`RawStatement`].
//! Slots that cannot be read are recorded as absent instead of failing the
//! parse, so that missing elements can be reported as file-level anomalies.
//!
//! Absent slots are positional: the writer in [`format_statement`] renders an
//! absent slot as an empty field between single spaces, so ` <p> <o> .` has no
//! subject, `<s>  <o> .` no predicate and `<s> <p>  .` no object. The empty IRI
//! `<>` is also read as an absent slot.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::term::{Interner, Term, TermId};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// One parsed line of a storage file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawStatement {
    pub line: usize,
    pub subject: Option<TermId>,
    pub predicate: Option<TermId>,
    pub object: Option<TermId>,
    pub well_formed: bool,
}

impl RawStatement {
    pub fn key(&self) -> Option<(TermId, TermId, TermId)> {
        Some((self.subject?, self.predicate?, self.object?))
    }
}

/// Parsed statements together with the interner that owns their terms.
#[derive(Debug, Clone, Default)]
pub struct ParsedDocument {
    pub terms: Interner,
    pub statements: Vec<RawStatement>,
}

impl ParsedDocument {
    pub fn term(&self, id: TermId) -> &Term {
        self.terms.resolve(id)
    }

    pub fn well_formed(&self) -> impl Iterator<Item = &RawStatement> {
        self.statements.iter().filter(|s| s.well_formed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FileAnomalyKind {
    MissingSubject,
    MissingPredicate,
    MissingObject,
    DuplicateStatement,
}

impl FileAnomalyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FileAnomalyKind::MissingSubject => "MISSING_SUBJECT",
            FileAnomalyKind::MissingPredicate => "MISSING_PREDICATE",
            FileAnomalyKind::MissingObject => "MISSING_OBJECT",
            FileAnomalyKind::DuplicateStatement => "DUPLICATE_STATEMENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileAnomaly {
    pub kind: FileAnomalyKind,
    pub lines: Vec<usize>,
    pub statement: RawStatement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Term(Term),
    /// `<>` or an unreadable chunk: the slot exists but holds nothing usable.
    Empty,
}

#[derive(Debug)]
enum Item {
    Ws(usize),
    Tok(Token),
    Dot,
}

/// Streaming line parser. Feed lines in order with [`Parser::parse_line`].
#[derive(Debug, Clone, Default)]
pub struct Parser {
    interner: Interner,
    prefixes: BTreeMap<String, String>,
    turtle: bool,
}

impl Parser {
    pub fn ntriples() -> Self {
        Self::default()
    }

    /// Accepts `@prefix`/`PREFIX` directives, prefixed names, the `a` keyword
    /// and bare numeric literals, one statement per line.
    pub fn turtle() -> Self {
        Parser {
            turtle: true,
            ..Self::default()
        }
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub fn finish(self, statements: Vec<RawStatement>) -> ParsedDocument {
        ParsedDocument {
            terms: self.interner,
            statements,
        }
    }

    /// Returns `None` for blank lines, comments and directives.
    pub fn parse_line(&mut self, line_no: usize, line: &str) -> Option<RawStatement> {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        if self.turtle && self.try_directive(trimmed) {
            return None;
        }
        let body = line.trim_end_matches(['\r', '\n']);
        let items = self.scan(body);
        let (fields, extra) = assign_fields(&items);
        let mut slots: [Option<TermId>; 3] = [None, None, None];
        let mut kinds: [Option<&Term>; 3] = [None, None, None];
        let mut owned: [Option<Term>; 3] = [None, None, None];
        for (i, f) in fields.into_iter().enumerate() {
            if let Some(Token::Term(t)) = f {
                owned[i] = Some(t);
            }
        }
        for i in 0..3 {
            if let Some(t) = owned[i].take() {
                let id = self.interner.intern(t);
                slots[i] = Some(id);
            }
        }
        for i in 0..3 {
            kinds[i] = slots[i].map(|id| self.interner.resolve(id));
        }
        let well_formed = !extra
            && matches!(kinds[0], Some(Term::Iri(_)) | Some(Term::Blank(_)))
            && matches!(kinds[1], Some(Term::Iri(_)))
            && kinds[2].is_some();
        Some(RawStatement {
            line: line_no,
            subject: slots[0],
            predicate: slots[1],
            object: slots[2],
            well_formed,
        })
    }

    fn try_directive(&mut self, line: &str) -> bool {
        let rest = if let Some(r) = line.strip_prefix("@prefix") {
            r
        } else if line.len() >= 6 && line[..6].eq_ignore_ascii_case("prefix") {
            &line[6..]
        } else {
            return line.starts_with("@base")
                || (line.len() >= 4 && line[..4].eq_ignore_ascii_case("base"));
        };
        let rest = rest.trim().trim_end_matches('.').trim();
        if let Some((name, iri)) = rest.split_once(':') {
            let iri = iri.trim();
            if let Some(inner) = iri.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
                self.prefixes
                    .insert(String::from(name.trim()), String::from(inner));
            }
        }
        true
    }

    fn scan(&self, line: &str) -> Vec<Item> {
        let chars: Vec<char> = line.chars().collect();
        let mut items = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == ' ' || c == '\t' {
                let start = i;
                while i < chars.len() && (chars[i] == ' ' || chars[i] == '\t') {
                    i += 1;
                }
                items.push(Item::Ws(i - start));
                continue;
            }
            if c == '#' && matches!(items.last(), Some(Item::Ws(_)) | Some(Item::Dot)) {
                break;
            }
            if c == '.' && is_terminator(&chars, i) {
                items.push(Item::Dot);
                i += 1;
                continue;
            }
            let (tok, next) = self.read_token(&chars, i);
            items.push(Item::Tok(tok));
            i = next;
        }
        items
    }

    fn read_token(&self, chars: &[char], start: usize) -> (Token, usize) {
        match chars[start] {
            '<' => {
                let mut j = start + 1;
                while j < chars.len() && chars[j] != '>' {
                    j += 1;
                }
                if j >= chars.len() {
                    return (Token::Empty, skip_chunk(chars, start));
                }
                let iri: String = chars[start + 1..j].iter().collect();
                if iri.trim().is_empty() {
                    (Token::Empty, j + 1)
                } else {
                    (Token::Term(Term::Iri(iri)), j + 1)
                }
            }
            '"' => self.read_literal(chars, start),
            '_' if chars.get(start + 1) == Some(&':') => {
                let end = skip_chunk(chars, start);
                let label: String = chars[start + 2..end].iter().collect();
                let label = String::from(label.trim_end_matches('.'));
                if label.is_empty() {
                    (Token::Empty, end)
                } else {
                    (Token::Term(Term::Blank(label)), end)
                }
            }
            _ => {
                let end = skip_chunk(chars, start);
                let mut word: String = chars[start..end].iter().collect();
                let mut end = end;
                // `ex:foo.` at end of line: the dot terminates the statement
                if word.ends_with('.') && end == chars.len() {
                    word.pop();
                    end -= 1;
                }
                (self.bare_word(&word), end)
            }
        }
    }

    fn bare_word(&self, word: &str) -> Token {
        if !self.turtle {
            return Token::Empty;
        }
        if word == "a" {
            return Token::Term(Term::iri(RDF_TYPE));
        }
        if word == "true" || word == "false" {
            return Token::Term(Term::typed_literal(word, alloc::format!("{XSD}boolean")));
        }
        if word.starts_with(|c: char| c.is_ascii_digit() || c == '+' || c == '-') {
            let tag = crate::term::DatatypeTag::detect(word);
            let dt = match tag {
                crate::term::DatatypeTag::Integer => "integer",
                crate::term::DatatypeTag::Decimal => "decimal",
                _ => return Token::Empty,
            };
            return Token::Term(Term::typed_literal(word, alloc::format!("{XSD}{dt}")));
        }
        self.expand(word)
            .map(|iri| Token::Term(Term::Iri(iri)))
            .unwrap_or(Token::Empty)
    }

    fn expand(&self, word: &str) -> Option<String> {
        let (prefix, local) = word.split_once(':')?;
        let base = self.prefixes.get(prefix)?;
        let mut iri = base.clone();
        iri.push_str(local);
        Some(iri)
    }

    fn read_literal(&self, chars: &[char], start: usize) -> (Token, usize) {
        let mut lexical = String::new();
        let mut j = start + 1;
        let mut closed = false;
        while j < chars.len() {
            match chars[j] {
                '"' => {
                    closed = true;
                    j += 1;
                    break;
                }
                '\\' if j + 1 < chars.len() => {
                    let e = chars[j + 1];
                    j += 2;
                    match e {
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        't' => lexical.push('\t'),
                        'b' => lexical.push('\u{8}'),
                        'f' => lexical.push('\u{c}'),
                        'u' | 'U' => {
                            let len = if e == 'u' { 4 } else { 8 };
                            let hex: String = chars[j..(j + len).min(chars.len())].iter().collect();
                            j += len;
                            match u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                                Some(c) => lexical.push(c),
                                None => {
                                    return (Token::Empty, skip_chunk(chars, j.min(chars.len())))
                                }
                            }
                        }
                        other => lexical.push(other),
                    }
                }
                c => {
                    lexical.push(c);
                    j += 1;
                }
            }
        }
        if !closed {
            return (Token::Empty, chars.len());
        }
        if chars.get(j) == Some(&'@') {
            let end = skip_chunk(chars, j);
            let lang: String = chars[j + 1..end].iter().collect();
            return (Token::Term(Term::lang_literal(lexical, lang)), end);
        }
        if chars.get(j) == Some(&'^') && chars.get(j + 1) == Some(&'^') {
            let k = j + 2;
            if chars.get(k) == Some(&'<') {
                let mut e = k + 1;
                while e < chars.len() && chars[e] != '>' {
                    e += 1;
                }
                if e >= chars.len() {
                    return (Token::Empty, chars.len());
                }
                let iri: String = chars[k + 1..e].iter().collect();
                return (Token::Term(Term::typed_literal(lexical, iri)), e + 1);
            }
            let end = skip_chunk(chars, k);
            let word: String = chars[k..end].iter().collect();
            return match self.expand(&word) {
                Some(iri) => (Token::Term(Term::typed_literal(lexical, iri)), end),
                None => (Token::Empty, end),
            };
        }
        (Token::Term(Term::literal(lexical)), j)
    }
}

fn is_terminator(chars: &[char], i: usize) -> bool {
    let rest_blank = chars[i + 1..].iter().all(|c| c.is_whitespace())
        || chars[i + 1..].iter().find(|c| !c.is_whitespace()) == Some(&'#');
    rest_blank
}

fn skip_chunk(chars: &[char], start: usize) -> usize {
    let mut j = start;
    while j < chars.len() && chars[j] != ' ' && chars[j] != '\t' {
        j += 1;
    }
    j
}

/// Maps scanned items onto subject/predicate/object slots. Returns the three
/// slots and whether unexpected extra tokens were present.
fn assign_fields(items: &[Item]) -> (Vec<Option<Token>>, bool) {
    let tokens: Vec<&Token> = items
        .iter()
        .take_while(|it| !matches!(it, Item::Dot))
        .filter_map(|it| match it {
            Item::Tok(t) => Some(t),
            _ => None,
        })
        .collect();
    if tokens.len() >= 3 {
        let extra = tokens.len() > 3;
        return (
            tokens.into_iter().take(3).cloned().map(Some).collect(),
            extra,
        );
    }

    // Fewer than three tokens: recover empty slots from spacing.
    let body: Vec<&Item> = items
        .iter()
        .take_while(|it| !matches!(it, Item::Dot))
        .collect();
    let mut fields: Vec<Option<Token>> = Vec::new();
    for (idx, it) in body.iter().enumerate() {
        match it {
            Item::Ws(n) => {
                let at_start = idx == 0;
                let at_end = idx + 1 == body.len();
                if at_start || *n >= 2 || (at_end && *n >= 2) {
                    fields.push(None);
                }
            }
            Item::Tok(t) => fields.push(Some((*t).clone())),
            Item::Dot => {}
        }
    }
    if fields.len() != 3 {
        fields = tokens.into_iter().cloned().map(Some).collect();
        fields.resize(3, None);
    }
    (fields, false)
}

/// Parses N-Triples text.
pub fn parse_ntriples(text: &str) -> ParsedDocument {
    parse_with(Parser::ntriples(), text)
}

/// Parses the line-oriented Turtle subset.
pub fn parse_turtle(text: &str) -> ParsedDocument {
    parse_with(Parser::turtle(), text)
}

/// Parses raw bytes; invalid UTF-8 sequences are replaced, which turns the
/// affected slot into a malformed one rather than aborting.
pub fn parse_ntriples_bytes(bytes: &[u8]) -> ParsedDocument {
    let text = String::from_utf8_lossy(bytes);
    parse_ntriples(&text)
}

fn parse_with(mut parser: Parser, text: &str) -> ParsedDocument {
    let mut statements = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if let Some(st) = parser.parse_line(i + 1, line) {
            statements.push(st);
        }
    }
    parser.finish(statements)
}

/// Renders a statement as one N-Triples line, absent slots as empty fields.
pub fn format_statement(terms: &Interner, st: &RawStatement) -> String {
    let mut out = String::new();
    let slot = |out: &mut String, id: Option<TermId>| {
        if let Some(id) = id {
            crate::term::write_term(out, terms.resolve(id));
        }
    };
    slot(&mut out, st.subject);
    out.push(' ');
    slot(&mut out, st.predicate);
    out.push(' ');
    slot(&mut out, st.object);
    out.push_str(" .");
    out
}

/// Reports one anomaly per statement with a missing or unusable slot and one
/// per group of exactly repeated well-formed statements.
pub fn scan_storage_anomalies(statements: &[RawStatement]) -> Vec<FileAnomaly> {
    scan_with_terms(statements, None)
}

/// Like [`scan_storage_anomalies`] but also treats a literal subject or a
/// non-IRI predicate as missing, which needs the term table.
pub fn scan_document(doc: &ParsedDocument) -> Vec<FileAnomaly> {
    scan_with_terms(&doc.statements, Some(&doc.terms))
}

fn scan_with_terms(statements: &[RawStatement], terms: Option<&Interner>) -> Vec<FileAnomaly> {
    let mut out = Vec::new();
    let mut groups: BTreeMap<(TermId, TermId, TermId), Vec<usize>> = BTreeMap::new();
    for (idx, st) in statements.iter().enumerate() {
        if st.well_formed {
            if let Some(k) = st.key() {
                groups.entry(k).or_default().push(idx);
            }
            continue;
        }
        let bad_subject = st.subject.is_none()
            || terms.is_some_and(|t| st.subject.is_some_and(|id| t.resolve(id).is_literal()));
        let bad_predicate = st.predicate.is_none()
            || terms.is_some_and(|t| st.predicate.is_some_and(|id| !t.resolve(id).is_iri()));
        let kind = if bad_subject {
            FileAnomalyKind::MissingSubject
        } else if bad_predicate {
            FileAnomalyKind::MissingPredicate
        } else if st.object.is_none() {
            FileAnomalyKind::MissingObject
        } else {
            // all slots present but trailing tokens: malformed, nothing missing
            continue;
        };
        out.push(FileAnomaly {
            kind,
            lines: alloc::vec![st.line],
            statement: *st,
        });
    }
    for (_, idxs) in groups {
        if idxs.len() >= 2 {
            out.push(FileAnomaly {
                kind: FileAnomalyKind::DuplicateStatement,
                lines: idxs.iter().map(|&i| statements[i].line).collect(),
                statement: statements[idxs[0]],
            });
        }
    }
    out.sort_by(|a, b| a.lines[0].cmp(&b.lines[0]).then(a.kind.cmp(&b.kind)));
    out
}
