//! On-disk record shapes. Terms are written in N-Triples syntax so records
//! stay meaningful outside the process that produced them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use kgaudit_core::detector::{AnomalyRecord, Detection, SubjectKind};
use kgaudit_core::graph::{DegreeStats, KnowledgeGraph, TripleId};
use kgaudit_core::ingest::{parse_ntriples, FileAnomaly, ParsedDocument};
use kgaudit_core::kgc::AblationRow;
use kgaudit_core::matrix::{FeatureMatrix, RowKey};
use kgaudit_core::rules::RuleHit;
use kgaudit_core::synth::{CorruptionEntry, CorruptionKind, CorruptionLog, TermTriple};
use kgaudit_core::term::{Term, TermId};
use kgaudit_core::typegen::{DeclaredTypes, Provenance, TypeCatalog, TypeLabel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleText {
    pub s: String,
    pub p: String,
    pub o: String,
}

impl TripleText {
    pub fn of(g: &KnowledgeGraph, id: TripleId) -> Self {
        let t = g.triple(id);
        TripleText {
            s: g.term(t.s).to_ntriples(),
            p: g.term(t.p).to_ntriples(),
            o: g.term(t.o).to_ntriples(),
        }
    }

    pub fn from_terms(t: &TermTriple) -> Self {
        TripleText {
            s: t.s.to_ntriples(),
            p: t.p.to_ntriples(),
            o: t.o.to_ntriples(),
        }
    }

    pub fn to_terms(&self) -> Option<TermTriple> {
        let doc = parse_ntriples(&format!("{} {} {} .", self.s, self.p, self.o));
        let st = doc.statements.first().filter(|st| st.well_formed)?;
        let (s, p, o) = st.key()?;
        Some(TermTriple {
            s: doc.term(s).clone(),
            p: doc.term(p).clone(),
            o: doc.term(o).clone(),
        })
    }

    pub fn resolve(&self, g: &KnowledgeGraph) -> Option<TripleId> {
        let t = self.to_terms()?;
        g.find(g.term_id(&t.s)?, g.term_id(&t.p)?, g.term_id(&t.o)?)
    }
}

fn term_text(doc: &ParsedDocument, id: Option<TermId>) -> Option<String> {
    id.map(|id| doc.term(id).to_ntriples())
}

/// `scan` output line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileAnomalyRecord {
    pub kind: String,
    pub lines: Vec<usize>,
    pub subject: Option<String>,
    pub predicate: Option<String>,
    pub object: Option<String>,
}

impl FileAnomalyRecord {
    pub fn of(doc: &ParsedDocument, a: &FileAnomaly) -> Self {
        FileAnomalyRecord {
            kind: a.kind.as_str().to_string(),
            lines: a.lines.clone(),
            subject: term_text(doc, a.statement.subject),
            predicate: term_text(doc, a.statement.predicate),
            object: term_text(doc, a.statement.object),
        }
    }
}

/// Detector output line, most abnormal first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub subject_kind: SubjectKind,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleText>,
    pub score: f64,
    pub votes: usize,
    pub kernel_scores: Vec<f64>,
    pub explanation: Vec<String>,
    pub taxo_class: Option<String>,
    pub correction: Option<String>,
    /// `false` for rows outside the anomaly set, present only in full reports.
    pub flagged: bool,
}

fn key_texts(g: &KnowledgeGraph, key: RowKey) -> (SubjectKind, String, Option<TripleText>) {
    match key {
        RowKey::Triple(id) => {
            let t = TripleText::of(g, id);
            (SubjectKind::Fact, t.s.clone(), Some(t))
        }
        RowKey::Entity(e) => (SubjectKind::Entity, g.term(e).to_ntriples(), None),
    }
}

impl ReportRecord {
    pub fn of_anomaly(g: &KnowledgeGraph, a: &AnomalyRecord) -> Self {
        let (subject_kind, subject, triple) = key_texts(g, a.key);
        ReportRecord {
            subject_kind,
            subject,
            triple,
            score: a.ensemble_score,
            votes: a.votes,
            kernel_scores: a.kernel_scores.clone(),
            explanation: a.explanation.clone(),
            taxo_class: a.taxo_class.map(|l| l.as_str().to_string()),
            correction: a.correction.map(|c| c.as_str().to_string()),
            flagged: true,
        }
    }

    /// The anomaly set, optionally followed by every other row by score.
    pub fn from_detection(
        g: &KnowledgeGraph,
        m: &FeatureMatrix,
        d: &Detection,
        full: bool,
    ) -> Vec<Self> {
        let mut out: Vec<Self> = d.anomalies.iter().map(|a| Self::of_anomaly(g, a)).collect();
        if full {
            let flagged: BTreeSet<usize> = d.anomalies.iter().map(|a| a.row).collect();
            for row in d
                .full_ranking()
                .into_iter()
                .filter(|r| !flagged.contains(r))
            {
                let (subject_kind, subject, triple) = key_texts(g, m.row_keys[row]);
                out.push(ReportRecord {
                    subject_kind,
                    subject,
                    triple,
                    score: d.ensemble[row],
                    votes: d.votes[row],
                    kernel_scores: d.kernel_scores.iter().map(|k| k[row]).collect(),
                    explanation: Vec::new(),
                    taxo_class: None,
                    correction: None,
                    flagged: false,
                });
            }
        }
        out
    }
}

/// Fixed-width text table of report records.
pub fn report_table(records: &[ReportRecord]) -> String {
    let mut out = format!(
        "{:>5}  {:>9}  {:>5}  {:<26}  {}\n",
        "rank", "score", "votes", "class", "subject"
    );
    for (i, r) in records.iter().enumerate() {
        let what = match &r.triple {
            Some(t) => format!("{} {} {}", t.s, t.p, t.o),
            None => r.subject.clone(),
        };
        let class = r
            .taxo_class
            .as_deref()
            .unwrap_or(if r.flagged { "-" } else { "normal" });
        let _ = writeln!(
            out,
            "{:>5}  {:>9.4}  {:>5}  {:<26}  {}",
            i + 1,
            r.score,
            r.votes,
            class,
            what
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleHitRecord {
    pub rule: String,
    pub label: String,
    pub triples: Vec<TripleText>,
    pub entity: Option<String>,
    pub lines: Vec<usize>,
    pub detail: String,
}

impl RuleHitRecord {
    pub fn of(g: &KnowledgeGraph, h: &RuleHit) -> Self {
        RuleHitRecord {
            rule: h.rule.as_str().to_string(),
            label: h.label.as_str().to_string(),
            triples: h.triples.iter().map(|&t| TripleText::of(g, t)).collect(),
            entity: h.entity.map(|e| g.term(e).to_ntriples()),
            lines: h.lines.clone(),
            detail: h.detail.clone(),
        }
    }
}

pub fn rule_table(records: &[RuleHitRecord]) -> String {
    let mut out = format!("{:<20}  {:<26}  {}\n", "rule", "label", "detail");
    for r in records {
        let _ = writeln!(out, "{:<20}  {:<26}  {}", r.rule, r.label, r.detail);
    }
    out
}

/// One corruption log line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seed: u64,
    pub kind: CorruptionKind,
    pub triple_id: u32,
    pub original: Option<TripleText>,
    pub corrupted: TripleText,
}

pub fn log_records(log: &CorruptionLog) -> Vec<LogRecord> {
    log.entries
        .iter()
        .map(|e| LogRecord {
            seed: log.seed,
            kind: e.kind,
            triple_id: e.triple.0,
            original: e.original.as_ref().map(TripleText::from_terms),
            corrupted: TripleText::from_terms(&e.corrupted),
        })
        .collect()
}

/// Rebuilds a log against `g`, resolving every corrupted triple by its terms.
pub fn log_from_records(records: &[LogRecord], g: &KnowledgeGraph) -> Result<CorruptionLog> {
    let mut entries = Vec::with_capacity(records.len());
    for r in records {
        let corrupted = r
            .corrupted
            .to_terms()
            .ok_or_else(|| Error::Usage(format!("unreadable triple in log: {:?}", r.corrupted)))?;
        let triple = r.corrupted.resolve(g).ok_or_else(|| {
            Error::Usage(format!(
                "logged triple not in graph: {} {} {}",
                r.corrupted.s, r.corrupted.p, r.corrupted.o
            ))
        })?;
        let original = match &r.original {
            Some(t) => Some(
                t.to_terms()
                    .ok_or_else(|| Error::Usage(format!("unreadable triple in log: {t:?}")))?,
            ),
            None => None,
        };
        entries.push(CorruptionEntry {
            triple,
            kind: r.kind,
            original,
            corrupted,
        });
    }
    Ok(CorruptionLog {
        seed: records.first().map_or(0, |r| r.seed),
        entries,
    })
}

/// Entity → `[type, provenance]` pairs, keyed by the entity's N-Triples form.
pub type CatalogJson = BTreeMap<String, Vec<(String, Provenance)>>;

pub fn catalog_json(g: &KnowledgeGraph, catalog: &TypeCatalog) -> CatalogJson {
    catalog
        .entity_types
        .iter()
        .map(|(&e, types)| {
            (
                g.term(e).to_ntriples(),
                types
                    .iter()
                    .map(|(label, &prov)| (label.as_str().to_string(), prov))
                    .collect(),
            )
        })
        .collect()
}

fn label_of(name: &str) -> TypeLabel {
    match name {
        "PERSON" => TypeLabel::Person,
        "LOCATION" => TypeLabel::Location,
        "ORGANIZATION" => TypeLabel::Organization,
        "DATE" => TypeLabel::Date,
        "NUMBER" => TypeLabel::Number,
        "WORK" => TypeLabel::Work,
        "OTHER" => TypeLabel::Other,
        iri => TypeLabel::Declared(iri.to_string()),
    }
}

/// Reads an exported catalog back as declarations, whatever the recorded
/// provenance.
pub fn declared_from_catalog(json: &CatalogJson) -> Result<DeclaredTypes> {
    let mut declared = DeclaredTypes::default();
    for (entity, types) in json {
        let doc = parse_ntriples(&format!("{entity} <urn:kgaudit:p> <urn:kgaudit:o> ."));
        let term: Term = doc
            .statements
            .first()
            .and_then(|st| st.subject)
            .map(|id| doc.term(id).clone())
            .ok_or_else(|| {
                Error::Usage(format!(
                    "catalog entity is not an IRI or blank node: {entity}"
                ))
            })?;
        for (label, _) in types {
            declared.insert(term.clone(), label_of(label));
        }
    }
    Ok(declared)
}

pub fn merge_declared(into: &mut DeclaredTypes, extra: DeclaredTypes) {
    for (entity, labels) in extra.0 {
        for label in labels {
            into.insert(entity.clone(), label);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseCell {
    pub row_key: String,
    pub feature: String,
    pub value: u8,
}

pub fn row_key_text(g: &KnowledgeGraph, key: RowKey) -> String {
    match key {
        RowKey::Triple(id) => {
            let t = TripleText::of(g, id);
            format!("{} {} {}", t.s, t.p, t.o)
        }
        RowKey::Entity(e) => g.term(e).to_ntriples(),
    }
}

/// `row_key,feature,1` for every set bit.
pub fn sparse_cells(g: &KnowledgeGraph, m: &FeatureMatrix) -> Vec<SparseCell> {
    let mut out = Vec::new();
    for (row, key) in m.row_keys.iter().enumerate() {
        let key = row_key_text(g, *key);
        for name in m.column_names(row) {
            out.push(SparseCell {
                row_key: key.clone(),
                feature: name.to_string(),
                value: 1,
            });
        }
    }
    out
}

/// Header plus one 0/1 line per row.
pub fn dense_csv(g: &KnowledgeGraph, m: &FeatureMatrix) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(std::iter::once("row_key").chain(m.catalog.iter().map(String::as_str)))?;
    for (row, key) in m.row_keys.iter().enumerate() {
        let mut record = vec![row_key_text(g, *key)];
        record.extend(
            (0..m.n_cols()).map(|c| if m.get(row, c as u32) { "1" } else { "0" }.to_string()),
        );
        writer.write_record(&record)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub index: usize,
    pub feature: String,
}

pub fn feature_dictionary(m: &FeatureMatrix) -> Vec<FeatureEntry> {
    m.catalog
        .iter()
        .enumerate()
        .map(|(index, f)| FeatureEntry {
            index,
            feature: f.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub entity: String,
    pub total: usize,
    pub out_degree: usize,
    pub in_degree: usize,
    pub literal_count: usize,
}

pub fn degree_rows(g: &KnowledgeGraph, stats: &DegreeStats) -> Vec<DegreeRow> {
    stats
        .per_entity
        .iter()
        .map(|d| DegreeRow {
            entity: g.term(d.entity).to_ntriples(),
            total: d.total,
            out_degree: d.out_degree,
            in_degree: d.in_degree,
            literal_count: d.literal_count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCsvRow {
    pub model: String,
    pub measure: String,
    pub particular: String,
    pub value: f64,
}

pub fn ablation_csv_rows(rows: &[AblationRow]) -> Vec<AblationCsvRow> {
    rows.iter()
        .map(|r| AblationCsvRow {
            model: r.model.clone(),
            measure: r.measure.clone(),
            particular: r.particular.as_str().to_string(),
            value: r.value,
        })
        .collect()
}
