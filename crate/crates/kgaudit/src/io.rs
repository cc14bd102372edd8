//! File access: graph loading, atomic writes, JSON Lines and CSV helpers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kgaudit_core::graph::KnowledgeGraph;
use kgaudit_core::ingest::{parse_ntriples_bytes, parse_turtle, ParsedDocument};
use kgaudit_core::typegen::{split_type_declarations, DeclaredTypes};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// A parsed storage file, its type declarations and the graph built from the
/// remaining well-formed statements.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub path: PathBuf,
    pub doc: ParsedDocument,
    pub declared: DeclaredTypes,
    pub graph: KnowledgeGraph,
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses `.ttl` files with the Turtle subset and everything else as
/// N-Triples.
pub fn parse_file(path: &Path) -> Result<ParsedDocument> {
    let bytes = read_bytes(path)?;
    let is_turtle = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("ttl"));
    Ok(if is_turtle {
        parse_turtle(&String::from_utf8_lossy(&bytes))
    } else {
        parse_ntriples_bytes(&bytes)
    })
}

pub fn load_graph(path: &Path) -> Result<LoadedGraph> {
    let doc = parse_file(path)?;
    let (statements, declared) = split_type_declarations(&doc);
    let usable: Vec<_> = statements
        .into_iter()
        .filter(|st| {
            st.well_formed
                && st
                    .key()
                    .is_some_and(|(s, p, _)| !doc.term(s).is_literal() && doc.term(p).is_iri())
        })
        .collect();
    let graph = KnowledgeGraph::build_from(&doc.terms, &usable)?;
    Ok(LoadedGraph {
        path: path.to_path_buf(),
        doc,
        declared,
        graph,
    })
}

/// Writes through a temporary file in the target directory, then renames it
/// into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    atomic_write(path, to_jsonl(items)?.as_bytes())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Serializes records as CSV with a header row.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer.serialize(r)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    atomic_write(path, to_csv(records)?.as_bytes())
}
