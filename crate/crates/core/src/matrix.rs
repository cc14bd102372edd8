//! Sparse binary feature matrices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::TripleId;
use crate::term::TermId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatrixKind {
    FactMatrix,
    EntityMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RowKey {
    Triple(TripleId),
    Entity(TermId),
}

/// A binary row stored as strictly increasing column indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SparseRow(Vec<u32>);

impl SparseRow {
    pub fn new() -> Self {
        SparseRow(Vec::new())
    }

    /// Sorts and deduplicates arbitrary column indices.
    pub fn from_unsorted(mut cols: Vec<u32>) -> Self {
        cols.sort_unstable();
        cols.dedup();
        SparseRow(cols)
    }

    pub fn columns(&self) -> &[u32] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, col: u32) -> bool {
        self.0.binary_search(&col).is_ok()
    }

    pub fn max_column(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Number of shared set bits.
    pub fn dot(&self, other: &SparseRow) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Size of the symmetric difference, i.e. squared Euclidean distance.
    pub fn hamming(&self, other: &SparseRow) -> usize {
        self.count_ones() + other.count_ones() - 2 * self.dot(other)
    }

    pub fn union(&self, other: &SparseRow) -> SparseRow {
        let mut cols = Vec::with_capacity(self.0.len() + other.0.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            cols.push(next);
        }
        SparseRow(cols)
    }

    pub fn to_dense(&self, width: usize) -> Vec<u8> {
        let mut out = alloc::vec![0u8; width];
        for &c in &self.0 {
            out[c as usize] = 1;
        }
        out
    }
}

impl From<Vec<u32>> for SparseRow {
    fn from(cols: Vec<u32>) -> Self {
        SparseRow::from_unsorted(cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub kind: MatrixKind,
    pub row_keys: Vec<RowKey>,
    pub catalog: Vec<String>,
    pub rows: Vec<SparseRow>,
}

impl FeatureMatrix {
    pub fn empty(kind: MatrixKind) -> Self {
        FeatureMatrix {
            kind,
            row_keys: Vec::new(),
            catalog: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.catalog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: usize, col: u32) -> bool {
        self.rows[row].contains(col)
    }

    pub fn column_names(&self, row: usize) -> impl Iterator<Item = &str> {
        self.rows[row]
            .columns()
            .iter()
            .map(|&c| self.catalog[c as usize].as_str())
    }

    pub fn column_lookup(&self) -> BTreeMap<&str, u32> {
        self.catalog
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), i as u32))
            .collect()
    }

    pub fn row_of(&self, key: RowKey) -> Option<usize> {
        self.row_keys.iter().position(|k| *k == key)
    }

    /// The given rows, in the given order, over the same column catalog.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            kind: self.kind,
            row_keys: rows.iter().map(|&r| self.row_keys[r]).collect(),
            catalog: self.catalog.clone(),
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
        }
    }

    /// Checks the structural invariants: aligned keys and in-range columns.
    pub fn is_consistent(&self) -> bool {
        self.row_keys.len() == self.rows.len()
            && self.rows.iter().all(|r| {
                r.max_column()
                    .is_none_or(|c| (c as usize) < self.catalog.len())
                    && r.columns().windows(2).all(|w| w[0] < w[1])
            })
    }
}
