//! Anomaly detection for RDF knowledge graphs.
//!
//! The pipeline parses triples into an indexed [`graph::KnowledgeGraph`],
//! derives binary path features per triple ([`cpa`]) and per entity
//! ([`entity`]), ranks rows with an ensemble of one-class SVMs ([`detector`]),
//! and labels findings with the rule engine in [`rules`]. [`synth`], [`kgc`]
//! and [`eval`] provide labeled synthetic data and measurement.
//!
//! The crate is `no_std` + `alloc` with the default `std` feature turned off;
//! `std` only adds parallel row and kernel evaluation.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cpa;
pub mod detector;
pub mod entity;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod kgc;
pub mod matrix;
mod par;
pub mod rules;
pub mod svm;
pub mod synth;
pub mod term;
pub mod typegen;

pub use error::{Error, Result};
