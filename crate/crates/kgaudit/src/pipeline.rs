//! Pipeline stages over a loaded graph, with per-stage wall time.

use std::collections::BTreeMap;
use std::time::Instant;

use kgaudit_core::cpa::{build_fact_matrix, CpaConfig, PathDepth};
use kgaudit_core::detector::{classify_all, detect, fact_row_groups, DetectOptions, Detection};
use kgaudit_core::entity::build_entity_matrix;
use kgaudit_core::matrix::FeatureMatrix;
use kgaudit_core::rules::{run_rules, RuleHit, RulesConfig};
use kgaudit_core::svm::{KernelKind, KernelSpec};
use kgaudit_core::synth::catalog_for;
use kgaudit_core::typegen::{DeclaredTypes, TypeCatalog, DEFAULT_THETA};

use crate::error::Result;
use crate::formats::merge_declared;
use crate::io::LoadedGraph;

/// Milliseconds per named stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timings(pub BTreeMap<String, u64>);

impl Timings {
    /// Runs `f`, adds its wall time to `stage`, and names the stage in any
    /// error it returns.
    pub fn run<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage));
        *self.0.entry(stage.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixChoice {
    Facts,
    Entities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectSettings {
    pub budget: usize,
    pub depth: PathDepth,
    pub kernels: Vec<KernelKind>,
    pub theta: f64,
    pub rules: RulesConfig,
}

impl Default for DetectSettings {
    fn default() -> Self {
        DetectSettings {
            budget: kgaudit_core::detector::DEFAULT_BUDGET,
            depth: PathDepth::Two,
            kernels: KernelKind::ALL.to_vec(),
            theta: DEFAULT_THETA,
            rules: RulesConfig::default(),
        }
    }
}

pub struct DetectRun {
    pub catalog: TypeCatalog,
    pub hits: Vec<RuleHit>,
    pub matrix: FeatureMatrix,
    pub detection: Detection,
    /// Budget actually used: the requested one, capped at the row count.
    pub budget: usize,
}

pub fn type_catalog(
    loaded: &LoadedGraph,
    extra: Option<DeclaredTypes>,
    theta: f64,
    t: &mut Timings,
) -> Result<TypeCatalog> {
    t.run("typegen", || {
        let mut declared = loaded.declared.clone();
        if let Some(extra) = extra {
            merge_declared(&mut declared, extra);
        }
        Ok(catalog_for(&loaded.graph, &declared, theta)?)
    })
}

pub fn fact_matrix(
    loaded: &LoadedGraph,
    depth: PathDepth,
    t: &mut Timings,
) -> Result<FeatureMatrix> {
    t.run("features", || {
        Ok(build_fact_matrix(
            &loaded.graph,
            &CpaConfig {
                depth,
                ..CpaConfig::default()
            },
        ))
    })
}

pub fn entity_matrix(
    loaded: &LoadedGraph,
    catalog: &TypeCatalog,
    depth: PathDepth,
    t: &mut Timings,
) -> Result<FeatureMatrix> {
    let fx = fact_matrix(loaded, depth, t)?;
    t.run("features", || {
        Ok(build_entity_matrix(&loaded.graph, catalog, &fx).matrix)
    })
}

pub fn rules(
    loaded: &LoadedGraph,
    catalog: &TypeCatalog,
    config: &RulesConfig,
    t: &mut Timings,
) -> Result<Vec<RuleHit>> {
    t.run("rules", || {
        Ok(run_rules(&loaded.graph, catalog, &loaded.doc, config))
    })
}

/// Typing, features, ensemble detection and TAXO classification.
pub fn run_detection(
    loaded: &LoadedGraph,
    choice: MatrixChoice,
    settings: &DetectSettings,
    extra_types: Option<DeclaredTypes>,
    t: &mut Timings,
) -> Result<DetectRun> {
    let catalog = type_catalog(loaded, extra_types, settings.theta, t)?;
    let hits = rules(loaded, &catalog, &settings.rules, t)?;
    let matrix = match choice {
        MatrixChoice::Facts => fact_matrix(loaded, settings.depth, t)?,
        MatrixChoice::Entities => entity_matrix(loaded, &catalog, settings.depth, t)?,
    };
    let budget = settings.budget.min(matrix.n_rows());
    let detection = t.run("detect", || {
        let kernels: Vec<KernelSpec> = settings
            .kernels
            .iter()
            .map(|&k| KernelSpec::with_defaults(k, matrix.n_cols()))
            .collect();
        let row_groups = match choice {
            MatrixChoice::Facts => Some(fact_row_groups(&loaded.graph, &matrix)),
            MatrixChoice::Entities => None,
        };
        let opts = DetectOptions {
            row_groups,
            ..DetectOptions::default()
        };
        let mut detection = detect(&matrix, &kernels, budget, &opts)?;
        classify_all(&mut detection, &loaded.graph, &hits);
        Ok(detection)
    })?;
    Ok(DetectRun {
        catalog,
        hits,
        matrix,
        detection,
        budget,
    })
}
