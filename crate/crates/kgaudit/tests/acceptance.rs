//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 5 is a known failure of the default kernel ensemble on literal
//! corruption. It is measured at its stated tolerance and reported as FAIL,
//! but does not abort the run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kgaudit::formats::{RuleHitRecord, TripleText};
use kgaudit::io::load_graph;
use kgaudit_core::cpa::{build_fact_matrix, enumerate_paths, CpaConfig, PathSignature, Step};
use kgaudit_core::detector::{default_kernels, detect, DetectOptions};
use kgaudit_core::entity::{build_entity_matrix, rows_by_type};
use kgaudit_core::eval::{entity_truth, exact_auc, fact_truth, precision_recall_at_budget};
use kgaudit_core::graph::{KnowledgeGraph, TripleKind};
use kgaudit_core::ingest::{parse_ntriples, scan_document, FileAnomalyKind};
use kgaudit_core::kgc::{ablation_run, AblationConfig, Particular, TransEConfig};
use kgaudit_core::matrix::{FeatureMatrix, MatrixKind, RowKey, SparseRow};
use kgaudit_core::rules::{run_rules, RulesConfig};
use kgaudit_core::svm::{train_ocsvm, KernelKind};
use kgaudit_core::synth::{
    catalog_for, corrupt_facts, corrupt_literals, gen_synthetic, plant_stream_anomalies,
    CorruptionKind, SchemaSpec,
};
use kgaudit_core::term::{Term, TermId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

const KNOWN_UNATTAINABLE: &[u32] = &[5];
const SEEDS: u64 = 5;
const THETA: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

// Criterion 1: brute-force all-paths oracle built from the raw triple list.

fn brute_force_paths(
    triples: &[(TermId, TermId, TermId)],
    entities: &BTreeSet<TermId>,
    s: TermId,
    o: TermId,
    own: TermId,
) -> BTreeSet<PathSignature> {
    let mut out = BTreeSet::new();
    let entity_triples: Vec<_> = triples.iter().filter(|t| entities.contains(&t.2)).collect();
    if entity_triples
        .iter()
        .any(|&&(a, p, b)| a == s && p == own && b != o)
    {
        out.insert(PathSignature::HalfSp(Step::fwd(own)));
    }
    let steps = |from: TermId, to: TermId| -> Vec<Step> {
        let mut v = Vec::new();
        for &&(a, p, b) in &entity_triples {
            if a == from && b == to {
                v.push(Step::fwd(p));
            }
            if a == to && b == from {
                v.push(Step::inv(p));
            }
        }
        v
    };
    for step in steps(s, o) {
        if step != Step::fwd(own) {
            out.insert(PathSignature::AltDirect(step));
        }
    }
    for &z in entities {
        if z == s || z == o {
            continue;
        }
        let first = steps(s, z);
        if first.is_empty() {
            continue;
        }
        for b in steps(z, o) {
            for &a in &first {
                out.insert(PathSignature::Length2(a, b));
            }
        }
    }
    out
}

fn random_graph(rng: &mut ChaCha8Rng) -> KnowledgeGraph {
    let n_entities = rng.gen_range(4..40);
    let n_predicates = rng.gen_range(1..7);
    let n_triples = rng.gen_range(10..=300);
    let mut input = Vec::new();
    while input.len() < n_triples {
        let s = rng.gen_range(0..n_entities);
        let p = rng.gen_range(0..n_predicates);
        let object = if rng.gen_bool(0.15) {
            Term::literal(format!("v{}", rng.gen_range(0..5)))
        } else {
            let o = rng.gen_range(0..n_entities);
            if o == s {
                continue;
            }
            Term::iri(format!("e{o}"))
        };
        input.push((
            Term::iri(format!("e{s}")),
            Term::iri(format!("p{p}")),
            object,
        ));
    }
    input.sort();
    input.dedup();
    input.truncate(300);
    KnowledgeGraph::from_terms(input).expect("graph")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let config = CpaConfig::default();
    let (mut checked, mut mismatches) = (0usize, 0usize);
    for _ in 0..20 {
        let g = random_graph(&mut rng);
        let raw: Vec<_> = g.triples().iter().map(|t| (t.s, t.p, t.o)).collect();
        let entities: BTreeSet<TermId> = g.entities().iter().copied().collect();
        let fx = build_fact_matrix(&g, &config);
        for t in g.entity_triples() {
            let expected = brute_force_paths(&raw, &entities, t.s, t.o, t.p);
            let found = enumerate_paths(&g, t.s, t.o, t.p, &config);
            let row = fx.row_of(RowKey::Triple(t.id)).expect("row");
            let names: BTreeSet<&str> = fx.column_names(row).collect();
            let expected_names: BTreeSet<String> =
                expected.iter().map(|p| p.canonical(&g)).collect();
            let expected_names: BTreeSet<&str> =
                expected_names.iter().map(String::as_str).collect();
            checked += 1;
            if found != expected || names != expected_names {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && within(elapsed, 60),
        detail: format!(
            "{checked} triples over 20 graphs, {mismatches} mismatches, {:.1} s",
            elapsed.as_secs_f64()
        ),
    }
}

// Criterion 2

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, cols: usize) -> FeatureMatrix {
    let density = rng.gen_range(0.05..0.4);
    FeatureMatrix {
        kind: MatrixKind::EntityMatrix,
        row_keys: (0..n).map(|i| RowKey::Entity(TermId(i as u32))).collect(),
        catalog: (0..cols).map(|c| format!("f{c}")).collect(),
        rows: (0..n)
            .map(|_| {
                SparseRow::from_unsorted(
                    (0..cols as u32).filter(|_| rng.gen_bool(density)).collect(),
                )
            })
            .collect(),
    }
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut trained = 0;
    for n in [100usize, 500] {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let m = random_matrix(&mut rng, n, 50);
            let nu = rng.gen_range(0.05..0.5);
            for kernel in default_kernels(50) {
                let kind = kernel.kind();
                let model = train_ocsvm(&m, kernel, nu).expect("train");
                let flagged = m.rows.iter().filter(|r| model.decision(r) < 0.0).count();
                let support = model.support_count(&m);
                let bound = nu * n as f64;
                trained += 1;
                if flagged as f64 > bound + 2.0 || (support as f64) < bound - 2.0 {
                    failures.push(format!(
                        "n={n} seed={seed} {} νn={bound:.1} flagged={flagged} support={support}",
                        kind.as_str()
                    ));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{trained} models within ±2 of νn")
        } else {
            format!("{} violations: {}", failures.len(), failures.join("; "))
        },
    }
}

// Criterion 3

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
struct Planting {
    rule: String,
    label: String,
    triples: Vec<TripleText>,
    entity: Option<String>,
    lines: Vec<usize>,
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let loaded = load_graph(&fixture("rules.nt")).expect("fixture");
    let catalog = catalog_for(&loaded.graph, &loaded.declared, THETA).expect("catalog");
    let config = RulesConfig {
        subsumption_predicate: Some("http://example.org/subGenreOf".into()),
        ..RulesConfig::default()
    };
    let hits = run_rules(&loaded.graph, &catalog, &loaded.doc, &config);
    let found: BTreeSet<Planting> = hits
        .iter()
        .map(|h| {
            let r = RuleHitRecord::of(&loaded.graph, h);
            Planting {
                rule: r.rule,
                label: r.label,
                triples: r.triples,
                entity: r.entity,
                lines: r.lines,
            }
        })
        .collect();
    let planted: BTreeSet<Planting> = std::fs::read_to_string(fixture("rules.expected.jsonl"))
        .expect("plantings")
        .lines()
        .map(|l| serde_json::from_str(l).expect("planting"))
        .collect();
    let matched = found.intersection(&planted).count();
    let precision = matched as f64 / found.len().max(1) as f64;
    let recall = matched as f64 / planted.len().max(1) as f64;
    let labels: BTreeSet<&str> = planted.iter().map(|p| p.label.as_str()).collect();
    let elapsed = start.elapsed();
    Outcome {
        pass: precision == 1.0 && recall == 1.0 && within(elapsed, 5),
        detail: format!(
            "{} plantings over {} categories, {} hits, precision {precision:.3} recall {recall:.3}, {:.2} s",
            planted.len(),
            labels.len(),
            found.len(),
            elapsed.as_secs_f64()
        ),
    }
}

// Criterion 4

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let spec = SchemaSpec::family().scaled(0.9);
    let mut pass = true;
    let mut parts = Vec::new();
    for rate in [0.1, 0.2, 0.3] {
        let mut aucs = Vec::new();
        let mut precisions = Vec::new();
        let mut rows = 0;
        for seed in 0..SEEDS {
            let kg = gen_synthetic(&spec, seed).expect("synth");
            let catalog = kg.catalog(THETA).expect("catalog");
            let c = corrupt_facts(
                &kg.graph,
                &catalog,
                rate,
                &[CorruptionKind::ObjectSwap],
                seed,
            )
            .expect("corrupt");
            let fx = build_fact_matrix(&c.graph, &CpaConfig::default());
            rows = fx.n_rows();
            let budget = c.log.len();
            let det = detect(
                &fx,
                &default_kernels(fx.n_cols()),
                budget,
                &DetectOptions::default(),
            )
            .expect("detect");
            let truth = fact_truth(&c.log, &fx);
            let flagged: Vec<usize> = det.anomalies.iter().map(|r| r.row).collect();
            let q = precision_recall_at_budget(&flagged, &det.ensemble, &truth, budget)
                .expect("quality");
            aucs.push(q.auc);
            precisions.push(q.precision);
        }
        let (auc, precision) = (median(aucs), median(precisions));
        pass &= auc >= 0.85 && precision >= 0.70;
        parts.push(format!(
            "{:.0}%: AUC {auc:.3} P@b {precision:.3}",
            rate * 100.0
        ));
        if rate == 0.1 {
            parts.push(format!("({rows} triples)"));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: pass && within(elapsed, 600),
        detail: format!(
            "median of {SEEDS} seeds, {}, {:.1} s",
            parts.join(" "),
            elapsed.as_secs_f64()
        ),
    }
}

// Criterion 5

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let spec = SchemaSpec::family().scaled(3.0);
    let mut ensemble_aucs = Vec::new();
    let mut rbf_aucs = Vec::new();
    for seed in 0..SEEDS {
        let kg = gen_synthetic(&spec, seed).expect("synth");
        let catalog = kg.catalog(THETA).expect("catalog");
        let c = corrupt_literals(&kg.graph, &catalog, 100, 0.5, seed).expect("corrupt");
        let catalog = catalog_for(&c.graph, &kg.declared, THETA).expect("catalog");
        let fx = build_fact_matrix(&c.graph, &CpaConfig::default());
        let fy = build_entity_matrix(&c.graph, &catalog, &fx).matrix;
        let truth = entity_truth(&c.log, &c.graph, &fy);
        let (mut per_type, mut per_type_rbf) = (Vec::new(), Vec::new());
        for (_, rows) in rows_by_type(&fy, &catalog) {
            let sub = fy.select_rows(&rows);
            let t: Vec<bool> = rows.iter().map(|&r| truth[r]).collect();
            let positives = t.iter().filter(|&&x| x).count();
            if positives == 0 || positives == t.len() {
                continue;
            }
            let det = detect(
                &sub,
                &default_kernels(sub.n_cols()),
                positives,
                &DetectOptions::default(),
            )
            .expect("detect");
            per_type.push(exact_auc(&det.ensemble, &t).expect("auc"));
            let rbf = det
                .models
                .iter()
                .position(|m| m.kernel.kind() == KernelKind::Rbf)
                .expect("rbf");
            per_type_rbf.push(exact_auc(&det.kernel_scores[rbf], &t).expect("auc"));
        }
        ensemble_aucs.push(per_type.iter().sum::<f64>() / per_type.len() as f64);
        rbf_aucs.push(per_type_rbf.iter().sum::<f64>() / per_type_rbf.len() as f64);
    }
    let auc = median(ensemble_aucs);
    let elapsed = start.elapsed();
    Outcome {
        pass: auc >= 0.85 && within(elapsed, 600),
        detail: format!(
            "median of {SEEDS} seeds, ensemble AUC {auc:.3} (RBF alone {:.3}), {:.1} s",
            median(rbf_aucs),
            elapsed.as_secs_f64()
        ),
    }
}

// Criterion 6

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let spec = SchemaSpec::family().scaled(0.36);
    let (mut beats_random, mut beats_original) = (0, 0);
    let mut triples = 0;
    let mut seeds = Vec::new();
    for seed in 0..SEEDS {
        let kg = gen_synthetic(&spec, seed).expect("synth");
        let catalog = kg.catalog(THETA).expect("catalog");
        let c = corrupt_facts(
            &kg.graph,
            &catalog,
            0.1,
            &[CorruptionKind::ObjectSwap],
            seed,
        )
        .expect("corrupt");
        let fx = build_fact_matrix(&c.graph, &CpaConfig::default());
        triples = fx.n_rows();
        let det = detect(
            &fx,
            &default_kernels(fx.n_cols()),
            c.log.len(),
            &DetectOptions::default(),
        )
        .expect("detect");
        let flagged: Vec<_> = det
            .anomalies
            .iter()
            .filter_map(|r| match r.key {
                RowKey::Triple(t) => Some(t),
                RowKey::Entity(_) => None,
            })
            .collect();
        let cfg = AblationConfig {
            transe: TransEConfig::default(),
            test_fraction: 0.1,
            seed,
        };
        let report = ablation_run(&c.graph, &c.log, &flagged, &cfg).expect("ablation");
        let mrr = |p| report.metric(p).mrr;
        let (original, random, ad) = (
            mrr(Particular::Original),
            mrr(Particular::Random),
            mrr(Particular::Ad),
        );
        beats_random += usize::from(ad >= random);
        beats_original += usize::from(ad >= original);
        seeds.push(format!("{original:.3}/{random:.3}/{ad:.3}"));
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: beats_random >= 4 && beats_original >= 4 && within(elapsed, 900),
        detail: format!(
            "{triples} entity triples, AD ≥ Random in {beats_random}/5, AD ≥ Original in {beats_original}/5, MRR original/random/AD per seed [{}], {:.1} s",
            seeds.join(" "),
            elapsed.as_secs_f64()
        ),
    }
}

// Criterion 7: every CLI stage twice with the same seed and config.

fn kgaudit(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kgaudit"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "kgaudit {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn run_all_stages(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    std::fs::write(dir.join("kgaudit.conf"), "seed = 7\nbudget = 60\n")
        .map_err(|e| e.to_string())?;
    let c = ["--config", "kgaudit.conf"];
    let stages: Vec<Vec<&str>> = vec![
        vec![
            "synth", "--schema", "family", "--scale", "0.3", "--out", "clean.nt",
        ],
        vec![
            "corrupt",
            "clean.nt",
            "--rate",
            "0.1",
            "--out",
            "facts.nt",
            "--log",
            "facts.log.jsonl",
        ],
        vec![
            "corrupt",
            "clean.nt",
            "--literal",
            "--per-type",
            "10",
            "--out",
            "literals.nt",
            "--log",
            "literals.log.jsonl",
        ],
        vec![
            "corrupt",
            "clean.nt",
            "--duplicates",
            "5",
            "--missing",
            "5",
            "--out",
            "stream.nt",
            "--log",
            "stream.json",
        ],
        vec!["scan", "stream.nt", "--out", "scan.jsonl"],
        vec!["typegen", "facts.nt", "--out", "types.json"],
        vec!["rules", "stream.nt", "--out", "rules.jsonl"],
        vec![
            "detect-facts",
            "facts.nt",
            "--full",
            "--out",
            "facts.report.jsonl",
            "--models",
            "models",
        ],
        vec![
            "detect-entities",
            "literals.nt",
            "--full",
            "--out",
            "entities.report.jsonl",
        ],
        vec![
            "eval",
            "--report",
            "facts.report.jsonl",
            "--truth",
            "facts.log.jsonl",
            "--out",
            "facts.eval.json",
        ],
        vec![
            "eval",
            "--report",
            "entities.report.jsonl",
            "--truth",
            "literals.log.jsonl",
            "--out",
            "entities.eval.json",
        ],
        vec![
            "--format",
            "csv",
            "compare",
            "facts.eval.json",
            "entities.eval.json",
            "--out",
            "compare.csv",
        ],
        vec![
            "--format",
            "csv",
            "kgc-ablate",
            "facts.nt",
            "--truth",
            "facts.log.jsonl",
            "--report",
            "facts.report.jsonl",
            "--epochs",
            "20",
            "--out",
            "kgc.csv",
        ],
        vec![
            "export-features",
            "facts.nt",
            "--matrix",
            "entities",
            "--out-dir",
            "features",
        ],
    ];
    for stage in &stages {
        let args: Vec<&str> = c.iter().chain(stage).copied().collect();
        kgaudit(dir, &args)?;
    }
    let mut files = BTreeMap::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(d) = pending.pop() {
        for entry in std::fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                pending.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .expect("inside")
                    .to_string_lossy()
                    .into_owned();
                files.insert(rel, std::fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(files)
}

fn criterion_7() -> Outcome {
    let (a, b) = (
        tempfile::tempdir().expect("tmp"),
        tempfile::tempdir().expect("tmp"),
    );
    match (run_all_stages(a.path()), run_all_stages(b.path())) {
        (Ok(first), Ok(second)) => {
            let differing: Vec<&String> = first
                .keys()
                .filter(|k| first.get(*k) != second.get(*k))
                .collect();
            let same_names = first.keys().eq(second.keys());
            Outcome {
                pass: differing.is_empty() && same_names,
                detail: if differing.is_empty() {
                    format!("{} output files byte-identical", first.len())
                } else {
                    format!("differing outputs: {differing:?}")
                },
            }
        }
        (Err(e), _) | (_, Err(e)) => Outcome {
            pass: false,
            detail: e,
        },
    }
}

// Criterion 8

fn feature_time(scale: f64) -> (usize, Duration) {
    let kg = gen_synthetic(&SchemaSpec::family().scaled(scale), 3).expect("synth");
    let catalog = kg.catalog(THETA).expect("catalog");
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let start = Instant::now();
        let fx = build_fact_matrix(&kg.graph, &CpaConfig::default());
        let fy = build_entity_matrix(&kg.graph, &catalog, &fx);
        best = best.min(start.elapsed());
        std::hint::black_box(fy);
    }
    (kg.graph.len(), best)
}

fn criterion_8() -> Outcome {
    let per_unit = gen_synthetic(&SchemaSpec::family(), 3)
        .expect("synth")
        .graph
        .len() as f64;
    let (small, small_time) = feature_time(5_000.0 / per_unit);
    let (large, large_time) = feature_time(10_000.0 / per_unit);
    let ratio = large_time.as_secs_f64() / small_time.as_secs_f64().max(1e-9);
    Outcome {
        pass: ratio < 4.0,
        detail: format!(
            "{small} triples {:.1} ms, {large} triples {:.1} ms, ratio {ratio:.2}",
            small_time.as_secs_f64() * 1e3,
            large_time.as_secs_f64() * 1e3
        ),
    }
}

// Criterion 9

fn disjunction_violations(
    g: &KnowledgeGraph,
    declared: &kgaudit_core::typegen::DeclaredTypes,
) -> (usize, usize) {
    let catalog = catalog_for(g, declared, THETA).expect("catalog");
    let fx = build_fact_matrix(g, &CpaConfig::default());
    let em = build_entity_matrix(g, &catalog, &fx);
    let mut violations = 0;
    if em.paths.len() != fx.n_cols() || em.matrix.catalog[em.paths.clone()] != fx.catalog[..] {
        violations += 1;
    }
    let mut cells = 0;
    for (row, key) in em.matrix.row_keys.iter().enumerate() {
        let RowKey::Entity(e) = key else { continue };
        let mut expected = vec![false; fx.n_cols()];
        for t in g
            .triples()
            .iter()
            .filter(|t| t.kind == TripleKind::EntityTriple && t.s == *e)
        {
            let fx_row = fx.row_of(RowKey::Triple(t.id)).expect("row");
            for (c, bit) in expected.iter_mut().enumerate() {
                *bit |= fx.get(fx_row, c as u32);
            }
        }
        for (c, bit) in expected.into_iter().enumerate() {
            cells += 1;
            if em.matrix.get(row, (em.paths.start + c) as u32) != bit {
                violations += 1;
            }
        }
    }
    (cells, violations)
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["residence.nt", "rules.nt"] {
        let loaded = load_graph(&fixture(name)).expect("fixture");
        let (cells, bad) = disjunction_violations(&loaded.graph, &loaded.declared);
        pass &= bad == 0 && cells > 0;
        parts.push(format!("{name}: {cells} cells, {bad} violations"));
    }
    let kg = gen_synthetic(&SchemaSpec::family().scaled(0.12), 4).expect("synth");
    let (cells, bad) = disjunction_violations(&kg.graph, &kg.declared);
    pass &= bad == 0 && cells > 0;
    parts.push(format!(
        "synthetic {} triples: {cells} cells, {bad} violations",
        kg.graph.len()
    ));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

// Criterion 10

fn criterion_10() -> Outcome {
    let kg = gen_synthetic(&SchemaSpec::family().scaled(0.2), 5).expect("synth");
    let lines: Vec<String> = kg
        .to_ntriples("http://example.org/family/")
        .lines()
        .map(str::to_string)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    let trials = 25;
    for trial in 0..trials {
        let (dups, missing) = (rng.gen_range(0..=50), rng.gen_range(0..=50));
        let (planted_lines, planted) =
            plant_stream_anomalies(&lines, dups, missing, trial).expect("plant");
        let doc = parse_ntriples(&(planted_lines.join("\n") + "\n"));
        let found = scan_document(&doc);
        let found_dups: BTreeSet<Vec<usize>> = found
            .iter()
            .filter(|a| a.kind == FileAnomalyKind::DuplicateStatement)
            .map(|a| a.lines.clone())
            .collect();
        let found_missing: BTreeSet<usize> = found
            .iter()
            .filter(|a| a.kind != FileAnomalyKind::DuplicateStatement)
            .flat_map(|a| a.lines.clone())
            .collect();
        let want_dups: BTreeSet<Vec<usize>> = planted
            .duplicates
            .iter()
            .map(|&(copy, src)| vec![src, copy])
            .collect();
        let want_missing: BTreeSet<usize> = planted.missing.iter().copied().collect();
        if found_dups != want_dups || found_missing != want_missing || found.len() != dups + missing
        {
            failures.push(format!("trial {trial} (D={dups}, M={missing})"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{trials} randomized plantings recovered exactly")
        } else {
            format!("mismatches in {}", failures.join(", "))
        },
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "path-oracle equivalence", criterion_1),
        (2, "nu-property", criterion_2),
        (3, "planted-fixture rule coverage", criterion_3),
        (4, "fact detection quality", criterion_4),
        (5, "entity detection quality", criterion_5),
        (6, "KGC directional claim", criterion_6),
        (7, "determinism", criterion_7),
        (8, "scaling sanity", criterion_8),
        (9, "disjunction law", criterion_9),
        (10, "duplicate/missingness exactness", criterion_10),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name}: {}", outcome.detail);
        if !outcome.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}
