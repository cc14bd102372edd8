//! Command-line interface.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgaudit_core::cpa::PathDepth;
use kgaudit_core::eval::{compare_runs, exact_auc, RunRecord};
use kgaudit_core::graph::degree_stats;
use kgaudit_core::ingest::scan_document;
use kgaudit_core::kgc::{ablation_run, AblationConfig, TransEConfig};
use kgaudit_core::rules::RulesConfig;
use kgaudit_core::svm::KernelKind;
use kgaudit_core::synth::{
    corrupt_facts, corrupt_literals, gen_synthetic, plant_stream_anomalies, CorruptionKind,
    SchemaSpec, SyntheticKg, DEFAULT_FACT_KINDS,
};
use kgaudit_core::typegen::DEFAULT_THETA;
use serde::Serialize;

use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::formats::{
    ablation_csv_rows, catalog_json, declared_from_catalog, degree_rows, dense_csv,
    feature_dictionary, log_from_records, log_records, report_table, rule_table, sparse_cells,
    CatalogJson, FileAnomalyRecord, LogRecord, ReportRecord, RuleHitRecord,
};
use crate::io::{
    atomic_write, load_graph, read_json, read_jsonl, read_text, to_csv, to_jsonl, write_csv,
    write_json,
};
use crate::pipeline::{
    entity_matrix, fact_matrix, run_detection, type_catalog, DetectSettings, MatrixChoice, Timings,
};

pub const DEFAULT_BASE: &str = "http://example.org/kgaudit/";

#[derive(Debug, Parser)]
#[command(
    name = "kgaudit",
    version,
    about = "Anomaly detection and quality rules for RDF knowledge graphs"
)]
pub struct Cli {
    /// key = value file mirroring the flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format for report-producing commands
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report missing elements and duplicate statements in a storage file
    Scan {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank abnormal triples
    DetectFacts(DetectArgs),
    /// Rank abnormal entities
    DetectEntities(DetectArgs),
    /// Run the rule-based anomaly checks
    Rules {
        file: PathBuf,
        #[command(flatten)]
        rules: RuleArgs,
        #[arg(long)]
        types: Option<PathBuf>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infer entity types and write the type catalog as JSON
    Typegen {
        file: PathBuf,
        #[arg(long)]
        theta: Option<f64>,
        /// Catalog JSON whose entries are added as declarations
        #[arg(long)]
        types: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic graph from a schema file (or the built-in `family`)
    Synth {
        #[arg(long)]
        schema: String,
        /// Multiplies every entity group size
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corrupt a graph and write the corrupted graph plus its corruption log
    Corrupt(CorruptArgs),
    /// Precision, recall and AUC of a detector report against a corruption log
    Eval {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value = "run")]
        label: String,
        /// Stage timings JSON written by a detect command
        #[arg(long)]
        timings: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Line up several eval outputs with deltas against the first
    Compare {
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link prediction with Original, Random and AD training sets
    KgcAblate {
        file: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Detector report whose flagged triples form the AD removal set
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        test_fraction: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a feature matrix, its feature dictionary and degree statistics
    ExportFeatures {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "facts")]
        matrix: MatrixArg,
        #[arg(long, value_enum, default_value = "sparse")]
        layout: Layout,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixArg {
    Facts,
    Entities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Sparse,
    Dense,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub file: PathBuf,
    /// Maximum path length: 0.5, 1 or 2
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Comma-separated subset of linear,rbf,poly,sigmoid
    #[arg(long)]
    pub kernels: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Catalog JSON whose entries are added as declarations
    #[arg(long)]
    pub types: Option<PathBuf>,
    /// Also list every non-flagged row after the anomalies
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stage timings in milliseconds, as JSON
    #[arg(long)]
    pub timings: Option<PathBuf>,
    /// Directory for one JSON model record per kernel
    #[arg(long)]
    pub models: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    /// Flag every entity with at least the average triple count
    #[arg(long)]
    pub average_prolific: bool,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub prolific_multiplier: Option<f64>,
    #[arg(long)]
    pub subsumption_predicate: Option<String>,
    #[arg(long)]
    pub similarity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    pub file: PathBuf,
    /// Fraction of entity triples to alter
    #[arg(long, conflicts_with_all = ["literal", "duplicates", "missing"])]
    pub rate: Option<f64>,
    /// Comma-separated fact corruption kinds
    #[arg(long)]
    pub kinds: Option<String>,
    /// Corrupt literal triples of selected entities instead
    #[arg(long)]
    pub literal: bool,
    #[arg(long)]
    pub per_type: Option<usize>,
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Plant duplicated lines into the raw file
    #[arg(long)]
    pub duplicates: Option<usize>,
    /// Plant lines with a missing element into the raw file
    #[arg(long)]
    pub missing: Option<usize>,
    #[arg(long, default_value = DEFAULT_BASE)]
    pub base: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Corruption log (JSON Lines) or planted-line record (JSON)
    #[arg(long)]
    pub log: PathBuf,
}

struct Ctx {
    config: ConfigFile,
    format: Format,
    seed: u64,
}

impl Ctx {
    fn emit(&self, out: Option<&Path>, text: String) -> Result<()> {
        match out {
            Some(path) => atomic_write(path, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn rules_config(&self, args: &RuleArgs) -> Result<RulesConfig> {
        let d = RulesConfig::default();
        Ok(RulesConfig {
            support_threshold: self
                .config
                .resolve(args.sigma, "sigma", d.support_threshold)?,
            contradiction_tau: self.config.resolve(args.tau, "tau", d.contradiction_tau)?,
            prolific_multiplier: match args.prolific_multiplier {
                Some(m) => Some(m),
                None => self.config.get("prolific-multiplier")?,
            },
            average_prolific: self
                .config
                .flag(args.average_prolific, "average-prolific")?,
            subsumption_predicate: args
                .subsumption_predicate
                .clone()
                .or_else(|| self.config.raw("subsumption-predicate").map(str::to_string)),
            similarity_threshold: self.config.resolve(
                args.similarity,
                "similarity",
                d.similarity_threshold,
            )?,
        })
    }

    fn depth(&self, flag: Option<&String>) -> Result<PathDepth> {
        let text = self.config.resolve(flag.cloned(), "k", String::from("2"))?;
        Ok(PathDepth::parse(&text)?)
    }

    fn theta(&self, flag: Option<f64>) -> Result<f64> {
        self.config.resolve(flag, "theta", DEFAULT_THETA)
    }
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> kgaudit_core::Result<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Ok(parse(s)?))
        .collect()
}

fn extra_types(path: Option<&PathBuf>) -> Result<Option<kgaudit_core::typegen::DeclaredTypes>> {
    match path {
        Some(p) => Ok(Some(declared_from_catalog(&read_json::<CatalogJson>(p)?)?)),
        None => Ok(None),
    }
}

#[derive(Serialize)]
struct ReportCsvRow<'a> {
    rank: usize,
    subject_kind: &'static str,
    subject: &'a str,
    triple_s: Option<&'a str>,
    triple_p: Option<&'a str>,
    triple_o: Option<&'a str>,
    score: f64,
    votes: usize,
    taxo_class: Option<&'a str>,
    correction: Option<&'a str>,
    flagged: bool,
    explanation: String,
}

fn render_report(records: &[ReportRecord], format: Format) -> Result<String> {
    match format {
        Format::Jsonl => to_jsonl(records),
        Format::Table => Ok(report_table(records)),
        Format::Csv => {
            let rows: Vec<ReportCsvRow> = records
                .iter()
                .enumerate()
                .map(|(i, r)| ReportCsvRow {
                    rank: i + 1,
                    subject_kind: match r.subject_kind {
                        kgaudit_core::detector::SubjectKind::Fact => "FACT",
                        kgaudit_core::detector::SubjectKind::Entity => "ENTITY",
                    },
                    subject: &r.subject,
                    triple_s: r.triple.as_ref().map(|t| t.s.as_str()),
                    triple_p: r.triple.as_ref().map(|t| t.p.as_str()),
                    triple_o: r.triple.as_ref().map(|t| t.o.as_str()),
                    score: r.score,
                    votes: r.votes,
                    taxo_class: r.taxo_class.as_deref(),
                    correction: r.correction.as_deref(),
                    flagged: r.flagged,
                    explanation: r.explanation.join(";"),
                })
                .collect();
            to_csv(&rows)
        }
    }
}

#[derive(Serialize)]
struct FlatRuleHit<'a> {
    rule: &'a str,
    label: &'a str,
    triples: String,
    entity: Option<&'a str>,
    lines: String,
    detail: &'a str,
}

fn render_hits(records: &[RuleHitRecord], format: Format) -> Result<String> {
    match format {
        Format::Jsonl => to_jsonl(records),
        Format::Table => Ok(rule_table(records)),
        Format::Csv => {
            let rows: Vec<FlatRuleHit> = records
                .iter()
                .map(|r| FlatRuleHit {
                    rule: &r.rule,
                    label: &r.label,
                    triples: r
                        .triples
                        .iter()
                        .map(|t| format!("{} {} {}", t.s, t.p, t.o))
                        .collect::<Vec<_>>()
                        .join(";"),
                    entity: r.entity.as_deref(),
                    lines: r
                        .lines
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(";"),
                    detail: &r.detail,
                })
                .collect();
            to_csv(&rows)
        }
    }
}

#[derive(Serialize)]
struct FlatFileAnomaly<'a> {
    kind: &'a str,
    lines: String,
    subject: Option<&'a str>,
    predicate: Option<&'a str>,
    object: Option<&'a str>,
}

fn render_scan(records: &[FileAnomalyRecord], format: Format) -> Result<String> {
    let flat: Vec<FlatFileAnomaly> = records
        .iter()
        .map(|r| FlatFileAnomaly {
            kind: &r.kind,
            lines: r
                .lines
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            subject: r.subject.as_deref(),
            predicate: r.predicate.as_deref(),
            object: r.object.as_deref(),
        })
        .collect();
    match format {
        Format::Jsonl => to_jsonl(records),
        Format::Csv => to_csv(&flat),
        Format::Table => {
            let mut out = format!("{:<20}  {:<12}  {}\n", "kind", "lines", "statement");
            for r in &flat {
                let stmt = [r.subject, r.predicate, r.object]
                    .map(|t| t.unwrap_or("_"))
                    .join(" ");
                out.push_str(&format!("{:<20}  {:<12}  {}\n", r.kind, r.lines, stmt));
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct MetricRow<'a> {
    run: &'a str,
    measure: &'a str,
    value: f64,
    delta: Option<f64>,
}

fn render_run(run: &RunRecord, format: Format) -> Result<String> {
    match format {
        Format::Jsonl => Ok(format!("{}\n", serde_json::to_string(run)?)),
        Format::Csv | Format::Table => {
            let rows = compare_runs(std::slice::from_ref(run))?;
            render_comparison(&rows, format)
        }
    }
}

fn render_comparison(rows: &[kgaudit_core::eval::ComparisonRow], format: Format) -> Result<String> {
    match format {
        Format::Jsonl => to_jsonl(rows),
        Format::Csv => to_csv(
            &rows
                .iter()
                .map(|r| MetricRow {
                    run: &r.run,
                    measure: &r.measure,
                    value: r.value,
                    delta: r.delta,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mut out = format!(
                "{:<16}  {:<24}  {:>12}  {:>12}\n",
                "run", "measure", "value", "delta"
            );
            for r in rows {
                let delta = r.delta.map_or(String::from("-"), |d| format!("{d:.4}"));
                out.push_str(&format!(
                    "{:<16}  {:<24}  {:>12.4}  {:>12}\n",
                    r.run, r.measure, r.value, delta
                ));
            }
            Ok(out)
        }
    }
}

fn detect_command(ctx: &Ctx, args: &DetectArgs, choice: MatrixChoice) -> Result<()> {
    let mut timings = Timings::default();
    let loaded = timings.run("parse", || load_graph(&args.file))?;
    let kernels = match args
        .kernels
        .clone()
        .or_else(|| ctx.config.raw("kernels").map(str::to_string))
    {
        Some(list) => parse_list(&list, KernelKind::parse)?,
        None => KernelKind::ALL.to_vec(),
    };
    let settings = DetectSettings {
        budget: ctx.config.resolve(
            args.budget,
            "budget",
            kgaudit_core::detector::DEFAULT_BUDGET,
        )?,
        depth: ctx.depth(args.k.as_ref())?,
        kernels,
        theta: ctx.theta(args.theta)?,
        rules: ctx.rules_config(&args.rules)?,
    };
    let full = ctx.config.flag(args.full, "full")?;
    let run = run_detection(
        &loaded,
        choice,
        &settings,
        extra_types(args.types.as_ref())?,
        &mut timings,
    )?;
    let records = ReportRecord::from_detection(&loaded.graph, &run.matrix, &run.detection, full);
    ctx.emit(args.out.as_deref(), render_report(&records, ctx.format)?)
        .map_err(|e| e.in_stage("write"))?;
    if let Some(dir) = &args.models {
        for model in &run.detection.models {
            write_json(
                &dir.join(format!("model_{}.json", model.kernel.kind().as_str())),
                model,
            )?;
        }
    }
    if let Some(path) = &args.timings {
        let label = args
            .file
            .file_stem()
            .map_or(String::from("run"), |s| s.to_string_lossy().into_owned());
        write_json(
            path,
            &RunRecord {
                label,
                metrics: Default::default(),
                timings_ms: timings.0,
            },
        )?;
    }
    Ok(())
}

fn eval_command(
    ctx: &Ctx,
    report: &Path,
    truth: &Path,
    label: &str,
    timings: Option<&PathBuf>,
    out: Option<&Path>,
) -> Result<()> {
    let records: Vec<ReportRecord> = read_jsonl(report)?;
    let log: Vec<LogRecord> = read_jsonl(truth)?;
    let corrupted: BTreeSet<(String, String, String)> = log
        .iter()
        .map(|r| {
            (
                r.corrupted.s.clone(),
                r.corrupted.p.clone(),
                r.corrupted.o.clone(),
            )
        })
        .collect();
    let subjects: BTreeSet<&str> = log.iter().map(|r| r.corrupted.s.as_str()).collect();
    let truth_of = |r: &ReportRecord| match &r.triple {
        Some(t) => corrupted.contains(&(t.s.clone(), t.p.clone(), t.o.clone())),
        None => subjects.contains(r.subject.as_str()),
    };
    let labels: Vec<bool> = records.iter().map(truth_of).collect();
    let fact_report = records.iter().any(|r| r.triple.is_some());
    let positives = if fact_report {
        corrupted.len()
    } else {
        subjects.len()
    };
    if positives == 0 {
        return Err(kgaudit_core::Error::EmptyGroundTruth.into());
    }
    let flagged = records.iter().filter(|r| r.flagged).count();
    let hits = records
        .iter()
        .zip(&labels)
        .filter(|(r, &t)| r.flagged && t)
        .count();
    let mut run = RunRecord {
        label: label.to_string(),
        ..Default::default()
    };
    run.metrics.insert(
        "precision".into(),
        if flagged == 0 {
            0.0
        } else {
            hits as f64 / flagged as f64
        },
    );
    run.metrics
        .insert("recall".into(), hits as f64 / positives as f64);
    run.metrics.insert("flagged".into(), flagged as f64);
    run.metrics.insert("positives".into(), positives as f64);
    // AUC needs scores for the whole population, i.e. a report written with --full
    if records.iter().any(|r| !r.flagged) {
        let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
        if let Some(auc) = exact_auc(&scores, &labels) {
            run.metrics.insert("auc".into(), auc);
        }
    }
    if let Some(path) = timings {
        run.timings_ms = read_json::<RunRecord>(path)?.timings_ms;
    }
    ctx.emit(out, render_run(&run, ctx.format)?)
}

fn corrupt_command(ctx: &Ctx, args: &CorruptArgs) -> Result<()> {
    let duplicates = args
        .duplicates
        .or(ctx.config.get("duplicates").ok().flatten());
    let missing = args.missing;
    if duplicates.is_some() || missing.is_some() {
        let text = read_text(&args.file)?;
        let lines: Vec<String> = text.lines().map(str::to_string).collect();
        let (planted, record) = plant_stream_anomalies(
            &lines,
            duplicates.unwrap_or(0),
            missing.unwrap_or(0),
            ctx.seed,
        )?;
        let mut body = planted.join("\n");
        body.push('\n');
        atomic_write(&args.out, body.as_bytes())?;
        return write_json(&args.log, &record);
    }
    let loaded = load_graph(&args.file).map_err(|e| e.in_stage("parse"))?;
    let catalog = kgaudit_core::synth::catalog_for(&loaded.graph, &loaded.declared, DEFAULT_THETA)?;
    let literal = ctx.config.flag(args.literal, "literal")?;
    let corrupted = if literal {
        let per_type = ctx.config.resolve(args.per_type, "per-type", 100)?;
        let fraction = ctx.config.resolve(args.fraction, "fraction", 0.5)?;
        corrupt_literals(&loaded.graph, &catalog, per_type, fraction, ctx.seed)?
    } else {
        let rate = match args.rate {
            Some(r) => r,
            None => ctx.config.get("rate")?.ok_or_else(|| {
                Error::Usage("corrupt needs --rate, --literal, --duplicates or --missing".into())
            })?,
        };
        let kinds = match args
            .kinds
            .clone()
            .or_else(|| ctx.config.raw("kinds").map(str::to_string))
        {
            Some(list) => parse_list(&list, CorruptionKind::parse)?,
            None => DEFAULT_FACT_KINDS.to_vec(),
        };
        corrupt_facts(&loaded.graph, &catalog, rate, &kinds, ctx.seed)?
    };
    for w in &corrupted.warnings {
        eprintln!("warning: {w}");
    }
    let kg = SyntheticKg {
        graph: corrupted.graph,
        declared: loaded.declared,
        seed: ctx.seed,
    };
    atomic_write(&args.out, kg.to_ntriples(&args.base).as_bytes())?;
    crate::io::write_jsonl(&args.log, &log_records(&corrupted.log))
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let format = config.resolve(cli.format, "format", Format::Jsonl)?;
    let seed = config.resolve(cli.seed, "seed", 0u64)?;
    let ctx = Ctx {
        config,
        format,
        seed,
    };
    match &cli.command {
        Command::Scan { file, out } => {
            let doc = crate::io::parse_file(file).map_err(|e| e.in_stage("parse"))?;
            let records: Vec<FileAnomalyRecord> = scan_document(&doc)
                .iter()
                .map(|a| FileAnomalyRecord::of(&doc, a))
                .collect();
            ctx.emit(out.as_deref(), render_scan(&records, ctx.format)?)
        }
        Command::DetectFacts(args) => detect_command(&ctx, args, MatrixChoice::Facts),
        Command::DetectEntities(args) => detect_command(&ctx, args, MatrixChoice::Entities),
        Command::Rules {
            file,
            rules,
            types,
            theta,
            out,
        } => {
            let mut t = Timings::default();
            let loaded = t.run("parse", || load_graph(file))?;
            let catalog = type_catalog(
                &loaded,
                extra_types(types.as_ref())?,
                ctx.theta(*theta)?,
                &mut t,
            )?;
            let hits =
                crate::pipeline::rules(&loaded, &catalog, &ctx.rules_config(rules)?, &mut t)?;
            let records: Vec<RuleHitRecord> = hits
                .iter()
                .map(|h| RuleHitRecord::of(&loaded.graph, h))
                .collect();
            ctx.emit(out.as_deref(), render_hits(&records, ctx.format)?)
        }
        Command::Typegen {
            file,
            theta,
            types,
            out,
        } => {
            let mut t = Timings::default();
            let loaded = t.run("parse", || load_graph(file))?;
            let catalog = type_catalog(
                &loaded,
                extra_types(types.as_ref())?,
                ctx.theta(*theta)?,
                &mut t,
            )?;
            let mut text = serde_json::to_string_pretty(&catalog_json(&loaded.graph, &catalog))?;
            text.push('\n');
            ctx.emit(out.as_deref(), text)
        }
        Command::Synth { schema, scale, out } => {
            let spec = if schema == "family" {
                SchemaSpec::family()
            } else {
                SchemaSpec::parse(&read_text(Path::new(schema))?)?
            };
            let spec = if *scale == 1.0 {
                spec
            } else {
                spec.scaled(*scale)
            };
            let kg = gen_synthetic(&spec, ctx.seed)?;
            ctx.emit(out.as_deref(), kg.to_ntriples(&spec.base))
        }
        Command::Corrupt(args) => corrupt_command(&ctx, args),
        Command::Eval {
            report,
            truth,
            label,
            timings,
            out,
        } => eval_command(&ctx, report, truth, label, timings.as_ref(), out.as_deref()),
        Command::Compare { runs, out } => {
            let records = runs
                .iter()
                .map(|p| read_json::<RunRecord>(p))
                .collect::<Result<Vec<_>>>()?;
            ctx.emit(
                out.as_deref(),
                render_comparison(&compare_runs(&records)?, ctx.format)?,
            )
        }
        Command::KgcAblate {
            file,
            truth,
            report,
            dim,
            margin,
            epochs,
            learning_rate,
            test_fraction,
            out,
        } => {
            let loaded = load_graph(file).map_err(|e| e.in_stage("parse"))?;
            let log = log_from_records(&read_jsonl::<LogRecord>(truth)?, &loaded.graph)?;
            let flagged: Vec<_> = read_jsonl::<ReportRecord>(report)?
                .iter()
                .filter(|r| r.flagged)
                .filter_map(|r| r.triple.as_ref()?.resolve(&loaded.graph))
                .collect();
            let d = TransEConfig::default();
            let cfg = AblationConfig {
                transe: TransEConfig {
                    dim: ctx.config.resolve(*dim, "dim", d.dim)?,
                    margin: ctx.config.resolve(*margin, "margin", d.margin)?,
                    epochs: ctx.config.resolve(*epochs, "epochs", d.epochs)?,
                    learning_rate: ctx.config.resolve(
                        *learning_rate,
                        "learning-rate",
                        d.learning_rate,
                    )?,
                    ..d
                },
                test_fraction: ctx.config.resolve(
                    *test_fraction,
                    "test-fraction",
                    AblationConfig::default().test_fraction,
                )?,
                seed: ctx.seed,
            };
            let result = ablation_run(&loaded.graph, &log, &flagged, &cfg)
                .map_err(|e| Error::from(e).in_stage("kgc"))?;
            let rows = ablation_csv_rows(&result.rows);
            let text = match ctx.format {
                Format::Jsonl => to_jsonl(&rows)?,
                Format::Csv | Format::Table => to_csv(&rows)?,
            };
            ctx.emit(out.as_deref(), text)
        }
        Command::ExportFeatures {
            file,
            matrix,
            layout,
            k,
            theta,
            out_dir,
        } => {
            let mut t = Timings::default();
            let loaded = t.run("parse", || load_graph(file))?;
            let depth = ctx.depth(k.as_ref())?;
            let m = match matrix {
                MatrixArg::Facts => fact_matrix(&loaded, depth, &mut t)?,
                MatrixArg::Entities => {
                    let catalog = type_catalog(&loaded, None, ctx.theta(*theta)?, &mut t)?;
                    entity_matrix(&loaded, &catalog, depth, &mut t)?
                }
            };
            match layout {
                Layout::Sparse => write_csv(
                    &out_dir.join("features.csv"),
                    &sparse_cells(&loaded.graph, &m),
                )?,
                Layout::Dense => atomic_write(
                    &out_dir.join("features.csv"),
                    dense_csv(&loaded.graph, &m)?.as_bytes(),
                )?,
            }
            write_csv(&out_dir.join("dictionary.csv"), &feature_dictionary(&m))?;
            write_csv(
                &out_dir.join("degrees.csv"),
                &degree_rows(&loaded.graph, &degree_stats(&loaded.graph)),
            )
        }
    }
}
