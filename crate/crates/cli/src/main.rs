//! `spr`: feature extraction, weighting, scoring, classification, statistics
//! and synthetic data generation for rumor corpora.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use spr_core::corpus::{
    format_value, load_corpus_keep_blank, load_matrix, load_weights, matrix_to_csv, weights_to_json, write_atomic,
    ClassLabel, CorpusFormat, MatrixRowOf,
};
use spr_core::error::{CorpusError, Error, LearnError};
use spr_core::extract::{demo_lexicon_entries, extract_matrix, Resources};
use spr_core::features::FeatureId;
use spr_core::learn::{
    ablation_spr, design_matrix, pso_weight_features, CvReport, ForestConfig, LinearConfig, Metrics, ModelKind,
    PsoConfig,
};
use spr_core::scoring::{spr, ScoreRecord};
use spr_core::stats::feature_sweep;
use spr_core::synth::{
    generate_corpus, planted_signal_matrix, separable_matrix, shuffle_labels, spr_model_matrix, SynthConfig,
    DEFAULT_FILLER,
};
use spr_core::WeightVector;

use config::RunConfig;

const DEFAULT_SEED: u64 = 42;

/// A command failure with its exit code: 1 configuration, 2 data, 3 internal.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    fn tag(&self) -> &'static str {
        match self.code {
            1 => "config",
            2 => "data",
            _ => "internal",
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Text(_) | Error::Lexicon(_) | Error::Annotate(_) => Failure::config(message),
            Error::Learn(LearnError::Config(_)) => Failure::config(message),
            Error::Corpus(_) | Error::Feature(_) | Error::Learn(_) | Error::Stats(_) => Failure::data(message),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::data(e.to_string())
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Self {
        Error::from(e).into()
    }
}

fn diag(level: &str, code: &str, message: impl std::fmt::Display) {
    eprintln!("{level}\t{code}\t{message}");
}

#[derive(Parser)]
#[command(name = "spr", version, about = "Spread-power-of-rumor feature pipeline")]
struct Cli {
    /// JSON run configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a corpus into a feature matrix CSV.
    Extract(ExtractArgs),
    /// Learn feature weights with particle swarm optimization.
    Weigh(WeighArgs),
    /// Compute per-document score breakdowns.
    Score(ScoreArgs),
    /// Cross-validate a classifier with and/or without the SPR column.
    Classify(ClassifyArgs),
    /// Per-feature significance tests, class averages and boxplot data.
    Stats(StatsArgs),
    /// Generate a synthetic corpus or matrix.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Corpus format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WeighArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Fitness trace CSV; defaults to `<out>.trace.csv`.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    swarm: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    inertia: Option<f64>,
    #[arg(long)]
    inertia_final: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    velocity_clamp: Option<f64>,
    #[arg(long)]
    inner_folds: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Weight file; unit weights when omitted.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arm {
    #[value(alias = "with_spr")]
    WithSpr,
    #[value(alias = "without_spr")]
    WithoutSpr,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Rf,
    Linear,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, value_enum)]
    arm: Option<Arm>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    trees: Option<usize>,
    /// Feed raw features to the classifier instead of weight-scaled ones.
    #[arg(long)]
    no_scale_inputs: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Boxplot CSV; defaults to `<out>.boxplot.csv`.
    #[arg(long)]
    boxplot: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    /// Text corpus with class-conditional lexicon densities.
    Text,
    /// Matrix where only Fr carries signal.
    Planted,
    /// Matrix separable on Fr.
    Separable,
    /// Separable matrix with shuffled labels.
    Shuffled,
    /// Matrix labeled by thresholded SPR plus label noise.
    #[value(alias = "spr_model")]
    SprModel,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "text")]
    kind: SynthKind,
    /// Documents per class (text) or rows in total (matrices).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    fr_density: Option<f64>,
    #[arg(long)]
    tr_density: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth JSON for text corpora; defaults to `<out>.truth.json`.
    #[arg(long)]
    truth: Option<PathBuf>,
}

struct Ctx {
    cfg: RunConfig,
    seed: u64,
}

impl Ctx {
    fn path(&self, flag: &Option<PathBuf>, from_cfg: &Option<PathBuf>, what: &str) -> Result<PathBuf, Failure> {
        flag.clone()
            .or_else(|| from_cfg.clone())
            .ok_or_else(|| Failure::config(format!("no {what} given (flag or config)")))
    }

    fn weights(&self, flag: &Option<PathBuf>) -> Result<WeightVector, Failure> {
        match flag.clone().or_else(|| self.cfg.weights.clone()) {
            Some(p) => Ok(load_weights(&p)?),
            None => Ok(WeightVector::uniform()),
        }
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    out.with_file_name(name)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    write_atomic(path, text.as_bytes()).map_err(|e| Failure::internal(format!("writing {}: {e}", path.display())))
}

type LabeledMatrix = (Vec<MatrixRowOf<f64>>, Vec<Vec<f64>>, Vec<ClassLabel>);

fn labeled_matrix(path: &Path) -> Result<LabeledMatrix, Failure> {
    let rows = load_matrix::<f64>(path)?;
    let (x, y) = design_matrix(&rows);
    if x.is_empty() {
        return Err(Failure::data(format!("{}: no labeled rows", path.display())));
    }
    if !ClassLabel::BOTH.iter().all(|c| y.contains(c)) {
        return Err(Failure::data(format!("{}: both FR and TR rows are required", path.display())));
    }
    Ok((rows, x, y))
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_extract(ctx: &Ctx, a: &ExtractArgs) -> Result<(), Failure> {
    let corpus_path = ctx.path(&a.corpus, &ctx.cfg.corpus, "corpus")?;
    let format = match &a.format {
        Some(f) => f.parse::<CorpusFormat>().map_err(Failure::config)?,
        None => CorpusFormat::from_path(&corpus_path),
    };
    let resources = match &ctx.cfg.resources {
        Some(paths) => Resources::load(paths)?,
        None => Resources::demo(),
    };
    let corpus = load_corpus_keep_blank(&corpus_path, format)?;
    let (rows, rejects) = extract_matrix::<f64>(&corpus, &resources)?;
    for r in &rejects {
        diag("WARN", "reject", format!("{}: {}", r.id, r.reason));
    }
    write_out(&a.out, &matrix_to_csv(&rows))?;
    diag("INFO", "extract", format!("{} rows written, {} rejected", rows.len(), rejects.len()));
    Ok(())
}

fn cmd_weigh(ctx: &Ctx, a: &WeighArgs) -> Result<(), Failure> {
    let matrix = ctx.path(&a.matrix, &ctx.cfg.matrix, "matrix")?;
    let (_, x, y) = labeled_matrix(&matrix)?;
    let p = &ctx.cfg.pso;
    let d = PsoConfig::default();
    let linear = p.linear.unwrap_or(d.linear);
    let cfg = PsoConfig {
        swarm_size: a.swarm.or(p.swarm_size).unwrap_or(d.swarm_size),
        max_iter: a.iterations.or(p.max_iter).unwrap_or(d.max_iter),
        inertia: a.inertia.or(p.inertia).unwrap_or(d.inertia),
        inertia_final: a.inertia_final.or(p.inertia_final),
        c1: a.c1.or(p.c1).unwrap_or(d.c1),
        c2: a.c2.or(p.c2).unwrap_or(d.c2),
        velocity_clamp: a.velocity_clamp.or(p.velocity_clamp).unwrap_or(d.velocity_clamp),
        inner_folds: a.inner_folds.or(p.inner_folds).unwrap_or(d.inner_folds),
        linear: LinearConfig { lambda: a.lambda.unwrap_or(linear.lambda), epochs: a.epochs.unwrap_or(linear.epochs) },
        seed: ctx.seed,
        initial: Vec::new(),
    };
    let (weights, result) = pso_weight_features(&x, &y, &cfg)?;
    let mut trace = String::from("iteration,gbest_fitness\n");
    for (i, f) in result.trace.iter().enumerate() {
        let _ = writeln!(trace, "{},{}", i + 1, format_value(*f));
    }
    write_out(&a.out, &weights_to_json(&weights))?;
    write_out(&a.trace.clone().unwrap_or_else(|| sibling(&a.out, ".trace.csv")), &trace)?;
    diag("INFO", "weigh", format!("best inner-CV accuracy {}", format_value(result.best_fitness)));
    Ok(())
}

fn cmd_score(ctx: &Ctx, a: &ScoreArgs) -> Result<(), Failure> {
    let matrix = ctx.path(&a.matrix, &ctx.cfg.matrix, "matrix")?;
    let rows = load_matrix::<f64>(&matrix)?;
    let weights = ctx.weights(&a.weights)?;
    let mut out = String::new();
    for r in &rows {
        let rec = ScoreRecord::new(&r.id, &spr(&r.features, &weights));
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    write_out(&a.out, &out)?;
    diag("INFO", "score", format!("{} documents scored", rows.len()));
    Ok(())
}

fn report_json(r: &CvReport) -> Value {
    json!({ "metrics": metrics_json(&r.metrics), "warnings": r.warnings })
}

fn metrics_json(m: &Metrics) -> Value {
    serde_json::to_value(m).expect("serializable")
}

fn cmd_classify(ctx: &Ctx, a: &ClassifyArgs) -> Result<(), Failure> {
    let c = &ctx.cfg.classify;
    let matrix = ctx.path(&a.matrix, &ctx.cfg.matrix, "matrix")?;
    let (_, x, y) = labeled_matrix(&matrix)?;
    let weights = ctx.weights(&a.weights)?;
    let k = a.k.or(c.k).unwrap_or(10);
    let arm = match (a.arm, c.arm.as_deref()) {
        (Some(arm), _) => arm,
        (None, Some(s)) => Arm::from_str(s, true).map_err(|_| Failure::config(format!("unknown arm {s:?}")))?,
        (None, None) => Arm::Both,
    };
    let model_choice = match (a.model, c.model.as_deref()) {
        (Some(m), _) => m,
        (None, Some(s)) => Model::from_str(s, true).map_err(|_| Failure::config(format!("unknown model {s:?}")))?,
        (None, None) => Model::Rf,
    };
    let model = match model_choice {
        Model::Rf => {
            let mut f = c.forest.clone().unwrap_or_default();
            if let Some(t) = a.trees {
                f.n_trees = t;
            }
            ModelKind::RandomForest(ForestConfig { seed: ctx.seed, ..f })
        }
        Model::Linear => ModelKind::Linear(c.linear.unwrap_or_default()),
    };
    let scale = !a.no_scale_inputs && c.scale_inputs.unwrap_or(true);
    let rep = ablation_spr(&x, &y, &weights, k, &model, ctx.seed, scale)?;
    for w in rep.warnings.iter().chain(&rep.without_spr.warnings).chain(&rep.with_spr.warnings) {
        diag("WARN", "cv", w);
    }
    let mut arms = serde_json::Map::new();
    if arm != Arm::WithSpr {
        arms.insert("without_spr".into(), report_json(&rep.without_spr));
    }
    if arm != Arm::WithoutSpr {
        arms.insert("with_spr".into(), report_json(&rep.with_spr));
    }
    let out = json!({
        "model": match model_choice { Model::Rf => "rf", Model::Linear => "linear" },
        "k": rep.without_spr.folds.k,
        "seed": ctx.seed,
        "rows": y.len(),
        "scale_inputs": scale,
        "folds_identical": rep.folds_identical,
        "arms": arms,
        "fold_assignment": rep.without_spr.folds.assignment,
    });
    write_out(&a.out, &to_json(&out))?;
    if arm == Arm::Both {
        diag(
            "INFO",
            "classify",
            format!(
                "macro F1 without SPR {}, with SPR {}",
                format_value(rep.without_spr.metrics.macro_avg.f1),
                format_value(rep.with_spr.metrics.macro_avg.f1)
            ),
        );
    }
    Ok(())
}

fn cmd_stats(ctx: &Ctx, a: &StatsArgs) -> Result<(), Failure> {
    let matrix = ctx.path(&a.matrix, &ctx.cfg.matrix, "matrix")?;
    let (rows, _, _) = labeled_matrix(&matrix)?;
    let weights = ctx.weights(&a.weights)?;
    let report = feature_sweep(&rows, &weights).map_err(Error::from)?;
    let rows_json: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["p_display"] = Value::String(format!("{:.6}", r.p));
            v
        })
        .collect();
    let avg = |b: &spr_core::SprBreakdown, n: usize| json!({ "n": n, "Imp": b.imp, "Amb": b.amb, "SPR": b.spr });
    let out = json!({
        "alpha": spr_core::stats::ALPHA,
        "rows": rows_json,
        "class_averages": {
            "FR": avg(&report.averages.fr, report.averages.n_fr),
            "TR": avg(&report.averages.tr, report.averages.n_tr),
        },
    });
    let mut csv = String::from("variable,class,min,q1,median,q3,max\n");
    for b in &report.boxplots {
        for (label, f) in [("FR", &b.fr), ("TR", &b.tr)] {
            let vals = [f.min, f.q1, f.median, f.q3, f.max].map(format_value).join(",");
            let _ = writeln!(csv, "{},{label},{vals}", b.name);
        }
    }
    write_out(&a.out, &to_json(&out))?;
    write_out(&a.boxplot.clone().unwrap_or_else(|| sibling(&a.out, ".boxplot.csv")), &csv)?;
    let sig = report.rows.iter().filter(|r| r.significant).count();
    diag("INFO", "stats", format!("{} of {} variables significant at 0.05", sig, report.rows.len()));
    Ok(())
}

fn cmd_synth(ctx: &Ctx, a: &SynthArgs) -> Result<(), Failure> {
    let seed = ctx.seed;
    let matrix_n = a.n.unwrap_or(200);
    let rows = match a.kind {
        SynthKind::Text => {
            let mut cfg: SynthConfig = ctx.cfg.synth.clone().unwrap_or_default();
            if let Some(n) = a.n {
                cfg.n_per_class = n;
            }
            if let Some(p) = a.fr_density {
                cfg.fr.default = p;
            }
            if let Some(p) = a.tr_density {
                cfg.tr.default = p;
            }
            let (records, truth) =
                generate_corpus(&cfg, &demo_lexicon_entries(), &DEFAULT_FILLER, seed).map_err(Failure::config)?;
            write_out(&a.out, &spr_core::corpus::corpus_to_jsonl(&records))?;
            write_out(&a.truth.clone().unwrap_or_else(|| sibling(&a.out, ".truth.json")), &to_json(&truth))?;
            diag("INFO", "synth", format!("{} documents written", records.len()));
            return Ok(());
        }
        SynthKind::Planted => planted_signal_matrix(matrix_n, FeatureId::Fr, 0.3, 0.2, seed),
        SynthKind::Separable => separable_matrix(matrix_n, seed),
        SynthKind::Shuffled => shuffle_labels(&separable_matrix(matrix_n, seed), seed),
        SynthKind::SprModel => spr_model_matrix(matrix_n, &WeightVector::uniform(), 0.1, seed)?,
    };
    write_out(&a.out, &matrix_to_csv(&rows))?;
    diag("INFO", "synth", format!("{} rows written", rows.len()));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let ctx = Ctx { cfg, seed };
    match &cli.command {
        Command::Extract(a) => cmd_extract(&ctx, a),
        Command::Weigh(a) => cmd_weigh(&ctx, a),
        Command::Score(a) => cmd_score(&ctx, a),
        Command::Classify(a) => cmd_classify(&ctx, a),
        Command::Stats(a) => cmd_stats(&ctx, a),
        Command::Synth(a) => cmd_synth(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            diag("ERROR", "usage", e.to_string().trim_end().replace('\n', " "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            diag("ERROR", f.tag(), &f.message);
            ExitCode::from(f.code)
        }
    }
}
