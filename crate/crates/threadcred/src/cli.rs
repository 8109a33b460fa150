//! The `threadcred` command line.
//!
//! Exit codes: 0 on success, 1 when lenient parsing skipped input lines, 2 on
//! any fatal error (including usage errors).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde_json::json;
use threadcred_core::align::{
    compute_thresholds, root_event, unify_labels, LabelThresholds, RootOutcome, DEFAULT_HIGH, DEFAULT_LOW,
};
use threadcred_core::features::{extract, FeatureVector, SentimentLexicon, StanceFlags};
use threadcred_core::ingest::{build_threads, DatasetManifest, ManifestEntry, SourceKind};
use threadcred_core::learn::{train_forest_with, ForestConfig, TrainingMatrix};
use threadcred_core::select::{
    evaluate_feature_set, pooled_transfer, random_baseline, rfe_with_progress, transfer, CvConfig, Dataset,
    TransferConfig, TransferResult,
};
use threadcred_core::stance::{cross_validate_stance, train_stance, StanceConfig, StanceModel, DEFAULT_HASH_BITS};
use threadcred_core::{Executor, Label, TweetRecord};

use crate::config::{resolve, FileConfig};
use crate::error::write_string;
use crate::parallel::RayonExecutor;
use crate::tweets::{read_thread, read_tweets, write_tweets, LineError, ParseMode};
use crate::{lexicon, manifest, matrix, models, ratings, reports, stance_io};

pub const BUNDLED_STANCE_CORPUS: &str = include_str!("../data/stance-corpus-v1.jsonl");

#[derive(Debug, Parser)]
#[command(
    name = "threadcred",
    version,
    about = "Classify conversation threads as accurate or inaccurate"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per hardware thread).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// `key = value` file supplying defaults for flags not given.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Abort on the first malformed input line instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Omit the `generated_at` field from JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Warn)]
    pub log_level: LogLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
}

impl LogLevel {
    pub fn filter(self) -> log::LevelFilter {
        match self {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuildMode {
    /// Every parentless tweet roots a thread; all inputs form one pool.
    ReplyTree,
    /// Each input file is one event, re-rooted at its most retweeted tweet.
    RootEvent,
}

#[derive(Debug, Args)]
pub struct Thresholds {
    /// Mean rating below which an event is inaccurate.
    #[arg(long)]
    pub low: Option<f64>,
    /// Mean rating above which an event is accurate.
    #[arg(long)]
    pub high: Option<f64>,
    /// Derive low/high as this tail quantile of the event means.
    #[arg(long, conflicts_with_all = ["low", "high"])]
    pub quantile: Option<f64>,
}

impl Thresholds {
    fn resolve(&self, means: &[f64]) -> Result<LabelThresholds> {
        Ok(match self.quantile {
            Some(q) => compute_thresholds(means, q)?,
            None => LabelThresholds::new(self.low.unwrap_or(DEFAULT_LOW), self.high.unwrap_or(DEFAULT_HIGH))?,
        })
    }
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct threads from tweet JSONL and write one file per thread.
    BuildThreads {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = BuildMode::ReplyTree)]
        mode: BuildMode,
        /// Output directory for thread files and `summary.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Label rated events by their mean rating and write a manifest.
    LabelCredbank {
        ratings: PathBuf,
        #[command(flatten)]
        thresholds: Thresholds,
        #[arg(long)]
        out: PathBuf,
        /// Directory holding `<event_id>.jsonl` thread files; events without
        /// one are left out of the manifest.
        #[arg(long)]
        threads_dir: Option<PathBuf>,
        #[arg(long, default_value = "credbank")]
        name: String,
    },
    /// Map a source manifest's raw labels onto accurate/inaccurate.
    Unify {
        source: PathBuf,
        #[command(flatten)]
        thresholds: Thresholds,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the disagreement classifier (bundled corpus if none given).
    TrainStance {
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_HASH_BITS)]
        hash_bits: u32,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        l2: Option<f64>,
        /// Also report k-fold cross-validated AUC.
        #[arg(long)]
        cv_folds: Option<usize>,
    },
    /// Flag disagreeing replies in every thread of a manifest.
    ApplyStance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the feature matrix of a manifest's threads.
    Featurize {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sentiment lexicon TSV (bundled lexicon if omitted).
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        stance_model: Option<PathBuf>,
        /// Per-reply disagreement flags; these win over the stance model.
        #[arg(long)]
        flags: Option<PathBuf>,
    },
    /// Repeated stratified cross-validation of one feature set.
    Crossval {
        matrix: PathBuf,
        /// Feature list (JSON array or trace); all columns if omitted.
        #[arg(long)]
        features: Option<PathBuf>,
        #[command(flatten)]
        cv: CvArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recursive feature elimination.
    Rfe {
        matrix: PathBuf,
        #[command(flatten)]
        cv: CvArgs,
        /// Elimination trace JSON.
        #[arg(long)]
        out: PathBuf,
        /// Iteration / best-AUC CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Train on source datasets and evaluate on a target.
    Transfer {
        #[arg(long, required = true)]
        source: Vec<PathBuf>,
        /// One feature list per source, or one shared by all.
        #[arg(long, required = true)]
        features: Vec<PathBuf>,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        no_baseline: bool,
    },
    /// Score a target with uniform random probabilities.
    Baseline {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        roc: Option<PathBuf>,
    },
    /// Combine transfer results or ROC CSVs into one model,fpr,tpr CSV.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a forest on a feature matrix and dump it.
    Train {
        matrix: PathBuf,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a feature matrix with a dumped forest.
    Predict {
        #[arg(long)]
        model: PathBuf,
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    /// Lenient parsing skipped input.
    Degraded,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Clean => 0,
            Outcome::Degraded => 1,
        }
    }

    fn from_skips(skipped: usize) -> Self {
        if skipped > 0 {
            Outcome::Degraded
        } else {
            Outcome::Clean
        }
    }
}

struct Ctx {
    seed: Option<u64>,
    jobs: usize,
    mode: ParseMode,
    generated_at: Option<String>,
    file: FileConfig,
}

impl Ctx {
    fn new(g: &Global) -> Result<Self> {
        let file = match &g.config {
            Some(p) => FileConfig::read(p)?,
            None => FileConfig::default(),
        };
        let strict = resolve(g.strict.then_some(true), &file, "strict", false)?;
        let no_timestamp = resolve(g.no_timestamp.then_some(true), &file, "no_timestamp", false)?;
        Ok(Ctx {
            seed: match g.seed {
                Some(s) => Some(s),
                None => file.get("seed")?,
            },
            jobs: resolve(g.jobs, &file, "jobs", 0)?,
            mode: if strict { ParseMode::Strict } else { ParseMode::Lenient },
            generated_at: (!no_timestamp)
                .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            file,
        })
    }

    fn seed(&self, command: &str) -> Result<u64> {
        self.seed
            .with_context(|| format!("{command} is stochastic: pass --seed or set seed in the config file"))
    }

    fn executor(&self) -> Result<RayonExecutor> {
        let exec = RayonExecutor::new(self.jobs)?;
        info!("using {} worker thread(s)", exec.workers());
        Ok(exec)
    }

    fn cv(&self, args: &CvArgs, seed: u64) -> Result<CvConfig> {
        let d = CvConfig::default();
        Ok(CvConfig {
            repeats: resolve(args.repeats, &self.file, "repeats", d.repeats)?,
            folds: resolve(args.folds, &self.file, "folds", d.folds)?,
            trees: resolve(args.trees, &self.file, "trees", d.trees)?,
            seed,
        })
    }

    fn lexicon(&self, flag: Option<&Path>) -> Result<SentimentLexicon> {
        let path = flag
            .map(Path::to_path_buf)
            .or_else(|| self.file.get_str("lexicon").map(PathBuf::from));
        Ok(match path {
            Some(p) => lexicon::read_lexicon(&p)?,
            None => lexicon::bundled_lexicon(),
        })
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let ctx = Ctx::new(&cli.global)?;
    match cli.command {
        Command::BuildThreads { inputs, mode, out } => build_threads_cmd(&ctx, &inputs, mode, &out),
        Command::LabelCredbank {
            ratings,
            thresholds,
            out,
            threads_dir,
            name,
        } => label_credbank(&ratings, &thresholds, &out, threads_dir.as_deref(), &name),
        Command::Unify {
            source,
            thresholds,
            out,
        } => unify(&source, &thresholds, &out),
        Command::TrainStance {
            corpus,
            out,
            hash_bits,
            epochs,
            l2,
            cv_folds,
        } => train_stance_cmd(&ctx, corpus.as_deref(), &out, hash_bits, epochs, l2, cv_folds),
        Command::ApplyStance { model, manifest, out } => apply_stance(&ctx, &model, &manifest, &out),
        Command::Featurize {
            manifest,
            out,
            lexicon,
            stance_model,
            flags,
        } => featurize_cmd(
            &ctx,
            &manifest,
            &out,
            lexicon.as_deref(),
            stance_model.as_deref(),
            flags.as_deref(),
        ),
        Command::Crossval {
            matrix,
            features,
            cv,
            out,
        } => crossval(&ctx, &matrix, features.as_deref(), &cv, &out),
        Command::Rfe { matrix, cv, out, curve } => rfe_cmd(&ctx, &matrix, &cv, &out, curve.as_deref()),
        Command::Transfer {
            source,
            features,
            target,
            repeats,
            trees,
            out_dir,
            no_baseline,
        } => transfer_cmd(&ctx, &source, &features, &target, repeats, trees, &out_dir, no_baseline),
        Command::Baseline {
            target,
            repeats,
            out,
            roc,
        } => baseline(&ctx, &target, repeats, &out, roc.as_deref()),
        Command::Report { inputs, out } => report(&inputs, &out),
        Command::Train {
            matrix,
            features,
            trees,
            out,
        } => train(&ctx, &matrix, features.as_deref(), trees, &out),
        Command::Predict { model, matrix, out } => predict(&model, &matrix, &out),
    }
}

fn safe_file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn log_skips(path: &Path, skipped: &[LineError]) {
    for e in skipped {
        warn!("{}:{}: skipped: {}", path.display(), e.line, e.message);
    }
}

fn build_threads_cmd(ctx: &Ctx, inputs: &[PathBuf], mode: BuildMode, out: &Path) -> Result<Outcome> {
    let mut skipped = Vec::new();
    let mut files = Vec::new();
    let mut discarded = Vec::new();
    let mut dropped_orphans = 0;
    let mut written: BTreeMap<String, String> = BTreeMap::new();
    let mut emit = |name: String, root: &str, tweets: Vec<TweetRecord>| -> Result<()> {
        let file = format!("{}.jsonl", safe_file_stem(&name));
        if let Some(prev) = written.insert(file.clone(), root.to_string()) {
            bail!("threads rooted at {prev} and {root} both map to {file}");
        }
        write_tweets(&out.join(&file), &tweets)?;
        files.push(json!({"file": file, "root_id": root, "tweets": tweets.len()}));
        Ok(())
    };
    match mode {
        BuildMode::ReplyTree => {
            let mut pool = Vec::new();
            for path in inputs {
                let parsed = read_tweets(path, ctx.mode)?;
                log_skips(path, &parsed.skipped);
                skipped.extend(parsed.skipped.into_iter().map(|e| (path.clone(), e)));
                pool.extend(parsed.records);
            }
            let built = build_threads(&pool)?;
            dropped_orphans = built.dropped_orphans;
            for tree in built.threads {
                let root = tree.root_id().to_string();
                emit(root.clone(), &root, tree.into_tweets())?;
            }
        }
        BuildMode::RootEvent => {
            for path in inputs {
                let parsed = read_tweets(path, ctx.mode)?;
                log_skips(path, &parsed.skipped);
                skipped.extend(parsed.skipped.into_iter().map(|e| (path.clone(), e)));
                let event = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                match root_event(&parsed.records) {
                    RootOutcome::Thread(tree) => {
                        dropped_orphans += tree.dropped_orphans();
                        let root = tree.root_id().to_string();
                        emit(event, &root, tree.into_tweets())?;
                    }
                    RootOutcome::Discard(reason) => {
                        info!("discarding event {event}: {reason:?}");
                        discarded.push(json!({"event": event, "reason": format!("{reason:?}")}));
                    }
                }
            }
        }
    }
    let summary = json!({
        "mode": match mode { BuildMode::ReplyTree => "reply-tree", BuildMode::RootEvent => "root-event" },
        "threads": files,
        "discarded": discarded,
        "dropped_orphans": dropped_orphans,
        "skipped_lines": skipped
            .iter()
            .map(|(p, e)| json!({"file": p.display().to_string(), "line": e.line, "message": e.message}))
            .collect::<Vec<_>>(),
    });
    write_string(
        &out.join("summary.json"),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    println!(
        "threads={} discarded={} dropped_orphans={} skipped_lines={}",
        written.len(),
        discarded.len(),
        dropped_orphans,
        skipped.len()
    );
    Ok(Outcome::from_skips(skipped.len()))
}

fn print_thresholds(t: &LabelThresholds) {
    println!("thresholds low={} high={}", t.low, t.high);
}

fn label_credbank(
    ratings_path: &Path,
    thresholds: &Thresholds,
    out: &Path,
    threads_dir: Option<&Path>,
    name: &str,
) -> Result<Outcome> {
    let events = ratings::read_ratings(ratings_path)?;
    let means: Vec<f64> = events.iter().map(|e| e.mean()).collect();
    let t = thresholds.resolve(&means)?;
    print_thresholds(&t);
    let mut counts = BTreeMap::new();
    let mut threads = Vec::new();
    for (event, mean) in events.iter().zip(&means) {
        let label = t.label(*mean);
        *counts.entry(label).or_insert(0usize) += 1;
        let file = format!("{}.jsonl", safe_file_stem(event.event_id()));
        let path = match threads_dir {
            Some(dir) => {
                let p = dir.join(&file);
                if !p.is_file() {
                    info!(
                        "event {} has no thread file; left out of the manifest",
                        event.event_id()
                    );
                    continue;
                }
                if p.is_absolute() {
                    p
                } else {
                    std::env::current_dir().context("resolving --threads-dir")?.join(p)
                }
            }
            None => out.parent().unwrap_or(Path::new("")).join(&file),
        };
        threads.push(ManifestEntry {
            path: path.to_string_lossy().into_owned(),
            label,
        });
    }
    let manifest = DatasetManifest {
        name: name.to_string(),
        source_kind: SourceKind::CredbankLike,
        threads,
    };
    manifest::write_manifest(out, &manifest)?;
    let count = |l| counts.get(&l).copied().unwrap_or(0);
    println!(
        "accurate={} inaccurate={} unlabeled={}",
        count(Label::Accurate),
        count(Label::Inaccurate),
        count(Label::Unlabeled)
    );
    Ok(Outcome::Clean)
}

fn unify(source: &Path, thresholds: &Thresholds, out: &Path) -> Result<Outcome> {
    let src = manifest::load_source_manifest(source)?;
    let means: Vec<f64> = src
        .threads
        .iter()
        .filter_map(|e| e.ratings.as_ref())
        .filter(|r| !r.is_empty())
        .map(|r| r.iter().sum::<i64>() as f64 / r.len() as f64)
        .collect();
    let t = if src.source_kind == SourceKind::CredbankLike {
        let t = thresholds.resolve(&means)?;
        print_thresholds(&t);
        t
    } else {
        LabelThresholds::default()
    };
    let unified = unify_labels(&src, &t)?;
    for ex in &unified.excluded {
        info!("excluded {}: {}", ex.path, ex.reason);
    }
    manifest::write_manifest(out, &unified.manifest)?;
    println!(
        "accurate={} inaccurate={} excluded={}",
        unified.manifest.count(Label::Accurate),
        unified.manifest.count(Label::Inaccurate),
        unified.excluded.len()
    );
    Ok(Outcome::Clean)
}

fn train_stance_cmd(
    ctx: &Ctx,
    corpus: Option<&Path>,
    out: &Path,
    hash_bits: u32,
    epochs: Option<usize>,
    l2: Option<f64>,
    cv_folds: Option<usize>,
) -> Result<Outcome> {
    let seed = ctx.seed("train-stance")?;
    let examples = match corpus {
        Some(p) => stance_io::read_corpus(p)?,
        None => stance_io::parse_corpus(BUNDLED_STANCE_CORPUS, Path::new("bundled:stance-corpus-v1"))?,
    };
    let d = StanceConfig::default();
    let cfg = StanceConfig {
        hash_bits,
        epochs: epochs.unwrap_or(d.epochs),
        l2: l2.unwrap_or(d.l2),
        seed,
        ..d
    };
    let (model, diag) = train_stance(&examples, &cfg)?;
    stance_io::write_model(out, &model)?;
    println!(
        "examples={} disagree={} final_loss={}",
        diag.examples,
        diag.disagree,
        diag.epoch_loss.last().copied().unwrap_or(f64::NAN)
    );
    if let Some(k) = cv_folds {
        let report = cross_validate_stance(&examples, &cfg, k)?;
        println!("cv_folds={} cv_auc={}", report.folds, report.auc);
    }
    Ok(Outcome::Clean)
}

fn apply_stance(ctx: &Ctx, model_path: &Path, manifest_path: &Path, out: &Path) -> Result<Outcome> {
    let model = stance_io::read_model(model_path)?;
    let m = manifest::load_manifest(manifest_path)?;
    let mut flags = BTreeMap::new();
    let mut skipped = 0;
    for entry in &m.threads {
        let path = Path::new(&entry.path);
        let (tree, skips) = read_thread(path, ctx.mode)?;
        log_skips(path, &skips);
        skipped += skips.len();
        for t in tree.tweets().filter(|t| t.id != tree.root_id()) {
            flags.insert(t.id.clone(), model.is_disagreement(&t.text));
        }
    }
    write_string(out, &stance_io::flags_to_jsonl(&flags))?;
    println!(
        "replies={} disagree={}",
        flags.len(),
        flags.values().filter(|&&d| d).count()
    );
    Ok(Outcome::from_skips(skipped))
}

/// Explicit flags first, then the model, else no disagreement.
pub struct LayeredFlags<'a> {
    pub flags: Option<&'a BTreeMap<String, bool>>,
    pub model: Option<&'a StanceModel>,
}

impl StanceFlags for LayeredFlags<'_> {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool {
        if let Some(&f) = self.flags.and_then(|m| m.get(&tweet.id)) {
            return f;
        }
        self.model.is_some_and(|m| m.is_disagreement(&tweet.text))
    }
}

pub type SkippedLines = Vec<(PathBuf, LineError)>;

/// Extracts one labeled vector per manifest thread, in manifest order.
pub fn featurize_manifest(
    manifest: &DatasetManifest,
    flags: &(impl StanceFlags + Sync),
    lexicon: &SentimentLexicon,
    mode: ParseMode,
    exec: &impl Executor,
) -> crate::IoResult<(Vec<FeatureVector>, SkippedLines)> {
    let results = exec.map(manifest.threads.clone(), |entry| {
        let path = PathBuf::from(&entry.path);
        let (tree, skips) = read_thread(&path, mode)?;
        let mut v = extract(&tree, flags, lexicon);
        v.label = entry.label;
        Ok::<_, crate::IoError>((v, skips.into_iter().map(|e| (path.clone(), e)).collect::<Vec<_>>()))
    });
    let mut vectors = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for r in results {
        let (v, s) = r?;
        vectors.push(v);
        skipped.extend(s);
    }
    Ok((vectors, skipped))
}

fn featurize_cmd(
    ctx: &Ctx,
    manifest_path: &Path,
    out: &Path,
    lexicon: Option<&Path>,
    stance_model: Option<&Path>,
    flags: Option<&Path>,
) -> Result<Outcome> {
    let m = manifest::load_manifest(manifest_path)?;
    let lexicon = ctx.lexicon(lexicon)?;
    let model = stance_model.map(stance_io::read_model).transpose()?;
    let flag_map = flags.map(stance_io::read_flags).transpose()?;
    if model.is_none() && flag_map.is_none() {
        warn!("no stance model or flags given; disagreement features will be zero");
    }
    let layered = LayeredFlags {
        flags: flag_map.as_ref(),
        model: model.as_ref(),
    };
    let (vectors, skipped) = featurize_manifest(&m, &layered, &lexicon, ctx.mode, &ctx.executor()?)?;
    for (p, e) in &skipped {
        warn!("{}:{}: skipped: {}", p.display(), e.line, e.message);
    }
    matrix::write_matrix(out, &matrix::MatrixFile::from_features(&vectors))?;
    println!("threads={} skipped_lines={}", vectors.len(), skipped.len());
    Ok(Outcome::from_skips(skipped.len()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (ds, dropped) = matrix::read_matrix(path)?.to_dataset(&name)?;
    if dropped > 0 {
        info!("{}: ignoring {dropped} unlabeled row(s)", path.display());
    }
    Ok(ds)
}

fn feature_names(ds: &Dataset, list: Option<&Path>) -> Result<Vec<String>> {
    Ok(match list {
        Some(p) => reports::read_feature_list(p)?,
        None => ds.columns().to_vec(),
    })
}

fn crossval(ctx: &Ctx, matrix_path: &Path, features: Option<&Path>, cv: &CvArgs, out: &Path) -> Result<Outcome> {
    let cfg = ctx.cv(cv, ctx.seed("crossval")?)?;
    let ds = load_dataset(matrix_path)?;
    let names = feature_names(&ds, features)?;
    let score = evaluate_feature_set(&ds, &ds.resolve(&names)?, &cfg)?;
    reports::write_crossval(out, &ds, &names, &cfg, &score, ctx.generated_at.as_deref())?;
    println!("mean_auc={}", score.mean);
    Ok(Outcome::Clean)
}

fn rfe_cmd(ctx: &Ctx, matrix_path: &Path, cv: &CvArgs, out: &Path, curve: Option<&Path>) -> Result<Outcome> {
    let cfg = ctx.cv(cv, ctx.seed("rfe")?)?;
    let ds = load_dataset(matrix_path)?;
    let exec = ctx.executor()?;
    let trace = rfe_with_progress(&ds, &cfg, &exec, |step| {
        info!(
            "{} features: removed {} (auc {:.4})",
            step.active.len(),
            ds.columns()[step.removed],
            step.best_auc
        );
    })?;
    reports::write_trace(out, &trace, &ds, ctx.generated_at.as_deref())?;
    if let Some(p) = curve {
        write_string(p, &reports::rfe_curve_csv(&trace, &ds))?;
    }
    let chosen: Vec<&str> = trace.chosen_subset.iter().map(|&c| ds.columns()[c].as_str()).collect();
    println!(
        "iterations={} chosen_subset={}",
        trace.iterations.len(),
        chosen.join(",")
    );
    Ok(Outcome::Clean)
}

fn write_result(ctx: &Ctx, dir: &Path, r: &TransferResult) -> Result<()> {
    let stem = safe_file_stem(&r.source);
    reports::write_transfer(
        &dir.join(format!("transfer-{stem}.json")),
        r,
        ctx.generated_at.as_deref(),
    )?;
    reports::write_roc(&dir.join(format!("roc-{stem}.csv")), &r.roc)?;
    let p = r.chi2.map_or("NA".to_string(), |c| c.p_value.to_string());
    println!(
        "{}\tmean_auc={}\tmean_accuracy={}\tchi2_p={}",
        r.source, r.mean_auc, r.mean_accuracy, p
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn transfer_cmd(
    ctx: &Ctx,
    sources: &[PathBuf],
    feature_lists: &[PathBuf],
    target: &Path,
    repeats: Option<usize>,
    trees: Option<usize>,
    out_dir: &Path,
    no_baseline: bool,
) -> Result<Outcome> {
    let seed = ctx.seed("transfer")?;
    if feature_lists.len() != 1 && feature_lists.len() != sources.len() {
        bail!(
            "{} feature lists for {} sources: give one per source or one shared list",
            feature_lists.len(),
            sources.len()
        );
    }
    let d = TransferConfig::default();
    let cfg = TransferConfig {
        repeats: resolve(repeats, &ctx.file, "repeats", d.repeats)?,
        trees: resolve(trees, &ctx.file, "trees", d.trees)?,
        seed,
    };
    let target = load_dataset(target)?;
    let exec = ctx.executor()?;
    let mut loaded = Vec::with_capacity(sources.len());
    for (i, path) in sources.iter().enumerate() {
        let list = &feature_lists[if feature_lists.len() == 1 { 0 } else { i }];
        loaded.push((load_dataset(path)?, reports::read_feature_list(list)?));
    }
    for (ds, names) in &loaded {
        write_result(ctx, out_dir, &transfer(ds, &target, names, &cfg, &exec)?)?;
    }
    if loaded.len() >= 2 {
        let refs: Vec<(&Dataset, Vec<String>)> = loaded.iter().map(|(d, n)| (d, n.clone())).collect();
        write_result(ctx, out_dir, &pooled_transfer(&refs, &target, &cfg, &exec)?)?;
    }
    if !no_baseline {
        write_result(ctx, out_dir, &random_baseline(&target, cfg.repeats, seed)?)?;
    }
    Ok(Outcome::Clean)
}

fn baseline(ctx: &Ctx, target: &Path, repeats: Option<usize>, out: &Path, roc: Option<&Path>) -> Result<Outcome> {
    let seed = ctx.seed("baseline")?;
    let repeats = resolve(repeats, &ctx.file, "repeats", TransferConfig::default().repeats)?;
    let r = random_baseline(&load_dataset(target)?, repeats, seed)?;
    reports::write_transfer(out, &r, ctx.generated_at.as_deref())?;
    if let Some(p) = roc {
        reports::write_roc(p, &r.roc)?;
    }
    println!("mean_auc={} mean_accuracy={}", r.mean_auc, r.mean_accuracy);
    Ok(Outcome::Clean)
}

fn report(inputs: &[PathBuf], out: &Path) -> Result<Outcome> {
    let curves = inputs
        .iter()
        .map(|p| reports::curve_from_file(p))
        .collect::<crate::IoResult<Vec<_>>>()?;
    write_string(out, &reports::combined_csv(&curves))?;
    println!("models={}", curves.len());
    Ok(Outcome::Clean)
}

fn train(ctx: &Ctx, matrix_path: &Path, features: Option<&Path>, trees: Option<usize>, out: &Path) -> Result<Outcome> {
    let seed = ctx.seed("train")?;
    let ds = load_dataset(matrix_path)?;
    let names = feature_names(&ds, features)?;
    let cols = ds.resolve(&names)?;
    let rows: Vec<Vec<f64>> = (0..ds.len())
        .map(|i| cols.iter().map(|&c| ds.row(i)[c]).collect())
        .collect();
    let m = TrainingMatrix::from_rows(cols.len(), &rows, ds.labels())?;
    let cfg = ForestConfig {
        n_trees: resolve(trees, &ctx.file, "trees", ForestConfig::default().n_trees)?,
        ..ForestConfig::with_seed(seed)
    };
    let model = train_forest_with(&m, &cfg, &ctx.executor()?)?;
    models::write_forest(out, &models::ForestDump::new(names, model))?;
    println!("rows={} features={} trees={}", ds.len(), cols.len(), cfg.n_trees);
    Ok(Outcome::Clean)
}

fn predict(model_path: &Path, matrix_path: &Path, out: &Path) -> Result<Outcome> {
    let dump = models::read_forest(model_path)?;
    let m = matrix::read_matrix(matrix_path)?;
    let cols = dump
        .features
        .iter()
        .map(|f| {
            m.columns
                .iter()
                .position(|c| c == f)
                .with_context(|| format!("{}: no column {f}", matrix_path.display()))
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut text = String::from("thread_id,p_accurate,predicted\n");
    let mut buf = vec![0.0; cols.len()];
    for (id, row) in m.ids.iter().zip(&m.rows) {
        for (b, &c) in buf.iter_mut().zip(&cols) {
            *b = row[c];
        }
        let p = dump.model.predict_proba(&buf)?;
        let label = if p > threadcred_core::select::DECISION_THRESHOLD {
            Label::Accurate
        } else {
            Label::Inaccurate
        };
        text.push_str(&format!("{id},{},{label}\n", matrix::format_value(p)));
    }
    write_string(out, &text)?;
    println!("rows={}", m.rows.len());
    Ok(Outcome::Clean)
}
