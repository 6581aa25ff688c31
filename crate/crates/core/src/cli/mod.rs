//! Command-line front end. [`run_command`] parses `argv`, resolves the
//! configuration (defaults, then the TOML file, then the endpoint
//! environment variable, then flags) and writes artifacts into the output
//! directory.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 model-service error.

pub mod artifact;
mod config;

pub use config::{PipelineConfig, ScorerKind, ENDPOINT_ENV};

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{load_corpus, CorpusError, RiskLevel, Segmenter, UserTimeline};
use crate::eval::{
    evaluate_highlights, precision_correlation_analysis, ratio_stats_from_scored,
    uniform_bin_edges, write_precision_csv, write_ratio_csv, Cosine, EmbeddingTable, EvalError,
    OneHot, SpanObservation, TokenSimilarity,
};
use crate::generator::{SummaryGenerator, TermGenerator};
use crate::highlight::{FillPolicy, Provenance as SpanSource};
use crate::lexicon::{
    build_weak_labeled_dataset, DatasetError, DatasetOptions, LabeledDataset, LabeledSentence,
    LexiconError, RiskPhraseLexicon, Split, SummaryPhraseTable,
};
use crate::pipeline::Pipeline;
use crate::scoring::{
    train_baseline, BaselineRiskModel, LexiconBaselineScorer, ModelFileError, RemoteClient,
    RiskScorer, ScoreError, SentimentScorer, TrainError, TrainOptions, TransportError,
    ValenceLexicon, ValenceSentimentScorer,
};
use crate::summary::SummaryError;
use artifact::Provenance;

#[derive(Debug)]
pub enum CliError {
    /// Bad input, configuration or usage.
    Input(String),
    /// The model service failed.
    Remote(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Remote(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Remote(m) => write!(f, "model service error: {m}"),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error!(
    CorpusError,
    LexiconError,
    DatasetError,
    TrainError,
    ModelFileError,
    EvalError,
    SummaryError,
    std::io::Error,
    String
);

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        if e.is_remote() {
            CliError::Remote(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        CliError::Remote(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "risk-evidence",
    version,
    about = "Sentence-level suicide-risk evidence extraction and summaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split every post into sentences
    Segment(CommonArgs),
    /// Build the lexicon weak-labeled sentence dataset
    BuildDataset(BuildDatasetArgs),
    /// Train the n-gram baseline risk model on a dataset
    TrainBaseline(TrainArgs),
    /// Score every sentence for risk and sentiment
    Score(CommonArgs),
    /// Select highlight sentences per user
    Highlight(CommonArgs),
    /// Compose per-user evidence summaries
    Summarize(CommonArgs),
    /// Score predicted highlights against gold highlights
    Evaluate(EvaluateArgs),
    /// Per-level ratio statistics and precision-bin tables
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSONL corpus
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output directory
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of users processed in parallel
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    risk_lexicon: Option<PathBuf>,
    #[arg(long)]
    summary_phrases: Option<PathBuf>,
    #[arg(long)]
    valence: Option<PathBuf>,
    /// Trained baseline model for the lexicon-baseline scorer
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum)]
    scorer: Option<ScorerKind>,
    /// Model-service base URL
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    word_budget: Option<usize>,
    #[arg(long)]
    min_candidate_words: Option<usize>,
    /// Skip sentences that overflow the budget instead of stopping
    #[arg(long)]
    skip_overflow: bool,
    /// Treat commas as sentence boundaries
    #[arg(long)]
    split_on_comma: bool,
    /// Use the model service for highlight terms and generated summaries
    #[arg(long)]
    generator: bool,
}

#[derive(Debug, Args)]
struct BuildDatasetArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    val_fraction: Option<f64>,
    #[arg(long)]
    balance_tolerance: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dataset JSONL (defaults to dataset.jsonl in the output directory)
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Predicted highlights JSONL
    #[arg(long)]
    pred: PathBuf,
    /// Gold highlights JSONL
    #[arg(long)]
    gold: PathBuf,
    /// Word vectors (`token v1 v2 ...` per line) instead of exact matching
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, requires = "gold")]
    pred: Option<PathBuf>,
    #[arg(long, requires = "pred")]
    gold: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Number of equal-width precision bins
    #[arg(long)]
    bins: Option<usize>,
}

fn resolve(
    common: &CommonArgs,
    tweak: impl FnOnce(&mut PipelineConfig),
) -> CliResult<PipelineConfig> {
    let mut c = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    c.apply_env();
    macro_rules! overlay {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = &common.$flag {
                c.$field = v.clone().into();
            })*
        };
    }
    overlay!(
        corpus => corpus,
        output_dir => output_dir,
        seed => seed,
        jobs => jobs,
        risk_lexicon => risk_lexicon,
        summary_phrases => summary_phrases,
        valence => valence,
        model => model,
        scorer => scorer,
        threshold => risk_threshold,
        word_budget => word_budget,
        min_candidate_words => min_candidate_words
    );
    if let Some(endpoint) = &common.endpoint {
        match &mut c.remote {
            Some(r) => r.endpoint = endpoint.clone(),
            None => c.remote = Some(crate::scoring::RemoteConfig::new(endpoint.clone())),
        }
    }
    if common.skip_overflow {
        c.fill_policy = FillPolicy::SkipAndContinue;
    }
    c.split_on_comma |= common.split_on_comma;
    c.generator |= common.generator;
    tweak(&mut c);
    c.validate()?;
    Ok(c)
}

struct Context {
    command: &'static str,
    config: PipelineConfig,
}

impl Context {
    fn provenance(&self) -> Provenance {
        Provenance::new(self.command, self.config.hash(), self.config.seed)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    fn segmenter(&self) -> Segmenter {
        Segmenter::new().with_comma_boundaries(self.config.split_on_comma)
    }

    fn corpus(&self) -> CliResult<Vec<UserTimeline>> {
        let path = self.config.corpus.as_ref().ok_or_else(|| {
            CliError::Input("no corpus given (--corpus or `corpus` in config)".into())
        })?;
        let mut corpus = load_corpus(path)?;
        corpus.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        Ok(corpus)
    }

    fn lexicon(&self) -> CliResult<RiskPhraseLexicon> {
        Ok(match &self.config.risk_lexicon {
            Some(p) => RiskPhraseLexicon::load(p)?,
            None => RiskPhraseLexicon::default(),
        })
    }

    fn summary_table(&self, lexicon: &RiskPhraseLexicon) -> CliResult<SummaryPhraseTable> {
        Ok(match &self.config.summary_phrases {
            Some(p) => SummaryPhraseTable::load(p)?.with_risk_row(lexicon)?,
            None => SummaryPhraseTable::default_with(lexicon),
        })
    }

    fn remote(&self) -> CliResult<Option<RemoteClient>> {
        let needed = self.config.scorer == ScorerKind::Remote || self.config.generator;
        match (&self.config.remote, needed) {
            (Some(r), true) => Ok(Some(RemoteClient::new(r.clone())?)),
            _ => Ok(None),
        }
    }

    fn services(&self) -> CliResult<Services> {
        let lexicon = self.lexicon()?;
        let table = self.summary_table(&lexicon)?;
        let remote = self.remote()?;
        let (risk, sentiment): (Box<dyn RiskScorer>, Box<dyn SentimentScorer>) =
            match self.config.scorer {
                ScorerKind::Remote => {
                    let client = remote.clone().expect("validated remote config");
                    (Box::new(client.clone()), Box::new(client))
                }
                ScorerKind::LexiconBaseline => {
                    let model = self
                        .config
                        .model
                        .as_ref()
                        .map(BaselineRiskModel::load)
                        .transpose()?;
                    let valence = match &self.config.valence {
                        Some(p) => ValenceLexicon::load(p)?,
                        None => ValenceLexicon::default(),
                    };
                    (
                        Box::new(LexiconBaselineScorer::new(lexicon, model)),
                        Box::new(ValenceSentimentScorer::new(valence)),
                    )
                }
            };
        let generator = if self.config.generator { remote } else { None };
        Ok(Services {
            risk,
            sentiment,
            table,
            generator,
        })
    }

    /// Runs `f` over users on `jobs` threads; results keep input order.
    fn per_user<T: Send>(
        &self,
        corpus: &[UserTimeline],
        f: impl Fn(&UserTimeline) -> CliResult<T> + Sync + Send,
    ) -> CliResult<Vec<T>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.jobs.max(1))
            .build()
            .map_err(|e| CliError::Input(e.to_string()))?;
        pool.install(|| corpus.par_iter().map(&f).collect())
    }
}

struct Services {
    risk: Box<dyn RiskScorer>,
    sentiment: Box<dyn SentimentScorer>,
    table: SummaryPhraseTable,
    generator: Option<RemoteClient>,
}

impl Services {
    fn pipeline(&self, ctx: &Context) -> Pipeline<'_> {
        let mut p = Pipeline::new(self.risk.as_ref(), self.sentiment.as_ref(), &self.table);
        p.segmenter = ctx.segmenter();
        p.highlight = ctx.config.highlight();
        if let Some(g) = &self.generator {
            p.terms = Some(g as &dyn TermGenerator);
            p.summaries = Some(g as &dyn SummaryGenerator);
        }
        p
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRow {
    user_id: String,
    post_id: String,
    index: usize,
    char_start: usize,
    char_end: usize,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRow {
    user_id: String,
    post_id: String,
    index: usize,
    char_start: usize,
    char_end: usize,
    text: String,
    p_risk: f64,
    p_negative: f64,
    p_neutral: f64,
    p_positive: f64,
    risk_positive: bool,
}

/// One highlight span. Gold files use the same layout; only `user_id` and
/// `text` are required when reading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HighlightRecord {
    pub user_id: String,
    #[serde(default)]
    pub post_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_end: Option<usize>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<SpanSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_words: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_risk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_negative: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SummaryRecord {
    user_id: String,
    expert_level: RiskLevel,
    summary: String,
    opening: String,
    frequency: Option<String>,
    dictionary: Option<String>,
    generative: Option<String>,
}

fn segment(ctx: &Context) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let seg = ctx.segmenter();
    let rows: Vec<SentenceRow> = corpus
        .iter()
        .flat_map(|t| {
            t.posts.iter().flat_map(|p| {
                seg.segment_post(p).into_iter().map(|s| SentenceRow {
                    user_id: t.user_id.clone(),
                    post_id: s.post_id,
                    index: s.index,
                    char_start: s.char_start,
                    char_end: s.char_end,
                    text: s.text,
                })
            })
        })
        .collect();
    let path = ctx.out("sentences.jsonl");
    artifact::write_jsonl(&path, &ctx.provenance(), &rows)?;
    println!("{} sentences -> {}", rows.len(), path.display());
    Ok(())
}

fn build_dataset(ctx: &Context) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let options = DatasetOptions {
        seed: ctx.config.seed,
        val_fraction: ctx.config.val_fraction,
        balance_tolerance: ctx.config.balance_tolerance,
    };
    let dataset = build_weak_labeled_dataset(&corpus, &ctx.lexicon()?, &ctx.segmenter(), &options)?;
    let rows: Vec<&LabeledSentence> = dataset.rows().collect();
    let path = ctx.out("dataset.jsonl");
    artifact::write_jsonl(&path, &ctx.provenance(), &rows)?;
    let (t, v) = (dataset.train_counts(), dataset.val_counts());
    println!(
        "train: {} positive / {} negative; val: {} positive / {} negative -> {}",
        t.positive,
        t.negative,
        v.positive,
        v.negative,
        path.display()
    );
    Ok(())
}

fn train(ctx: &Context, dataset_path: Option<PathBuf>) -> CliResult<()> {
    let path = dataset_path.unwrap_or_else(|| ctx.out("dataset.jsonl"));
    let (meta, rows): (_, Vec<LabeledSentence>) = artifact::read_jsonl(&path)?;
    let seed = meta.map_or(ctx.config.seed, |m| m.seed);
    let (train, val) = rows.into_iter().partition(|r| r.split == Split::Train);
    let dataset = LabeledDataset { train, val, seed };
    let options = TrainOptions {
        epochs: ctx.config.epochs,
        learning_rate: ctx.config.learning_rate,
        seed: ctx.config.seed,
    };
    let trained = train_baseline(&dataset, &options)?;

    let prov = ctx.provenance();
    let model_path = ctx.out("baseline.model");
    let mut out = artifact::create(&model_path)?;
    std::io::Write::write_all(
        &mut out,
        trained
            .model
            .to_text_with_comment(&prov.comment_line())
            .as_bytes(),
    )?;
    std::io::Write::flush(&mut out)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["epoch", "train_accuracy", "val_accuracy"])
        .map_err(|e| CliError::Input(e.to_string()))?;
    for m in &trained.history {
        csv.write_record([
            m.epoch.to_string(),
            m.train_accuracy.to_string(),
            m.val_accuracy.to_string(),
        ])
        .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let body = csv
        .into_inner()
        .map_err(|e| CliError::Input(e.to_string()))?;
    artifact::write_csv(&ctx.out("training_metrics.csv"), &prov, &body)?;

    let best = trained.best();
    println!(
        "best epoch {} of {}: train accuracy {:.4}, val accuracy {:.4} -> {}",
        best.epoch,
        trained.history.len(),
        best.train_accuracy,
        best.val_accuracy,
        model_path.display()
    );
    Ok(())
}

fn score(ctx: &Context) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let services = ctx.services()?;
    let pipeline = services.pipeline(ctx);
    let per_user = ctx.per_user(&corpus, |t| Ok(pipeline.score(t)?))?;
    let rows: Vec<ScoreRow> = corpus
        .iter()
        .zip(per_user)
        .flat_map(|(t, scored)| {
            scored.into_iter().map(move |s| ScoreRow {
                user_id: t.user_id.clone(),
                post_id: s.sentence.post_id,
                index: s.sentence.index,
                char_start: s.sentence.char_start,
                char_end: s.sentence.char_end,
                text: s.sentence.text,
                p_risk: s.risk.p_risk,
                p_negative: s.sentiment.p_negative,
                p_neutral: s.sentiment.p_neutral,
                p_positive: s.sentiment.p_positive,
                risk_positive: s.risk_positive,
            })
        })
        .collect();
    let path = ctx.out("scores.jsonl");
    artifact::write_jsonl(&path, &ctx.provenance(), &rows)?;
    let positive = rows.iter().filter(|r| r.risk_positive).count();
    println!(
        "{} sentences, {positive} risk-positive -> {}",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn highlight(ctx: &Context) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let services = ctx.services()?;
    let pipeline = services.pipeline(ctx);
    let reports = ctx.per_user(&corpus, |t| Ok(pipeline.run_user(t)?))?;
    let mut rows = Vec::new();
    let mut warnings = 0;
    for report in &reports {
        warnings += report.highlights.warnings.len();
        let set = &report.highlights.set;
        for e in &set.entries {
            let s = &report.scored[e.position];
            rows.push(HighlightRecord {
                user_id: report.user_id.clone(),
                post_id: s.sentence.post_id.clone(),
                char_start: Some(s.sentence.char_start),
                char_end: Some(s.sentence.char_end),
                text: s.sentence.text.clone(),
                provenance: Some(e.provenance),
                total_words: Some(set.total_words),
                p_risk: Some(s.risk.p_risk),
                p_negative: Some(s.sentiment.p_negative),
            });
        }
    }
    let path = ctx.out("highlights.jsonl");
    artifact::write_jsonl(&path, &ctx.provenance(), &rows)?;
    println!(
        "{} highlights for {} users -> {}",
        rows.len(),
        reports.len(),
        path.display()
    );
    if warnings > 0 {
        eprintln!("warning: {warnings} users fell back to risk and sentiment highlights only");
    }
    Ok(())
}

fn summarize(ctx: &Context) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let services = ctx.services()?;
    let pipeline = services.pipeline(ctx);
    let summaries = ctx.per_user(&corpus, |t| {
        if t.expert_level == RiskLevel::Unknown {
            log::warn!("user {} has no expert level; no summary written", t.user_id);
            return Ok(None);
        }
        let scored = pipeline.score(t)?;
        Ok(Some((t.expert_level, pipeline.summarize(t, &scored)?)))
    })?;
    let rows: Vec<SummaryRecord> = summaries
        .into_iter()
        .flatten()
        .map(|(level, s)| SummaryRecord {
            user_id: s.user_id,
            expert_level: level,
            summary: s.summary,
            opening: s.parts.opening,
            frequency: s.parts.frequency,
            dictionary: s.parts.dictionary,
            generative: s.parts.generative,
        })
        .collect();
    let skipped = corpus.len() - rows.len();
    let path = ctx.out("summaries.jsonl");
    artifact::write_jsonl(&path, &ctx.provenance(), &rows)?;
    println!("{} summaries -> {}", rows.len(), path.display());
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} users without an expert level");
    }
    Ok(())
}

fn read_highlights(path: &Path) -> CliResult<Vec<HighlightRecord>> {
    Ok(artifact::read_jsonl(path)?.1)
}

fn by_user(records: &[HighlightRecord]) -> BTreeMap<String, Vec<String>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in records {
        map.entry(r.user_id.clone())
            .or_default()
            .push(r.text.clone());
    }
    map
}

fn provider(embeddings: Option<&Path>) -> CliResult<Box<dyn TokenSimilarity>> {
    Ok(match embeddings {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Box::new(Cosine(EmbeddingTable::read(std::io::BufReader::new(file))?))
        }
        None => Box::new(OneHot),
    })
}

#[derive(Serialize)]
struct EvaluationFile<'a> {
    _meta: Provenance,
    #[serde(flatten)]
    report: &'a crate::eval::HighlightEvaluation,
    consistency: &'static str,
}

fn evaluate(ctx: &Context, args: &EvaluateArgs) -> CliResult<()> {
    let pred = read_highlights(&args.pred)?;
    let gold = read_highlights(&args.gold)?;
    let provider = provider(args.embeddings.as_deref())?;
    let report = evaluate_highlights(&by_user(&pred), &by_user(&gold), provider.as_ref())?;

    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    println!(
        "recall (mean over gold spans):      {}",
        fmt(report.recall_span_mean)
    );
    println!(
        "precision (mean over pred spans):   {}",
        fmt(report.precision_span_mean)
    );
    println!(
        "recall (mean over users):           {}",
        fmt(report.recall_user_mean)
    );
    println!(
        "precision (mean over users):        {}",
        fmt(report.precision_user_mean)
    );
    println!("consistency:                        not implemented");

    let path = ctx.out("evaluation.json");
    let mut out = artifact::create(&path)?;
    let file = EvaluationFile {
        _meta: ctx.provenance(),
        report: &report,
        consistency: "not implemented",
    };
    serde_json::to_writer_pretty(&mut out, &file).map_err(|e| CliError::Input(e.to_string()))?;
    std::io::Write::write_all(&mut out, b"\n")?;
    std::io::Write::flush(&mut out)?;
    Ok(())
}

fn analyze(ctx: &Context, args: &AnalyzeArgs) -> CliResult<()> {
    let corpus = ctx.corpus()?;
    let services = ctx.services()?;
    let pipeline = services.pipeline(ctx);
    let scored = ctx.per_user(&corpus, |t| Ok(pipeline.score(t)?))?;
    let analysis = ratio_stats_from_scored(
        corpus
            .iter()
            .zip(&scored)
            .map(|(t, s)| (t.user_id.as_str(), t.expert_level, s.as_slice())),
    );
    let mut body = Vec::new();
    write_ratio_csv(&mut body, &analysis)?;
    let path = ctx.out("risk_ratio.csv");
    artifact::write_csv(&path, &ctx.provenance(), &body)?;
    println!("ratio quartiles by level -> {}", path.display());

    if let (Some(pred_path), Some(gold_path)) = (&args.pred, &args.gold) {
        let pred = read_highlights(pred_path)?;
        let gold = read_highlights(gold_path)?;
        let provider = provider(args.embeddings.as_deref())?;
        let report = evaluate_highlights(&by_user(&pred), &by_user(&gold), provider.as_ref())?;

        let mut per_user: BTreeMap<&str, Vec<&HighlightRecord>> = BTreeMap::new();
        for r in &pred {
            per_user.entry(r.user_id.as_str()).or_default().push(r);
        }
        let mut spans = Vec::with_capacity(report.span_precision.len());
        for sp in &report.span_precision {
            let rec = per_user[sp.user_id.as_str()][sp.span];
            let (Some(p_risk), Some(p_negative)) = (rec.p_risk, rec.p_negative) else {
                return Err(CliError::Input(format!(
                    "{}: highlight of user {} lacks p_risk/p_negative",
                    pred_path.display(),
                    rec.user_id
                )));
            };
            spans.push(SpanObservation {
                precision: sp.precision,
                p_risk,
                p_negative,
            });
        }
        let bins = args.bins.unwrap_or(ctx.config.precision_bins);
        let rows = precision_correlation_analysis(&spans, &uniform_bin_edges(bins))?;
        let mut body = Vec::new();
        write_precision_csv(&mut body, &rows)?;
        let path = ctx.out("precision_correlation.csv");
        artifact::write_csv(&path, &ctx.provenance(), &body)?;
        println!(
            "{} spans in {bins} precision bins -> {}",
            spans.len(),
            path.display()
        );
    }
    Ok(())
}

fn dispatch(command: Command) -> CliResult<()> {
    let ctx = |name: &'static str,
               common: &CommonArgs,
               tweak: &dyn Fn(&mut PipelineConfig)|
     -> CliResult<Context> {
        Ok(Context {
            command: name,
            config: resolve(common, |c| tweak(c))?,
        })
    };
    match command {
        Command::Segment(c) => segment(&ctx("segment", &c, &|_| {})?),
        Command::BuildDataset(a) => {
            let tweak = |c: &mut PipelineConfig| {
                if let Some(v) = a.val_fraction {
                    c.val_fraction = v;
                }
                if let Some(v) = a.balance_tolerance {
                    c.balance_tolerance = v;
                }
            };
            build_dataset(&ctx("build-dataset", &a.common, &tweak)?)
        }
        Command::TrainBaseline(a) => {
            let tweak = |c: &mut PipelineConfig| {
                if let Some(v) = a.epochs {
                    c.epochs = v;
                }
                if let Some(v) = a.learning_rate {
                    c.learning_rate = v;
                }
            };
            let context = ctx("train-baseline", &a.common, &tweak)?;
            train(&context, a.dataset.clone())
        }
        Command::Score(c) => score(&ctx("score", &c, &|_| {})?),
        Command::Highlight(c) => highlight(&ctx("highlight", &c, &|_| {})?),
        Command::Summarize(c) => summarize(&ctx("summarize", &c, &|_| {})?),
        Command::Evaluate(a) => evaluate(&ctx("evaluate", &a.common, &|_| {})?, &a),
        Command::Analyze(a) => {
            let tweak = |c: &mut PipelineConfig| {
                if let Some(b) = a.bins {
                    c.precision_bins = b;
                }
            };
            analyze(&ctx("analyze", &a.common, &tweak)?, &a)
        }
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
