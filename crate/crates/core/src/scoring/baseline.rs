//! Character n-gram logistic regression, the native stand-in for a
//! fine-tuned sentence classifier, and the lexicon-first scorer built on it.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RiskScore, RiskScorer, ScoreError};
use crate::lexicon::{fold_char, LabeledDataset, LabeledSentence, RiskPhraseLexicon};

const MAGIC: &str = "risk-evidence-baseline v1";
const MIN_N: usize = 3;
const MAX_N: usize = 5;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training needs both classes in the dataset")]
    SingleClass,
    #[error("model is untrained: epochs must be at least 1")]
    Untrained,
    #[error("learning rate must be positive and finite, got {0}")]
    BadLearningRate(f64),
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
}

fn format_err(line: usize, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Format {
        line,
        message: message.into(),
    }
}

/// Lowercased, whitespace-collapsed text padded with one space each side.
fn padded(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for word in text.split_whitespace() {
        out.extend(word.chars().map(fold_char));
        out.push(' ');
    }
    out
}

fn ngrams(text: &str) -> impl Iterator<Item = String> {
    let chars = padded(text);
    let mut grams = Vec::new();
    for n in MIN_N..=MAX_N {
        for w in chars.windows(n) {
            grams.push(w.iter().collect());
        }
    }
    grams.into_iter()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Logistic regression over L2-normalised character n-gram counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRiskModel {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<f64>,
    bias: f64,
    trained: bool,
}

impl BaselineRiskModel {
    fn with_vocab(vocab: Vec<String>) -> Self {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        let weights = vec![0.0; vocab.len()];
        Self {
            vocab,
            index,
            weights,
            bias: 0.0,
            trained: false,
        }
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    fn features(&self, text: &str) -> Vec<(usize, f64)> {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for gram in ngrams(text) {
            if let Some(&i) = self.index.get(&gram) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let norm = counts.values().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            counts.values_mut().for_each(|c| *c /= norm);
        }
        counts.into_iter().collect()
    }

    fn logit(&self, features: &[(usize, f64)]) -> f64 {
        self.bias
            + features
                .iter()
                .map(|&(i, x)| self.weights[i] * x)
                .sum::<f64>()
    }

    pub fn predict_proba(&self, text: &str) -> f64 {
        sigmoid(self.logit(&self.features(text)))
    }

    /// Serialises to the versioned flat text format. Weights are written with
    /// the shortest decimal form that parses back to the identical `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "ngram_range {MIN_N} {MAX_N}");
        let _ = writeln!(out, "trained {}", self.trained);
        let _ = writeln!(out, "bias {}", self.bias);
        let _ = writeln!(out, "entries {}", self.vocab.len());
        for (gram, w) in self.vocab.iter().zip(&self.weights) {
            let quoted = serde_json::to_string(gram).expect("strings serialise");
            let _ = writeln!(out, "{w}\t{quoted}");
        }
        out
    }

    /// [`BaselineRiskModel::to_text`] with a `#` comment line after the
    /// magic line. Comment lines are ignored on load.
    pub fn to_text_with_comment(&self, comment: &str) -> String {
        let text = self.to_text();
        let (magic, rest) = text.split_once('\n').expect("magic line present");
        let comment = comment.trim_start_matches('#').replace('\n', " ");
        format!("{magic}\n#{comment}\n{rest}")
    }

    pub fn from_text(text: &str) -> Result<Self, ModelFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.starts_with('#'));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| format_err(0, format!("missing {what}")))
        };

        let (n, magic) = next("header")?;
        if magic != MAGIC {
            return Err(format_err(n, format!("expected {MAGIC:?}, got {magic:?}")));
        }
        let (n, range) = next("ngram_range")?;
        if range != format!("ngram_range {MIN_N} {MAX_N}") {
            return Err(format_err(n, format!("unsupported {range:?}")));
        }
        let (n, trained) = next("trained flag")?;
        let trained = match trained.strip_prefix("trained ") {
            Some("true") => true,
            Some("false") => false,
            _ => return Err(format_err(n, "bad trained flag")),
        };
        let (n, bias) = next("bias")?;
        let bias: f64 = bias
            .strip_prefix("bias ")
            .and_then(|b| b.parse().ok())
            .filter(|b: &f64| b.is_finite())
            .ok_or_else(|| format_err(n, "bad bias"))?;
        let (n, entries) = next("entry count")?;
        let count: usize = entries
            .strip_prefix("entries ")
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| format_err(n, "bad entry count"))?;

        let mut vocab = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = next("entry")?;
            let (w, gram) = line
                .split_once('\t')
                .ok_or_else(|| format_err(n, "entry needs weight<TAB>ngram"))?;
            let w: f64 = w
                .parse()
                .ok()
                .filter(|w: &f64| w.is_finite())
                .ok_or_else(|| format_err(n, "bad weight"))?;
            let gram: String =
                serde_json::from_str(gram).map_err(|e| format_err(n, e.to_string()))?;
            vocab.push(gram);
            weights.push(w);
        }
        if let Some((n, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(format_err(n, "trailing content"));
        }

        let mut model = Self::with_vocab(vocab);
        if model.index.len() != model.vocab.len() {
            return Err(format_err(0, "duplicate n-gram entries"));
        }
        model.weights = weights;
        model.bias = bias;
        model.trained = trained;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelFileError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 0.5,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedBaseline {
    pub model: BaselineRiskModel,
    pub history: Vec<EpochMetrics>,
    /// 1-based epoch whose weights were kept.
    pub best_epoch: usize,
}

impl TrainedBaseline {
    pub fn best(&self) -> &EpochMetrics {
        &self.history[self.best_epoch - 1]
    }
}

fn accuracy(model: &BaselineRiskModel, rows: &[(Vec<(usize, f64)>, f64)]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let correct = rows
        .iter()
        .filter(|(x, y)| (sigmoid(model.logit(x)) >= 0.5) == (*y >= 0.5))
        .count();
    correct as f64 / rows.len() as f64
}

/// Stochastic-gradient logistic regression on the train split.
///
/// The vocabulary is every n-gram of the training texts. Each epoch visits
/// the training rows in a seeded shuffled order; the returned model is the
/// snapshot with the highest validation accuracy (earliest epoch on ties,
/// training accuracy when the validation split is empty).
pub fn train_baseline(
    dataset: &LabeledDataset,
    options: &TrainOptions,
) -> Result<TrainedBaseline, TrainError> {
    if options.epochs == 0 {
        return Err(TrainError::Untrained);
    }
    if !(options.learning_rate > 0.0 && options.learning_rate.is_finite()) {
        return Err(TrainError::BadLearningRate(options.learning_rate));
    }
    if !dataset.has_both_classes() {
        return Err(TrainError::SingleClass);
    }

    let vocab: Vec<String> = dataset
        .train
        .iter()
        .flat_map(|r| ngrams(&r.text))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut model = BaselineRiskModel::with_vocab(vocab);
    model.trained = true;

    let encode =
        |rows: &[LabeledSentence], m: &BaselineRiskModel| -> Vec<(Vec<(usize, f64)>, f64)> {
            rows.iter()
                .map(|r| (m.features(&r.text), f64::from(r.label)))
                .collect()
        };
    let train = encode(&dataset.train, &model);
    let val = encode(&dataset.val, &model);

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::with_capacity(options.epochs);
    let mut best: Option<(f64, usize, BaselineRiskModel)> = None;

    for epoch in 1..=options.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &train[i];
            let grad = sigmoid(model.logit(x)) - y;
            let step = options.learning_rate * grad;
            for &(j, v) in x {
                model.weights[j] -= step * v;
            }
            model.bias -= step;
        }
        let metrics = EpochMetrics {
            epoch,
            train_accuracy: accuracy(&model, &train),
            val_accuracy: accuracy(&model, &val),
        };
        log::debug!(
            "epoch {epoch}: train acc {:.4}, val acc {:.4}",
            metrics.train_accuracy,
            metrics.val_accuracy
        );
        let key = if val.is_empty() {
            metrics.train_accuracy
        } else {
            metrics.val_accuracy
        };
        if best.as_ref().is_none_or(|(b, _, _)| key > *b) {
            best = Some((key, epoch, model.clone()));
        }
        history.push(metrics);
    }

    let (_, best_epoch, model) = best.expect("at least one epoch ran");
    Ok(TrainedBaseline {
        model,
        history,
        best_epoch,
    })
}

/// `p_risk = 1` for any lexicon hit, otherwise the n-gram model's
/// probability (0 when no model is attached).
#[derive(Debug, Clone)]
pub struct LexiconBaselineScorer {
    lexicon: RiskPhraseLexicon,
    model: Option<BaselineRiskModel>,
}

impl LexiconBaselineScorer {
    pub fn new(lexicon: RiskPhraseLexicon, model: Option<BaselineRiskModel>) -> Self {
        Self { lexicon, model }
    }

    pub fn lexicon(&self) -> &RiskPhraseLexicon {
        &self.lexicon
    }

    pub fn score_one(&self, text: &str) -> f64 {
        if self.lexicon.contains_risk_phrase(text) {
            return 1.0;
        }
        self.model.as_ref().map_or(0.0, |m| m.predict_proba(text))
    }
}

impl RiskScorer for LexiconBaselineScorer {
    fn score_risk(&self, texts: &[&str]) -> Result<Vec<RiskScore>, ScoreError> {
        texts
            .iter()
            .map(|t| RiskScore::new(self.score_one(t)))
            .collect()
    }
}
