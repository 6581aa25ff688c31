//! Greedy token matching in the style of BERTScore, with pluggable token
//! similarity.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;

/// Lowercase, split on non-alphanumerics, drop empties.
pub fn similarity_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Pairwise token similarity in `[0, 1]` (cosine for embedding providers).
pub trait TokenSimilarity: Send + Sync {
    /// `result[i][j]` is the similarity of `candidate[i]` and `reference[j]`.
    fn similarity_matrix(
        &self,
        candidate: &[String],
        reference: &[String],
    ) -> Result<Vec<Vec<f64>>, EvalError>;
}

/// Exact-match similarity: 1 for identical tokens, 0 otherwise. Equivalent
/// to cosine over one-hot token vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct OneHot;

impl TokenSimilarity for OneHot {
    fn similarity_matrix(
        &self,
        candidate: &[String],
        reference: &[String],
    ) -> Result<Vec<Vec<f64>>, EvalError> {
        Ok(candidate
            .iter()
            .map(|c| {
                reference
                    .iter()
                    .map(|r| f64::from(u8::from(c == r)))
                    .collect()
            })
            .collect())
    }
}

/// Maps a token to a fixed-dimension vector.
pub trait TokenEmbedder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, token: &str) -> Result<Vec<f64>, EvalError>;
}

/// Cosine similarity over any [`TokenEmbedder`]. Vectors are normalised
/// here, so embedders need not return unit vectors. Negative cosines are
/// clamped to 0.
#[derive(Debug, Clone)]
pub struct Cosine<E>(pub E);

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

impl<E: TokenEmbedder> TokenSimilarity for Cosine<E> {
    fn similarity_matrix(
        &self,
        candidate: &[String],
        reference: &[String],
    ) -> Result<Vec<Vec<f64>>, EvalError> {
        let embed = |tokens: &[String]| -> Result<Vec<Vec<f64>>, EvalError> {
            tokens.iter().map(|t| self.0.embed(t).map(unit)).collect()
        };
        let c = embed(candidate)?;
        let r = embed(reference)?;
        Ok(c.iter()
            .map(|a| {
                r.iter()
                    .map(|b| {
                        a.iter()
                            .zip(b)
                            .map(|(x, y)| x * y)
                            .sum::<f64>()
                            .clamp(0.0, 1.0)
                    })
                    .collect()
            })
            .collect())
    }
}

/// In-memory word vectors, loadable from the common whitespace-separated
/// text format (`token v1 v2 ...`, one per line).
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<(), EvalError> {
        if vector.len() != self.dim {
            return Err(EvalError::Provider(format!(
                "vector of length {} in a {}-dimensional table",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(token.into().to_lowercase(), vector);
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, EvalError> {
        let mut table: Option<Self> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| EvalError::Provider(e.to_string()))?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let vector = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EvalError::Provider(format!("line {}: {e}", i + 1)))?;
            let t = table.get_or_insert_with(|| Self::new(vector.len()));
            t.insert(token, vector)
                .map_err(|e| EvalError::Provider(format!("line {}: {e}", i + 1)))?;
        }
        table.ok_or_else(|| EvalError::Provider("embedding file is empty".into()))
    }
}

impl TokenEmbedder for EmbeddingTable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, token: &str) -> Result<Vec<f64>, EvalError> {
        self.vectors
            .get(token)
            .cloned()
            .ok_or_else(|| EvalError::UnknownToken(token.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Candidate had no tokens; precision is reported as 0 (or 1 if both empty).
    pub empty_candidate: bool,
    /// Reference had no tokens; recall is reported as 0 (or 1 if both empty).
    pub empty_reference: bool,
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Recall averages, over reference tokens, the best similarity to any
/// candidate token; precision does the same over candidate tokens.
pub fn greedy_similarity(
    candidate: &[String],
    reference: &[String],
    provider: &dyn TokenSimilarity,
) -> Result<SimilarityReport, EvalError> {
    let empty_candidate = candidate.is_empty();
    let empty_reference = reference.is_empty();
    if empty_candidate && empty_reference {
        return Ok(SimilarityReport {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
            empty_candidate,
            empty_reference,
        });
    }
    let sim = provider.similarity_matrix(candidate, reference)?;
    if sim.len() != candidate.len() || sim.iter().any(|row| row.len() != reference.len()) {
        return Err(EvalError::Provider(
            "similarity matrix has the wrong shape".into(),
        ));
    }
    let precision = mean(
        sim.iter()
            .map(|row| row.iter().copied().fold(0.0, f64::max)),
    )
    .unwrap_or(0.0);
    let recall =
        mean((0..reference.len()).map(|j| sim.iter().map(|row| row[j]).fold(0.0, f64::max)))
            .unwrap_or(0.0);
    Ok(SimilarityReport {
        precision,
        recall,
        f1: harmonic(precision, recall),
        empty_candidate,
        empty_reference,
    })
}

/// Score of one predicted span against the user's gold spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanPrecision {
    pub user_id: String,
    /// Index into the user's predicted span list.
    pub span: usize,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HighlightEvaluation {
    /// Mean over all gold spans.
    pub recall_span_mean: Option<f64>,
    /// Mean over all scored predicted spans.
    pub precision_span_mean: Option<f64>,
    /// Mean of per-user recall means.
    pub recall_user_mean: Option<f64>,
    /// Mean of per-user precision means.
    pub precision_user_mean: Option<f64>,
    pub n_gold_spans: usize,
    pub n_predicted_spans: usize,
    pub span_precision: Vec<SpanPrecision>,
    /// Gold users with no prediction entry; their spans count as zero recall.
    pub users_missing_predictions: Vec<String>,
    /// Users with predictions but no gold spans; excluded from all scores.
    pub users_without_gold: Vec<String>,
    /// Gold users whose prediction list is empty; excluded from precision.
    pub users_without_predictions: Vec<String>,
}

struct UserPartial {
    user_id: String,
    recall: Vec<f64>,
    precision: Vec<f64>,
}

/// Scores predicted highlight texts against gold highlight texts per user.
///
/// Each gold span's recall is its best greedy recall against any predicted
/// span of the same user; each predicted span's precision is its best greedy
/// precision against any gold span.
pub fn evaluate_highlights(
    predicted: &BTreeMap<String, Vec<String>>,
    gold: &BTreeMap<String, Vec<String>>,
    provider: &dyn TokenSimilarity,
) -> Result<HighlightEvaluation, EvalError> {
    let mut report = HighlightEvaluation::default();
    let no_spans: Vec<String> = Vec::new();

    for user in predicted.keys() {
        if gold.get(user).is_none_or(Vec::is_empty) {
            log::info!("user {user} has no gold spans; excluded");
            report.users_without_gold.push(user.clone());
        }
    }

    let scored_users: Vec<(&String, &Vec<String>, &Vec<String>)> = gold
        .iter()
        .filter(|(_, g)| !g.is_empty())
        .map(|(user, g)| {
            let p = predicted.get(user).unwrap_or_else(|| {
                log::warn!("user {user} missing from predictions; counted as zero recall");
                &no_spans
            });
            (user, g, p)
        })
        .collect();
    for (user, _, _) in &scored_users {
        match predicted.get(*user) {
            None => report.users_missing_predictions.push((*user).clone()),
            Some(p) if p.is_empty() => report.users_without_predictions.push((*user).clone()),
            Some(_) => {}
        }
    }

    let partials: Vec<UserPartial> = scored_users
        .par_iter()
        .map(|(user, gold_spans, pred_spans)| {
            let g: Vec<Vec<String>> = gold_spans.iter().map(|s| similarity_tokens(s)).collect();
            let p: Vec<Vec<String>> = pred_spans.iter().map(|s| similarity_tokens(s)).collect();
            let mut recall = vec![0.0f64; g.len()];
            let mut precision = vec![0.0f64; p.len()];
            for (i, pt) in p.iter().enumerate() {
                for (j, gt) in g.iter().enumerate() {
                    let r = greedy_similarity(pt, gt, provider)?;
                    recall[j] = recall[j].max(r.recall);
                    precision[i] = precision[i].max(r.precision);
                }
            }
            Ok(UserPartial {
                user_id: (*user).clone(),
                recall,
                precision,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    for part in &partials {
        report.n_gold_spans += part.recall.len();
        report.n_predicted_spans += part.precision.len();
        for (span, &precision) in part.precision.iter().enumerate() {
            report.span_precision.push(SpanPrecision {
                user_id: part.user_id.clone(),
                span,
                precision,
            });
        }
    }
    report.recall_span_mean = mean(partials.iter().flat_map(|p| p.recall.iter().copied()));
    report.precision_span_mean = mean(partials.iter().flat_map(|p| p.precision.iter().copied()));
    report.recall_user_mean = mean(
        partials
            .iter()
            .filter_map(|p| mean(p.recall.iter().copied())),
    );
    report.precision_user_mean = mean(
        partials
            .iter()
            .filter_map(|p| mean(p.precision.iter().copied())),
    );
    Ok(report)
}
