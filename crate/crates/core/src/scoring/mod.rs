//! Sentence scorers: suicide-risk probability and three-way sentiment.
//!
//! Scorers are trait objects so the pipeline can run against the native
//! baselines in this crate or against the HTTP model service
//! ([`RemoteClient`]) without changing call sites.

mod baseline;
mod remote;
mod sentiment;

pub use baseline::{
    train_baseline, BaselineRiskModel, EpochMetrics, LexiconBaselineScorer, ModelFileError,
    TrainError, TrainOptions, TrainedBaseline,
};
pub use remote::{Health, RemoteClient, RemoteConfig, TransportError, PROTOCOL_VERSION};
pub use sentiment::{ValenceLexicon, ValenceSentimentScorer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Sentence;

/// Default decision threshold on `p_risk`.
pub const DEFAULT_RISK_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("scorer returned {got} scores for {expected} inputs")]
    Misaligned { expected: usize, got: usize },
    #[error("invalid score: {0}")]
    Invalid(String),
}

impl ScoreError {
    pub fn is_remote(&self) -> bool {
        matches!(self, ScoreError::Transport(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskScore {
    pub p_risk: f64,
}

impl RiskScore {
    pub fn new(p_risk: f64) -> Result<Self, ScoreError> {
        if (0.0..=1.0).contains(&p_risk) {
            Ok(Self { p_risk })
        } else {
            Err(ScoreError::Invalid(format!(
                "p_risk {p_risk} outside [0, 1]"
            )))
        }
    }
}

/// Tolerance on the sum of a sentiment distribution.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub p_negative: f64,
    pub p_neutral: f64,
    pub p_positive: f64,
}

impl SentimentScore {
    pub fn new(p_negative: f64, p_neutral: f64, p_positive: f64) -> Result<Self, ScoreError> {
        let parts = [p_negative, p_neutral, p_positive];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ScoreError::Invalid(format!(
                "sentiment component outside [0, 1]: {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(ScoreError::Invalid(format!(
                "sentiment distribution sums to {sum}"
            )));
        }
        Ok(Self {
            p_negative,
            p_neutral,
            p_positive,
        })
    }

    /// True when negative is at least as likely as each other class.
    pub fn negative_dominant(&self) -> bool {
        self.p_negative >= self.p_neutral && self.p_negative >= self.p_positive
    }
}

pub trait RiskScorer: Send + Sync {
    /// One score per input, in input order.
    fn score_risk(&self, texts: &[&str]) -> Result<Vec<RiskScore>, ScoreError>;
}

pub trait SentimentScorer: Send + Sync {
    fn score_sentiment(&self, texts: &[&str]) -> Result<Vec<SentimentScore>, ScoreError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSentence {
    pub sentence: Sentence,
    pub risk: RiskScore,
    pub sentiment: SentimentScore,
    pub risk_positive: bool,
}

impl ScoredSentence {
    pub fn new(
        sentence: Sentence,
        risk: RiskScore,
        sentiment: SentimentScore,
        threshold: f64,
    ) -> Self {
        Self {
            sentence,
            risk_positive: risk.p_risk >= threshold,
            risk,
            sentiment,
        }
    }
}

/// Scores `sentences` with both scorers and applies `threshold`.
pub fn score_sentences(
    sentences: Vec<Sentence>,
    risk: &dyn RiskScorer,
    sentiment: &dyn SentimentScorer,
    threshold: f64,
) -> Result<Vec<ScoredSentence>, ScoreError> {
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    let risks = risk.score_risk(&texts)?;
    let sentiments = sentiment.score_sentiment(&texts)?;
    for got in [risks.len(), sentiments.len()] {
        if got != texts.len() {
            return Err(ScoreError::Misaligned {
                expected: texts.len(),
                got,
            });
        }
    }
    Ok(sentences
        .into_iter()
        .zip(risks)
        .zip(sentiments)
        .map(|((s, r), m)| ScoredSentence::new(s, r, m, threshold))
        .collect())
}
