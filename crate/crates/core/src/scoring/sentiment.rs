//! Word-list sentiment stand-in.
//!
//! `p_negative` is a fixed logistic curve over the fraction of
//! negative-valence tokens; the remaining mass is split between positive
//! and neutral by the fraction of positive-valence tokens. It exercises the
//! pipeline plumbing and says nothing about sentiment quality.

use std::collections::HashSet;
use std::path::Path;

use super::{ScoreError, SentimentScore, SentimentScorer};
use crate::lexicon::{fold_char, LexiconError};

const DEFAULT_VALENCE: &str = include_str!("../../data/valence.txt");

/// Slope of the logistic curve applied to the negative-token fraction.
pub const NEGATIVE_STEEPNESS: f64 = 10.0;
/// Negative-token fraction at which `p_negative` is 0.5.
pub const NEGATIVE_MIDPOINT: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceLexicon {
    negative: HashSet<String>,
    positive: HashSet<String>,
}

impl ValenceLexicon {
    /// Same layout as the phrase files, with `# negative` and `# positive`
    /// sections.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut negative = HashSet::new();
        let mut positive = HashSet::new();
        let mut current: Option<&mut HashSet<String>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                current = match header.trim() {
                    "negative" => Some(&mut negative),
                    "positive" => Some(&mut positive),
                    other => {
                        return Err(LexiconError::BadHeader {
                            line: i + 1,
                            header: other.to_string(),
                        })
                    }
                };
                continue;
            }
            let Some(set) = current.as_deref_mut() else {
                return Err(LexiconError::PhraseOutsideGroup { line: i + 1 });
            };
            set.insert(line.chars().map(fold_char).collect());
        }
        if let Some(both) = negative.intersection(&positive).next() {
            return Err(LexiconError::DuplicatePhrase {
                line: 0,
                phrase: both.clone(),
            });
        }
        Ok(Self { negative, positive })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

impl Default for ValenceLexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_VALENCE).expect("bundled valence list is valid")
    }
}

/// Lowercased runs of alphanumerics and apostrophes.
fn valence_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '\u{2019}'))
        .map(|t| t.trim_matches(|c| c == '\'' || c == '\u{2019}'))
        .filter(|t| !t.is_empty())
        .map(|t| t.chars().map(fold_char).collect())
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct ValenceSentimentScorer {
    lexicon: ValenceLexicon,
}

impl ValenceSentimentScorer {
    pub fn new(lexicon: ValenceLexicon) -> Self {
        Self { lexicon }
    }

    pub fn score_one(&self, text: &str) -> SentimentScore {
        let tokens = valence_tokens(text);
        let total = tokens.len().max(1) as f64;
        let neg = tokens
            .iter()
            .filter(|t| self.lexicon.negative.contains(*t))
            .count() as f64;
        let pos = tokens
            .iter()
            .filter(|t| self.lexicon.positive.contains(*t))
            .count() as f64;

        let p_negative =
            1.0 / (1.0 + (-NEGATIVE_STEEPNESS * (neg / total - NEGATIVE_MIDPOINT)).exp());
        let rest = 1.0 - p_negative;
        let p_positive = rest * (pos / total);
        let p_neutral = rest - p_positive;
        SentimentScore {
            p_negative,
            p_neutral,
            p_positive,
        }
    }
}

impl SentimentScorer for ValenceSentimentScorer {
    fn score_sentiment(&self, texts: &[&str]) -> Result<Vec<SentimentScore>, ScoreError> {
        Ok(texts.iter().map(|t| self.score_one(t)).collect())
    }
}
