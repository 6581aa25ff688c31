//! Weak-labeled sentence dataset built from lexicon hits.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RiskPhraseLexicon;
use crate::corpus::{Segmenter, UserTimeline};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("validation fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("lexicon matched nothing")]
    NoPositives,
    #[error("no negative sentences: the dataset needs both classes")]
    NoNegatives,
    #[error(
        "only {negatives} negative sentences for {positives} positives (tolerance {tolerance})"
    )]
    InsufficientNegatives {
        positives: usize,
        negatives: usize,
        tolerance: usize,
    },
    #[error("dataset line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub text: String,
    pub label: u8,
    pub split: Split,
    pub post_id: String,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub positive: usize,
    pub negative: usize,
}

impl LabelCounts {
    fn of(rows: &[LabeledSentence]) -> Self {
        let positive = rows.iter().filter(|r| r.label == 1).count();
        Self {
            positive,
            negative: rows.len() - positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub train: Vec<LabeledSentence>,
    pub val: Vec<LabeledSentence>,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn train_counts(&self) -> LabelCounts {
        LabelCounts::of(&self.train)
    }

    pub fn val_counts(&self) -> LabelCounts {
        LabelCounts::of(&self.val)
    }

    pub fn rows(&self) -> impl Iterator<Item = &LabeledSentence> {
        self.train.iter().chain(self.val.iter())
    }

    pub fn has_both_classes(&self) -> bool {
        let mut seen = [false; 2];
        for r in self.rows() {
            seen[usize::from(r.label.min(1))] = true;
        }
        seen == [true, true]
    }

    /// One JSON object per row, train rows first.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.rows() {
            serde_json::to_writer(&mut out, row)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads rows written by [`LabeledDataset::write_jsonl`]. Lines that are
    /// not row objects (such as provenance headers) must be filtered out by
    /// the caller.
    pub fn read_jsonl<R: BufRead>(reader: R, seed: u64) -> Result<Self, DatasetError> {
        let mut train = Vec::new();
        let mut val = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: LabeledSentence =
                serde_json::from_str(&line).map_err(|e| DatasetError::Malformed {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            if row.label > 1 {
                return Err(DatasetError::Malformed {
                    line: i + 1,
                    message: format!("label must be 0 or 1, got {}", row.label),
                });
            }
            match row.split {
                Split::Train => train.push(row),
                Split::Val => val.push(row),
            }
        }
        Ok(Self { train, val, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub seed: u64,
    pub val_fraction: f64,
    pub balance_tolerance: usize,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            val_fraction: 0.2,
            balance_tolerance: 1,
        }
    }
}

/// Labels every sentence of the corpus by lexicon containment, downsamples
/// the negatives to the positive count, then splits train/validation.
///
/// The RNG is consumed in a fixed order: one shuffle to pick the kept
/// negatives, one shuffle to assign splits. Rows within each split are
/// returned in corpus order.
pub fn build_weak_labeled_dataset(
    corpus: &[UserTimeline],
    lexicon: &RiskPhraseLexicon,
    segmenter: &Segmenter,
    options: &DatasetOptions,
) -> Result<LabeledDataset, DatasetError> {
    if corpus.is_empty() {
        return Err(DatasetError::EmptyCorpus);
    }
    let frac = options.val_fraction;
    if !(frac > 0.0 && frac < 1.0) {
        return Err(DatasetError::BadFraction(frac));
    }

    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for sentence in corpus.iter().flat_map(|t| segmenter.segment_timeline(t)) {
        let label = u8::from(lexicon.contains_risk_phrase(&sentence.text));
        let row = LabeledSentence {
            text: sentence.text,
            label,
            split: Split::Train,
            post_id: sentence.post_id,
            index: sentence.index,
        };
        let ordinal = positives.len() + negatives.len();
        if label == 1 {
            positives.push((ordinal, row));
        } else {
            negatives.push((ordinal, row));
        }
    }

    if positives.is_empty() {
        return Err(DatasetError::NoPositives);
    }
    if negatives.is_empty() {
        return Err(DatasetError::NoNegatives);
    }
    if negatives.len() + options.balance_tolerance < positives.len() {
        return Err(DatasetError::InsufficientNegatives {
            positives: positives.len(),
            negatives: negatives.len(),
            tolerance: options.balance_tolerance,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    negatives.shuffle(&mut rng);
    negatives.truncate(positives.len());

    let mut rows: Vec<(usize, LabeledSentence)> = positives;
    rows.append(&mut negatives);
    rows.sort_by_key(|(ordinal, _)| *ordinal);

    let total = rows.len();
    let n_val = ((total as f64) * frac).round() as usize;
    let n_val = n_val.clamp(1, total.saturating_sub(1).max(1));
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    let mut is_val = vec![false; total];
    for &i in &order[..n_val] {
        is_val[i] = true;
    }

    let mut train = Vec::with_capacity(total - n_val);
    let mut val = Vec::with_capacity(n_val);
    for (i, (_, mut row)) in rows.into_iter().enumerate() {
        if is_val[i] {
            row.split = Split::Val;
            val.push(row);
        } else {
            train.push(row);
        }
    }

    Ok(LabeledDataset {
        train,
        val,
        seed: options.seed,
    })
}
