//! Four-part evidence summary: opening, frequency rule, dictionary
//! phrases and an optional generated part.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::RiskLevel;
use crate::lexicon::{PhraseMatcher, SummaryPhraseTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SummaryError {
    #[error("no opening sentence for an unknown risk level")]
    UnknownLevel,
}

pub fn opening_summary(level: RiskLevel) -> Result<String, SummaryError> {
    let level = match level {
        RiskLevel::Unknown => return Err(SummaryError::UnknownLevel),
        known => known.as_str(),
    };
    Ok(format!("This person is at {level} risk of suicide."))
}

/// `None` when the user has no risk-positive sentences.
pub fn frequency_summary(n_risk_sentences: usize) -> Option<String> {
    let text = match n_risk_sentences {
        0 => return None,
        1 => "This person made a post implying suicide.",
        2 => "This person made multiple posts implying suicide.",
        _ => "This person made lots of posts implying suicide.",
    };
    Some(text.to_string())
}

/// "a", "a and b", "a, b and c".
fn join_phrases(phrases: &[&str]) -> String {
    match phrases {
        [] => String::new(),
        [one] => (*one).to_string(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// One sentence per table row whose phrases occur in the user's text.
#[derive(Debug, Clone)]
pub struct DictionarySummarizer {
    rows: Vec<(String, Vec<String>, PhraseMatcher)>,
}

impl DictionarySummarizer {
    pub fn new(table: &SummaryPhraseTable) -> Self {
        let rows = table
            .rows
            .iter()
            .map(|row| {
                let matcher = PhraseMatcher::new(
                    row.phrases
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), i as u32)),
                );
                (row.prefix.clone(), row.phrases.clone(), matcher)
            })
            .collect();
        Self { rows }
    }

    pub fn summarize<S: AsRef<str>>(&self, sentences: &[S]) -> Option<String> {
        let mut parts = Vec::new();
        for (prefix, phrases, matcher) in &self.rows {
            let mut hit = vec![false; phrases.len()];
            for s in sentences {
                for m in matcher.find_all(s.as_ref()) {
                    hit[m.group_id as usize] = true;
                }
            }
            let found: Vec<&str> = phrases
                .iter()
                .zip(&hit)
                .filter(|(_, h)| **h)
                .map(|(p, _)| p.as_str())
                .collect();
            if !found.is_empty() {
                parts.push(format!("{prefix} {}.", join_phrases(&found)));
            }
        }
        (!parts.is_empty()).then(|| parts.join(" "))
    }
}

pub fn dictionary_summary<S: AsRef<str>>(
    sentences: &[S],
    table: &SummaryPhraseTable,
) -> Option<String> {
    DictionarySummarizer::new(table).summarize(sentences)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryParts {
    pub opening: String,
    pub frequency: Option<String>,
    pub dictionary: Option<String>,
    pub generative: Option<String>,
}

impl SummaryParts {
    pub fn assemble(&self) -> String {
        assemble_summary(self)
    }
}

/// Present parts joined by single spaces, opening first.
pub fn assemble_summary(parts: &SummaryParts) -> String {
    [
        Some(parts.opening.as_str()),
        parts.frequency.as_deref(),
        parts.dictionary.as_deref(),
        parts.generative.as_deref(),
    ]
    .into_iter()
    .flatten()
    .filter(|p| !p.is_empty())
    .collect::<Vec<_>>()
    .join(" ")
    .trim_end()
    .to_string()
}
