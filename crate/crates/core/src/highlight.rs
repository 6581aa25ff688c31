//! Three-stage highlight selection for one user.
//!
//! 1. Every risk-positive sentence, regardless of the word budget.
//! 2. Remaining sentences by descending `p_negative` (document order breaks
//!    ties) while they fit in the budget.
//! 3. If still under budget and a [`TermGenerator`] is configured: sentences
//!    containing a phrase window of the generator's output, in document
//!    order, under the same budget rule.

use std::collections::BTreeSet;

use aho_corasick::{AhoCorasick, MatchKind};
use serde::{Deserialize, Serialize};

use crate::generator::TermGenerator;
use crate::lexicon::{fold_char, joins_word};
use crate::scoring::{ScoredSentence, DEFAULT_RISK_THRESHOLD};

/// Number of maximal non-whitespace runs.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// What to do when the next sentence in a fill stage would overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillPolicy {
    /// End the stage at the first sentence that does not fit.
    #[default]
    StopAtFirstOverflow,
    /// Skip sentences that do not fit and keep trying later ones.
    SkipAndContinue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighlightConfig {
    pub risk_threshold: f64,
    pub word_budget: usize,
    pub min_candidate_words: usize,
    pub fill_policy: FillPolicy,
}

impl Default for HighlightConfig {
    fn default() -> Self {
        Self {
            risk_threshold: DEFAULT_RISK_THRESHOLD,
            word_budget: 300,
            min_candidate_words: 3,
            fill_policy: FillPolicy::StopAtFirstOverflow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    ZeroBudget,
    ZeroCandidateWords,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::ZeroBudget => f.write_str("word_budget must be positive"),
            ConfigError::ZeroCandidateWords => {
                f.write_str("min_candidate_words must be at least 1")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl HighlightConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.word_budget == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        if self.min_candidate_words == 0 {
            return Err(ConfigError::ZeroCandidateWords);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Risk,
    Sentiment,
    LlmTerms,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Risk => "risk",
            Provenance::Sentiment => "sentiment",
            Provenance::LlmTerms => "llm_terms",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightEntry {
    /// Position of the sentence in the extractor's input.
    pub position: usize,
    pub provenance: Provenance,
    pub words: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightSet {
    pub user_id: String,
    pub entries: Vec<HighlightEntry>,
    pub total_words: usize,
}

impl HighlightSet {
    pub fn positions(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.position).collect()
    }

    pub fn words_from(&self, provenance: Provenance) -> usize {
        self.entries
            .iter()
            .filter(|e| e.provenance == provenance)
            .map(|e| e.words)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighlightOutcome {
    pub set: HighlightSet,
    /// Non-fatal problems, e.g. a failed generator call in stage 3.
    pub warnings: Vec<String>,
}

/// Phrase windows taken from raw generator output.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TermCandidateSet {
    pub source_text: String,
    pub candidates: BTreeSet<String>,
}

impl TermCandidateSet {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }
}

fn is_numbering(token: &str) -> bool {
    let digits = token.trim_end_matches(['.', ')']);
    digits.len() < token.len() && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

/// Strips list decoration from one whitespace token of generator output:
/// asterisks and commas at either end, and whole-token numbering such as
/// `1.` or `2)`. Returns `None` when nothing is left.
fn strip_markers(token: &str) -> Option<String> {
    let t = token.trim_matches('*');
    if is_numbering(t) {
        return None;
    }
    let t = t.trim_matches(|c| c == ',' || c == '*');
    if t.is_empty() {
        return None;
    }
    Some(t.chars().map(fold_char).collect())
}

/// Cleaned, folded tokens of generator output.
pub fn candidate_tokens(generator_output: &str) -> Vec<String> {
    generator_output
        .split_whitespace()
        .filter_map(strip_markers)
        .collect()
}

/// Every window of at least `min_words` consecutive cleaned tokens,
/// single-space joined.
pub fn phrase_candidates(generator_output: &str, min_words: usize) -> TermCandidateSet {
    let min_words = min_words.max(1);
    let tokens = candidate_tokens(generator_output);
    let mut candidates = BTreeSet::new();
    for start in 0..tokens.len() {
        let mut window = String::new();
        for (offset, token) in tokens[start..].iter().enumerate() {
            if offset > 0 {
                window.push(' ');
            }
            window.push_str(token);
            if offset + 1 >= min_words {
                candidates.insert(window.clone());
            }
        }
    }
    TermCandidateSet {
        source_text: generator_output.to_string(),
        candidates,
    }
}

fn normalized_sentence(text: &str) -> String {
    text.split_whitespace()
        .map(|w| w.chars().map(fold_char).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Indices of the texts that contain any candidate on word boundaries,
/// ascending.
pub fn match_candidate_indices<S: AsRef<str>>(
    texts: &[S],
    candidates: &TermCandidateSet,
) -> Vec<usize> {
    if candidates.is_empty() {
        return Vec::new();
    }
    let automaton = AhoCorasick::builder()
        .match_kind(MatchKind::Standard)
        .build(candidates.candidates.iter())
        .expect("candidate automaton builds");
    texts
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            let hay = normalized_sentence(t.as_ref());
            automaton.find_overlapping_iter(&hay).any(|m| {
                let matched = &hay[m.start()..m.end()];
                let before = hay[..m.start()].chars().next_back();
                let after = hay[m.end()..].chars().next();
                let first = matched.chars().next();
                let last = matched.chars().next_back();
                !matches!((before, first), (Some(b), Some(f)) if joins_word(b, f))
                    && !matches!((last, after), (Some(l), Some(a)) if joins_word(l, a))
            })
        })
        .map(|(i, _)| i)
        .collect()
}

/// Sentences containing any candidate, in their original order.
pub fn match_candidates<'a, T, F>(
    items: &'a [T],
    text_of: F,
    candidates: &TermCandidateSet,
) -> Vec<&'a T>
where
    F: Fn(&T) -> &str,
{
    let texts: Vec<&str> = items.iter().map(&text_of).collect();
    match_candidate_indices(&texts, candidates)
        .into_iter()
        .map(|i| &items[i])
        .collect()
}

struct Selection<'a> {
    config: &'a HighlightConfig,
    words: Vec<usize>,
    taken: Vec<bool>,
    entries: Vec<HighlightEntry>,
    total: usize,
}

impl Selection<'_> {
    fn take(&mut self, position: usize, provenance: Provenance) {
        self.taken[position] = true;
        self.total += self.words[position];
        self.entries.push(HighlightEntry {
            position,
            provenance,
            words: self.words[position],
        });
    }

    /// Budget-limited fill from `order`, which must list untaken positions.
    fn fill(&mut self, order: impl IntoIterator<Item = usize>, provenance: Provenance) {
        for position in order {
            if self.total + self.words[position] <= self.config.word_budget {
                self.take(position, provenance);
            } else if self.config.fill_policy == FillPolicy::StopAtFirstOverflow {
                break;
            }
        }
    }
}

/// Highlight extractor holding the configuration and an optional term
/// generator for stage 3.
pub struct Highlighter<'g> {
    config: HighlightConfig,
    terms: Option<&'g dyn TermGenerator>,
}

impl<'g> Highlighter<'g> {
    pub fn new(config: HighlightConfig) -> Self {
        Self {
            config,
            terms: None,
        }
    }

    pub fn with_term_generator(mut self, generator: &'g dyn TermGenerator) -> Self {
        self.terms = Some(generator);
        self
    }

    pub fn config(&self) -> &HighlightConfig {
        &self.config
    }

    /// `scored` must hold one user's sentences in document order;
    /// `posts_text` is that user's aggregated post text for the generator.
    pub fn extract(
        &self,
        user_id: &str,
        posts_text: &str,
        scored: &[ScoredSentence],
    ) -> HighlightOutcome {
        let mut sel = Selection {
            config: &self.config,
            words: scored
                .iter()
                .map(|s| word_count(&s.sentence.text))
                .collect(),
            taken: vec![false; scored.len()],
            entries: Vec::new(),
            total: 0,
        };
        let mut warnings = Vec::new();

        for (i, s) in scored.iter().enumerate() {
            if s.risk_positive {
                sel.take(i, Provenance::Risk);
            }
        }

        let mut by_negative: Vec<usize> = (0..scored.len()).filter(|&i| !sel.taken[i]).collect();
        by_negative.sort_by(|&a, &b| {
            scored[b]
                .sentiment
                .p_negative
                .total_cmp(&scored[a].sentiment.p_negative)
                .then(a.cmp(&b))
        });
        sel.fill(by_negative, Provenance::Sentiment);

        if sel.total < self.config.word_budget {
            if let Some(generator) = self.terms {
                match generator.generate_terms(posts_text) {
                    Ok(raw) => {
                        let candidates = phrase_candidates(&raw, self.config.min_candidate_words);
                        let texts: Vec<&str> =
                            scored.iter().map(|s| s.sentence.text.as_str()).collect();
                        let matched: Vec<usize> = match_candidate_indices(&texts, &candidates)
                            .into_iter()
                            .filter(|&i| !sel.taken[i])
                            .collect();
                        sel.fill(matched, Provenance::LlmTerms);
                    }
                    Err(e) => {
                        let msg = format!("term generation failed for user {user_id}: {e}");
                        log::warn!("{msg}");
                        warnings.push(msg);
                    }
                }
            }
        }

        HighlightOutcome {
            set: HighlightSet {
                user_id: user_id.to_string(),
                entries: sel.entries,
                total_words: sel.total,
            },
            warnings,
        }
    }
}
