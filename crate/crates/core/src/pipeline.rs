//! Per-user orchestration: segment, score, select highlights, summarise.

use serde::{Deserialize, Serialize};

use crate::corpus::{Segmenter, UserTimeline};
use crate::generator::{SummaryGenerator, TermGenerator};
use crate::highlight::{HighlightConfig, HighlightOutcome, Highlighter};
use crate::lexicon::SummaryPhraseTable;
use crate::scoring::{score_sentences, RiskScorer, ScoreError, ScoredSentence, SentimentScorer};
use crate::summary::{
    frequency_summary, opening_summary, DictionarySummarizer, SummaryError, SummaryParts,
};

/// Everything one user's run produces.
#[derive(Debug, Clone)]
pub struct UserReport {
    pub user_id: String,
    pub scored: Vec<ScoredSentence>,
    pub highlights: HighlightOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSummary {
    pub user_id: String,
    pub parts: SummaryParts,
    pub summary: String,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

pub struct Pipeline<'a> {
    pub segmenter: Segmenter,
    pub risk: &'a dyn RiskScorer,
    pub sentiment: &'a dyn SentimentScorer,
    pub highlight: HighlightConfig,
    pub terms: Option<&'a dyn TermGenerator>,
    pub summaries: Option<&'a dyn SummaryGenerator>,
    dictionary: DictionarySummarizer,
}

impl<'a> Pipeline<'a> {
    pub fn new(
        risk: &'a dyn RiskScorer,
        sentiment: &'a dyn SentimentScorer,
        table: &SummaryPhraseTable,
    ) -> Self {
        Self {
            segmenter: Segmenter::default(),
            risk,
            sentiment,
            highlight: HighlightConfig::default(),
            terms: None,
            summaries: None,
            dictionary: DictionarySummarizer::new(table),
        }
    }

    pub fn score(&self, timeline: &UserTimeline) -> Result<Vec<ScoredSentence>, ScoreError> {
        score_sentences(
            self.segmenter.segment_timeline(timeline),
            self.risk,
            self.sentiment,
            self.highlight.risk_threshold,
        )
    }

    pub fn highlight_scored(
        &self,
        timeline: &UserTimeline,
        scored: &[ScoredSentence],
    ) -> HighlightOutcome {
        let mut highlighter = Highlighter::new(self.highlight);
        if let Some(terms) = self.terms {
            highlighter = highlighter.with_term_generator(terms);
        }
        let text = if self.terms.is_some() {
            timeline.concatenated_text()
        } else {
            String::new()
        };
        highlighter.extract(&timeline.user_id, &text, scored)
    }

    pub fn run_user(&self, timeline: &UserTimeline) -> Result<UserReport, ScoreError> {
        let scored = self.score(timeline)?;
        let highlights = self.highlight_scored(timeline, &scored);
        Ok(UserReport {
            user_id: timeline.user_id.clone(),
            scored,
            highlights,
        })
    }

    /// Builds the four-part summary. The generated part is dropped with a
    /// warning when the generator fails.
    pub fn summarize(
        &self,
        timeline: &UserTimeline,
        scored: &[ScoredSentence],
    ) -> Result<UserSummary, SummaryError> {
        let opening = opening_summary(timeline.expert_level)?;
        let n_risk = scored.iter().filter(|s| s.risk_positive).count();
        let texts: Vec<&str> = scored.iter().map(|s| s.sentence.text.as_str()).collect();
        let mut warnings = Vec::new();
        let generative =
            self.summaries.and_then(
                |g| match g.generate_summary(&timeline.concatenated_text()) {
                    Ok(text) => Some(text),
                    Err(e) => {
                        let msg = format!(
                            "summary generation failed for user {}: {e}",
                            timeline.user_id
                        );
                        log::warn!("{msg}");
                        warnings.push(msg);
                        None
                    }
                },
            );
        let parts = SummaryParts {
            opening,
            frequency: frequency_summary(n_risk),
            dictionary: self.dictionary.summarize(&texts),
            generative,
        };
        Ok(UserSummary {
            user_id: timeline.user_id.clone(),
            summary: parts.assemble(),
            parts,
            warnings,
        })
    }
}
