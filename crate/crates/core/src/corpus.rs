//! Corpus model, JSONL ingestion and punctuation-based sentence segmentation.

use std::collections::HashMap;
use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate post_id {post_id:?}")]
    DuplicatePost { line: usize, post_id: String },
    #[error("line {line}: user {user_id:?} already has expert level {existing}, got {found}")]
    ConflictingLevel {
        line: usize,
        user_id: String,
        existing: RiskLevel,
        found: RiskLevel,
    },
}

/// Expert-assigned suicide risk level of a user.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum RiskLevel {
    Low,
    Moderate,
    High,
    #[default]
    Unknown,
}

impl RiskLevel {
    pub const ALL: [RiskLevel; 4] = [
        RiskLevel::Low,
        RiskLevel::Moderate,
        RiskLevel::High,
        RiskLevel::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskLevel::Low => "low",
            RiskLevel::Moderate => "moderate",
            RiskLevel::High => "high",
            RiskLevel::Unknown => "unknown",
        }
    }

    /// Lenient parse used for corpus ingestion: anything unrecognised is `Unknown`.
    pub fn from_label(label: &str) -> RiskLevel {
        label.parse().unwrap_or(RiskLevel::Unknown)
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RiskLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(RiskLevel::Low),
            "moderate" => Ok(RiskLevel::Moderate),
            "high" => Ok(RiskLevel::High),
            "unknown" => Ok(RiskLevel::Unknown),
            other => Err(format!("unknown risk level {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: String,
    pub user_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserTimeline {
    pub user_id: String,
    pub expert_level: RiskLevel,
    pub posts: Vec<Post>,
}

impl UserTimeline {
    /// All post texts joined with blank lines, the form handed to text generators.
    pub fn concatenated_text(&self) -> String {
        self.posts
            .iter()
            .map(|p| p.text.as_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// One segmented sentence of a post.
///
/// `char_start..char_end` counts Unicode scalar values; `byte_start..byte_end`
/// is the same span as a byte range, so `&post.text[sentence.byte_range()]`
/// is always valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub post_id: String,
    pub index: usize,
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
    #[serde(skip)]
    pub byte_start: usize,
    #[serde(skip)]
    pub byte_end: usize,
}

impl Sentence {
    pub fn byte_range(&self) -> std::ops::Range<usize> {
        self.byte_start..self.byte_end
    }
}

/// A sentence span located in some text, before it is attached to a post.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub byte_start: usize,
    pub byte_end: usize,
    pub char_start: usize,
    pub char_end: usize,
}

impl Span {
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.byte_start..self.byte_end]
    }
}

/// Rule-based sentence splitter.
///
/// Boundaries fall after a maximal run of delimiter characters (`.`, `!`,
/// `?`, `:`, `;` and optionally `,`). Whitespace around each piece is left
/// out of the span, and pieces made only of delimiters and whitespace are
/// skipped. Decimal points and abbreviations are not special-cased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Segmenter {
    pub split_on_comma: bool,
}

impl Segmenter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_comma_boundaries(mut self, yes: bool) -> Self {
        self.split_on_comma = yes;
        self
    }

    pub fn is_delimiter(&self, c: char) -> bool {
        matches!(c, '.' | '!' | '?' | ':' | ';') || (self.split_on_comma && c == ',')
    }

    /// Returns the sentence spans of `text` in order.
    pub fn spans(&self, text: &str) -> Vec<Span> {
        let mut spans = Vec::new();
        // (byte, char) position where the current piece starts
        let mut piece_start = (0usize, 0usize);
        let mut in_delims = false;
        let mut char_pos = 0usize;

        for (byte_pos, c) in text.char_indices() {
            let delim = self.is_delimiter(c);
            if in_delims && !delim {
                self.push_piece(text, piece_start, (byte_pos, char_pos), &mut spans);
                piece_start = (byte_pos, char_pos);
            }
            in_delims = delim;
            char_pos += 1;
        }
        self.push_piece(text, piece_start, (text.len(), char_pos), &mut spans);
        spans
    }

    fn push_piece(
        &self,
        text: &str,
        (mut b0, mut c0): (usize, usize),
        (mut b1, mut c1): (usize, usize),
        out: &mut Vec<Span>,
    ) {
        let piece = &text[b0..b1];
        if !piece
            .chars()
            .any(|c| !c.is_whitespace() && !self.is_delimiter(c))
        {
            return;
        }
        for c in piece.chars().take_while(|c| c.is_whitespace()) {
            b0 += c.len_utf8();
            c0 += 1;
        }
        for c in piece.chars().rev().take_while(|c| c.is_whitespace()) {
            b1 -= c.len_utf8();
            c1 -= 1;
        }
        out.push(Span {
            byte_start: b0,
            byte_end: b1,
            char_start: c0,
            char_end: c1,
        });
    }

    /// Segments one post into sentences.
    pub fn segment_post(&self, post: &Post) -> Vec<Sentence> {
        self.spans(&post.text)
            .into_iter()
            .enumerate()
            .map(|(index, span)| Sentence {
                post_id: post.post_id.clone(),
                index,
                text: span.slice(&post.text).to_string(),
                char_start: span.char_start,
                char_end: span.char_end,
                byte_start: span.byte_start,
                byte_end: span.byte_end,
            })
            .collect()
    }

    /// Segments every post of a timeline, in post order.
    pub fn segment_timeline(&self, timeline: &UserTimeline) -> Vec<Sentence> {
        timeline
            .posts
            .iter()
            .flat_map(|p| self.segment_post(p))
            .collect()
    }
}

/// Segments `text` with the default delimiter set.
pub fn segment_post(text: &str) -> Vec<Span> {
    Segmenter::default().spans(text)
}

#[derive(Debug, Deserialize)]
struct CorpusLine {
    user_id: String,
    post_id: String,
    text: String,
    #[serde(default)]
    timestamp: Option<String>,
    #[serde(default)]
    expert_level: Option<String>,
}

/// Parses a JSONL corpus from a reader. Line numbers in errors are 1-based.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<UserTimeline>, CorpusError> {
    let mut timelines: Vec<UserTimeline> = Vec::new();
    let mut by_user: HashMap<String, usize> = HashMap::new();
    let mut explicit_level: HashSet<String> = HashSet::new();
    let mut seen_posts: HashSet<String> = HashSet::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusLine = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen_posts.insert(rec.post_id.clone()) {
            return Err(CorpusError::DuplicatePost {
                line: line_no,
                post_id: rec.post_id,
            });
        }

        let idx = *by_user.entry(rec.user_id.clone()).or_insert_with(|| {
            timelines.push(UserTimeline {
                user_id: rec.user_id.clone(),
                expert_level: RiskLevel::Unknown,
                posts: Vec::new(),
            });
            timelines.len() - 1
        });
        let timeline = &mut timelines[idx];

        if let Some(label) = rec.expert_level.as_deref() {
            let level = RiskLevel::from_label(label);
            if explicit_level.insert(rec.user_id.clone()) {
                timeline.expert_level = level;
            } else if timeline.expert_level != level {
                return Err(CorpusError::ConflictingLevel {
                    line: line_no,
                    user_id: rec.user_id,
                    existing: timeline.expert_level,
                    found: level,
                });
            }
        }

        timeline.posts.push(Post {
            post_id: rec.post_id,
            user_id: rec.user_id,
            text: rec.text,
            timestamp: rec.timestamp,
        });
    }

    for timeline in &mut timelines {
        // Timestamp order only applies when every post carries one; the sort
        // is stable so equal timestamps keep input order.
        if timeline.posts.iter().all(|p| p.timestamp.is_some()) {
            timeline.posts.sort_by(|a, b| a.timestamp.cmp(&b.timestamp));
        }
    }
    Ok(timelines)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<UserTimeline>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(BufReader::new(file))
}
