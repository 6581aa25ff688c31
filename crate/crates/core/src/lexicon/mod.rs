//! Risk-phrase lexicon, summary phrase tables and phrase matching.
//!
//! Both dictionaries are plain UTF-8 files: a line starting with `#` opens a
//! group (its remainder is the group id for the risk lexicon, the sentence
//! prefix for the summary table) and every other non-empty line is a phrase.

mod dataset;

pub use dataset::{
    build_weak_labeled_dataset, DatasetError, DatasetOptions, LabelCounts, LabeledDataset,
    LabeledSentence, Split,
};

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use aho_corasick::{AhoCorasick, AhoCorasickBuilder, MatchKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_RISK_PHRASES: &str = include_str!("../../data/risk_phrases.txt");
const DEFAULT_SUMMARY_PHRASES: &str = include_str!("../../data/summary_phrases.txt");

/// Prefix of the summary row built from the risk lexicon.
pub const RISK_ROW_PREFIX: &str = "This person implies suicide such as";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: phrase before any group header")]
    PhraseOutsideGroup { line: usize },
    #[error("line {line}: invalid group header {header:?}")]
    BadHeader { line: usize, header: String },
    #[error("line {line}: duplicate phrase {phrase:?}")]
    DuplicatePhrase { line: usize, phrase: String },
    #[error("duplicate group {0:?}")]
    DuplicateGroup(String),
    #[error("group {0:?} has no phrases")]
    EmptyGroup(String),
    #[error("lexicon has no groups")]
    Empty,
}

/// Maps a character to the form used for matching: simple lowercase and
/// the typographic apostrophe folded to ASCII. Always one char in, one out.
pub fn fold_char(c: char) -> char {
    if c == '\u{2019}' {
        return '\'';
    }
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Folded, whitespace-collapsed, trimmed form of a phrase.
pub fn normalize_phrase(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(|w| w.chars().map(fold_char).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Two characters that would glue a match onto its neighbour.
pub(crate) fn joins_word(a: char, b: char) -> bool {
    a.is_alphanumeric() && b.is_alphanumeric()
}

struct RawGroup {
    line: usize,
    header: String,
    phrases: Vec<String>,
}

fn parse_groups(text: &str) -> Result<Vec<RawGroup>, LexiconError> {
    let mut groups: Vec<RawGroup> = Vec::new();
    let mut seen_phrases = HashSet::new();
    let mut seen_groups = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let header = header.trim().to_string();
            if header.is_empty() {
                return Err(LexiconError::BadHeader {
                    line: i + 1,
                    header,
                });
            }
            if !seen_groups.insert(header.clone()) {
                return Err(LexiconError::DuplicateGroup(header));
            }
            groups.push(RawGroup {
                line: i + 1,
                header,
                phrases: Vec::new(),
            });
            continue;
        }
        let Some(RawGroup { phrases, .. }) = groups.last_mut() else {
            return Err(LexiconError::PhraseOutsideGroup { line: i + 1 });
        };
        let phrase = normalize_phrase(line);
        if !seen_phrases.insert(phrase.clone()) {
            return Err(LexiconError::DuplicatePhrase {
                line: i + 1,
                phrase,
            });
        }
        phrases.push(phrase);
    }
    if groups.is_empty() {
        return Err(LexiconError::Empty);
    }
    if let Some(g) = groups.iter().find(|g| g.phrases.is_empty()) {
        return Err(LexiconError::EmptyGroup(g.header.clone()));
    }
    Ok(groups)
}

fn read_file(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseGroup {
    pub group_id: u32,
    pub phrases: Vec<String>,
}

/// The suicide-risk phrase dictionary used for weak labels.
#[derive(Debug, Clone)]
pub struct RiskPhraseLexicon {
    groups: Vec<PhraseGroup>,
    matcher: PhraseMatcher,
}

impl RiskPhraseLexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut groups = Vec::new();
        for raw in parse_groups(text)? {
            let group_id = raw
                .header
                .parse::<u32>()
                .map_err(|_| LexiconError::BadHeader {
                    line: raw.line,
                    header: raw.header.clone(),
                })?;
            groups.push(PhraseGroup {
                group_id,
                phrases: raw.phrases,
            });
        }
        Ok(Self::from_groups(groups))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse(&read_file(path.as_ref())?)
    }

    fn from_groups(groups: Vec<PhraseGroup>) -> Self {
        let entries = groups
            .iter()
            .flat_map(|g| g.phrases.iter().map(move |p| (p.clone(), g.group_id)));
        let matcher = PhraseMatcher::new(entries);
        Self { groups, matcher }
    }

    pub fn groups(&self) -> &[PhraseGroup] {
        &self.groups
    }

    /// `(group_id, phrase)` pairs in file order.
    pub fn phrases(&self) -> impl Iterator<Item = (u32, &str)> {
        self.groups
            .iter()
            .flat_map(|g| g.phrases.iter().map(move |p| (g.group_id, p.as_str())))
    }

    pub fn match_risk_phrases(&self, sentence: &str) -> Vec<PhraseMatch> {
        self.matcher.find_all(sentence)
    }

    pub fn contains_risk_phrase(&self, sentence: &str) -> bool {
        !self.matcher.find_all(sentence).is_empty()
    }
}

impl Default for RiskPhraseLexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_RISK_PHRASES).expect("bundled risk lexicon is valid")
    }
}

/// A lexicon phrase located in a sentence. Offsets count characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseMatch {
    /// Text exactly as it appears in the sentence.
    pub phrase: String,
    /// The lexicon entry that matched.
    pub canonical: String,
    pub group_id: u32,
    pub char_start: usize,
    pub char_end: usize,
}

/// Case-insensitive, word-boundary-respecting multi-phrase matcher.
///
/// The haystack is folded with [`fold_char`] and whitespace runs are
/// collapsed to one space, so a phrase's internal spaces match any run of
/// whitespace. All overlapping occurrences are reported.
#[derive(Debug, Clone)]
pub struct PhraseMatcher {
    phrases: Vec<(String, u32)>,
    automaton: Option<AhoCorasick>,
}

struct Folded {
    text: String,
    /// For each char of `text`: (char index, byte index) in the source.
    origin: Vec<(usize, usize)>,
    /// Byte offset in `text` of each of its chars, plus a final sentinel.
    byte_of_char: Vec<usize>,
}

fn fold_haystack(source: &str) -> Folded {
    let mut text = String::with_capacity(source.len());
    let mut origin = Vec::with_capacity(source.len());
    let mut byte_of_char = Vec::with_capacity(source.len() + 1);
    let mut prev_space = false;
    for (ci, (bi, c)) in source.char_indices().enumerate() {
        if c.is_whitespace() {
            if prev_space {
                continue;
            }
            prev_space = true;
            byte_of_char.push(text.len());
            text.push(' ');
        } else {
            prev_space = false;
            byte_of_char.push(text.len());
            text.push(fold_char(c));
        }
        origin.push((ci, bi));
    }
    byte_of_char.push(text.len());
    Folded {
        text,
        origin,
        byte_of_char,
    }
}

impl PhraseMatcher {
    pub fn new(entries: impl IntoIterator<Item = (String, u32)>) -> Self {
        let phrases: Vec<(String, u32)> = entries
            .into_iter()
            .map(|(p, tag)| (normalize_phrase(&p), tag))
            .filter(|(p, _)| !p.is_empty())
            .collect();
        let automaton = if phrases.is_empty() {
            None
        } else {
            Some(
                AhoCorasickBuilder::new()
                    .match_kind(MatchKind::Standard)
                    .build(phrases.iter().map(|(p, _)| p.as_str()))
                    .expect("phrase automaton builds"),
            )
        };
        Self { phrases, automaton }
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// All matches, sorted by start, then end, then phrase order.
    pub fn find_all(&self, haystack: &str) -> Vec<PhraseMatch> {
        let Some(automaton) = &self.automaton else {
            return Vec::new();
        };
        let folded = fold_haystack(haystack);
        let mut hits: Vec<(usize, usize, usize)> = Vec::new();
        for m in automaton.find_overlapping_iter(&folded.text) {
            let (start, end) = (m.start(), m.end());
            let matched = &folded.text[start..end];
            let (first, last) = (matched.chars().next(), matched.chars().next_back());
            let before = folded.text[..start].chars().next_back();
            let after = folded.text[end..].chars().next();
            let glued_before = matches!((before, first), (Some(b), Some(f)) if joins_word(b, f));
            let glued_after = matches!((last, after), (Some(l), Some(a)) if joins_word(l, a));
            if glued_before || glued_after {
                continue;
            }
            let fc_start = folded.byte_of_char.partition_point(|&b| b < start);
            let fc_end = folded.byte_of_char.partition_point(|&b| b < end);
            hits.push((fc_start, fc_end, m.pattern().as_usize()));
        }
        hits.sort_unstable();
        hits.into_iter()
            .map(|(fs, fe, pid)| {
                let (char_start, byte_start) = folded.origin[fs];
                let (last_char, last_byte) = folded.origin[fe - 1];
                let last_len = haystack[last_byte..]
                    .chars()
                    .next()
                    .map_or(0, char::len_utf8);
                let (canonical, tag) = &self.phrases[pid];
                PhraseMatch {
                    phrase: haystack[byte_start..last_byte + last_len].to_string(),
                    canonical: canonical.clone(),
                    group_id: *tag,
                    char_start,
                    char_end: last_char + 1,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub prefix: String,
    pub phrases: Vec<String>,
}

/// Prefix/phrase rows used for the dictionary part of a summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryPhraseTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryPhraseTable {
    /// Parses prefix rows only; see [`SummaryPhraseTable::with_risk_row`].
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let rows = parse_groups(text)?
            .into_iter()
            .map(|raw| SummaryRow {
                prefix: raw.header,
                phrases: raw.phrases,
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse(&read_file(path.as_ref())?)
    }

    /// Appends the row pairing [`RISK_ROW_PREFIX`] with every lexicon phrase.
    pub fn with_risk_row(mut self, lexicon: &RiskPhraseLexicon) -> Result<Self, LexiconError> {
        if self.rows.iter().any(|r| r.prefix == RISK_ROW_PREFIX) {
            return Err(LexiconError::DuplicateGroup(RISK_ROW_PREFIX.to_string()));
        }
        self.rows.push(SummaryRow {
            prefix: RISK_ROW_PREFIX.to_string(),
            phrases: lexicon.phrases().map(|(_, p)| p.to_string()).collect(),
        });
        Ok(self)
    }

    /// The bundled five prefix rows plus the risk-lexicon row.
    pub fn default_with(lexicon: &RiskPhraseLexicon) -> Self {
        Self::parse(DEFAULT_SUMMARY_PHRASES)
            .and_then(|t| t.with_risk_row(lexicon))
            .expect("bundled summary table is valid")
    }
}

impl Default for SummaryPhraseTable {
    fn default() -> Self {
        Self::default_with(&RiskPhraseLexicon::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_shape() {
        let lex = RiskPhraseLexicon::default();
        let ids: Vec<u32> = lex.groups().iter().map(|g| g.group_id).collect();
        assert_eq!(ids, (1..=11).collect::<Vec<_>>());
        assert!(lex.phrases().all(|(_, p)| p == p.to_lowercase()));
        assert_eq!(
            lex.groups()[3].phrases,
            ["want to die", "wanted to die", "don't want to live"]
        );
    }

    #[test]
    fn spec_examples() {
        let lex = RiskPhraseLexicon::default();
        let m = lex.match_risk_phrases("I want to die");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].group_id, 4);
        assert_eq!((m[0].char_start, m[0].char_end), (2, 13));
        assert!(lex.match_risk_phrases("I wanted to diet today").is_empty());
        assert!(lex
            .match_risk_phrases("Dying is the only way to make it better")
            .is_empty());
    }

    #[test]
    fn case_whitespace_and_apostrophes() {
        let lex = RiskPhraseLexicon::default();
        let m = lex.match_risk_phrases("I DON\u{2019}T   want\tto LIVE!");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].phrase, "DON\u{2019}T   want\tto LIVE");
        assert_eq!(m[0].canonical, "don't want to live");
        assert_eq!((m[0].char_start, m[0].char_end), (2, 22));
    }

    #[test]
    fn overlapping_matches_are_all_reported() {
        let lex = RiskPhraseLexicon::default();
        let m = lex.match_risk_phrases("they will kill myself hanging");
        let found: Vec<_> = m.iter().map(|m| m.canonical.as_str()).collect();
        assert_eq!(found, ["kill myself", "myself hanging"]);
        // "kill me" must not fire inside "kill myself"
        assert!(!found.contains(&"kill me"));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(
            RiskPhraseLexicon::parse("want to die\n"),
            Err(LexiconError::PhraseOutsideGroup { line: 1 })
        ));
        assert!(matches!(
            RiskPhraseLexicon::parse("# 1\nkill me\n# 2\nKill  me\n"),
            Err(LexiconError::DuplicatePhrase { line: 4, .. })
        ));
        assert!(matches!(
            RiskPhraseLexicon::parse("# one\nkill me\n"),
            Err(LexiconError::BadHeader { .. })
        ));
        assert!(matches!(
            RiskPhraseLexicon::parse("# 1\n# 2\nkill me\n"),
            Err(LexiconError::EmptyGroup(_))
        ));
    }

    #[test]
    fn summary_table_rows() {
        let table = SummaryPhraseTable::default();
        let prefixes: Vec<_> = table.rows.iter().map(|r| r.prefix.as_str()).collect();
        assert_eq!(
            prefixes,
            [
                "This person feels",
                "This person is dealing with issues with",
                "This person has a problem of",
                "This person is struggling with",
                "This person is experiencing",
                RISK_ROW_PREFIX,
            ]
        );
        assert_eq!(table.rows[0].phrases.len(), 16);
        assert_eq!(
            table.rows[5].phrases.len(),
            RiskPhraseLexicon::default().phrases().count()
        );
    }

    #[test]
    fn multibyte_offsets() {
        let matcher = PhraseMatcher::new([("end my life".to_string(), 5)]);
        let m = matcher.find_all("Ünd… I'll END MY  LIFE…");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].phrase, "END MY  LIFE");
        let chars: Vec<char> = "Ünd… I'll END MY  LIFE…".chars().collect();
        let s: String = chars[m[0].char_start..m[0].char_end].iter().collect();
        assert_eq!(s, "END MY  LIFE");
    }
}
