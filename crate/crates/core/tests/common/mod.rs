//! Independent oracles, generators and fixtures shared by the integration
//! tests and the acceptance runner. Nothing here calls the code under test
//! to compute an expected value.
#![allow(dead_code)]

pub mod mock;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use risk_evidence::corpus::{Post, RiskLevel, Sentence, UserTimeline};
use risk_evidence::scoring::{RiskScore, ScoredSentence, SentimentScore};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn corpus_path() -> PathBuf {
    data_path("synthetic_corpus.jsonl")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- segmentation

const DELIMS: [char; 5] = ['.', '!', '?', ':', ';'];

/// Char-level sentence splitter written from the rule: cut after every
/// maximal delimiter run, trim, drop pieces without a content char.
/// Returns (char_start, char_end) pairs.
pub fn segment_oracle(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut cuts = vec![0];
    for i in 1..chars.len() {
        if DELIMS.contains(&chars[i - 1]) && !DELIMS.contains(&chars[i]) {
            cuts.push(i);
        }
    }
    cuts.push(chars.len());
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if !chars[a..b]
            .iter()
            .any(|c| !c.is_whitespace() && !DELIMS.contains(c))
        {
            continue;
        }
        while chars[a].is_whitespace() {
            a += 1;
        }
        while chars[b - 1].is_whitespace() {
            b -= 1;
        }
        out.push((a, b));
    }
    out
}

/// Mix of ASCII, delimiters, whitespace and multibyte characters.
pub fn fuzz_string(rng: &mut ChaCha8Rng) -> String {
    const POOL: &[char] = &[
        'a', 'b', 'z', 'I', ' ', ' ', '\t', '\n', '.', '.', '!', '?', ':', ';', ',', '\'', '3',
        'é', 'ß', '中', '\u{2019}', '\u{00a0}', '\u{3000}', '😀', '-',
    ];
    let len = rng.gen_range(0..60);
    (0..len).map(|_| *POOL.choose(rng).unwrap()).collect()
}

// ---------------------------------------------------------------- lexicon

fn fold(c: char) -> char {
    if c == '\u{2019}' {
        return '\'';
    }
    let lower: Vec<char> = c.to_lowercase().collect();
    if lower.len() == 1 {
        lower[0]
    } else {
        c
    }
}

fn alnum(c: Option<char>) -> bool {
    c.is_some_and(char::is_alphanumeric)
}

/// Tries every phrase at every char position. A space in a phrase matches
/// one or more whitespace chars; the match may not be glued to a letter or
/// digit on either side. Returns sorted (char_start, char_end, group).
pub fn naive_matches(phrases: &[(u32, String)], text: &str) -> Vec<(usize, usize, u32)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    for start in 0..chars.len() {
        for (group, phrase) in phrases {
            let p: Vec<char> = phrase
                .to_lowercase()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
                .chars()
                .collect();
            let mut j = start;
            let mut ok = true;
            for &pc in &p {
                if pc == ' ' {
                    if j >= chars.len() || !chars[j].is_whitespace() {
                        ok = false;
                        break;
                    }
                    while j < chars.len() && chars[j].is_whitespace() {
                        j += 1;
                    }
                } else {
                    if j >= chars.len() || fold(chars[j]) != pc {
                        ok = false;
                        break;
                    }
                    j += 1;
                }
            }
            if !ok {
                continue;
            }
            let before = start.checked_sub(1).map(|i| chars[i]);
            let after = chars.get(j).copied();
            if (alnum(before) && alnum(p.first().copied()))
                || (alnum(after) && alnum(p.last().copied()))
            {
                continue;
            }
            out.push((start, j, *group));
        }
    }
    out.sort_unstable();
    out
}

const FILLER: &[&str] = &[
    "today", "I", "really", "think", "that", "the", "diet", "dying", "my", "cat", "is", "so",
    "tired", "and", "we", "went", "out", "wanted", "to", "killjoy", "mydie", "never", "again",
];

/// Lexicon phrases interleaved with filler, with random case, whitespace
/// runs, typographic apostrophes and occasional glued letters.
pub fn random_sentence(rng: &mut ChaCha8Rng, phrases: &[(u32, String)]) -> String {
    let mut pieces: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(1..8) {
        if rng.gen_bool(0.4) {
            let (_, p) = phrases.choose(rng).unwrap();
            pieces.push(p.clone());
        } else {
            pieces.push(FILLER.choose(rng).unwrap().to_string());
        }
    }
    let mut s = String::new();
    for (i, piece) in pieces.iter().enumerate() {
        if i > 0 {
            let sep = match rng.gen_range(0..10) {
                0 => "",
                1 => "  ",
                2 => "\t",
                3 => ", ",
                _ => " ",
            };
            s.push_str(sep);
        }
        for c in piece.chars() {
            let c = match c {
                '\'' if rng.gen_bool(0.5) => '\u{2019}',
                ' ' if rng.gen_bool(0.2) => '\t',
                c if rng.gen_bool(0.15) => c.to_ascii_uppercase(),
                c => c,
            };
            s.push(c);
            if c == ' ' && rng.gen_bool(0.1) {
                s.push(' ');
            }
        }
    }
    if rng.gen_bool(0.5) {
        s.push('.');
    }
    s
}

// ---------------------------------------------------------------- highlights

pub fn sentence(index: usize, text: &str) -> Sentence {
    Sentence {
        post_id: "p".into(),
        index,
        text: text.to_string(),
        char_start: 0,
        char_end: text.chars().count(),
        byte_start: 0,
        byte_end: text.len(),
    }
}

pub fn scored(
    index: usize,
    text: &str,
    p_risk: f64,
    p_negative: f64,
    threshold: f64,
) -> ScoredSentence {
    ScoredSentence::new(
        sentence(index, text),
        RiskScore::new(p_risk).unwrap(),
        SentimentScore::new(p_negative, 1.0 - p_negative, 0.0).unwrap(),
        threshold,
    )
}

pub const VOCAB: &[&str] = &["alpha", "beta", "gamma", "delta", "omega", "sigma"];

#[derive(Debug, Clone)]
pub struct HighlightInstance {
    pub sentences: Vec<(String, f64, f64)>,
    pub threshold: f64,
    pub budget: usize,
    pub terms: Option<String>,
}

impl HighlightInstance {
    pub fn random(rng: &mut ChaCha8Rng, budget: usize) -> Self {
        let n = rng.gen_range(0..=20);
        let sentences = (0..n)
            .map(|_| {
                let words = rng.gen_range(1..=20);
                let text: Vec<&str> = (0..words).map(|_| *VOCAB.choose(rng).unwrap()).collect();
                let p_risk = if rng.gen_bool(0.15) {
                    rng.gen_range(0.5..=1.0)
                } else {
                    rng.gen_range(0.0..0.5)
                };
                // coarse values so ties happen
                let p_neg = f64::from(rng.gen_range(0..=4u8)) / 4.0;
                (format!("{}.", text.join(" ")), p_risk, p_neg)
            })
            .collect();
        let terms = rng.gen_bool(0.5).then(|| {
            let k = rng.gen_range(1..6);
            (0..k)
                .map(|i| {
                    let w: Vec<&str> = (0..rng.gen_range(2..5))
                        .map(|_| *VOCAB.choose(rng).unwrap())
                        .collect();
                    format!("{}. *{}*,", i + 1, w.join(" "))
                })
                .collect::<Vec<_>>()
                .join("\n")
        });
        Self {
            sentences,
            threshold: 0.5,
            budget,
            terms,
        }
    }

    pub fn scored(&self) -> Vec<ScoredSentence> {
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, (t, r, n))| scored(i, t, *r, *n, self.threshold))
            .collect()
    }
}

fn plain_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Straight-line reading of the three-stage selection with
/// stop-at-first-overflow. Returns (position, stage) in selection order.
pub fn greedy_oracle(inst: &HighlightInstance, min_words: usize) -> Vec<(usize, u8)> {
    let words: Vec<usize> = inst
        .sentences
        .iter()
        .map(|(t, _, _)| t.split_whitespace().count())
        .collect();
    let mut picked: Vec<(usize, u8)> = Vec::new();
    let mut total = 0;
    for (i, (_, r, _)) in inst.sentences.iter().enumerate() {
        if *r >= inst.threshold {
            picked.push((i, 1));
            total += words[i];
        }
    }
    let mut rest: Vec<usize> = (0..inst.sentences.len())
        .filter(|i| !picked.iter().any(|p| p.0 == *i))
        .collect();
    // stable sort keeps document order among ties
    rest.sort_by(|a, b| {
        inst.sentences[*b]
            .2
            .partial_cmp(&inst.sentences[*a].2)
            .unwrap()
    });
    for i in rest {
        if total + words[i] > inst.budget {
            break;
        }
        picked.push((i, 2));
        total += words[i];
    }
    if total < inst.budget {
        if let Some(raw) = &inst.terms {
            let windows = window_oracle(raw, min_words);
            for (i, (t, _, _)) in inst.sentences.iter().enumerate() {
                if picked.iter().any(|p| p.0 == i) {
                    continue;
                }
                let w = plain_words(t);
                let hit = (0..w.len())
                    .any(|a| (a + 1..=w.len()).any(|b| windows.contains(&w[a..b].join(" "))));
                if !hit {
                    continue;
                }
                if total + words[i] > inst.budget {
                    break;
                }
                picked.push((i, 3));
                total += words[i];
            }
        }
    }
    picked
}

// ---------------------------------------------------------------- candidates

/// Token cleaning rule: drop asterisks at both ends, drop tokens that are
/// pure numbering (`12.` or `3)`), drop commas at both ends, fold case and
/// apostrophes.
fn clean_token(tok: &str) -> Option<String> {
    let t = tok.trim_start_matches('*').trim_end_matches('*');
    let is_number = t.len() >= 2
        && (t.ends_with('.') || t.ends_with(')'))
        && t[..t.len() - 1].bytes().all(|b| b.is_ascii_digit());
    if is_number {
        return None;
    }
    let t = t
        .trim_start_matches([',', '*'])
        .trim_end_matches([',', '*']);
    (!t.is_empty()).then(|| t.chars().map(fold).collect())
}

/// All (start, width) windows with width ≥ `min_words`.
pub fn window_oracle(raw: &str, min_words: usize) -> BTreeSet<String> {
    let toks: Vec<String> = raw.split_whitespace().filter_map(clean_token).collect();
    let mut out = BTreeSet::new();
    for start in 0..toks.len() {
        for width in min_words.max(1)..=toks.len() - start {
            out.insert(toks[start..start + width].join(" "));
        }
    }
    out
}

/// 30 generator outputs of at most 8 words, markers included.
pub const CANDIDATE_SUITE: &[&str] = &[
    "",
    "a",
    "a b",
    "a b c",
    "a b c d",
    "one two three four five",
    "one two three four five six seven eight",
    "* want to die, * end my life",
    "1. want to die 2. end my life",
    "1) hopeless 2) alone 3) tired",
    "**feel so alone**",
    "want, to, die",
    ",,, lonely , , tired",
    "* * *",
    "1. 2. 3.",
    "Want To DIE",
    "I  can't\tgo on",
    "10. nothing matters anymore",
    "no way out, no way back",
    "hurt hurt hurt hurt",
    "*self* harm *cuts*",
    "a.b c.d e.f g",
    "12) 12) 12)",
    "end,my,life",
    "x y z x y z",
    "so tired of living",
    "-- I give up --",
    "3.5 reasons to stay",
    "*1.* first *2.* second",
    "don’t want to live",
];

// ---------------------------------------------------------------- eval

pub fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// One-hot greedy matching by counting: a token scores 1 when it appears
/// anywhere on the other side.
pub fn onehot_oracle(cand: &[String], refr: &[String]) -> (f64, f64) {
    if cand.is_empty() && refr.is_empty() {
        return (1.0, 1.0);
    }
    let frac = |xs: &[String], ys: &[String]| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().filter(|x| ys.contains(x)).count() as f64 / xs.len() as f64
        }
    };
    (frac(cand, refr), frac(refr, cand))
}

/// Linear-interpolation quantile on a sorted copy.
pub fn quantile_oracle(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn span_map(entries: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
    entries
        .iter()
        .map(|(u, spans)| (u.to_string(), spans.iter().map(|s| s.to_string()).collect()))
        .collect()
}

// ---------------------------------------------------------------- ratio fixture

const RISKY: &str = "I want to die.";
const PLAIN: &str = "The weather was fine.";

fn fixture_user(id: &str, level: RiskLevel, risky: usize, total: usize) -> UserTimeline {
    let text: Vec<&str> = (0..total)
        .map(|i| if i < risky { RISKY } else { PLAIN })
        .collect();
    UserTimeline {
        user_id: id.into(),
        expert_level: level,
        posts: vec![Post {
            post_id: format!("{id}-p"),
            user_id: id.into(),
            text: text.join(" "),
            timestamp: None,
        }],
    }
}

/// High users at ratio 0.5, low users at 0.1 (medians 0.5 and 0.1 by
/// construction), plus a moderate pair at 0.2 and 0.4.
pub fn ratio_fixture() -> Vec<UserTimeline> {
    vec![
        fixture_user("h1", RiskLevel::High, 5, 10),
        fixture_user("h2", RiskLevel::High, 2, 4),
        fixture_user("h3", RiskLevel::High, 10, 20),
        fixture_user("l1", RiskLevel::Low, 1, 10),
        fixture_user("l2", RiskLevel::Low, 2, 20),
        fixture_user("l3", RiskLevel::Low, 1, 10),
        fixture_user("m1", RiskLevel::Moderate, 1, 5),
        fixture_user("m2", RiskLevel::Moderate, 2, 5),
    ]
}

// ---------------------------------------------------------------- dataset

/// Sentences of the bundled corpus that contain a lexicon phrase, counted
/// with the naive matcher and the oracle splitter.
pub fn oracle_positive_count(phrases: &[(u32, String)]) -> (usize, usize) {
    let text = std::fs::read_to_string(corpus_path()).unwrap();
    let (mut pos, mut total) = (0, 0);
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let post = v["text"].as_str().unwrap();
        let chars: Vec<char> = post.chars().collect();
        for (a, b) in segment_oracle(post) {
            let s: String = chars[a..b].iter().collect();
            total += 1;
            if !naive_matches(phrases, &s).is_empty() {
                pos += 1;
            }
        }
    }
    (pos, total)
}

pub fn lexicon_phrases() -> Vec<(u32, String)> {
    let text = std::fs::read_to_string(data_path("risk_phrases.txt")).unwrap();
    let mut group = 0;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(h) = line.strip_prefix('#') {
            group = h.trim().parse().unwrap();
        } else {
            out.push((group, line.to_string()));
        }
    }
    out
}
