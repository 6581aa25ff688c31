mod common;

use risk_evidence::lexicon::{normalize_phrase, RiskPhraseLexicon};

#[test]
fn matches_equal_naive_oracle() {
    let lex = RiskPhraseLexicon::default();
    let phrases = common::lexicon_phrases();
    let mut rng = common::rng(3);
    let mut with_hits = 0;
    for _ in 0..1000 {
        let s = common::random_sentence(&mut rng, &phrases);
        let got: Vec<(usize, usize, u32)> = lex
            .match_risk_phrases(&s)
            .iter()
            .map(|m| (m.char_start, m.char_end, m.group_id))
            .collect();
        let want = common::naive_matches(&phrases, &s);
        assert_eq!(got, want, "sentence {s:?}");
        with_hits += usize::from(!want.is_empty());
    }
    assert!(
        with_hits > 300,
        "generator produced too few matches: {with_hits}"
    );
}

#[test]
fn matched_span_normalises_to_phrase() {
    let lex = RiskPhraseLexicon::default();
    let phrases = common::lexicon_phrases();
    let mut rng = common::rng(4);
    for _ in 0..300 {
        let s = common::random_sentence(&mut rng, &phrases);
        for m in lex.match_risk_phrases(&s) {
            let span: String = s
                .chars()
                .skip(m.char_start)
                .take(m.char_end - m.char_start)
                .collect();
            assert_eq!(span, m.phrase);
            assert_eq!(normalize_phrase(&span), m.canonical);
            assert!(phrases
                .iter()
                .any(|(g, p)| *g == m.group_id && normalize_phrase(p) == m.canonical));
        }
    }
}

#[test]
fn shipped_lexicon_has_eleven_groups_without_duplicates() {
    let lex = RiskPhraseLexicon::default();
    let ids: Vec<u32> = lex.groups().iter().map(|g| g.group_id).collect();
    assert_eq!(ids, (1..=11).collect::<Vec<_>>());
    let phrases = common::lexicon_phrases();
    let mut seen = std::collections::HashSet::new();
    assert!(phrases
        .iter()
        .all(|(_, p)| seen.insert(normalize_phrase(p))));
}

#[test]
fn documented_examples() {
    let lex = RiskPhraseLexicon::default();
    let m = lex.match_risk_phrases("I want to die");
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].group_id, 4);
    assert!(lex.match_risk_phrases("I wanted to diet").is_empty());
    assert!(lex
        .match_risk_phrases("Dying is the only way to make it better")
        .is_empty());
}
