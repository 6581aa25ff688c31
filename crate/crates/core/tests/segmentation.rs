mod common;

use proptest::prelude::*;
use risk_evidence::corpus::{segment_post, Segmenter};

fn is_delim(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ':' | ';')
}

/// Spans are ordered, disjoint, and everything between them is whitespace
/// or delimiters, so spans plus gaps rebuild the input.
fn check_round_trip(text: &str) -> Result<(), TestCaseError> {
    let spans = segment_post(text);
    let mut rebuilt = String::new();
    let mut cursor = 0;
    for s in &spans {
        prop_assert!(s.byte_start >= cursor && s.byte_start < s.byte_end);
        let gap = &text[cursor..s.byte_start];
        prop_assert!(
            gap.chars().all(|c| c.is_whitespace() || is_delim(c)),
            "gap {gap:?}"
        );
        rebuilt.push_str(gap);
        rebuilt.push_str(s.slice(text));
        prop_assert_eq!(text[..s.byte_start].chars().count(), s.char_start);
        prop_assert_eq!(text[..s.byte_end].chars().count(), s.char_end);
        cursor = s.byte_end;
    }
    let tail = &text[cursor..];
    prop_assert!(tail.chars().all(|c| c.is_whitespace() || is_delim(c)));
    rebuilt.push_str(tail);
    prop_assert_eq!(rebuilt, text);
    Ok(())
}

proptest! {
    #[test]
    fn round_trip(text in "[a-zé中 \t\n.!?:;,'\u{2019}]{0,80}") {
        check_round_trip(&text)?;
    }

    #[test]
    fn round_trip_any_unicode(text in any::<String>()) {
        check_round_trip(&text)?;
    }

    #[test]
    fn resegmenting_a_sentence_is_identity(text in "[a-z \t.!?:;]{0,80}") {
        for s in segment_post(&text) {
            let sentence = s.slice(&text);
            let again = segment_post(sentence);
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(again[0].slice(sentence), sentence);
            let body = sentence.trim_end_matches(is_delim);
            prop_assert!(!body.contains(is_delim));
        }
    }

    #[test]
    fn spans_are_trimmed_and_non_empty(text in "[a-z \n.!]{0,60}") {
        for s in segment_post(&text) {
            let t = s.slice(&text);
            prop_assert!(!t.is_empty() && t.trim() == t);
            prop_assert!(s.char_start < s.char_end);
        }
    }
}

#[test]
fn agrees_with_char_level_oracle() {
    let mut rng = common::rng(11);
    for _ in 0..2000 {
        let text = common::fuzz_string(&mut rng);
        let got: Vec<(usize, usize)> = segment_post(&text)
            .iter()
            .map(|s| (s.char_start, s.char_end))
            .collect();
        assert_eq!(got, common::segment_oracle(&text), "{text:?}");
    }
}

#[test]
fn comma_boundaries_are_opt_in() {
    let text = "I tried, I failed. Again";
    assert_eq!(segment_post(text).len(), 2);
    let spans = Segmenter::new().with_comma_boundaries(true).spans(text);
    let parts: Vec<&str> = spans.iter().map(|s| s.slice(text)).collect();
    assert_eq!(parts, ["I tried,", "I failed.", "Again"]);
}
