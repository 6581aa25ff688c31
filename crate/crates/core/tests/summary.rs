use proptest::prelude::*;
use risk_evidence::corpus::RiskLevel;
use risk_evidence::lexicon::SummaryPhraseTable;
use risk_evidence::summary::{
    assemble_summary, dictionary_summary, frequency_summary, opening_summary, SummaryParts,
};

#[test]
fn opening_templates() {
    assert_eq!(
        opening_summary(RiskLevel::Low).unwrap(),
        "This person is at low risk of suicide."
    );
    assert_eq!(
        opening_summary(RiskLevel::Moderate).unwrap(),
        "This person is at moderate risk of suicide."
    );
    assert_eq!(
        opening_summary(RiskLevel::High).unwrap(),
        "This person is at high risk of suicide."
    );
    assert!(opening_summary(RiskLevel::Unknown).is_err());
}

#[test]
fn frequency_templates() {
    let cases = [
        (0, None),
        (1, Some("This person made a post implying suicide.")),
        (2, Some("This person made multiple posts implying suicide.")),
        (3, Some("This person made lots of posts implying suicide.")),
        (4, Some("This person made lots of posts implying suicide.")),
        (
            100,
            Some("This person made lots of posts implying suicide."),
        ),
    ];
    for (n, want) in cases {
        assert_eq!(frequency_summary(n).as_deref(), want, "n = {n}");
    }
}

#[test]
fn dictionary_fixture() {
    let table = SummaryPhraseTable::default();
    assert_eq!(
        dictionary_summary(&["I feel hopeless.", "So alone tonight."], &table).as_deref(),
        Some("This person feels hopeless and alone.")
    );
    assert_eq!(dictionary_summary(&["Nice weather."], &table), None);
}

#[test]
fn duplicate_sentences_do_not_repeat_phrases() {
    let table = SummaryPhraseTable::default();
    let once = dictionary_summary(&["I feel hopeless and alone."], &table);
    let thrice = dictionary_summary(&["I feel hopeless and alone."; 3], &table);
    assert_eq!(once, thrice);
}

fn part() -> impl Strategy<Value = Option<String>> {
    proptest::option::of("[A-Z][a-z]{1,8}( [a-z]{1,8}){0,3}\\.")
}

proptest! {
    #[test]
    fn assembly_keeps_each_present_part_once(
        level in 0usize..3, frequency in part(), dictionary in part(), generative in part()
    ) {
        let opening = opening_summary([RiskLevel::Low, RiskLevel::Moderate, RiskLevel::High][level]).unwrap();
        let parts = SummaryParts { opening: opening.clone(), frequency, dictionary, generative };
        let text = assemble_summary(&parts);
        prop_assert!(text.starts_with(&opening));
        let present: Vec<&String> = [&parts.frequency, &parts.dictionary, &parts.generative]
            .into_iter()
            .flatten()
            .collect();
        let expected = std::iter::once(&opening).chain(present).cloned().collect::<Vec<_>>().join(" ");
        prop_assert_eq!(text, expected);
    }
}
