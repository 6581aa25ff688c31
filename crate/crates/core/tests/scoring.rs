mod common;

use proptest::prelude::*;
use risk_evidence::corpus::{load_corpus, Segmenter};
use risk_evidence::lexicon::{build_weak_labeled_dataset, DatasetOptions, RiskPhraseLexicon};
use risk_evidence::scoring::{
    score_sentences, train_baseline, BaselineRiskModel, LexiconBaselineScorer, RiskScorer,
    SentimentScorer, TrainOptions, ValenceSentimentScorer,
};

fn trained() -> BaselineRiskModel {
    let corpus = load_corpus(common::corpus_path()).unwrap();
    let dataset = build_weak_labeled_dataset(
        &corpus,
        &RiskPhraseLexicon::default(),
        &Segmenter::new(),
        &DatasetOptions::default(),
    )
    .unwrap();
    let t = train_baseline(&dataset, &TrainOptions::default()).unwrap();
    assert!(
        t.best().val_accuracy >= 0.95,
        "val accuracy {}",
        t.best().val_accuracy
    );
    t.model
}

#[test]
fn baseline_reaches_validation_target_and_round_trips() {
    let model = trained();
    let back = BaselineRiskModel::from_text(&model.to_text()).unwrap();
    for s in ["I want to die", "The cat sat down", "nothing left for me"] {
        assert_eq!(
            model.predict_proba(s).to_bits(),
            back.predict_proba(s).to_bits()
        );
    }
}

#[test]
fn threshold_consistency_on_corpus() {
    let corpus = load_corpus(common::corpus_path()).unwrap();
    let risk = LexiconBaselineScorer::new(RiskPhraseLexicon::default(), Some(trained()));
    let sentiment = ValenceSentimentScorer::default();
    for threshold in [0.0, 0.3, 0.5, 0.9, 1.0] {
        for t in &corpus {
            let scored = score_sentences(
                Segmenter::new().segment_timeline(t),
                &risk,
                &sentiment,
                threshold,
            )
            .unwrap();
            for s in scored {
                assert_eq!(s.risk_positive, s.risk.p_risk >= threshold);
            }
        }
    }
}

proptest! {
    #[test]
    fn appending_a_phrase_never_lowers_p_risk(text in "[a-z ]{0,40}", pick in 0usize..200) {
        let phrases = common::lexicon_phrases();
        let (_, phrase) = &phrases[pick % phrases.len()];
        let scorer = LexiconBaselineScorer::new(RiskPhraseLexicon::default(), None);
        let before = scorer.score_one(&text);
        let after = scorer.score_one(&format!("{text} {phrase}"));
        prop_assert!(after >= before);
        prop_assert_eq!(after, 1.0);
    }

    #[test]
    fn sentiment_is_a_distribution(text in "\\PC{0,60}") {
        let s = ValenceSentimentScorer::default().score_one(&text);
        prop_assert!((s.p_negative + s.p_neutral + s.p_positive - 1.0).abs() <= 1e-6);
        for p in [s.p_negative, s.p_neutral, s.p_positive] {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn scorers_are_deterministic(texts in proptest::collection::vec("[a-z ]{0,30}", 0..8)) {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let risk = LexiconBaselineScorer::new(RiskPhraseLexicon::default(), None);
        let sentiment = ValenceSentimentScorer::default();
        prop_assert_eq!(risk.score_risk(&refs).unwrap(), risk.score_risk(&refs).unwrap());
        prop_assert_eq!(sentiment.score_sentiment(&refs).unwrap(), sentiment.score_sentiment(&refs).unwrap());
    }
}

#[test]
fn neutral_word_is_mostly_neutral() {
    let s = ValenceSentimentScorer::default().score_one("table");
    assert!(s.p_neutral > s.p_negative && s.p_neutral > s.p_positive);
}
