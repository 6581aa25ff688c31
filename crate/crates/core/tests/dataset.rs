mod common;

use risk_evidence::corpus::{load_corpus, Segmenter};
use risk_evidence::lexicon::{
    build_weak_labeled_dataset, DatasetOptions, LabeledDataset, RiskPhraseLexicon,
};

fn build(seed: u64) -> LabeledDataset {
    let corpus = load_corpus(common::corpus_path()).unwrap();
    let options = DatasetOptions {
        seed,
        ..DatasetOptions::default()
    };
    build_weak_labeled_dataset(
        &corpus,
        &RiskPhraseLexicon::default(),
        &Segmenter::new(),
        &options,
    )
    .unwrap()
}

fn bytes(d: &LabeledDataset) -> Vec<u8> {
    let mut out = Vec::new();
    d.write_jsonl(&mut out).unwrap();
    out
}

#[test]
fn positives_equal_oracle_count() {
    let (oracle_pos, oracle_total) = common::oracle_positive_count(&common::lexicon_phrases());
    assert_eq!((oracle_pos, oracle_total), (40, 200));
    let d = build(7);
    let (t, v) = (d.train_counts(), d.val_counts());
    assert_eq!(t.positive + v.positive, oracle_pos);
    let negatives = t.negative + v.negative;
    assert!(negatives.abs_diff(oracle_pos) <= 1);
}

#[test]
fn labels_are_sound_and_splits_disjoint() {
    let lex = RiskPhraseLexicon::default();
    let d = build(7);
    for row in d.rows() {
        assert_eq!(
            row.label == 1,
            lex.contains_risk_phrase(&row.text),
            "{row:?}"
        );
    }
    let train: std::collections::HashSet<_> =
        d.train.iter().map(|r| (&r.post_id, r.index)).collect();
    assert!(d
        .val
        .iter()
        .all(|r| !train.contains(&(&r.post_id, r.index))));
}

#[test]
fn same_seed_same_bytes() {
    assert_eq!(bytes(&build(7)), bytes(&build(7)));
}

#[test]
fn other_seed_keeps_positives_and_labels() {
    let a = build(7);
    let b = build(8);
    let positives = |d: &LabeledDataset| {
        let mut v: Vec<_> = d
            .rows()
            .filter(|r| r.label == 1)
            .map(|r| (r.post_id.clone(), r.index))
            .collect();
        v.sort();
        v
    };
    assert_eq!(positives(&a), positives(&b));
    assert_ne!(bytes(&a), bytes(&b));
}

#[test]
fn jsonl_round_trip() {
    let d = build(7);
    let back = LabeledDataset::read_jsonl(std::io::Cursor::new(bytes(&d)), 7).unwrap();
    assert_eq!(back, d);
}
