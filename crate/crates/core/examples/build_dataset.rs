//! Weak-labeled sentence dataset from the bundled corpus.

use risk_evidence::corpus::{load_corpus, Segmenter};
use risk_evidence::lexicon::{build_weak_labeled_dataset, DatasetOptions, RiskPhraseLexicon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/synthetic_corpus.jsonl"
    ))?;
    let lexicon = RiskPhraseLexicon::default();

    let dataset = build_weak_labeled_dataset(
        &corpus,
        &lexicon,
        &Segmenter::new(),
        &DatasetOptions::default(),
    )?;
    let (train, val) = (dataset.train_counts(), dataset.val_counts());
    println!("train {} pos / {} neg", train.positive, train.negative);
    println!("val   {} pos / {} neg", val.positive, val.negative);

    for row in dataset.val.iter().take(6) {
        println!("  [{}] {}", row.label, row.text);
    }

    let mut out = Vec::new();
    dataset.write_jsonl(&mut out)?;
    println!("{} bytes of JSONL", out.len());
    Ok(())
}
