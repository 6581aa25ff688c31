//! Train the character n-gram baseline on the weak labels and use it as
//! the fallback behind the lexicon.

use risk_evidence::corpus::{load_corpus, Segmenter};
use risk_evidence::lexicon::{build_weak_labeled_dataset, DatasetOptions, RiskPhraseLexicon};
use risk_evidence::scoring::{
    train_baseline, BaselineRiskModel, LexiconBaselineScorer, TrainOptions,
};

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

    let trained = train_baseline(&dataset, &TrainOptions::default())?;
    for m in &trained.history {
        println!(
            "epoch {:>2}  train {:.3}  val {:.3}",
            m.epoch, m.train_accuracy, m.val_accuracy
        );
    }
    println!("best epoch {}", trained.best().epoch);

    let text = trained.model.to_text();
    let model = BaselineRiskModel::from_text(&text)?;
    println!(
        "model file: {} lines, {} n-grams",
        text.lines().count(),
        model.vocab_len()
    );

    let scorer = LexiconBaselineScorer::new(lexicon, Some(model));
    for s in [
        "I want to die",
        "nothing matters and I am done",
        "We had pizza tonight",
    ] {
        println!("{:.3}  {s}", scorer.score_one(s));
    }
    Ok(())
}
