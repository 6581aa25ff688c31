//! Four-part summaries for every labelled user in the bundled corpus.

use risk_evidence::corpus::{load_corpus, RiskLevel};
use risk_evidence::generator::CannedGenerator;
use risk_evidence::lexicon::{RiskPhraseLexicon, SummaryPhraseTable};
use risk_evidence::pipeline::Pipeline;
use risk_evidence::scoring::{LexiconBaselineScorer, ValenceSentimentScorer};
use risk_evidence::summary::{frequency_summary, opening_summary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for level in [RiskLevel::Low, RiskLevel::Moderate, RiskLevel::High] {
        println!("{}", opening_summary(level)?);
    }
    for n in [0, 1, 2, 5] {
        println!("{n}: {:?}", frequency_summary(n));
    }
    println!();

    let corpus = load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/synthetic_corpus.jsonl"
    ))?;
    let lexicon = RiskPhraseLexicon::default();
    let table = SummaryPhraseTable::default_with(&lexicon);
    let risk = LexiconBaselineScorer::new(lexicon, None);
    let sentiment = ValenceSentimentScorer::default();
    let generator = CannedGenerator {
        summary: "(generated part would go here)".into(),
        ..CannedGenerator::default()
    };
    let mut pipeline = Pipeline::new(&risk, &sentiment, &table);
    pipeline.summaries = Some(&generator);

    for user in corpus
        .iter()
        .filter(|u| u.expert_level != RiskLevel::Unknown)
    {
        let scored = pipeline.score(user)?;
        let summary = pipeline.summarize(user, &scored)?;
        println!("{}: {}\n", user.user_id, summary.summary);
    }
    Ok(())
}
