//! Per-level ratio statistics and precision-bin tables, written as CSV to
//! stdout.

use risk_evidence::corpus::{load_corpus, Segmenter};
use risk_evidence::eval::{
    precision_correlation_analysis, risk_ratio_analysis, uniform_bin_edges, write_precision_csv,
    write_ratio_csv, SpanObservation,
};
use risk_evidence::lexicon::RiskPhraseLexicon;
use risk_evidence::scoring::{LexiconBaselineScorer, ValenceSentimentScorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/synthetic_corpus.jsonl"
    ))?;
    let risk = LexiconBaselineScorer::new(RiskPhraseLexicon::default(), None);
    let sentiment = ValenceSentimentScorer::default();

    let analysis = risk_ratio_analysis(&corpus, &Segmenter::new(), &risk, &sentiment, 0.5)?;
    write_ratio_csv(std::io::stdout(), &analysis)?;
    println!("excluded: {:?}\n", analysis.excluded_users);

    let spans: Vec<SpanObservation> = [
        (0.1, 0.3, 0.9),
        (0.4, 0.6, 0.5),
        (0.7, 0.95, 0.2),
        (0.95, 1.0, 0.97),
    ]
    .into_iter()
    .map(|(precision, p_risk, p_negative)| SpanObservation {
        precision,
        p_risk,
        p_negative,
    })
    .collect();
    let rows = precision_correlation_analysis(&spans, &uniform_bin_edges(4))?;
    write_precision_csv(std::io::stdout(), &rows)?;
    Ok(())
}
