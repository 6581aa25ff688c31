//! Three-stage highlight selection for one user, with a canned term
//! generator standing in for the model service.

use risk_evidence::corpus::{Post, RiskLevel, UserTimeline};
use risk_evidence::generator::CannedGenerator;
use risk_evidence::highlight::HighlightConfig;
use risk_evidence::lexicon::{RiskPhraseLexicon, SummaryPhraseTable};
use risk_evidence::pipeline::Pipeline;
use risk_evidence::scoring::{LexiconBaselineScorer, ValenceSentimentScorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let timeline = UserTimeline {
        user_id: "demo".into(),
        expert_level: RiskLevel::High,
        posts: vec![Post {
            post_id: "p1".into(),
            user_id: "demo".into(),
            text: "I want to die. Everything feels empty and hopeless. \
                   Yesterday we walked around the whole town looking at old shops and houses. \
                   I keep thinking about the bridge. My cat is cute."
                .into(),
            timestamp: None,
        }],
    };

    let risk = LexiconBaselineScorer::new(RiskPhraseLexicon::default(), None);
    let sentiment = ValenceSentimentScorer::default();
    let table = SummaryPhraseTable::default();
    let terms = CannedGenerator::with_terms("1. *thinking about the bridge*\n2. want to die");

    let mut pipeline = Pipeline::new(&risk, &sentiment, &table);
    pipeline.highlight = HighlightConfig {
        word_budget: 20,
        ..HighlightConfig::default()
    };
    pipeline.terms = Some(&terms);

    let report = pipeline.run_user(&timeline)?;
    for s in &report.scored {
        println!(
            "p_risk {:.2}  p_neg {:.2}  {}",
            s.risk.p_risk, s.sentiment.p_negative, s.sentence.text
        );
    }
    let set = &report.highlights.set;
    println!(
        "\nhighlights ({} of {} words):",
        set.total_words, pipeline.highlight.word_budget
    );
    for e in &set.entries {
        println!(
            "  {:<9} {}",
            e.provenance.as_str(),
            report.scored[e.position].sentence.text
        );
    }
    Ok(())
}
