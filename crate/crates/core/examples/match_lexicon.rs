//! Risk-phrase matching against the bundled lexicon, plus the summary
//! phrase table built from the same matcher.

use risk_evidence::lexicon::{PhraseMatcher, RiskPhraseLexicon};

fn main() {
    let lexicon = RiskPhraseLexicon::default();
    println!(
        "{} groups, {} phrases",
        lexicon.groups().len(),
        lexicon.phrases().count()
    );

    let sentences = [
        "I want to die",
        "I wanted to diet today",
        "Dying is the only way to make it better",
        "Honestly I DON\u{2019}T   want to live anymore",
        "they will kill myself hanging",
    ];
    for s in sentences {
        let hits = lexicon.match_risk_phrases(s);
        println!("{s:?}");
        if hits.is_empty() {
            println!("    no match");
        }
        for m in hits {
            println!(
                "    group {:>2} chars {}..{} {:?} (as {:?})",
                m.group_id, m.char_start, m.char_end, m.phrase, m.canonical
            );
        }
    }

    // the matcher works for any tagged phrase list
    let custom = PhraseMatcher::new([("end it".to_string(), 0), ("end it all".to_string(), 1)]);
    for m in custom.find_all("I just want to END it all.") {
        println!("custom tag {} -> {:?}", m.group_id, m.phrase);
    }
}
