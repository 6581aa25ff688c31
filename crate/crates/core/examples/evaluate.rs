//! Greedy token-similarity evaluation of predicted highlights against gold
//! spans, with exact matching and with a small embedding table.

use std::collections::BTreeMap;

use risk_evidence::eval::{
    evaluate_highlights, greedy_similarity, similarity_tokens, Cosine, EmbeddingTable, OneHot,
};

const VECTORS: &str = "\
die 1 0 0
death 0.9 0.1 0
want 0 1 0
wish 0.1 0.9 0
i 0 0 1
to 0 0.2 0.8
";

fn spans(pairs: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
    pairs
        .iter()
        .map(|(u, s)| (u.to_string(), s.iter().map(|x| x.to_string()).collect()))
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = similarity_tokens("I want to die.");
    let b = similarity_tokens("I wish death");
    let exact = greedy_similarity(&a, &b, &OneHot)?;
    let table = EmbeddingTable::read(VECTORS.as_bytes())?;
    let soft = greedy_similarity(&a, &b, &Cosine(table))?;
    println!(
        "exact:  p {:.3} r {:.3} f1 {:.3}",
        exact.precision, exact.recall, exact.f1
    );
    println!(
        "cosine: p {:.3} r {:.3} f1 {:.3}",
        soft.precision, soft.recall, soft.f1
    );

    let gold = spans(&[
        ("u1", &["I want to die", "nobody would miss me"]),
        ("u2", &["I cut myself again"]),
    ]);
    let pred = spans(&[
        ("u1", &["I want to die tonight", "the game was fun"]),
        ("u2", &[]),
    ]);
    let r = evaluate_highlights(&pred, &gold, &OneHot)?;
    println!(
        "recall    span mean {:?}  user mean {:?}",
        r.recall_span_mean, r.recall_user_mean
    );
    println!(
        "precision span mean {:?}  user mean {:?}",
        r.precision_span_mean, r.precision_user_mean
    );
    println!(
        "users without predictions: {:?}",
        r.users_without_predictions
    );
    for s in &r.span_precision {
        println!(
            "  {} span {} precision {:.3}",
            s.user_id, s.span, s.precision
        );
    }
    Ok(())
}
