//! Talks to a running model service.
//!
//!     cargo run --example remote_client -- http://127.0.0.1:8000
//!
//! Without a reachable service this reports the transport error and exits 2,
//! the same code the CLI uses.

use risk_evidence::generator::TermGenerator;
use risk_evidence::highlight::phrase_candidates;
use risk_evidence::scoring::{RemoteClient, RemoteConfig, RiskScorer, SentimentScorer};

fn main() {
    let endpoint = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "http://127.0.0.1:8000".into());
    let client = RemoteClient::new(RemoteConfig {
        timeout_ms: 5_000,
        batch_size: 2,
        ..RemoteConfig::new(endpoint)
    })
    .expect("http client");

    if let Err(e) = run(&client) {
        eprintln!("{e}");
        std::process::exit(2);
    }
}

fn run(client: &RemoteClient) -> Result<(), Box<dyn std::error::Error>> {
    let health = client.health()?;
    println!("service v{} models {:?}", health.v, health.models);

    let texts = [
        "I want to die.",
        "Lunch was great.",
        "Nobody would notice if I was gone.",
    ];
    let risk = client.score_risk(&texts)?;
    let sentiment = client.score_sentiment(&texts)?;
    for ((t, r), s) in texts.iter().zip(&risk).zip(&sentiment) {
        println!("{:.3} {:.3} {t}", r.p_risk, s.p_negative);
    }

    let raw = client.generate_terms(&texts.join("\n"))?;
    println!("terms: {:?}", phrase_candidates(&raw, 3).candidates);
    Ok(())
}
