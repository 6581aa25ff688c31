//! The whole CLI flow in one process: segment, dataset, train, score,
//! highlight, summarise, evaluate and analyse into a temporary directory.

use risk_evidence::cli::run_command;

fn main() {
    let out = std::env::temp_dir().join("risk-evidence-example");
    let out = out.to_str().expect("utf-8 temp path");
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/data/synthetic_corpus.jsonl");
    let model = format!("{out}/baseline.model");
    let pred = format!("{out}/highlights.jsonl");

    let steps: Vec<Vec<&str>> = vec![
        vec!["segment", "--corpus", corpus],
        vec!["build-dataset", "--corpus", corpus],
        vec!["train-baseline"],
        vec!["score", "--corpus", corpus, "--model", &model],
        vec![
            "highlight",
            "--corpus",
            corpus,
            "--model",
            &model,
            "--word-budget",
            "40",
        ],
        vec!["summarize", "--corpus", corpus, "--model", &model],
        vec!["evaluate", "--pred", &pred, "--gold", &pred],
        vec!["analyze", "--corpus", corpus, "--model", &model],
    ];
    for step in steps {
        let argv = std::iter::once("risk-evidence")
            .chain(step.iter().copied())
            .chain(["--out", out]);
        println!("$ risk-evidence {}", step.join(" "));
        let code = run_command(argv);
        if code != 0 {
            std::process::exit(code);
        }
    }
}
