//! Highlight evaluation and corpus-level analyses.

mod analysis;
mod similarity;

pub use analysis::{
    precision_correlation_analysis, quartiles, ratio_stats_from_scored, risk_ratio_analysis,
    uniform_bin_edges, write_precision_csv, write_ratio_csv, LevelRatioStats, LevelSummary,
    PrecisionCorrelationRow, Quartiles, RatioAnalysis, SpanObservation, HIGH_PROBABILITY,
};
pub use similarity::{
    evaluate_highlights, greedy_similarity, similarity_tokens, Cosine, EmbeddingTable,
    HighlightEvaluation, OneHot, SimilarityReport, SpanPrecision, TokenEmbedder, TokenSimilarity,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("embedding provider failed: {0}")]
    Provider(String),
    #[error("no embedding for token {0:?}")]
    UnknownToken(String),
    #[error("bin edges must rise strictly from 0 to 1, got {0}")]
    BadBins(String),
    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
