//! TOML pipeline configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::highlight::{FillPolicy, HighlightConfig};
use crate::scoring::{RemoteConfig, DEFAULT_RISK_THRESHOLD};

/// Environment variable that overrides `[remote].endpoint`.
pub const ENDPOINT_ENV: &str = "RISK_EVIDENCE_ENDPOINT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    #[default]
    LexiconBaseline,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub risk_lexicon: Option<PathBuf>,
    pub summary_phrases: Option<PathBuf>,
    pub valence: Option<PathBuf>,
    /// Trained baseline model used by the lexicon-baseline scorer.
    pub model: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub scorer: ScorerKind,
    /// Use the remote service for highlight terms and generated summaries.
    pub generator: bool,
    pub remote: Option<RemoteConfig>,
    pub seed: u64,
    pub risk_threshold: f64,
    pub word_budget: usize,
    pub min_candidate_words: usize,
    pub fill_policy: FillPolicy,
    pub split_on_comma: bool,
    pub val_fraction: f64,
    pub balance_tolerance: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub precision_bins: usize,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            risk_lexicon: None,
            summary_phrases: None,
            valence: None,
            model: None,
            output_dir: PathBuf::from("out"),
            scorer: ScorerKind::LexiconBaseline,
            generator: false,
            remote: None,
            seed: 7,
            risk_threshold: DEFAULT_RISK_THRESHOLD,
            word_budget: 300,
            min_candidate_words: 3,
            fill_policy: FillPolicy::StopAtFirstOverflow,
            split_on_comma: false,
            val_fraction: 0.2,
            balance_tolerance: 1,
            epochs: 20,
            learning_rate: 0.5,
            precision_bins: 10,
            jobs: 1,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("failed to read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// Applies the endpoint environment override, if set.
    pub fn apply_env(&mut self) {
        if let Ok(endpoint) = std::env::var(ENDPOINT_ENV) {
            if !endpoint.trim().is_empty() {
                match &mut self.remote {
                    Some(r) => r.endpoint = endpoint,
                    None => self.remote = Some(RemoteConfig::new(endpoint)),
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.highlight().validate().map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&self.risk_threshold) {
            return Err(format!(
                "risk_threshold {} outside [0, 1]",
                self.risk_threshold
            ));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(format!("val_fraction {} outside (0, 1)", self.val_fraction));
        }
        if self.precision_bins == 0 {
            return Err("precision_bins must be positive".into());
        }
        if (self.scorer == ScorerKind::Remote || self.generator) && self.remote.is_none() {
            return Err(format!(
                "the remote scorer/generator needs a [remote] endpoint (or {ENDPOINT_ENV})"
            ));
        }
        if let Some(r) = &self.remote {
            if r.batch_size == 0 || r.max_in_flight == 0 || r.timeout_ms == 0 {
                return Err(
                    "remote batch_size, max_in_flight and timeout_ms must be positive".into(),
                );
            }
        }
        Ok(())
    }

    pub fn highlight(&self) -> HighlightConfig {
        HighlightConfig {
            risk_threshold: self.risk_threshold,
            word_budget: self.word_budget,
            min_candidate_words: self.min_candidate_words,
            fill_policy: self.fill_policy,
        }
    }

    /// Short hash of every setting that can change results. Output location
    /// and worker count are left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.jobs = 0;
        let canonical = serde_json::to_vec(&c).expect("config serialises");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..8])
    }
}
