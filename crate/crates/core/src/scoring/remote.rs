//! Blocking HTTP client for the model service.
//!
//! Every request and response body is a JSON object carrying `"v": 1`.
//! Score requests are split into batches of `batch_size` texts and up to
//! `max_in_flight` batches are sent concurrently; results are reassembled
//! in input order.

use std::collections::BTreeMap;
use std::time::Duration;

use reqwest::blocking::Client;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RiskScore, RiskScorer, ScoreError, SentimentScore, SentimentScorer};
use crate::generator::{GenerateError, SummaryGenerator, TermGenerator};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("request to {url} timed out")]
    Timeout { url: String },
    #[error("could not reach {url}: {message}")]
    Unreachable { url: String, message: String },
    #[error("{url} answered HTTP {status}: {body}")]
    Status {
        url: String,
        status: u16,
        body: String,
    },
    #[error("protocol mismatch from {url}: {message}")]
    Protocol { url: String, message: String },
}

impl TransportError {
    pub fn is_timeout(&self) -> bool {
        matches!(self, TransportError::Timeout { .. })
    }

    pub fn is_protocol(&self) -> bool {
        matches!(self, TransportError::Protocol { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteConfig {
    pub endpoint: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_ms() -> u64 {
    30_000
}

fn default_batch_size() -> usize {
    32
}

fn default_max_in_flight() -> usize {
    4
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            timeout_ms: default_timeout_ms(),
            batch_size: default_batch_size(),
            max_in_flight: default_max_in_flight(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Health {
    pub v: u32,
    #[serde(default)]
    pub models: BTreeMap<String, String>,
    #[serde(default)]
    pub config_hash: String,
}

#[derive(Serialize)]
struct TextsRequest<'a> {
    v: u32,
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct RiskResponse {
    v: u32,
    probs: Vec<f64>,
    #[serde(default)]
    truncated: Vec<bool>,
}

#[derive(Deserialize)]
struct SentimentResponse {
    v: u32,
    dists: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct PostsRequest<'a> {
    v: u32,
    posts_text: &'a str,
}

#[derive(Deserialize)]
struct TermsResponse {
    v: u32,
    raw_output: String,
}

#[derive(Deserialize)]
struct SummaryResponse {
    v: u32,
    summary: String,
}

#[derive(Debug, Clone)]
pub struct RemoteClient {
    config: RemoteConfig,
    http: Client,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Result<Self, TransportError> {
        let http = Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| TransportError::Unreachable {
                url: config.endpoint.clone(),
                message: e.to_string(),
            })?;
        Ok(Self { config, http })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.config.endpoint.trim_end_matches('/'), path)
    }

    fn classify(url: &str, e: reqwest::Error) -> TransportError {
        if e.is_timeout() {
            TransportError::Timeout { url: url.into() }
        } else if e.is_decode() || e.is_body() {
            TransportError::Protocol {
                url: url.into(),
                message: e.to_string(),
            }
        } else {
            TransportError::Unreachable {
                url: url.into(),
                message: e.to_string(),
            }
        }
    }

    fn decode<T: DeserializeOwned>(
        url: &str,
        resp: reqwest::blocking::Response,
    ) -> Result<T, TransportError> {
        let status = resp.status();
        let body = resp.text().map_err(|e| Self::classify(url, e))?;
        if !status.is_success() {
            return Err(TransportError::Status {
                url: url.into(),
                status: status.as_u16(),
                body,
            });
        }
        serde_json::from_str(&body).map_err(|e| TransportError::Protocol {
            url: url.into(),
            message: e.to_string(),
        })
    }

    fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp, TransportError> {
        let url = self.url(path);
        let resp = self
            .http
            .post(&url)
            .json(body)
            .send()
            .map_err(|e| Self::classify(&url, e))?;
        Self::decode(&url, resp)
    }

    fn check_version(&self, path: &str, v: u32) -> Result<(), TransportError> {
        if v == PROTOCOL_VERSION {
            Ok(())
        } else {
            Err(self.protocol(path, format!("unsupported protocol version {v}")))
        }
    }

    fn protocol(&self, path: &str, message: impl Into<String>) -> TransportError {
        TransportError::Protocol {
            url: self.url(path),
            message: message.into(),
        }
    }

    pub fn health(&self) -> Result<Health, TransportError> {
        let url = self.url("/health");
        let resp = self
            .http
            .get(&url)
            .send()
            .map_err(|e| Self::classify(&url, e))?;
        let health: Health = Self::decode(&url, resp)?;
        self.check_version("/health", health.v)?;
        Ok(health)
    }

    fn batched<T: Send>(
        &self,
        texts: &[&str],
        call: impl Fn(&[&str]) -> Result<Vec<T>, TransportError> + Sync,
    ) -> Result<Vec<T>, TransportError> {
        let batch = self.config.batch_size.max(1);
        let in_flight = self.config.max_in_flight.max(1);
        let chunks: Vec<&[&str]> = texts.chunks(batch).collect();
        let mut out = Vec::with_capacity(texts.len());
        for wave in chunks.chunks(in_flight) {
            let results: Vec<Result<Vec<T>, TransportError>> = std::thread::scope(|s| {
                let handles: Vec<_> = wave.iter().map(|c| s.spawn(|| call(c))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("remote batch worker panicked"))
                    .collect()
            });
            for r in results {
                out.extend(r?);
            }
        }
        Ok(out)
    }

    fn risk_batch(&self, texts: &[&str]) -> Result<Vec<RiskScore>, TransportError> {
        const PATH: &str = "/score/risk";
        let resp: RiskResponse = self.post(
            PATH,
            &TextsRequest {
                v: PROTOCOL_VERSION,
                texts,
            },
        )?;
        self.check_version(PATH, resp.v)?;
        if resp.probs.len() != texts.len() {
            return Err(self.protocol(
                PATH,
                format!(
                    "{} probabilities for {} texts",
                    resp.probs.len(),
                    texts.len()
                ),
            ));
        }
        let truncated = resp.truncated.iter().filter(|t| **t).count();
        if truncated > 0 {
            log::warn!(
                "risk service truncated {truncated} of {} texts",
                texts.len()
            );
        }
        resp.probs
            .into_iter()
            .map(|p| RiskScore::new(p).map_err(|e| self.protocol(PATH, e.to_string())))
            .collect()
    }

    fn sentiment_batch(&self, texts: &[&str]) -> Result<Vec<SentimentScore>, TransportError> {
        const PATH: &str = "/score/sentiment";
        let resp: SentimentResponse = self.post(
            PATH,
            &TextsRequest {
                v: PROTOCOL_VERSION,
                texts,
            },
        )?;
        self.check_version(PATH, resp.v)?;
        if resp.dists.len() != texts.len() {
            return Err(self.protocol(
                PATH,
                format!(
                    "{} distributions for {} texts",
                    resp.dists.len(),
                    texts.len()
                ),
            ));
        }
        resp.dists
            .into_iter()
            .map(|[n, u, p]| {
                SentimentScore::new(n, u, p).map_err(|e| self.protocol(PATH, e.to_string()))
            })
            .collect()
    }
}

impl RiskScorer for RemoteClient {
    fn score_risk(&self, texts: &[&str]) -> Result<Vec<RiskScore>, ScoreError> {
        Ok(self.batched(texts, |c| self.risk_batch(c))?)
    }
}

impl SentimentScorer for RemoteClient {
    fn score_sentiment(&self, texts: &[&str]) -> Result<Vec<SentimentScore>, ScoreError> {
        Ok(self.batched(texts, |c| self.sentiment_batch(c))?)
    }
}

impl TermGenerator for RemoteClient {
    fn generate_terms(&self, posts_text: &str) -> Result<String, GenerateError> {
        const PATH: &str = "/generate/terms";
        if posts_text.trim().is_empty() {
            return Err(GenerateError::EmptyInput);
        }
        let resp: TermsResponse = self.post(
            PATH,
            &PostsRequest {
                v: PROTOCOL_VERSION,
                posts_text,
            },
        )?;
        self.check_version(PATH, resp.v)?;
        Ok(resp.raw_output)
    }
}

impl SummaryGenerator for RemoteClient {
    fn generate_summary(&self, posts_text: &str) -> Result<String, GenerateError> {
        const PATH: &str = "/generate/summary";
        if posts_text.trim().is_empty() {
            return Err(GenerateError::EmptyInput);
        }
        let resp: SummaryResponse = self.post(
            PATH,
            &PostsRequest {
                v: PROTOCOL_VERSION,
                posts_text,
            },
        )?;
        self.check_version(PATH, resp.v)?;
        Ok(resp.summary)
    }
}
