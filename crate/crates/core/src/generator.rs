//! Text-generation boundary used by highlight stage 3 and the generative
//! summary part. Generators return raw text; all parsing happens here in
//! the library so unstable output formats can be tested offline.

use thiserror::Error;

use crate::scoring::TransportError;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generator input is empty")]
    EmptyInput,
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Produces free-form "risk phrases" output for a user's aggregated posts.
pub trait TermGenerator: Send + Sync {
    fn generate_terms(&self, posts_text: &str) -> Result<String, GenerateError>;
}

/// Produces a free-form summary of a user's aggregated posts.
pub trait SummaryGenerator: Send + Sync {
    fn generate_summary(&self, posts_text: &str) -> Result<String, GenerateError>;
}

/// Returns the same text for every request. Useful for examples and tests.
#[derive(Debug, Clone, Default)]
pub struct CannedGenerator {
    pub terms: String,
    pub summary: String,
}

impl CannedGenerator {
    pub fn with_terms(terms: impl Into<String>) -> Self {
        Self {
            terms: terms.into(),
            summary: String::new(),
        }
    }
}

impl TermGenerator for CannedGenerator {
    fn generate_terms(&self, posts_text: &str) -> Result<String, GenerateError> {
        if posts_text.trim().is_empty() {
            return Err(GenerateError::EmptyInput);
        }
        Ok(self.terms.clone())
    }
}

impl SummaryGenerator for CannedGenerator {
    fn generate_summary(&self, posts_text: &str) -> Result<String, GenerateError> {
        if posts_text.trim().is_empty() {
            return Err(GenerateError::EmptyInput);
        }
        Ok(self.summary.clone())
    }
}
