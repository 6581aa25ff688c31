//! Sentence-level evidence extraction for suicide-risk assessment of user
//! post timelines.
//!
//! The flow for one user is: [`corpus`] splits posts into sentences,
//! [`scoring`] attaches risk and sentiment probabilities, [`highlight`]
//! picks a word-budgeted set of evidence sentences and [`summary`] writes a
//! short templated summary. [`eval`] scores highlights against gold spans.
//!
//! ```
//! use risk_evidence::lexicon::RiskPhraseLexicon;
//!
//! let lexicon = RiskPhraseLexicon::default();
//! let hits = lexicon.match_risk_phrases("I just want to die today");
//! assert_eq!(hits.len(), 1);
//! ```

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod generator;
pub mod highlight;
pub mod lexicon;
pub mod pipeline;
pub mod scoring;
pub mod summary;
