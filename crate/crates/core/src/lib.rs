//! Set-based evaluation of open-vocabulary emotion labels.
//!
//! Labels are mapped to group IDs by a [`grouping::GroupingStrategy`]
//! (word forms, synonyms, emotion-wheel projections or a cached partition),
//! then scored per sample with set precision, recall and F.

pub mod cli;
pub mod corpus;
pub mod grouping;
pub mod llmclient;
pub mod metrics;
pub mod taxonomy;

mod fixed;
pub mod par;

pub use par::Execution;
