//! Chat-completion client with a content-addressed response cache, the
//! prompt template registry, and parsers for list, partition and table
//! responses.

mod cache;
mod client;
mod expand;
mod parse;
mod templates;

pub use cache::{CacheEntry, ResponseCache};
pub use client::{
    CompletionProvider, CompletionRequest, CompletionResponse, DecodeSettings, EndpointConfig, HttpProvider,
    LlmClient, Mode, RetryPolicy, DEFAULT_MODEL,
};
pub use expand::{expand_labels, group_labels, ExpansionFailure, ExpansionKind, ExpansionOutcome};
pub use parse::{format_label_list, parse_label_list, parse_partition, parse_table_members, partition_document};
pub use templates::{render_prompt, slot_names, template, templates, ExpectedOutput, PromptTemplate};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("template {template:?} has unbound slots: {}", missing.join(", "))]
    MissingSlots { template: String, missing: Vec<String> },
    #[error("template {template:?} has no slot named {slot:?}")]
    UnknownSlot { template: String, slot: String },
    #[error("no cached response for digest {0}")]
    CacheMiss(String),
    #[error("cache file {path}: {message}")]
    CacheFormat { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} mode needs an endpoint configuration")]
    NotConfigured(&'static str),
    #[error("endpoint config: {0}")]
    Config(String),
    #[error("upstream request failed{}: {message}", status.map(|s| format!(" with status {s}")).unwrap_or_default())]
    Upstream { status: Option<u16>, message: String, retryable: bool },
    #[error("could not parse response ({message}): {raw:?}")]
    Parse { message: String, raw: String },
}

impl LlmError {
    fn parse(message: impl Into<String>, raw: &str) -> Self {
        LlmError::Parse { message: message.into(), raw: raw.to_string() }
    }
}
