use std::collections::BTreeMap;

use serde::Serialize;

use super::client::{CompletionRequest, DecodeSettings, LlmClient};
use super::parse::{parse_label_list, parse_partition, parse_table_members};
use super::templates::render_prompt;
use super::LlmError;
use crate::taxonomy::{Label, MapSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionKind {
    Synonyms,
    Forms,
}

impl ExpansionKind {
    fn request(self, label: &Label, model: &str, settings: &DecodeSettings) -> Result<CompletionRequest, LlmError> {
        let (name, slot) = match self {
            ExpansionKind::Synonyms => ("synonyms", "words"),
            ExpansionKind::Forms => ("forms", "word"),
        };
        let slots = BTreeMap::from([(slot.to_string(), label.as_str().to_string())]);
        Ok(CompletionRequest::new(model, render_prompt(name, &slots)?, settings.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFailure {
    pub label: Label,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpansionOutcome {
    pub map: MapSource,
    pub failures: Vec<ExpansionFailure>,
}

/// Asks for the synonyms or word forms of every label and collects a map
/// source keyed by label. A failed label is reported and skipped.
pub fn expand_labels(
    labels: &[Label],
    kind: ExpansionKind,
    client: &LlmClient,
    model: &str,
    settings: &DecodeSettings,
) -> ExpansionOutcome {
    let mut outcome = ExpansionOutcome::default();
    let mut pending = Vec::new();
    for label in labels {
        match kind.request(label, model, settings) {
            Ok(r) => pending.push((label, r)),
            Err(e) => outcome.failures.push(ExpansionFailure { label: label.clone(), error: e.to_string() }),
        }
    }
    let requests: Vec<CompletionRequest> = pending.iter().map(|(_, r)| r.clone()).collect();
    for ((label, _), result) in pending.iter().zip(client.complete_many(&requests)) {
        let parsed = result.and_then(|resp| match kind {
            ExpansionKind::Synonyms => parse_table_members(&resp.text),
            ExpansionKind::Forms => parse_label_list(&resp.text),
        });
        match parsed {
            Ok(members) => outcome.map.insert((*label).clone(), members),
            Err(e) => outcome.failures.push(ExpansionFailure { label: (*label).clone(), error: e.to_string() }),
        }
    }
    outcome.failures.sort_by(|a, b| a.label.cmp(&b.label));
    outcome
}

/// Asks for a grouping of `labels` and returns the parsed groups, ready for
/// a partition file.
pub fn group_labels(
    labels: &[Label],
    client: &LlmClient,
    model: &str,
    settings: &DecodeSettings,
) -> Result<Vec<Vec<Label>>, LlmError> {
    let joined: Vec<&str> = labels.iter().map(Label::as_str).collect();
    let slots = BTreeMap::from([("labels".to_string(), joined.join(", "))]);
    let request = CompletionRequest::new(model, render_prompt("grouping", &slots)?, settings.clone());
    parse_partition(&client.complete(&request)?.text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llmclient::{CacheEntry, CompletionResponse, ResponseCache};

    fn seed(cache: &ResponseCache, request: CompletionRequest, text: &str) {
        let response = CompletionResponse { text: text.into(), provider: serde_json::json!({}), timestamp: 0 };
        cache.put(&CacheEntry { digest: request.digest(), request, response }).unwrap();
    }

    #[test]
    fn failures_are_isolated() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let s = DecodeSettings::default();
        let happy = Label::new("happy").unwrap();
        let sad = Label::new("sad").unwrap();
        let odd = Label::new("odd").unwrap();
        seed(&cache, ExpansionKind::Forms.request(&happy, "m", &s).unwrap(), "[happily, happiness]");
        seed(&cache, ExpansionKind::Forms.request(&odd, "m", &s).unwrap(), "I cannot help with that.");
        let client = LlmClient::replay(cache);
        let out = expand_labels(&[happy.clone(), sad.clone(), odd.clone()], ExpansionKind::Forms, &client, "m", &s);
        let members = out.map.entries().get(&happy).unwrap();
        assert!(members.contains(&happy) && members.len() == 3);
        let failed: Vec<&Label> = out.failures.iter().map(|f| &f.label).collect();
        assert_eq!(failed, vec![&odd, &sad]);
        assert!(out.failures[1].error.contains("no cached response"));
    }

    #[test]
    fn empty_input() {
        let dir = tempfile::tempdir().unwrap();
        let client = LlmClient::replay(ResponseCache::new(dir.path()));
        let out = expand_labels(&[], ExpansionKind::Synonyms, &client, "m", &DecodeSettings::default());
        assert!(out.map.is_empty() && out.failures.is_empty());
    }
}
