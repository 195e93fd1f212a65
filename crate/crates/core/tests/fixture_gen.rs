//! Regenerates the replay cache under `fixtures/llm_cache` from scripted
//! responses. Run with `cargo test --test fixture_gen -- --ignored`.

use std::collections::BTreeMap;
use std::path::Path;

use emoset::llmclient::{
    render_prompt, CompletionProvider, CompletionRequest, CompletionResponse, LlmClient, LlmError, ResponseCache,
    DecodeSettings, DEFAULT_MODEL,
};

struct Scripted(BTreeMap<String, String>);

impl CompletionProvider for Scripted {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        let text = self.0.get(&request.prompt).unwrap_or_else(|| panic!("no script for {:?}", request.prompt));
        Ok(CompletionResponse { text: text.clone(), provider: serde_json::json!({"scripted": true}), timestamp: 0 })
    }
}

fn prompt(template: &str, slot: &str, value: &str) -> String {
    render_prompt(template, &BTreeMap::from([(slot.to_string(), value.to_string())])).unwrap()
}

#[test]
#[ignore]
fn regenerate_llm_fixtures() {
    let table = |word: &str, syns: &str| format!("| Word | Synonyms |\n|------|----------|\n| {word} | {syns} |");
    let script = BTreeMap::from([
        (prompt("synonyms", "words", "happy"), table("happy", "joyful, cheerful, content, delighted, glad")),
        (prompt("synonyms", "words", "sad"), table("sad", "unhappy, sorrowful, downcast, blue")),
        (prompt("synonyms", "words", "nervous"), table("nervous", "anxious, tense, jittery / on edge")),
        (prompt("synonyms", "words", "calm"), "Sorry, I am not able to help with that request.".to_string()),
        (prompt("forms", "word", "happy"), "[happiness, happily, happier, happiest]".to_string()),
        (prompt("forms", "word", "worried"), "Here are the forms: [worry, worrying, worriedly]".to_string()),
        (
            prompt("grouping", "labels", "cheerful, happy, joyful, nervous, sad, sorrowful, worried"),
            "[[happy, joyful, cheerful], [sad, sorrowful], [nervous, worried]]".to_string(),
        ),
    ]);
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/llm_cache");
    let _ = std::fs::remove_dir_all(&dir);
    let client = LlmClient::record(ResponseCache::new(&dir), Box::new(Scripted(script.clone())));
    for p in script.keys() {
        client.complete(&CompletionRequest::new(DEFAULT_MODEL, p.clone(), DecodeSettings::default())).unwrap();
    }
}
