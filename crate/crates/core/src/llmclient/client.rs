use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::cache::{CacheEntry, ResponseCache};
use super::LlmError;

pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeSettings {
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
}

impl Default for DecodeSettings {
    fn default() -> Self {
        DecodeSettings { temperature: 0.0, max_tokens: None, top_p: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub settings: DecodeSettings,
}

impl CompletionRequest {
    pub fn new(model: impl Into<String>, prompt: impl Into<String>, settings: DecodeSettings) -> Self {
        CompletionRequest { model: model.into(), prompt: prompt.into(), settings }
    }

    /// Hex SHA-256 of the request's compact JSON form; the cache key.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("requests serialize");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
    /// Whatever the provider reported besides the text (ids, usage, ...).
    pub provider: Value,
    /// Seconds since the Unix epoch when the response was received.
    pub timestamp: u64,
}

/// Anything that can answer a chat completion.
pub trait CompletionProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Always query the provider; the cache is neither read nor written.
    Live,
    /// Serve only from the cache; never touches the network.
    Replay,
    /// Serve cache hits, query the provider on a miss and store the result.
    Record,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Live => "live",
            Mode::Replay => "replay",
            Mode::Record => "record",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "live" => Ok(Mode::Live),
            "replay" => Ok(Mode::Replay),
            "record" => Ok(Mode::Record),
            other => Err(format!("unknown mode {other:?} (expected live, replay or record)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 4, initial_backoff: Duration::from_millis(500) }
    }
}

/// Endpoint settings for an OpenAI-compatible chat completion API.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub base_url: String,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub api_key: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_model() -> String {
    DEFAULT_MODEL.to_string()
}

fn default_timeout() -> u64 {
    120
}

impl EndpointConfig {
    /// Reads the optional TOML file, then applies `EMOSET_LLM_BASE_URL`,
    /// `EMOSET_LLM_MODEL` and `EMOSET_LLM_API_KEY`. Returns `None` when no
    /// base URL is configured anywhere.
    pub fn load(path: Option<&Path>) -> Result<Option<Self>, LlmError> {
        Self::load_with(path, |k| std::env::var(k).ok())
    }

    pub fn load_with<F>(path: Option<&Path>, env: F) -> Result<Option<Self>, LlmError>
    where
        F: Fn(&str) -> Option<String>,
    {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| LlmError::Io { path: p.to_path_buf(), source })?;
                Some(toml::from_str::<EndpointConfig>(&text).map_err(|e| LlmError::Config(e.to_string()))?)
            }
            None => None,
        };
        if let Some(url) = env("EMOSET_LLM_BASE_URL") {
            match config.as_mut() {
                Some(c) => c.base_url = url,
                None => {
                    config = Some(EndpointConfig {
                        base_url: url,
                        model: default_model(),
                        api_key: None,
                        timeout_secs: default_timeout(),
                    })
                }
            }
        }
        if let Some(c) = config.as_mut() {
            if let Some(model) = env("EMOSET_LLM_MODEL") {
                c.model = model;
            }
            if let Some(key) = env("EMOSET_LLM_API_KEY") {
                c.api_key = Some(key);
            }
        }
        Ok(config)
    }
}

/// Plain `POST {base_url}/chat/completions` provider.
pub struct HttpProvider {
    config: EndpointConfig,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpProvider { config, agent }
    }
}

impl CompletionProvider for HttpProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut body = json!({
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.settings.temperature,
        });
        if let Some(m) = request.settings.max_tokens {
            body["max_tokens"] = json!(m);
        }
        if let Some(p) = request.settings.top_p {
            body["top_p"] = json!(p);
        }
        let mut call = self.agent.post(&url);
        if let Some(key) = &self.config.api_key {
            call = call.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = call.header("Content-Type", "application/json").send(body.to_string()).map_err(|e| LlmError::Upstream {
            status: None,
            message: e.to_string(),
            retryable: true,
        })?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| LlmError::Upstream {
            status: Some(status),
            message: e.to_string(),
            retryable: true,
        })?;
        if !(200..300).contains(&status) {
            return Err(LlmError::Upstream {
                status: Some(status),
                message: text.chars().take(500).collect(),
                retryable: status == 429 || status >= 500,
            });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| LlmError::Upstream {
            status: Some(status),
            message: format!("invalid JSON body: {e}"),
            retryable: false,
        })?;
        let content = value["choices"][0]["message"]["content"].as_str().ok_or_else(|| LlmError::Upstream {
            status: Some(status),
            message: "response has no choices[0].message.content".into(),
            retryable: false,
        })?;
        Ok(CompletionResponse {
            text: content.to_string(),
            provider: json!({"id": value["id"], "model": value["model"], "usage": value["usage"]}),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        })
    }
}

/// Mode-aware front end over a cache and an optional provider.
pub struct LlmClient {
    mode: Mode,
    cache: Option<ResponseCache>,
    provider: Option<Box<dyn CompletionProvider>>,
    retry: RetryPolicy,
    concurrency: usize,
}

impl LlmClient {
    pub fn replay(cache: ResponseCache) -> Self {
        Self::build(Mode::Replay, Some(cache), None)
    }

    pub fn record(cache: ResponseCache, provider: Box<dyn CompletionProvider>) -> Self {
        Self::build(Mode::Record, Some(cache), Some(provider))
    }

    pub fn live(provider: Box<dyn CompletionProvider>) -> Self {
        Self::build(Mode::Live, None, Some(provider))
    }

    fn build(mode: Mode, cache: Option<ResponseCache>, provider: Option<Box<dyn CompletionProvider>>) -> Self {
        LlmClient { mode, cache, provider, retry: RetryPolicy::default(), concurrency: 4 }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Caps the number of requests in flight in [`LlmClient::complete_many`].
    pub fn with_concurrency(mut self, workers: usize) -> Self {
        self.concurrency = workers.max(1);
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, LlmError> {
        let digest = request.digest();
        if self.mode != Mode::Live {
            let cache = self.cache.as_ref().expect("replay and record clients hold a cache");
            if let Some(entry) = cache.get(&digest)? {
                log_event(self.mode, &digest, "hit", None);
                return Ok(entry.response);
            }
            if self.mode == Mode::Replay {
                log_event(self.mode, &digest, "miss", None);
                return Err(LlmError::CacheMiss(digest));
            }
        }
        let provider = self.provider.as_ref().ok_or(LlmError::NotConfigured(self.mode.name()))?;
        let response = self.with_retries(&digest, || provider.complete(request))?;
        log_event(self.mode, &digest, "fetched", Some(&response));
        if self.mode == Mode::Record {
            let cache = self.cache.as_ref().expect("record clients hold a cache");
            cache.put(&CacheEntry { digest, request: request.clone(), response: response.clone() })?;
        }
        Ok(response)
    }

    fn with_retries<F>(&self, digest: &str, mut call: F) -> Result<CompletionResponse, LlmError>
    where
        F: FnMut() -> Result<CompletionResponse, LlmError>,
    {
        let mut backoff = self.retry.initial_backoff;
        let mut attempt = 1;
        loop {
            match call() {
                Err(LlmError::Upstream { retryable: true, ref message, status })
                    if attempt < self.retry.max_attempts =>
                {
                    log::warn!(
                        "{}",
                        json!({"event": "retry", "digest": digest, "attempt": attempt, "status": status, "error": message})
                    );
                    std::thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    /// Completes every request with at most the configured number of
    /// workers; results keep request order.
    pub fn complete_many(&self, requests: &[CompletionRequest]) -> Vec<Result<CompletionResponse, LlmError>> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<CompletionResponse, LlmError>>>> =
            Mutex::new((0..requests.len()).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..self.concurrency.min(requests.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= requests.len() {
                        break;
                    }
                    let result = self.complete(&requests[i]);
                    slots.lock().expect("no worker panics while holding the lock")[i] = Some(result);
                });
            }
        });
        slots.into_inner().expect("workers finished").into_iter().map(|r| r.expect("every slot filled")).collect()
    }
}

fn log_event(mode: Mode, digest: &str, cache: &str, response: Option<&CompletionResponse>) {
    let mut line = json!({"event": "completion", "mode": mode.name(), "digest": digest, "cache": cache});
    if let Some(r) = response {
        line["chars"] = json!(r.text.chars().count());
        line["provider"] = r.provider.clone();
    }
    log::info!("{line}");
}
