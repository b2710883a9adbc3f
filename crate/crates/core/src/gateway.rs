//! Dispatching prompt bundles to a chat-completion backend.
//!
//! Two backends share one interface: an OpenAI-style HTTP endpoint
//! (`POST {endpoint_url}/chat/completions`, bearer credential from the
//! `GICL_API_KEY` environment variable when present) and a deterministic
//! local mock that answers from the bundle's own audit metadata. The HTTP
//! path retries timeouts, 429s, and 5xx responses on a configurable
//! backoff schedule; the request body is byte-stable for a fixed bundle
//! and config so runs can be recorded and replayed.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{cosine, edge_embedding};
use crate::dataset::TextAttributedGraph;
use crate::prompt::{PromptBundle, Subject, Task};

pub const API_KEY_ENV: &str = "GICL_API_KEY";

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("retries exhausted after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("backend returned HTTP {status}: {snippet}")]
    HttpStatus { status: u16, snippet: String },
    #[error("malformed completion body: {0}")]
    MalformedBody(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("invalid backend config: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mock,
    Http,
}

/// Backend connection and retry settings. Durations are milliseconds so
/// the config serializes plainly into run summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub retry_backoff_ms: Vec<u64>,
    /// Ceiling on concurrent in-flight HTTP requests; `None` leaves it to
    /// the caller's worker pool.
    pub max_in_flight: Option<usize>,
}

impl BackendConfig {
    pub fn mock() -> Self {
        Self {
            kind: BackendKind::Mock,
            endpoint_url: String::new(),
            model_name: "mock".to_string(),
            temperature: 0.0,
            max_output_tokens: 512,
            timeout_ms: 30_000,
            max_retries: 3,
            retry_backoff_ms: vec![1_000, 2_000, 4_000],
            max_in_flight: None,
        }
    }

    pub fn http(endpoint_url: &str, model_name: &str) -> Self {
        Self {
            kind: BackendKind::Http,
            endpoint_url: endpoint_url.to_string(),
            model_name: model_name.to_string(),
            ..Self::mock()
        }
    }

    fn validate(&self) -> Result<(), GatewayError> {
        if self.temperature < 0.0 {
            return Err(GatewayError::BadConfig(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.kind == BackendKind::Http && self.endpoint_url.is_empty() {
            return Err(GatewayError::BadConfig("http backend needs an endpoint url".into()));
        }
        Ok(())
    }
}

/// A raw completion plus bookkeeping.
#[derive(Debug, Clone)]
pub struct RawResponse {
    pub text: String,
    pub latency: Duration,
    pub attempt_count: u32,
    pub backend_id: String,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

/// The exact JSON body sent for a bundle: system message, user message,
/// temperature, max_tokens, in fixed field order.
pub fn request_body(cfg: &BackendConfig, bundle: &PromptBundle) -> String {
    let request = ChatRequest {
        model: &cfg.model_name,
        messages: vec![
            ChatMessage {
                role: "system",
                content: &bundle.system_text,
            },
            ChatMessage {
                role: "user",
                content: &bundle.user_text,
            },
        ],
        temperature: cfg.temperature,
        max_tokens: cfg.max_output_tokens,
    };
    serde_json::to_string(&request).expect("request serializes")
}

/// Shared handle to one backend. Cloneable across worker threads via
/// reference; all state is internally synchronized.
pub struct Gateway {
    cfg: BackendConfig,
    client: Option<reqwest::blocking::Client>,
    credential: Option<String>,
    gate: Option<Semaphore>,
}

impl Gateway {
    pub fn new(cfg: BackendConfig) -> Result<Self, GatewayError> {
        cfg.validate()?;
        let client = match cfg.kind {
            BackendKind::Mock => None,
            BackendKind::Http => Some(
                reqwest::blocking::Client::builder()
                    .timeout(Duration::from_millis(cfg.timeout_ms))
                    .build()
                    .map_err(|e| GatewayError::Transport(e.to_string()))?,
            ),
        };
        let gate = cfg.max_in_flight.map(Semaphore::new);
        Ok(Self {
            credential: std::env::var(API_KEY_ENV).ok(),
            cfg,
            client,
            gate,
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.cfg
    }

    /// Send a bundle and return the first choice's text. Transient
    /// failures are retried per the backoff schedule; every other failure
    /// maps to a distinct error for the caller to record.
    pub fn complete(
        &self,
        bundle: &PromptBundle,
        g: &TextAttributedGraph,
    ) -> Result<RawResponse, GatewayError> {
        match self.cfg.kind {
            BackendKind::Mock => Ok(mock_complete(bundle, g)),
            BackendKind::Http => {
                let _permit = self.gate.as_ref().map(Semaphore::acquire);
                self.complete_http(bundle)
            }
        }
    }

    fn complete_http(&self, bundle: &PromptBundle) -> Result<RawResponse, GatewayError> {
        let client = self.client.as_ref().expect("http gateway has a client");
        let url = format!(
            "{}/chat/completions",
            self.cfg.endpoint_url.trim_end_matches('/')
        );
        let body = request_body(&self.cfg, bundle);
        let start = Instant::now();
        let mut attempts = 0u32;
        let mut last_failure;

        loop {
            attempts += 1;
            let mut request = client
                .post(&url)
                .header("Content-Type", "application/json")
                .body(body.clone());
            if let Some(key) = &self.credential {
                request = request.header("Authorization", format!("Bearer {key}"));
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status().as_u16();
                    let text = response.text().unwrap_or_default();
                    if status == 200 {
                        let parsed: ChatResponse = serde_json::from_str(&text)
                            .map_err(|e| GatewayError::MalformedBody(e.to_string()))?;
                        let content = parsed
                            .choices
                            .into_iter()
                            .next()
                            .map(|c| c.message.content)
                            .ok_or_else(|| GatewayError::MalformedBody("no choices".into()))?;
                        return Ok(RawResponse {
                            text: content,
                            latency: start.elapsed(),
                            attempt_count: attempts,
                            backend_id: self.cfg.model_name.clone(),
                        });
                    }
                    let snippet: String = text.chars().take(200).collect();
                    if status == 429 || (500..600).contains(&status) {
                        last_failure = format!("HTTP {status}");
                    } else {
                        return Err(GatewayError::HttpStatus { status, snippet });
                    }
                }
                Err(e) if e.is_timeout() || e.is_connect() => {
                    last_failure = e.to_string();
                }
                Err(e) => return Err(GatewayError::Transport(e.to_string())),
            }
            if attempts > self.cfg.max_retries {
                return Err(GatewayError::RetriesExhausted {
                    attempts,
                    last: last_failure,
                });
            }
            let schedule = &self.cfg.retry_backoff_ms;
            let pause = if schedule.is_empty() {
                0
            } else {
                schedule[(attempts as usize - 1).min(schedule.len() - 1)]
            };
            std::thread::sleep(Duration::from_millis(pause));
        }
    }
}

/// Deterministic local backend, a pure function of `(bundle, graph)`.
///
/// Classification answers with the plurality label among the labels the
/// prompt actually showed (demonstrations or primed neighbors), breaking
/// ties toward vocabulary order and falling back to the first vocabulary
/// label when the prompt showed none. Link prediction answers "1" when
/// the anchor pair's edge embedding sits closer to the mean connected
/// demonstration edge than to the mean disconnected one.
pub fn mock_complete(bundle: &PromptBundle, g: &TextAttributedGraph) -> RawResponse {
    let start = Instant::now();
    let text = match bundle.audit.task {
        Task::Nc => {
            let vocab = g.label_vocabulary();
            let winner = vocab
                .iter()
                .map(|label| {
                    bundle
                        .audit
                        .demo_labels
                        .iter()
                        .filter(|shown| *shown == label)
                        .count()
                })
                .enumerate()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| vocab[i].as_str())
                .unwrap_or("");
            format!("The {} belongs to the {} category", g.node_noun(), winner)
        }
        Task::Lp => {
            let anchor = match bundle.audit.subject {
                Subject::Pair { src, dst } => (src, dst),
                Subject::Node(id) => (id, id),
            };
            lp_mock_verdict(bundle, g, anchor).to_string()
        }
    };
    RawResponse {
        text,
        latency: start.elapsed(),
        attempt_count: 1,
        backend_id: "mock".to_string(),
    }
}

fn lp_mock_verdict(bundle: &PromptBundle, g: &TextAttributedGraph, anchor: (usize, usize)) -> u8 {
    if bundle.audit.demo_pairs.is_empty() {
        return 0;
    }
    let anchor_edge = match edge_embedding(g, anchor) {
        Ok(e) => e,
        Err(_) => return 0,
    };
    let group_similarity = |connected: bool| -> f64 {
        let members: Vec<Vec<f64>> = bundle
            .audit
            .demo_pairs
            .iter()
            .filter(|p| p.connected == connected)
            .filter_map(|p| edge_embedding(g, (p.src, p.dst)).ok())
            .collect();
        if members.is_empty() {
            return f64::NEG_INFINITY;
        }
        let dim = members[0].len();
        let mut mean = vec![0.0; dim];
        for m in &members {
            for (acc, v) in mean.iter_mut().zip(m) {
                *acc += v;
            }
        }
        for v in &mut mean {
            *v /= members.len() as f64;
        }
        cosine(&anchor_edge, &mean).value
    };
    if group_similarity(true) > group_similarity(false) {
        1
    } else {
        0
    }
}

/// Counting semaphore for the in-flight request ceiling.
struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Self {
        Self {
            permits: Mutex::new(permits.max(1)),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.permits.lock().unwrap() += 1;
        self.0.available.notify_one();
    }
}
