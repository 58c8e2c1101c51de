//! Chat-completions HTTP client. This is the only module that performs
//! network requests.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{BlackBoxModel, ModelError, SampleParams};
use crate::seed;
use crate::trace::StepRecord;

fn default_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    1000
}
fn default_timeout_ms() -> u64 {
    60_000
}
fn default_max_tokens() -> u32 {
    256
}
fn default_in_flight() -> usize {
    8
}
fn default_api_key_env() -> String {
    "LTLMON_API_KEY".into()
}
fn default_empty_input() -> String {
    "Continue.".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    /// e.g. `https://host/api/v1`; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Overrides the temperature passed by the caller when set.
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    /// Total attempts per call.
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// First backoff delay; doubles per attempt, jittered by up to 25%.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default)]
    pub system_prompt: Option<String>,
    /// Sent as the user turn when the current input is empty.
    #[serde(default = "default_empty_input")]
    pub empty_input_text: String,
    /// JSONL file receiving every request/response pair.
    #[serde(default)]
    pub audit_log: Option<PathBuf>,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            model: model.into(),
            temperature: None,
            max_tokens: default_max_tokens(),
            api_key_env: default_api_key_env(),
            retries: default_retries(),
            backoff_ms: default_backoff_ms(),
            timeout_ms: default_timeout_ms(),
            system_prompt: None,
            empty_input_text: default_empty_input(),
            audit_log: None,
            max_in_flight: default_in_flight(),
        }
    }
}

struct InFlight {
    count: Mutex<usize>,
    cv: Condvar,
    cap: usize,
}

impl InFlight {
    fn acquire(&self) -> InFlightGuard<'_> {
        let mut n = self.count.lock().expect("in-flight lock");
        while *n >= self.cap {
            n = self.cv.wait(n).expect("in-flight lock");
        }
        *n += 1;
        InFlightGuard(self)
    }
}

struct InFlightGuard<'a>(&'a InFlight);

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        *self.0.count.lock().expect("in-flight lock") -= 1;
        self.0.cv.notify_one();
    }
}

pub struct EndpointModel {
    name: String,
    config: EndpointConfig,
    client: reqwest::blocking::Client,
    in_flight: InFlight,
    audit: Option<Mutex<File>>,
}

enum Failure {
    Retryable(ModelError),
    Fatal(ModelError),
}

impl EndpointModel {
    pub fn new(name: impl Into<String>, config: EndpointConfig) -> Result<Self, ModelError> {
        if config.retries == 0 {
            return Err(ModelError::Config("retries must be at least 1".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| ModelError::Config(e.to_string()))?;
        let audit = match &config.audit_log {
            Some(path) => Some(Mutex::new(
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| {
                        ModelError::Config(format!("cannot open audit log {}: {e}", path.display()))
                    })?,
            )),
            None => None,
        };
        Ok(EndpointModel {
            name: name.into(),
            in_flight: InFlight {
                count: Mutex::new(0),
                cv: Condvar::new(),
                cap: config.max_in_flight.max(1),
            },
            config,
            client,
            audit,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn messages(&self, history: &[StepRecord], input: &str) -> Vec<Value> {
        let mut messages = Vec::with_capacity(history.len() * 2 + 2);
        if let Some(system) = &self.config.system_prompt {
            messages.push(json!({"role": "system", "content": system}));
        }
        for step in history {
            if !step.input.is_empty() {
                messages.push(json!({"role": "user", "content": step.input}));
            }
            messages.push(json!({"role": "assistant", "content": step.output}));
        }
        let current = if input.is_empty() {
            self.config.empty_input_text.as_str()
        } else {
            input
        };
        messages.push(json!({"role": "user", "content": current}));
        messages
    }

    /// Sends a raw chat-completions request body and returns the first choice's content.
    pub fn complete(&self, body: &Value, seed_for_jitter: u64) -> Result<String, ModelError> {
        let api_key = std::env::var(&self.config.api_key_env).ok();
        let url = format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        );
        let body_text = body.to_string();
        let _slot = self.in_flight.acquire();
        let mut attempt = 0;
        loop {
            attempt += 1;
            let outcome = self.attempt(&url, &body_text, api_key.as_deref(), attempt);
            match outcome {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retryable(e)) if attempt >= self.config.retries => return Err(e),
                Err(Failure::Retryable(_)) => {
                    let base = self
                        .config
                        .backoff_ms
                        .saturating_mul(1 << (attempt - 1).min(16));
                    let jitter =
                        (seed::derive(seed_for_jitter, &[attempt as u64]) % 1000) as f64 / 4000.0;
                    thread::sleep(Duration::from_millis((base as f64 * (1.0 + jitter)) as u64));
                }
            }
        }
    }

    fn attempt(
        &self,
        url: &str,
        body: &str,
        api_key: Option<&str>,
        attempt: u32,
    ) -> Result<String, Failure> {
        let mut req = self
            .client
            .post(url)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_string());
        if let Some(key) = api_key {
            req = req.bearer_auth(key);
        }
        let result = req.send();
        let response = match result {
            Ok(r) => r,
            Err(e) => {
                self.log(
                    body,
                    None,
                    &format!("transport error: {e}"),
                    api_key.is_some(),
                );
                let err = if e.is_timeout() {
                    ModelError::Timeout { attempts: attempt }
                } else {
                    ModelError::Transport {
                        attempts: attempt,
                        message: e.to_string(),
                    }
                };
                return Err(Failure::Retryable(err));
            }
        };
        let status = response.status().as_u16();
        let text = response.text().map_err(|e| {
            Failure::Retryable(ModelError::Transport {
                attempts: attempt,
                message: e.to_string(),
            })
        })?;
        self.log(body, Some(status), &text, api_key.is_some());
        if !(200..300).contains(&status) {
            let err = ModelError::HttpStatus { status, body: text };
            return if status == 429 || status >= 500 {
                Err(Failure::Retryable(err))
            } else {
                Err(Failure::Fatal(err))
            };
        }
        parse_completion(&text).map_err(Failure::Fatal)
    }

    fn log(&self, request: &str, status: Option<u16>, response: &str, keyed: bool) {
        let Some(audit) = &self.audit else { return };
        let entry = json!({
            "model": self.config.model,
            "authorization": if keyed { "Bearer [REDACTED]" } else { "" },
            "request": serde_json::from_str::<Value>(request).unwrap_or(Value::Null),
            "status": status,
            "response": response,
        });
        if let Ok(mut f) = audit.lock() {
            let _ = writeln!(f, "{entry}");
        }
    }
}

fn parse_completion(text: &str) -> Result<String, ModelError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ModelError::Malformed(format!("{e}: {text}")))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ModelError::Malformed(format!("no choices[0].message.content in {text}")))
}

impl BlackBoxModel for EndpointModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn next_output(
        &self,
        history: &[StepRecord],
        input: &str,
        params: &SampleParams,
    ) -> Result<String, ModelError> {
        let body = json!({
            "model": self.config.model,
            "messages": self.messages(history, input),
            "temperature": self.config.temperature.unwrap_or(params.temperature),
            "max_tokens": self.config.max_tokens,
            "seed": params.seed,
        });
        self.complete(&body, params.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_parsing() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"LOAD package1"}}]}"#;
        assert_eq!(parse_completion(ok).unwrap(), "LOAD package1");
        assert!(matches!(
            parse_completion("{}"),
            Err(ModelError::Malformed(_))
        ));
        assert!(matches!(
            parse_completion("not json"),
            Err(ModelError::Malformed(_))
        ));
    }

    #[test]
    fn message_layout() {
        let mut cfg = EndpointConfig::new("http://127.0.0.1:1", "m");
        cfg.system_prompt = Some("sys".into());
        let m = EndpointModel::new("m", cfg).unwrap();
        let hist = vec![StepRecord::new(1, "go", "a"), StepRecord::new(2, "", "b")];
        let msgs = m.messages(&hist, "");
        let roles: Vec<&str> = msgs.iter().map(|v| v["role"].as_str().unwrap()).collect();
        assert_eq!(roles, ["system", "user", "assistant", "assistant", "user"]);
        assert_eq!(msgs[4]["content"], "Continue.");
    }

    #[test]
    fn unreachable_endpoint_is_transport_error() {
        let mut cfg = EndpointConfig::new("http://127.0.0.1:9", "m");
        cfg.retries = 2;
        cfg.backoff_ms = 1;
        let m = EndpointModel::new("m", cfg).unwrap();
        let err = m
            .next_output(&[], "hi", &SampleParams::new(0.2, 0))
            .unwrap_err();
        match err {
            ModelError::Transport { attempts, .. } | ModelError::Timeout { attempts } => {
                assert_eq!(attempts, 2)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
