use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::header::CONTENT_TYPE;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key_env_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    /// First backoff delay; doubles after each retry.
    #[serde(default = "default_backoff_secs")]
    pub initial_backoff_secs: f64,
}

fn default_temperature() -> f64 {
    1.0
}

fn default_timeout_secs() -> f64 {
    60.0
}

fn default_max_retries() -> u32 {
    3
}

fn default_backoff_secs() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication failed ({0})")]
    Auth(String),
    #[error("rate limited after {retries} retries")]
    RateLimited { retries: u32 },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatReply {
    pub text: String,
    pub retries: u32,
}

/// Blocking chat-completions client.
#[derive(Debug, Clone)]
pub struct ChatClient {
    config: EndpointConfig,
    api_key: String,
    http: Client,
}

enum Attempt {
    Done(String),
    Retry(ClientError),
    Fail(ClientError),
}

impl ChatClient {
    /// Reads the API key from the environment variable named in `config`.
    pub fn from_env(config: EndpointConfig) -> Result<Self, ClientError> {
        let key = std::env::var(&config.api_key_env_name)
            .map_err(|_| ClientError::Auth(format!("environment variable {} is not set", config.api_key_env_name)))?;
        Self::with_key(config, key)
    }

    pub fn with_key(config: EndpointConfig, api_key: impl Into<String>) -> Result<Self, ClientError> {
        let timeout = Duration::try_from_secs_f64(config.timeout_secs)
            .map_err(|e| ClientError::Transport(format!("bad timeout: {e}")))?;
        let http = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(Self {
            config,
            api_key: api_key.into(),
            http,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// Sends `prompt` as a single user message and returns the first choice.
    pub fn complete(&self, prompt: &str) -> Result<ChatReply, ClientError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        let body = serde_json::to_vec(&body).map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
        let mut delay = self.config.initial_backoff_secs.max(0.0);
        let mut retries = 0;
        loop {
            match self.attempt(&url, &body) {
                Attempt::Done(text) => return Ok(ChatReply { text, retries }),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) if retries >= self.config.max_retries => {
                    return Err(match e {
                        ClientError::RateLimited { .. } => ClientError::RateLimited { retries },
                        other => other,
                    })
                }
                Attempt::Retry(_) => {
                    std::thread::sleep(Duration::from_secs_f64(delay));
                    delay *= 2.0;
                    retries += 1;
                }
            }
        }
    }

    fn attempt(&self, url: &str, body: &[u8]) -> Attempt {
        let response = match self
            .http
            .post(url)
            .bearer_auth(&self.api_key)
            .header(CONTENT_TYPE, "application/json")
            .body(body.to_vec())
            .send()
        {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(ClientError::Transport(e.to_string())),
        };
        let status = response.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Attempt::Fail(ClientError::Auth(status.to_string()));
        }
        if status == StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry(ClientError::RateLimited { retries: 0 });
        }
        if status.is_server_error() {
            return Attempt::Retry(ClientError::Transport(format!("server returned {status}")));
        }
        if !status.is_success() {
            return Attempt::Fail(ClientError::Transport(format!("server returned {status}")));
        }
        let text = match response.text() {
            Ok(t) => t,
            Err(e) => return Attempt::Retry(ClientError::Transport(e.to_string())),
        };
        match extract_content(&text) {
            Ok(content) => Attempt::Done(content),
            Err(e) => Attempt::Fail(e),
        }
    }
}

/// `choices[0].message.content` of a chat-completions body.
pub(crate) fn extract_content(body: &str) -> Result<String, ClientError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| ClientError::MalformedResponse(format!("not JSON: {e}")))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(serde_json::Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ClientError::MalformedResponse("missing choices[0].message.content".into()))
}
