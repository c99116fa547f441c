//! Chat-completion style HTTP advisor.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{reply_from_text, AdviceQuery, Advisor, AdvisorError, AdvisorReply};

/// Environment variable holding the bearer token.
pub const API_KEY_ENV: &str = "PIRL_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpAdvisorConfig {
    pub url: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_ms: u64,
}

impl Default for HttpAdvisorConfig {
    fn default() -> Self {
        HttpAdvisorConfig {
            url: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            timeout_ms: 30_000,
        }
    }
}

pub struct HttpAdvisor {
    config: HttpAdvisorConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpAdvisor {
    /// Reads the API key from [`API_KEY_ENV`] when set.
    pub fn new(config: HttpAdvisorConfig) -> Self {
        let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::with_key(config, api_key)
    }

    pub fn with_key(config: HttpAdvisorConfig, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms.max(1))))
            .http_status_as_error(false)
            .build()
            .into();
        HttpAdvisor { config, api_key, agent }
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.config.model,
            "messages": [{ "role": "user", "content": prompt }],
            "temperature": self.config.temperature,
        })
    }
}

/// Text of the first choice: `message.content` for chat responses, `text`
/// for plain completions.
pub(crate) fn first_choice_text(body: &Value) -> Option<&str> {
    let choice = body.get("choices")?.get(0)?;
    choice
        .get("message")
        .and_then(|m| m.get("content"))
        .and_then(Value::as_str)
        .or_else(|| choice.get("text").and_then(Value::as_str))
}

impl Advisor for HttpAdvisor {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        let started = Instant::now();
        let mut request = self.agent.post(&self.config.url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            request = request.header("Authorization", &format!("Bearer {key}"));
        }
        let timeout = Duration::from_millis(self.config.timeout_ms);
        let mut response = request.send_json(self.request_body(query.prompt)).map_err(|e| match e {
            ureq::Error::Timeout(_) => AdvisorError::Timeout(timeout),
            other => AdvisorError::Transport(other.to_string()),
        })?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| match e {
            ureq::Error::Timeout(_) => AdvisorError::Timeout(timeout),
            other => AdvisorError::Transport(other.to_string()),
        })?;
        if !(200..300).contains(&status) {
            return Err(AdvisorError::Http { status, body: text });
        }
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| AdvisorError::Transport(format!("response is not JSON: {e}")))?;
        let content = first_choice_text(&body)
            .ok_or_else(|| AdvisorError::Transport("response has no choices".into()))?;
        reply_from_text(content.to_string(), started.elapsed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_body_shape() {
        let a = HttpAdvisor::with_key(HttpAdvisorConfig::default(), None);
        let body = a.request_body("hello");
        assert_eq!(body["messages"][0]["role"], "user");
        assert_eq!(body["messages"][0]["content"], "hello");
        assert_eq!(body["model"], "gpt-3.5-turbo");
        assert_eq!(body["temperature"], 0.0);
    }

    #[test]
    fn choice_text_variants() {
        let chat = json!({"choices":[{"message":{"role":"assistant","content":"pan: 0"}}]});
        assert_eq!(first_choice_text(&chat), Some("pan: 0"));
        let plain = json!({"choices":[{"text":"tilt: 5"}]});
        assert_eq!(first_choice_text(&plain), Some("tilt: 5"));
        assert_eq!(first_choice_text(&json!({"choices":[]})), None);
    }
}
