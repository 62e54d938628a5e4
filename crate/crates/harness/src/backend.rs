use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::Sampling;
use crate::prompt::Message;

pub const ENV_URL: &str = "GRIDBENCH_CHAT_URL";
pub const ENV_TOKEN: &str = "GRIDBENCH_CHAT_TOKEN";
pub const ENV_MODEL: &str = "GRIDBENCH_MODEL";

pub const MAX_ATTEMPTS: u32 = 3;
pub const DEFAULT_IN_FLIGHT: usize = 4;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error("backend unavailable after {attempts} attempt(s): {reason}")]
    Unavailable { attempts: u32, reason: String },
    #[error("malformed backend response after {attempts} attempt(s): {reason}")]
    Malformed { attempts: u32, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub usage: Option<Usage>,
}

pub trait ChatBackend: Send + Sync {
    fn chat(&self, messages: &[Message], sampling: &Sampling) -> Result<ChatResponse, BackendError>;
}

type ReplyFn = Box<dyn Fn(&[Message]) -> String + Send + Sync>;

enum Script {
    Fixed(String),
    Sequence(Mutex<VecDeque<String>>),
    Callback(ReplyFn),
}

/// In-process responses for offline runs and tests.
pub struct ScriptedBackend {
    script: Script,
}

impl ScriptedBackend {
    /// The same reply to every prompt.
    pub fn fixed(reply: impl Into<String>) -> Self {
        ScriptedBackend { script: Script::Fixed(reply.into()) }
    }

    /// Replies consumed in order; running out is reported as unavailability.
    pub fn sequence(replies: impl IntoIterator<Item = String>) -> Self {
        ScriptedBackend { script: Script::Sequence(Mutex::new(replies.into_iter().collect())) }
    }

    pub fn callback(f: impl Fn(&[Message]) -> String + Send + Sync + 'static) -> Self {
        ScriptedBackend { script: Script::Callback(Box::new(f)) }
    }
}

impl ChatBackend for ScriptedBackend {
    fn chat(&self, messages: &[Message], _sampling: &Sampling) -> Result<ChatResponse, BackendError> {
        let content = match &self.script {
            Script::Fixed(s) => s.clone(),
            Script::Sequence(q) => q.lock().expect("script lock").pop_front().ok_or_else(|| {
                BackendError::Unavailable { attempts: 1, reason: "scripted replies exhausted".into() }
            })?,
            Script::Callback(f) => f(messages),
        };
        Ok(ChatResponse { content, usage: None })
    }
}

/// Counting semaphore bounding concurrent requests.
struct InFlight {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a InFlight);

impl InFlight {
    fn new(n: usize) -> Self {
        InFlight { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("limiter lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("limiter lock");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("limiter lock") += 1;
        self.0.cv.notify_one();
    }
}

enum Failure {
    Transient(String),
    Malformed(String),
    Fatal(String),
    RejectsTopK,
}

/// Generic chat-completions client.
pub struct HttpChatBackend {
    url: String,
    token: Option<String>,
    model: String,
    agent: ureq::Agent,
    backoff: Duration,
    send_top_k: AtomicBool,
    limiter: InFlight,
}

impl HttpChatBackend {
    pub fn new(url: impl Into<String>, token: Option<String>, model: impl Into<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpChatBackend {
            url: url.into(),
            token,
            model: model.into(),
            agent,
            backoff: Duration::from_millis(500),
            send_top_k: AtomicBool::new(true),
            limiter: InFlight::new(DEFAULT_IN_FLIGHT),
        }
    }

    /// Endpoint and token from the environment; `GRIDBENCH_MODEL` overrides `model`.
    pub fn from_env(model: &str) -> Result<Self, BackendError> {
        let url = std::env::var(ENV_URL).map_err(|_| BackendError::Unavailable {
            attempts: 0,
            reason: format!("{ENV_URL} is not set"),
        })?;
        let token = std::env::var(ENV_TOKEN).ok().filter(|t| !t.is_empty());
        let model = std::env::var(ENV_MODEL).ok().filter(|m| !m.is_empty()).unwrap_or_else(|| model.to_string());
        Ok(HttpChatBackend::new(url, token, model))
    }

    /// Delay before the first retry; doubles after each failure.
    pub fn with_backoff(mut self, base: Duration) -> Self {
        self.backoff = base;
        self
    }

    pub fn with_in_flight_limit(mut self, n: usize) -> Self {
        self.limiter = InFlight::new(n);
        self
    }

    pub fn request_body(&self, messages: &[Message], sampling: &Sampling) -> Value {
        let mut body = json!({
            "model": self.model,
            "messages": messages,
            "temperature": sampling.temperature,
            "top_p": sampling.top_p,
            "max_tokens": sampling.max_tokens,
        });
        if let (Some(k), true) = (sampling.top_k, self.send_top_k.load(Ordering::Relaxed)) {
            body["top_k"] = json!(k);
        }
        body
    }

    fn attempt(&self, body: &Value) -> Result<ChatResponse, Failure> {
        let mut req = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req.send_json(body).map_err(|e| Failure::Transient(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| Failure::Transient(e.to_string()))?;
        match status {
            200..=299 => parse_completion(&text).map_err(Failure::Malformed),
            400 | 422 if body.get("top_k").is_some() && text.contains("top_k") => Err(Failure::RejectsTopK),
            429 | 500..=599 => Err(Failure::Transient(format!("HTTP {status}"))),
            _ => Err(Failure::Fatal(format!("HTTP {status}: {}", text.chars().take(200).collect::<String>()))),
        }
    }
}

fn parse_completion(text: &str) -> Result<ChatResponse, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("body is not JSON: {e}"))?;
    let content = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or("missing choices[0].message.content")?;
    let usage = v.get("usage").map(|u| Usage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64),
        completion_tokens: u.get("completion_tokens").and_then(Value::as_u64),
    });
    Ok(ChatResponse { content: content.to_string(), usage })
}

impl ChatBackend for HttpChatBackend {
    fn chat(&self, messages: &[Message], sampling: &Sampling) -> Result<ChatResponse, BackendError> {
        let _permit = self.limiter.acquire();
        let mut delay = self.backoff;
        let mut attempts = 0;
        let mut last = Failure::Transient("no attempt made".into());
        while attempts < MAX_ATTEMPTS {
            let body = self.request_body(messages, sampling);
            attempts += 1;
            match self.attempt(&body) {
                Ok(r) => return Ok(r),
                Err(Failure::RejectsTopK) => {
                    log::warn!("endpoint rejects top_k; omitting it for the rest of the run");
                    self.send_top_k.store(false, Ordering::Relaxed);
                    attempts -= 1;
                    continue;
                }
                Err(Failure::Fatal(reason)) => return Err(BackendError::Unavailable { attempts, reason }),
                Err(f) => last = f,
            }
            if attempts < MAX_ATTEMPTS {
                std::thread::sleep(delay);
                delay *= 2;
            }
        }
        Err(match last {
            Failure::Malformed(reason) => BackendError::Malformed { attempts, reason },
            Failure::Transient(reason) | Failure::Fatal(reason) => BackendError::Unavailable { attempts, reason },
            Failure::RejectsTopK => unreachable!("top_k rejection is retried"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::Role;

    #[test]
    fn body_carries_sampling_verbatim() {
        let b = HttpChatBackend::new("http://127.0.0.1:9", None, "m");
        let s = Sampling { temperature: 0.7, top_p: 0.8, top_k: Some(20), max_tokens: 100 };
        let body = b.request_body(&[Message::new(Role::User, "hi")], &s);
        assert_eq!(body["temperature"], json!(0.7));
        assert_eq!(body["top_p"], json!(0.8));
        assert_eq!(body["max_tokens"], json!(100));
        assert_eq!(body["top_k"], json!(20));
        assert_eq!(body["messages"][0]["role"], json!("user"));
    }

    #[test]
    fn completion_parsing() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"ACTION: 1"}}],"usage":{"prompt_tokens":5}}"#;
        let r = parse_completion(ok).unwrap();
        assert_eq!(r.content, "ACTION: 1");
        assert_eq!(r.usage.unwrap().prompt_tokens, Some(5));
        assert!(parse_completion(r#"{"choices":[]}"#).is_err());
        assert!(parse_completion("<html>").is_err());
    }

    #[test]
    fn limiter_bounds_concurrency() {
        use std::sync::atomic::AtomicUsize;
        use std::sync::Arc;
        let limiter = Arc::new(InFlight::new(2));
        let now = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let (limiter, now, peak) = (limiter.clone(), now.clone(), peak.clone());
                std::thread::spawn(move || {
                    let _p = limiter.acquire();
                    let n = now.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(n, Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(5));
                    now.fetch_sub(1, Ordering::SeqCst);
                })
            })
            .collect();
        handles.into_iter().for_each(|h| h.join().unwrap());
        assert_eq!(peak.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn sequence_runs_out() {
        let b = ScriptedBackend::sequence(["a".to_string()]);
        let s = Sampling::default();
        assert_eq!(b.chat(&[], &s).unwrap().content, "a");
        assert!(matches!(b.chat(&[], &s), Err(BackendError::Unavailable { .. })));
    }
}
