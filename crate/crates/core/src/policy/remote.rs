//! Client for an external text-completion service.
//!
//! Wire format, one HTTP `POST` per candidate with a JSON body
//!
//! ```text
//! {"prompt": "...", "max_tokens": 64, "temperature": 0.7, "seed": 12345}
//! ```
//!
//! answered by `{"text": "..."}`. The first line of `text`, trimmed, is the
//! candidate action. Plain `http://` endpoints only.

use std::thread;
use std::time::Duration;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{DeterminismClass, Policy, PolicyError};
use crate::mdp::Environment;

pub const DEFAULT_PROMPT_TEMPLATE: &str =
    "Proof state:\n{state}\n\nCurrent goal:\n{goal}\n\nNext tactic:\n";

/// Idle keep-alive connections the client holds per endpoint.
const POOL_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemotePolicyConfig {
    /// Full URL of the completion endpoint.
    pub endpoint: String,
    #[serde(default = "defaults::timeout_ms")]
    pub timeout_ms: u64,
    /// Rendered with `{state}` and `{goal}` substituted.
    #[serde(default = "defaults::prompt_template")]
    pub prompt_template: String,
    #[serde(default = "defaults::max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "defaults::temperature")]
    pub temperature: f64,
    #[serde(default = "defaults::retries")]
    pub retries: u32,
}

mod defaults {
    pub fn timeout_ms() -> u64 {
        30_000
    }
    pub fn prompt_template() -> String {
        super::DEFAULT_PROMPT_TEMPLATE.to_string()
    }
    pub fn max_tokens() -> u32 {
        64
    }
    pub fn temperature() -> f64 {
        0.7
    }
    pub fn retries() -> u32 {
        2
    }
}

impl RemotePolicyConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemotePolicyConfig {
            endpoint: endpoint.into(),
            timeout_ms: defaults::timeout_ms(),
            prompt_template: defaults::prompt_template(),
            max_tokens: defaults::max_tokens(),
            temperature: defaults::temperature(),
            retries: defaults::retries(),
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.endpoint.trim().is_empty() {
            return Err(PolicyError::Config("empty endpoint".into()));
        }
        if self.timeout_ms == 0 {
            return Err(PolicyError::Config("timeout must be positive".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(PolicyError::Config(format!("bad temperature {}", self.temperature)));
        }
        Ok(())
    }

    pub fn render(&self, state: &str, goal: &str) -> String {
        self.prompt_template.replace("{state}", state).replace("{goal}", goal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
}

impl CompletionResponse {
    /// The candidate action carried by this completion.
    pub fn candidate(&self) -> String {
        self.text.lines().next().unwrap_or("").trim().to_string()
    }
}

enum Reply {
    Text(String),
    /// The service answered but not with a usable record.
    Malformed,
}

struct Endpoint {
    config: RemotePolicyConfig,
    agent: ureq::Agent,
}

impl Endpoint {
    fn new(config: RemotePolicyConfig) -> Result<Self, PolicyError> {
        config.validate()?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .max_idle_connections(POOL_SIZE)
            .max_idle_connections_per_host(POOL_SIZE)
            .build()
            .new_agent();
        Ok(Endpoint { config, agent })
    }

    fn call(&self, request: &CompletionRequest) -> Result<Reply, String> {
        let mut response = self
            .agent
            .post(&self.config.endpoint)
            .send_json(request)
            .map_err(|e| e.to_string())?;
        let body = response.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(match serde_json::from_str::<CompletionResponse>(&body) {
            Ok(r) => Reply::Text(r.candidate()),
            Err(_) => Reply::Malformed,
        })
    }

    /// One completion with retries; `Err` carries the last transport error.
    fn complete(&self, request: &CompletionRequest) -> Result<String, String> {
        let mut last = String::new();
        for _ in 0..=self.config.retries {
            match self.call(request) {
                Ok(Reply::Text(t)) => return Ok(t),
                Ok(Reply::Malformed) => return Ok(String::new()),
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// Completion-service backend. With several endpoints, request `i` of an
/// expansion goes to endpoint `i mod n`.
pub struct RemotePolicy {
    endpoints: Vec<Endpoint>,
}

impl RemotePolicy {
    pub fn new(config: RemotePolicyConfig) -> Result<Self, PolicyError> {
        Self::ensemble(vec![config])
    }

    pub fn ensemble(configs: Vec<RemotePolicyConfig>) -> Result<Self, PolicyError> {
        if configs.is_empty() {
            return Err(PolicyError::Config("no endpoints".into()));
        }
        let endpoints = configs.into_iter().map(Endpoint::new).collect::<Result<_, _>>()?;
        Ok(RemotePolicy { endpoints })
    }

    /// Endpoint serving request `index`.
    pub fn endpoint_for(&self, index: usize) -> &RemotePolicyConfig {
        &self.endpoints[index % self.endpoints.len()].config
    }
}

impl<E: Environment> Policy<E> for RemotePolicy {
    fn sample_candidates(
        &self,
        env: &E,
        state: &E::State,
        goal: &E::Goal,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<String>, PolicyError> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let state_text = env.render_state(state);
        let goal_text = env.render_goal(goal);
        let base_seed = rng.next_u64();
        let results: Vec<Result<String, String>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..k)
                .map(|i| {
                    let endpoint = &self.endpoints[i % self.endpoints.len()];
                    let request = CompletionRequest {
                        prompt: endpoint.config.render(&state_text, &goal_text),
                        max_tokens: endpoint.config.max_tokens,
                        temperature: endpoint.config.temperature,
                        seed: base_seed.wrapping_add(i as u64),
                    };
                    scope.spawn(move || endpoint.complete(&request))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err("request thread panicked".into())))
                .collect()
        });
        if let Some(Err(reason)) = results.iter().find(|r| r.is_err()) {
            if results.iter().all(Result::is_err) {
                let attempts = self.endpoints[0].config.retries + 1;
                return Err(PolicyError::Failure {
                    attempts,
                    reason: reason.clone(),
                });
            }
        }
        Ok(results.into_iter().map(Result::unwrap_or_default).collect())
    }

    fn determinism(&self) -> DeterminismClass {
        DeterminismClass::External
    }
}
