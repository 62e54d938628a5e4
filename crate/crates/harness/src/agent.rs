use std::sync::Arc;

use serde::{Deserialize, Serialize};

use gridbench::eval::{AgentFault, Decision, Policy};
use gridbench::{Env, ObsMode};

use crate::backend::{ChatBackend, Usage};
use crate::config::HarnessConfig;
use crate::parse::parse_action;
use crate::prompt::{build_prompt, task_brief, Message};

/// One prompt/response round trip, logged into the episode trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatExchange {
    pub messages: Vec<Message>,
    pub response: String,
    pub usage: Option<Usage>,
}

/// Memoryless LLM agent: observation in, parsed action out.
pub struct HarnessAgent {
    config: HarnessConfig,
    backend: Arc<dyn ChatBackend>,
}

impl HarnessAgent {
    pub fn new(config: HarnessConfig, backend: Arc<dyn ChatBackend>) -> Self {
        HarnessAgent { config, backend }
    }

    pub fn config(&self) -> &HarnessConfig {
        &self.config
    }

    /// The exact messages the agent sends for the current state of `env`.
    pub fn prompt_for(&self, env: &Env) -> Vec<Message> {
        let state = env.state();
        let brief = task_brief(state.task, state.reward_mode);
        let observation = env
            .observe(self.config.obs_mode)
            .as_text()
            .map(str::to_string)
            .expect("harness observation modes are textual");
        build_prompt(&self.config, &brief, &observation, &env.valid_actions())
    }
}

impl Policy for HarnessAgent {
    /// Uses the configured observation mode; the episode-level mode is ignored.
    fn act(&mut self, env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
        let messages = self.prompt_for(env);
        let reply = self.backend.chat(&messages, &self.config.sampling).map_err(|e| AgentFault(e.to_string()))?;
        let parsed = parse_action(self.config.preset, &reply.content, &env.valid_actions());
        let exchange = ChatExchange { messages, response: reply.content, usage: reply.usage };
        Ok(Decision {
            action: parsed.action,
            parse_failure: parsed.parse_failure,
            trace: Some(serde_json::to_value(exchange).expect("exchange serializes")),
        })
    }
}
