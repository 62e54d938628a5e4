use std::time::Instant;

use chrono::{DateTime, Utc};
use gridbench::eval::{EpisodeRecord, StepRecord};
use gridbench::obs::Observation;
use gridbench::{Action, Difficulty, Env, ObsMode, Outcome, RewardMode, TaskId};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ServiceError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepInfo {
    pub step_count: u32,
    pub total_reward: f64,
    pub outcome: Outcome,
}

/// Body of a step response and of every WebSocket push.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepPayload {
    pub observation: Value,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
    pub frame_version: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObsPayload {
    pub observation: Value,
    pub done: bool,
    pub info: StepInfo,
    pub frame_version: u64,
    pub valid_actions: Vec<u8>,
}

/// One live environment and its recording.
#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub owner_tag: String,
    pub obs_mode: ObsMode,
    pub created_at: DateTime<Utc>,
    pub last_active: Instant,
    env: Env,
    seed: u64,
    steps: Vec<StepRecord>,
    frame_version: u64,
    expired: bool,
}

impl Session {
    pub fn new(
        id: String,
        task: TaskId,
        difficulty: Difficulty,
        seed: u64,
        obs_mode: ObsMode,
        reward_mode: RewardMode,
        owner_tag: String,
    ) -> Result<Self, ServiceError> {
        let env = Env::new(task, difficulty, seed)?.with_reward_mode(reward_mode);
        Ok(Session {
            id,
            owner_tag,
            obs_mode,
            created_at: Utc::now(),
            last_active: Instant::now(),
            env,
            seed,
            steps: Vec::new(),
            frame_version: 0,
            expired: false,
        })
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn frame_version(&self) -> u64 {
        self.frame_version
    }

    /// Terminal outcome, or truncated once the idle timeout has claimed the session.
    pub fn outcome(&self) -> Outcome {
        match self.env.state().outcome {
            Outcome::Running if self.expired => Outcome::Truncated,
            o => o,
        }
    }

    pub fn is_over(&self) -> bool {
        self.outcome().is_terminal()
    }

    pub fn expire(&mut self) {
        self.expired = true;
    }

    pub fn touch(&mut self) {
        self.last_active = Instant::now();
    }

    fn info(&self) -> StepInfo {
        let s = self.env.state();
        StepInfo { step_count: s.step_count, total_reward: s.cumulative_reward, outcome: self.outcome() }
    }

    pub fn observation(&self) -> Value {
        let mode = self.obs_mode;
        if mode == ObsMode::Pixels {
            return json!({
                "mode": mode.name(),
                "frame_url": format!("/sessions/{}/frame.png?v={}", self.id, self.frame_version),
                "frame_version": self.frame_version,
            });
        }
        match self.env.observe(mode) {
            Observation::Text(text) if mode == ObsMode::Structured => {
                let data: Value = serde_json::from_str(&text).expect("structured observation is JSON");
                json!({ "mode": mode.name(), "data": data })
            }
            Observation::Text(text) => json!({ "mode": mode.name(), "text": text }),
            Observation::Layers(layers) => json!({ "mode": mode.name(), "data": layers }),
            Observation::Pixels(_) => unreachable!("pixels handled above"),
        }
    }

    pub fn obs_payload(&self) -> ObsPayload {
        ObsPayload {
            observation: self.observation(),
            done: self.is_over(),
            info: self.info(),
            frame_version: self.frame_version,
            valid_actions: self.env.valid_actions().iter().map(|a| a.code()).collect(),
        }
    }

    /// Advance one step, logging it exactly as an offline episode would.
    pub fn step(&mut self, code: i64) -> Result<StepPayload, ServiceError> {
        if self.is_over() {
            return Err(ServiceError::EpisodeFinished);
        }
        let action = Action::from_code(code).ok_or(ServiceError::InvalidAction(code))?;
        let before = self.env.bundle(false);
        let t = self.env.state().step_count;
        let result = self.env.act(action)?;
        let done = result.outcome.is_terminal();
        self.steps.push(StepRecord {
            t,
            obs_ascii: before.ascii,
            obs_language: before.language,
            action,
            reward: result.reward,
            done,
            parse_failure: false,
            trace: None,
        });
        self.frame_version += 1;
        self.touch();
        Ok(StepPayload {
            observation: self.observation(),
            reward: result.reward,
            done,
            info: self.info(),
            frame_version: self.frame_version,
        })
    }

    pub fn record(&self) -> EpisodeRecord {
        let s = self.env.state();
        let outcome = self.outcome();
        EpisodeRecord {
            task: s.task,
            difficulty: s.difficulty,
            seed: self.seed,
            steps: self.steps.clone(),
            total_reward: s.cumulative_reward,
            success: outcome == Outcome::Success,
            reward_mode: s.reward_mode,
            outcome,
            fault: None,
        }
    }
}
