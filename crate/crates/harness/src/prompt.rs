use serde::{Deserialize, Serialize};

use gridbench::grid::ACTION_NAMES;
use gridbench::{Action, RewardMode, TaskId};

use crate::config::{HarnessConfig, Preset};

/// Appended to the system prompt by the reasoner preset.
pub const REASONER_BLOCK: &str = "IMPORTANT: Before choosing an action, reason step-by-step but be CONCISE \
(2\u{2013}4 sentences max): 1. What do you observe? What is your goal? 2. Which action best advances you toward \
the goal? 3. Output your final answer on the LAST line as: ACTION: <number>.";

const MARKOVIAN_BLOCK: &str = "Respond with a single action number and nothing else.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Message { role, content: content.into() }
    }
}

fn mechanics(task: TaskId) -> &'static str {
    match task {
        TaskId::KeyDoorPuzzle => {
            "Face a key and INTERACT to pick it up. Face a closed door while holding the key of its color and INTERACT to open it."
        }
        TaskId::SokobanPush => "Walk into a box to push it one cell if the cell behind it is free.",
        TaskId::LightsOut => "Face a light and INTERACT to toggle it and its orthogonal neighbors.",
        TaskId::GraphColoring => "Stand on a node and INTERACT to cycle its color. Edges (+) connect nodes.",
        TaskId::SequenceMemory => {
            "Tiles flash one per step while you cannot move. Afterwards step onto the tiles in the order they flashed."
        }
        TaskId::TagHunt => "Face a quarry (Q) and INTERACT to tag it. Quarries move away from you.",
        TaskId::Herding => "Sheep (s) step away from you when you stand next to them. Drive them into the pen (P).",
        TaskId::DynamicObstacles => "Obstacles (O) move every few steps. Touching one ends the episode as a failure.",
        TaskId::FogOfWarExploration => "Unexplored cells are hidden (?) until you walk next to them.",
        TaskId::NoisyObservation => "Some objects you see may be illusions that disappear on closer inspection.",
        TaskId::GoToGoal | TaskId::MazeNavigation => "Walls (#) block movement.",
    }
}

/// Fixed per-task system text: description, action code table and reward summary.
pub fn task_brief(task: TaskId, reward_mode: RewardMode) -> String {
    let spec = task.spec();
    let schedule = spec.reward_schedule;
    let mut out = format!("You are an agent in a 2D gridworld. Task: {}\n{}\n\n", spec.description, mechanics(task));
    out.push_str("Moving into a wall or an object that blocks you turns you to face it without moving.\n\nActions:\n");
    for (code, name) in ACTION_NAMES.iter().enumerate() {
        out.push_str(&format!("  {code} = {name}\n"));
    }
    out.push_str(&format!("\nReward: {:+} when the task is solved", schedule.success_reward));
    if spec.failure_predicate.is_some() {
        out.push_str(&format!(", {:+} on failure", schedule.failure_reward));
    }
    match reward_mode {
        RewardMode::Sparse => out.push_str(", 0 otherwise."),
        RewardMode::Dense => out.push_str(&format!(
            ", {:+} per step, plus small bonuses for progress events.",
            schedule.step_penalty
        )),
    }
    out.push_str(" The episode ends on success, failure, or when the step limit is reached.");
    out
}

/// One system message (brief plus preset instructions) and one user message
/// (observation plus the currently valid actions).
pub fn build_prompt(config: &HarnessConfig, task_brief: &str, observation: &str, valid_actions: &[Action]) -> Vec<Message> {
    let instructions = match config.preset {
        Preset::Markovian => MARKOVIAN_BLOCK,
        Preset::MarkovianReasoner => REASONER_BLOCK,
    };
    let system = format!("{task_brief}\n\n{instructions}");
    let valid: Vec<String> = valid_actions.iter().map(|a| format!("{} ({})", a.code(), a.name())).collect();
    let user = format!("{}\n\nValid actions: {}", observation.trim_end(), valid.join(", "));
    vec![Message::new(Role::System, system), Message::new(Role::User, user)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reasoner_block_is_present_only_for_reasoner() {
        let brief = task_brief(TaskId::GoToGoal, RewardMode::Sparse);
        let mut cfg = HarnessConfig::default();
        let msgs = build_prompt(&cfg, &brief, "obs", &[Action::Noop]);
        assert!(msgs[0].content.contains("Output your final answer on the LAST line as: ACTION:"));
        cfg.preset = Preset::Markovian;
        let msgs = build_prompt(&cfg, &brief, "obs", &[Action::Noop]);
        assert!(!msgs[0].content.contains("step-by-step"));
        assert!(!msgs[0].content.contains("ACTION:"));
    }

    #[test]
    fn brief_lists_every_action_code() {
        let brief = task_brief(TaskId::DynamicObstacles, RewardMode::Dense);
        for (i, name) in ACTION_NAMES.iter().enumerate() {
            assert!(brief.contains(&format!("{i} = {name}")));
        }
        assert!(brief.contains("-1 on failure"));
        assert!(brief.contains("-0.01 per step"));
    }
}
