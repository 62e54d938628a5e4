use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::episode::{run_episode, EpisodeOptions, OraclePolicy};
use super::seeds::{derive_seed, SeedPool};
use super::{write_atomic, EvalError, ENGINE_VERSION};
use crate::obs::ObsMode;
use crate::tasks::{Difficulty, RewardMode, TaskId};

pub const DATASET_FILE: &str = "episodes.ndjson";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub episodes: usize,
    pub successes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub engine_version: String,
    pub policy: String,
    pub reward_mode: RewardMode,
    pub episodes: usize,
    pub steps: usize,
    pub pairs: Vec<PairCount>,
    pub file: String,
    /// Hex SHA-256 of the episode file.
    pub sha256: String,
}

/// Export oracle episodes to `out_dir`, assigning episode `k` to pair
/// `k mod P` and to train-pool index `k div P` of that pair.
pub fn export_dataset(
    tasks: &[TaskId],
    difficulties: &[Difficulty],
    n_episodes: usize,
    reward_mode: RewardMode,
    out_dir: &Path,
) -> Result<DatasetManifest, EvalError> {
    let pairs: Vec<(TaskId, Difficulty)> =
        tasks.iter().flat_map(|&t| difficulties.iter().map(move |&d| (t, d))).collect();
    if n_episodes == 0 || pairs.is_empty() {
        return Err(EvalError::NoEpisodes);
    }
    let options = EpisodeOptions { obs_mode: ObsMode::Ascii, reward_mode, log_observations: true };
    let lines = (0..n_episodes)
        .into_par_iter()
        .map(|k| {
            let (task, difficulty) = pairs[k % pairs.len()];
            let seed = derive_seed(task, difficulty, SeedPool::Train, k / pairs.len());
            let record = run_episode(&mut OraclePolicy::new(), task, difficulty, seed, options)?;
            let line = serde_json::to_string(&record).expect("episode serializes");
            Ok((task, difficulty, record.success, record.steps.len(), line))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut body = String::new();
    let mut counts: Vec<PairCount> = pairs
        .iter()
        .map(|&(task, difficulty)| PairCount { task, difficulty, episodes: 0, successes: 0 })
        .collect();
    let mut steps = 0;
    for (k, (_, _, success, len, line)) in lines.iter().enumerate() {
        let c = &mut counts[k % pairs.len()];
        c.episodes += 1;
        c.successes += *success as usize;
        steps += len;
        body.push_str(line);
        body.push('\n');
    }
    let digest: String = Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    write_atomic(&out_dir.join(DATASET_FILE), body.as_bytes())?;
    let manifest = DatasetManifest {
        engine_version: ENGINE_VERSION.to_string(),
        policy: "oracle".into(),
        reward_mode,
        episodes: n_episodes,
        steps,
        pairs: counts,
        file: DATASET_FILE.into(),
        sha256: digest,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&out_dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

/// Check one dataset line against the episode schema; returns the reason on failure.
pub fn validate_line(line: &str) -> Result<(), String> {
    use serde_json::Value;
    let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = v.as_object().ok_or("record is not an object")?;
    let field = |name: &str| obj.get(name).ok_or_else(|| format!("missing `{name}`"));
    let task = field("task")?.as_str().ok_or("`task` is not a string")?;
    task.parse::<TaskId>().map_err(|e| e.to_string())?;
    let difficulty = field("difficulty")?.as_str().ok_or("`difficulty` is not a string")?;
    difficulty.parse::<Difficulty>().map_err(|e| e.to_string())?;
    field("seed")?.as_u64().ok_or("`seed` is not an unsigned integer")?;
    field("total_reward")?.as_f64().ok_or("`total_reward` is not a number")?;
    field("success")?.as_bool().ok_or("`success` is not a boolean")?;
    let steps = field("steps")?.as_array().ok_or("`steps` is not an array")?;
    if steps.is_empty() {
        return Err("episode has no steps".into());
    }
    for (i, step) in steps.iter().enumerate() {
        let s = step.as_object().ok_or_else(|| format!("step {i} is not an object"))?;
        let get = |name: &str| s.get(name).ok_or_else(|| format!("step {i} missing `{name}`"));
        if get("t")?.as_u64() != Some(i as u64) {
            return Err(format!("step {i} has t out of sequence"));
        }
        get("obs_ascii")?.as_str().ok_or_else(|| format!("step {i} obs_ascii is not a string"))?;
        get("obs_language")?.as_str().ok_or_else(|| format!("step {i} obs_language is not a string"))?;
        match get("action")?.as_u64() {
            Some(a) if a < 6 => {}
            _ => return Err(format!("step {i} action is not a code in 0..6")),
        }
        get("reward")?.as_f64().ok_or_else(|| format!("step {i} reward is not a number"))?;
        let done = get("done")?.as_bool().ok_or_else(|| format!("step {i} done is not a boolean"))?;
        if done != (i + 1 == steps.len()) {
            return Err(format!("step {i} has done={done}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validator_rejects_bad_shapes() {
        assert!(validate_line("[]").is_err());
        assert!(validate_line(r#"{"task":"GoToGoal","difficulty":"easy","seed":1,"total_reward":1.0,"success":true,"steps":[]}"#).is_err());
        let ok = r#"{"task":"GoToGoal","difficulty":"easy","seed":1,"total_reward":1.0,"success":true,
            "steps":[{"t":0,"obs_ascii":"","obs_language":"","action":1,"reward":1.0,"done":true}]}"#;
        assert_eq!(validate_line(ok), Ok(()));
        assert!(validate_line(&ok.replace("\"done\":true", "\"done\":false")).is_err());
        assert!(validate_line(&ok.replace("\"action\":1", "\"action\":9")).is_err());
    }
}
