use std::path::Path;

use gridbench::eval::{derive_seeds, replay_episode, EpisodeRecord, SeedPool};
use gridbench::oracle::verify_oracle;
use gridbench::tasks::catalog;
use gridbench::{Difficulty, EnvError, TaskId};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub episodes: usize,
    pub success_rate: f64,
    pub mean_return: f64,
    pub mean_steps: f64,
}

/// Oracle success, return and length on the first `seeds` eval seeds of every pair.
pub fn oracle_check_rows(tasks: &[TaskId], difficulties: &[Difficulty], seeds: usize) -> Result<Vec<OracleRow>, EnvError> {
    let mut rows = Vec::new();
    for &task in tasks {
        for &difficulty in difficulties {
            let check = verify_oracle(task, difficulty, &derive_seeds(task, difficulty, SeedPool::Eval, seeds))?;
            rows.push(OracleRow {
                task,
                difficulty,
                episodes: check.episodes,
                success_rate: check.success_rate,
                mean_return: check.mean_return,
                mean_steps: check.mean_steps,
            });
        }
    }
    Ok(rows)
}

/// One line per task: name, category and description.
pub fn task_table() -> String {
    let mut out = String::new();
    for spec in catalog() {
        out.push_str(&format!("{:<22} {:<15} {}\n", spec.id.name(), spec.category.name(), spec.description));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub episodes: usize,
    /// `(line number, reason)` for every episode that did not reproduce.
    pub failures: Vec<(usize, String)>,
}

/// Re-run every episode in a JSON or newline-delimited JSON file.
pub fn replay_file(path: &Path) -> Result<ReplayOutcome, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let records: Vec<(usize, Result<EpisodeRecord, serde_json::Error>)> = match serde_json::from_str(&text) {
        Ok(single) => vec![(1, Ok(single))],
        Err(_) => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, serde_json::from_str(l)))
            .collect(),
    };
    let mut failures = Vec::new();
    for (line, parsed) in &records {
        match parsed {
            Ok(record) => {
                if let Err(e) = replay_episode(record) {
                    failures.push((*line, e.to_string()));
                }
            }
            Err(e) => failures.push((*line, format!("not an episode record: {e}"))),
        }
    }
    Ok(ReplayOutcome { episodes: records.len(), failures })
}
