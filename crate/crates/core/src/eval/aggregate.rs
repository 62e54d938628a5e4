use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::score::{mean, ScoreRecord};
use super::EvalError;
use crate::tasks::{Category, Difficulty, TaskId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: Category,
    /// `None` when no task of the category has a non-degenerate pair.
    pub ons: Option<f64>,
    pub tasks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    /// One entry per category, in reporting order.
    pub categories: Vec<CategoryScore>,
    pub overall: Option<f64>,
    pub degenerate_pairs: usize,
}

/// Arithmetic mean of the category means.
///
/// ```
/// let overall = gridbench::eval::overall_from_categories(&[0.456, 0.334, 0.131, 0.348, 0.437, 0.150]);
/// assert!((overall - 0.309).abs() < 1e-3);
/// ```
pub fn overall_from_categories(category_means: &[f64]) -> f64 {
    mean(category_means)
}

/// Task mean over difficulties, category mean over tasks, overall mean over categories.
///
/// Categories without usable pairs are reported as `None` and leave the overall
/// undefined; [`aggregate`] turns that into an error.
pub fn aggregate_partial(records: &[ScoreRecord]) -> Result<Aggregate, EvalError> {
    let mut seen = BTreeSet::<(TaskId, Difficulty)>::new();
    for r in records {
        if !seen.insert((r.task, r.difficulty)) {
            return Err(EvalError::DuplicatePair { task: r.task, difficulty: r.difficulty });
        }
    }
    let degenerate_pairs = records.iter().filter(|r| r.degenerate).count();
    if degenerate_pairs > 0 {
        log::warn!("{degenerate_pairs} degenerate pair(s) excluded from aggregation");
    }
    Ok(aggregate_values(records.iter().filter_map(|r| r.ons.map(|o| (r.task, o))), degenerate_pairs))
}

pub(crate) fn aggregate_values(pairs: impl Iterator<Item = (TaskId, f64)>, degenerate_pairs: usize) -> Aggregate {
    let mut per_task: BTreeMap<TaskId, Vec<f64>> = BTreeMap::new();
    for (task, ons) in pairs {
        per_task.entry(task).or_default().push(ons);
    }
    let categories: Vec<CategoryScore> = Category::ALL
        .iter()
        .map(|&category| {
            let task_means: Vec<f64> =
                per_task.iter().filter(|(t, _)| t.category() == category).map(|(_, v)| mean(v)).collect();
            CategoryScore {
                category,
                ons: (!task_means.is_empty()).then(|| mean(&task_means)),
                tasks: task_means.len(),
            }
        })
        .collect();
    let overall = categories
        .iter()
        .map(|c| c.ons)
        .collect::<Option<Vec<f64>>>()
        .map(|v| overall_from_categories(&v));
    Aggregate { categories, overall, degenerate_pairs }
}

/// Like [`aggregate_partial`] but every category must be covered.
pub fn aggregate(records: &[ScoreRecord]) -> Result<Aggregate, EvalError> {
    let agg = aggregate_partial(records)?;
    if let Some(empty) = agg.categories.iter().find(|c| c.ons.is_none()) {
        return Err(EvalError::EmptyCategory(empty.category));
    }
    Ok(agg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(task: TaskId, difficulty: Difficulty, ons: Option<f64>) -> ScoreRecord {
        ScoreRecord {
            task,
            difficulty,
            agent_return: 0.0,
            random_baseline: 0.0,
            oracle_return: 1.0,
            ons,
            ci_low: None,
            ci_high: None,
            n_episodes: 1,
            degenerate: ons.is_none(),
            success_rate: 0.0,
            episode_returns: vec![0.0],
        }
    }

    #[test]
    fn task_means_are_weighted_equally_within_a_category() {
        // Navigation holds GoToGoal and MazeNavigation; one pair vs. four pairs.
        let mut recs = vec![record(TaskId::GoToGoal, Difficulty::Easy, Some(1.0))];
        for d in Difficulty::ALL {
            recs.push(record(TaskId::MazeNavigation, d, Some(0.0)));
        }
        let agg = aggregate_partial(&recs).unwrap();
        let nav = agg.categories.iter().find(|c| c.category == Category::Navigation).unwrap();
        assert_eq!(nav.ons, Some(0.5));
        assert_eq!(agg.overall, None);
        assert!(matches!(aggregate(&recs), Err(EvalError::EmptyCategory(Category::Planning))));
    }

    #[test]
    fn duplicates_and_degenerates() {
        let recs = vec![
            record(TaskId::GoToGoal, Difficulty::Easy, Some(1.0)),
            record(TaskId::GoToGoal, Difficulty::Easy, Some(1.0)),
        ];
        assert!(matches!(aggregate_partial(&recs), Err(EvalError::DuplicatePair { .. })));
        let recs = vec![
            record(TaskId::GoToGoal, Difficulty::Easy, Some(1.0)),
            record(TaskId::GoToGoal, Difficulty::Hard, None),
        ];
        let agg = aggregate_partial(&recs).unwrap();
        assert_eq!(agg.degenerate_pairs, 1);
        assert_eq!(agg.categories[0].ons, Some(1.0));
    }
}
