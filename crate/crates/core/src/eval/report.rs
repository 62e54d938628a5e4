use std::path::Path;

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_partial, aggregate_values, CategoryScore};
use super::score::{percentile, ScoreRecord, BOOTSTRAP_RESAMPLES};
use super::{write_atomic, EvalError};
use crate::rng::StreamRng;
use crate::tasks::RewardMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub agent: String,
    pub harness_preset: Option<String>,
    pub obs_mode: String,
    pub model_family: Option<String>,
    pub parameter_count: Option<u64>,
    pub timestamp: String,
    pub engine_version: String,
    pub reward_mode: RewardMode,
    pub seeds_per_pair: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub metadata: ReportMetadata,
    pub records: Vec<ScoreRecord>,
    /// Six entries, fixed order.
    pub category_scores: Vec<CategoryScore>,
    pub overall: Option<f64>,
    pub overall_ci_low: Option<f64>,
    pub overall_ci_high: Option<f64>,
    pub degenerate_pairs: usize,
}

const OVERALL_STREAM: u64 = 0x0E7A_11C1;

/// Aggregate pair scores into a report. The overall interval resamples
/// episodes within every pair and re-aggregates.
pub fn build_report(records: Vec<ScoreRecord>, metadata: ReportMetadata) -> Result<BenchmarkReport, EvalError> {
    let agg = aggregate_partial(&records)?;
    let (overall_ci_low, overall_ci_high) = match agg.overall {
        Some(_) => {
            let (lo, hi) = overall_interval(&records);
            (Some(lo), Some(hi))
        }
        None => {
            if let Some(missing) = agg.categories.iter().find(|c| c.ons.is_none()) {
                log::warn!("category `{}` has no scored pairs; overall left undefined", missing.category.name());
            }
            (None, None)
        }
    };
    Ok(BenchmarkReport {
        metadata,
        records,
        category_scores: agg.categories,
        overall: agg.overall,
        overall_ci_low,
        overall_ci_high,
        degenerate_pairs: agg.degenerate_pairs,
    })
}

fn overall_interval(records: &[ScoreRecord]) -> (f64, f64) {
    let pairs: Vec<(crate::tasks::TaskId, Vec<f64>)> =
        records.iter().filter(|r| !r.degenerate).map(|r| (r.task, r.episode_ons())).collect();
    let mut rng = StreamRng::new(OVERALL_STREAM);
    let mut overall: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .filter_map(|_| {
            let resampled = pairs.iter().map(|(task, ons)| {
                let n = ons.len();
                (*task, (0..n).map(|_| ons[rng.index(n)]).sum::<f64>() / n as f64)
            });
            let resampled: Vec<_> = resampled.collect();
            aggregate_values(resampled.into_iter(), 0).overall
        })
        .collect();
    overall.sort_by(f64::total_cmp);
    (percentile(&overall, 0.025), percentile(&overall, 0.975))
}

/// Serialize with sorted object keys.
pub fn emit_report(report: &BenchmarkReport, out_path: &Path) -> Result<(), EvalError> {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut text = serde_json::to_string_pretty(&sorted(value)).expect("value serializes");
    text.push('\n');
    write_atomic(out_path, text.as_bytes())
}

fn sorted(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

pub fn load_report(path: &Path) -> Result<BenchmarkReport, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| EvalError::Json { path: path.to_path_buf(), source })
}
