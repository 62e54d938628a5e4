use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use gridbench::eval::{export_dataset, EVAL_SEEDS};
use gridbench::tasks::catalog;
use gridbench::{Difficulty, RewardMode, TaskId};
use gridbench_cli::{oracle_check_rows, replay_file, run_experiment, task_table, ExperimentConfig, Selection};

/// Exit status when some episodes faulted but a report was still written.
const PARTIAL_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "gridbench", version, about = "Gridworld benchmark runner")]
struct Cli {
    /// Experiment file for `run`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, overriding the config.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Repeat for more log output.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report and episode log.
    Run,
    /// Check the oracle on eval seeds.
    OracleCheck {
        #[arg(long, default_value = "all", value_delimiter = ',')]
        tasks: Vec<String>,
        #[arg(long, default_value = "all", value_delimiter = ',')]
        difficulties: Vec<String>,
        #[arg(long, default_value_t = EVAL_SEEDS)]
        seeds: usize,
    },
    /// Export oracle episodes from the train pool.
    Dataset {
        #[arg(long, default_value_t = 120)]
        episodes: usize,
        #[arg(long, default_value = "all", value_delimiter = ',')]
        tasks: Vec<String>,
        #[arg(long, default_value = "all", value_delimiter = ',')]
        difficulties: Vec<String>,
        #[arg(long, default_value = "sparse")]
        reward_mode: RewardMode,
    },
    /// Start the session service.
    Play {
        #[arg(long, default_value = "127.0.0.1:8765")]
        addr: String,
        #[arg(long, default_value = "envd-data")]
        data_dir: PathBuf,
        /// Require this bearer token on every request.
        #[arg(long, env = "GRIDBENCH_ENVD_TOKEN")]
        token: Option<String>,
        #[arg(long, default_value_t = gridbench_envd::DEFAULT_MAX_SESSIONS)]
        max_sessions: usize,
        /// Idle timeout in seconds.
        #[arg(long, default_value_t = gridbench_envd::DEFAULT_IDLE_TIMEOUT.as_secs())]
        idle_timeout: u64,
    },
    /// List the task catalog.
    Tasks {
        /// Dump the full catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Re-run recorded episodes and check their reward streams.
    Replay { file: PathBuf },
}

fn selection(values: Vec<String>) -> Selection {
    match values.as_slice() {
        [one] => Selection::One(one.clone()),
        _ => Selection::Many(values),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run => {
            let path = cli.config.ok_or("`run` needs --config <file>")?;
            let mut config = ExperimentConfig::load(&path).map_err(|e| e.to_string())?;
            if let Some(out) = cli.out {
                config.output_dir = out;
            }
            if cli.workers.is_some() {
                config.workers = cli.workers;
            }
            let exp = config.resolve().map_err(|e| e.to_string())?;
            let summary = run_experiment(&exp).map_err(|e| e.to_string())?;
            let overall = summary.report.overall.map_or("undefined".to_string(), |o| format!("{o:.3}"));
            println!("{} episodes, overall ONS {overall}", summary.episodes);
            for c in &summary.report.category_scores {
                let ons = c.ons.map_or("-".to_string(), |o| format!("{o:.3}"));
                println!("  {:<15} {ons}", c.category.name());
            }
            println!("report: {}", summary.report_path.display());
            println!("episodes: {}", summary.episodes_path.display());
            if summary.faulted_episodes > 0 {
                eprintln!("{} episode(s) faulted", summary.faulted_episodes);
                return Ok(ExitCode::from(PARTIAL_FAILURE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { tasks, difficulties, seeds } => {
            let tasks = selection(tasks).resolve("tasks", &TaskId::ALL).map_err(|e| e.to_string())?;
            let diffs = selection(difficulties).resolve("difficulties", &Difficulty::ALL).map_err(|e| e.to_string())?;
            let rows = oracle_check_rows(&tasks, &diffs, seeds).map_err(|e| e.to_string())?;
            println!("{:<22} {:<7} {:>8} {:>9} {:>9}", "task", "level", "success", "return", "steps");
            for r in &rows {
                println!(
                    "{:<22} {:<7} {:>8.3} {:>9.3} {:>9.1}",
                    r.task.name(),
                    r.difficulty.name(),
                    r.success_rate,
                    r.mean_return,
                    r.mean_steps
                );
            }
            let failing = rows.iter().filter(|r| r.success_rate < 1.0).count();
            if failing > 0 {
                eprintln!("{failing} pair(s) below 100% oracle success");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dataset { episodes, tasks, difficulties, reward_mode } => {
            let tasks = selection(tasks).resolve("tasks", &TaskId::ALL).map_err(|e| e.to_string())?;
            let diffs = selection(difficulties).resolve("difficulties", &Difficulty::ALL).map_err(|e| e.to_string())?;
            let out = cli.out.unwrap_or_else(|| PathBuf::from("dataset"));
            let manifest = export_dataset(&tasks, &diffs, episodes, reward_mode, &out).map_err(|e| e.to_string())?;
            println!(
                "{} episodes, {} steps -> {} (sha256 {})",
                manifest.episodes,
                manifest.steps,
                out.join(&manifest.file).display(),
                manifest.sha256
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Play { addr, data_dir, token, max_sessions, idle_timeout } => {
            let mut config = gridbench_envd::ServerConfig::new(data_dir);
            config.bearer_token = token;
            config.max_sessions = max_sessions;
            config.idle_timeout = Duration::from_secs(idle_timeout);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| format!("{addr}: {e}"))?;
                let local = listener.local_addr().map_err(|e| e.to_string())?;
                println!("session service listening on http://{local}");
                gridbench_envd::serve(listener, gridbench_envd::AppState::new(config)).await.map_err(|e| e.to_string())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tasks { json } => {
            if json {
                println!("{}", serde_json::to_string_pretty(catalog()).expect("catalog serializes"));
            } else {
                print!("{}", task_table());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { file } => {
            let outcome = replay_file(&file)?;
            for (line, reason) in &outcome.failures {
                eprintln!("line {line}: {reason}");
            }
            println!("{} of {} episode(s) reproduced", outcome.episodes - outcome.failures.len(), outcome.episodes);
            Ok(if outcome.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
