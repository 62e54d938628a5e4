use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, Utf8Bytes, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, Request, State};
use axum::http::header;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gridbench::eval::{derive_seed, SeedPool, TRAIN_SEEDS};
use gridbench::tasks::catalog;
use gridbench::{Difficulty, ObsMode, RewardMode, TaskId};
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, OnceCell};

use crate::config::ServerConfig;
use crate::error::ServiceError;
use crate::ledger::{append_row, score_episode, FinalizeResult, LedgerRow};
use crate::session::{ObsPayload, Session, StepPayload};

const PUSH_BUFFER: usize = 64;

struct SessionSlot {
    session: Mutex<Session>,
    result: OnceCell<FinalizeResult>,
    pushes: broadcast::Sender<Utf8Bytes>,
}

impl SessionSlot {
    fn lock(&self) -> MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|p| p.into_inner())
    }
}

/// Shared service state: configuration plus the session table.
pub struct AppState {
    config: ServerConfig,
    sessions: Mutex<HashMap<String, Arc<SessionSlot>>>,
    ledger: Mutex<()>,
}

impl AppState {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(AppState { config, sessions: Mutex::new(HashMap::new()), ledger: Mutex::new(()) })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    fn table(&self) -> MutexGuard<'_, HashMap<String, Arc<SessionSlot>>> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn slot(&self, id: &str) -> Result<Arc<SessionSlot>, ServiceError> {
        self.table().get(id).cloned().ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    /// Sessions that have not been finalized yet.
    pub fn live_sessions(&self) -> usize {
        self.table().values().filter(|s| s.result.get().is_none()).count()
    }

    async fn finalize(&self, slot: &SessionSlot) -> Result<FinalizeResult, ServiceError> {
        let result = slot
            .result
            .get_or_try_init(|| async {
                let (record, owner_tag, id) = {
                    let s = slot.lock();
                    if !s.is_over() {
                        return Err(ServiceError::EpisodeStillRunning);
                    }
                    (s.record(), s.owner_tag.clone(), s.id.clone())
                };
                let config = self.config.clone();
                let result = tokio::task::spawn_blocking(move || -> Result<FinalizeResult, ServiceError> {
                    let score = score_episode(&record, &config.baseline_dir())?;
                    let record_path = config.record_path(&id);
                    std::fs::create_dir_all(config.records_dir())
                        .and_then(|_| std::fs::write(&record_path, serde_json::to_vec(&record).expect("record serializes")))
                        .map_err(|e| ServiceError::Internal(format!("{}: {e}", record_path.display())))?;
                    Ok(FinalizeResult {
                        session_id: id,
                        owner_tag,
                        task: record.task,
                        difficulty: record.difficulty,
                        seed: record.seed,
                        episode_return: record.total_reward,
                        ons: score.ons,
                        degenerate: score.ons.is_none(),
                        random_baseline: score.random_baseline,
                        oracle_return: score.oracle_return,
                        outcome: record.outcome,
                        steps: record.steps.len(),
                        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                        record_path: record_path.display().to_string(),
                    })
                })
                .await
                .map_err(|e| ServiceError::Internal(e.to_string()))??;
                {
                    let _guard = self.ledger.lock().unwrap_or_else(|p| p.into_inner());
                    append_row(&self.config.ledger_path(), &LedgerRow::from(&result))?;
                }
                Ok(result)
            })
            .await?;
        slot.lock().touch();
        Ok(result.clone())
    }

    /// Finalize sessions idle past the timeout as truncated, and drop finalized
    /// sessions idle past it. Returns how many sessions were touched.
    pub async fn reap_idle(&self, now: Instant) -> usize {
        let timeout = self.config.idle_timeout;
        let idle: Vec<(String, Arc<SessionSlot>)> = self
            .table()
            .iter()
            .filter(|(_, s)| now.saturating_duration_since(s.lock().last_active) >= timeout)
            .map(|(id, s)| (id.clone(), s.clone()))
            .collect();
        for (id, slot) in &idle {
            if slot.result.get().is_some() {
                self.table().remove(id);
                continue;
            }
            slot.lock().expire();
            match self.finalize(slot).await {
                Ok(r) => log::info!("session {id} expired after idle timeout with return {}", r.episode_return),
                Err(e) => {
                    log::error!("could not finalize idle session {id}: {e}");
                    self.table().remove(id);
                }
            }
        }
        idle.len()
    }
}

/// Periodically reap idle sessions until the runtime shuts down.
pub fn spawn_reaper(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    let period = (state.config.idle_timeout / 4).clamp(Duration::from_millis(10), Duration::from_secs(30));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            state.reap_idle(Instant::now()).await;
        }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateRequest {
    pub task: String,
    pub difficulty: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub obs_mode: Option<String>,
    #[serde(default)]
    pub owner_tag: Option<String>,
    #[serde(default)]
    pub reward_mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CreateResponse {
    pub session_id: String,
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub seed: u64,
    /// Train-pool index the seed was drawn from when none was given.
    pub train_index: Option<usize>,
    pub obs_mode: ObsMode,
    pub reward_mode: RewardMode,
    pub max_steps: u32,
    pub created_at: String,
    pub initial: ObsPayload,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRequest {
    pub action: i64,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

fn parse<T: std::str::FromStr>(what: &str, raw: &str) -> Result<T, ServiceError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| ServiceError::BadRequest(format!("{what}: {e}")))
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<Json<CreateResponse>, ServiceError> {
    let req = body(payload)?;
    let task: TaskId = req.task.parse()?;
    let difficulty: Difficulty = parse("difficulty", &req.difficulty)?;
    let obs_mode: ObsMode = match &req.obs_mode {
        Some(m) => parse("obs_mode", m)?,
        None => ObsMode::Ascii,
    };
    let reward_mode: RewardMode = match &req.reward_mode {
        Some(m) => parse("reward_mode", m)?,
        None => state.config.reward_mode,
    };
    let (seed, train_index) = match req.seed {
        Some(s) => (s, None),
        None => {
            let i = rand::random_range(0..TRAIN_SEEDS);
            (derive_seed(task, difficulty, SeedPool::Train, i), Some(i))
        }
    };
    let id = format!("{:032x}", rand::random::<u128>());
    let owner_tag = req.owner_tag.unwrap_or_else(|| "anonymous".to_string());
    let session = Session::new(id.clone(), task, difficulty, seed, obs_mode, reward_mode, owner_tag)?;
    let response = CreateResponse {
        session_id: id.clone(),
        task,
        difficulty,
        seed,
        train_index,
        obs_mode,
        reward_mode,
        max_steps: session.env().state().max_steps,
        created_at: session.created_at.to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        initial: session.obs_payload(),
    };
    let slot = Arc::new(SessionSlot {
        session: Mutex::new(session),
        result: OnceCell::new(),
        pushes: broadcast::channel(PUSH_BUFFER).0,
    });
    {
        let mut table = state.table();
        let live = table.values().filter(|s| s.result.get().is_none()).count();
        if live >= state.config.max_sessions {
            return Err(ServiceError::CapacityExceeded(state.config.max_sessions));
        }
        table.insert(id, slot);
    }
    Ok(Json(response))
}

async fn step_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<StepRequest>, JsonRejection>,
) -> Result<Json<StepPayload>, ServiceError> {
    let req = body(payload)?;
    let slot = state.slot(&id)?;
    let out = slot.lock().step(req.action)?;
    let text = serde_json::to_string(&out).expect("payload serializes");
    let _ = slot.pushes.send(text.into());
    Ok(Json(out))
}

async fn get_obs(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ObsPayload>, ServiceError> {
    let slot = state.slot(&id)?;
    let mut s = slot.lock();
    s.touch();
    Ok(Json(s.obs_payload()))
}

async fn get_frame(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let slot = state.slot(&id)?;
    let (env, version) = {
        let s = slot.lock();
        (s.env().clone(), s.frame_version())
    };
    let png = tokio::task::spawn_blocking(move || {
        let frame = env.bundle(true).pixels.expect("pixels requested");
        frame.to_png()
    })
    .await
    .map_err(|e| ServiceError::Internal(e.to_string()))?;
    Ok((
        [
            (header::CONTENT_TYPE, "image/png".to_string()),
            (header::CACHE_CONTROL, "no-store".to_string()),
            (header::ETAG, format!("\"{version}\"")),
        ],
        png,
    )
        .into_response())
}

async fn finalize_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<FinalizeResult>, ServiceError> {
    let slot = state.slot(&id)?;
    Ok(Json(state.finalize(&slot).await?))
}

async fn list_tasks() -> Json<serde_json::Value> {
    Json(serde_json::to_value(catalog()).expect("catalog serializes"))
}

async fn session_ws(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let slot = state.slot(&id)?;
    let rx = slot.pushes.subscribe();
    Ok(ws.on_upgrade(move |socket| forward_pushes(socket, rx)))
}

async fn forward_pushes(mut socket: WebSocket, mut rx: broadcast::Receiver<Utf8Bytes>) {
    loop {
        tokio::select! {
            push = rx.recv() => match push {
                Ok(text) => {
                    if socket.send(Message::Text(text)).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => log::warn!("websocket subscriber skipped {n} pushes"),
                Err(broadcast::error::RecvError::Closed) => break,
            },
            incoming = socket.recv() => match incoming {
                None | Some(Err(_)) | Some(Ok(Message::Close(_))) => break,
                Some(Ok(_)) => {}
            },
        }
    }
}

#[derive(Deserialize)]
struct TokenQuery {
    token: Option<String>,
}

async fn require_token(
    State(state): State<Arc<AppState>>,
    Query(query): Query<TokenQuery>,
    request: Request,
    next: Next,
) -> Result<Response, ServiceError> {
    if let Some(expected) = &state.config.bearer_token {
        let header_token = request
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        let given = header_token.or(query.token.as_deref());
        if given != Some(expected.as_str()) {
            return Err(ServiceError::Unauthorized);
        }
    }
    Ok(next.run(request).await)
}

/// All routes, with bearer-token checking when the config sets a token.
pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/tasks", get(list_tasks))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/step", post(step_session))
        .route("/sessions/{id}/obs", get(get_obs))
        .route("/sessions/{id}/frame.png", get(get_frame))
        .route("/sessions/{id}/finalize", post(finalize_session))
        .route("/sessions/{id}/ws", get(session_ws))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}
