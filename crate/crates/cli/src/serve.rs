//! HTTP game service: humans play agents through a small JSON API.
//!
//! | method | path                     | body                                              |
//! |--------|--------------------------|---------------------------------------------------|
//! | POST   | `/api/games`             | `{rows, cols, inarow, agent, human_plays_first}`  |
//! | POST   | `/api/games/{id}/moves`  | `{column}`                                        |
//! | GET    | `/api/games/{id}`        |                                                   |
//! | GET    | `/api/agents`            |                                                   |
//!
//! Sessions live in memory only. Finished games beyond the session cap are
//! evicted least recently used first; games in progress are kept.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use connectx::{Agent, AgentSpec, Board, GameConfig, Mark, Outcome, TimeControl};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::OwnedMutexGuard;
use tower_http::services::ServeDir;

#[derive(Debug, Clone)]
pub struct ServeConfig {
    /// Thinking time for agent replies.
    pub time: TimeControl,
    pub max_sessions: usize,
    /// Agent seeds are derived from this and a session counter.
    pub seed: u64,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            time: TimeControl::default(),
            max_sessions: 1000,
            seed: 0,
            static_dir: None,
        }
    }
}

struct Session {
    id: String,
    board: Board,
    outcome: Outcome,
    human: Mark,
    spec: String,
    agent: Box<dyn Agent>,
    moves: Vec<usize>,
    last_agent_move: Option<usize>,
    created_ms: u64,
    updated_ms: u64,
}

struct Entry {
    session: Arc<tokio::sync::Mutex<Session>>,
    finished: bool,
    touched: u64,
}

#[derive(Default)]
struct Store {
    sessions: HashMap<String, Entry>,
    tick: u64,
    created: u64,
}

impl Store {
    fn touch(&mut self, id: &str, finished: bool) {
        self.tick += 1;
        if let Some(e) = self.sessions.get_mut(id) {
            e.finished = finished;
            e.touched = self.tick;
        }
    }

    fn evict(&mut self, cap: usize) {
        while self.sessions.len() > cap {
            let oldest = self
                .sessions
                .iter()
                .filter(|(_, e)| e.finished)
                .min_by_key(|(_, e)| e.touched)
                .map(|(id, _)| id.clone());
            match oldest {
                Some(id) => {
                    self.sessions.remove(&id);
                }
                None => break,
            }
        }
    }
}

struct AppState {
    config: ServeConfig,
    store: Mutex<Store>,
}

type Shared = Arc<AppState>;

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    HumanWon,
    AgentWon,
    Draw,
}

/// Snapshot of a session as sent to clients.
#[derive(Debug, Serialize)]
pub struct GameState {
    pub id: String,
    pub rows: usize,
    pub cols: usize,
    pub inarow: usize,
    /// Serialized board text.
    pub board: String,
    /// `cells[r][c]`, top row first: 0 empty, 1 or 2 for a player's token.
    pub cells: Vec<Vec<u8>>,
    pub human_mark: u8,
    pub to_move: u8,
    pub agent: String,
    pub moves: Vec<usize>,
    pub legal_moves: Vec<usize>,
    pub last_agent_move: Option<usize>,
    pub status: Status,
    pub time_limit_ms: u64,
    pub created_ms: u64,
    pub updated_ms: u64,
}

impl Session {
    fn status(&self) -> Status {
        match self.outcome {
            Outcome::Ongoing => Status::Ongoing,
            Outcome::Draw => Status::Draw,
            Outcome::Win(m) if m == self.human => Status::HumanWon,
            Outcome::Win(_) => Status::AgentWon,
        }
    }

    fn snapshot(&self, time: TimeControl) -> GameState {
        let cfg = self.board.config();
        let over = self.outcome.is_over();
        GameState {
            id: self.id.clone(),
            rows: cfg.rows(),
            cols: cfg.cols(),
            inarow: cfg.inarow(),
            board: self.board.serialize(),
            cells: (0..cfg.rows())
                .map(|r| (0..cfg.cols()).map(|c| self.board.cell(r, c).map_or(0, Mark::number)).collect())
                .collect(),
            human_mark: self.human.number(),
            to_move: self.board.to_move().number(),
            agent: self.spec.clone(),
            moves: self.moves.clone(),
            legal_moves: if over { vec![] } else { self.board.legal_moves() },
            last_agent_move: self.last_agent_move,
            status: self.status(),
            time_limit_ms: time.per_move.as_millis() as u64,
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
        }
    }

    fn apply(&mut self, col: usize) {
        self.board = self.board.apply_move(col).expect("caller checked legality");
        self.moves.push(col);
        self.outcome = self.board.outcome(Some(col));
        self.updated_ms = now_ms();
    }
}

/// Lets the session's agent move. Runs on the blocking pool so a long
/// search does not stall other requests.
async fn agent_reply(
    mut guard: OwnedMutexGuard<Session>,
    time: TimeControl,
) -> (OwnedMutexGuard<Session>, Result<usize, String>) {
    let joined = tokio::task::spawn_blocking(move || {
        let s = &mut *guard;
        let deadline = Instant::now() + time.agent_budget();
        let reply = match s.agent.choose(&s.board, s.board.to_move(), deadline) {
            Ok(col) if s.board.is_legal(col) => {
                s.apply(col);
                s.last_agent_move = Some(col);
                Ok(col)
            }
            Ok(col) => Err(format!("agent chose unplayable column {col}")),
            Err(e) => Err(e.to_string()),
        };
        (guard, reply)
    })
    .await;
    joined.expect("agent task panicked")
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(json!({ "error": msg.into() }))).into_response()
}

#[derive(Debug, Deserialize)]
pub struct NewGame {
    pub rows: usize,
    pub cols: usize,
    pub inarow: usize,
    pub agent: String,
    #[serde(default = "yes")]
    pub human_plays_first: bool,
}

fn yes() -> bool {
    true
}

async fn create_game(State(app): State<Shared>, body: Result<Json<NewGame>, JsonRejection>) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let config = match GameConfig::new(req.rows, req.cols, req.inarow) {
        Ok(c) => c,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let spec: AgentSpec = match req.agent.parse() {
        Ok(s) => s,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("{e}")),
    };
    let n = {
        let mut store = app.store.lock().expect("store lock");
        store.created += 1;
        store.created
    };
    let agent = match spec.build(app.config.seed.wrapping_add(n)) {
        Ok(a) => a,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let now = now_ms();
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Arc::new(tokio::sync::Mutex::new(Session {
        id: id.clone(),
        board: Board::empty(config),
        outcome: Outcome::Ongoing,
        human: if req.human_plays_first { Mark::P1 } else { Mark::P2 },
        spec: spec.to_string(),
        agent,
        moves: Vec::new(),
        last_agent_move: None,
        created_ms: now,
        updated_ms: now,
    }));
    let mut guard = session.clone().try_lock_owned().expect("new session is unshared");
    if !req.human_plays_first {
        let (g, reply) = agent_reply(guard, app.config.time).await;
        guard = g;
        if let Err(e) = reply {
            return error(StatusCode::INTERNAL_SERVER_ERROR, e);
        }
    }
    let state = guard.snapshot(app.config.time);
    let finished = guard.outcome.is_over();
    drop(guard);
    {
        let mut store = app.store.lock().expect("store lock");
        store.sessions.insert(
            id.clone(),
            Entry {
                session,
                finished,
                touched: 0,
            },
        );
        store.touch(&id, finished);
        store.evict(app.config.max_sessions);
    }
    (StatusCode::CREATED, Json(json!({ "id": id, "state": state }))).into_response()
}

fn lookup(app: &AppState, id: &str) -> Option<Arc<tokio::sync::Mutex<Session>>> {
    let mut store = app.store.lock().expect("store lock");
    let session = store.sessions.get(id)?.session.clone();
    let finished = store.sessions[id].finished;
    store.touch(id, finished);
    Some(session)
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub column: usize,
}

async fn post_move(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Response {
    let Some(session) = lookup(&app, &id) else {
        return error(StatusCode::NOT_FOUND, format!("no game {id}"));
    };
    let Json(req) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    // one request at a time per session; the rest are turned away
    let Ok(mut guard) = session.try_lock_owned() else {
        return error(StatusCode::CONFLICT, "another move for this game is in progress");
    };
    if guard.outcome.is_over() {
        return error(StatusCode::CONFLICT, "game is over");
    }
    if guard.board.to_move() != guard.human {
        return error(StatusCode::CONFLICT, "not your turn");
    }
    if !guard.board.is_legal(req.column) {
        let state = guard.snapshot(app.config.time);
        return (
            StatusCode::UNPROCESSABLE_ENTITY,
            Json(json!({ "error": format!("column {} is not playable", req.column), "state": state })),
        )
            .into_response();
    }
    let before = (guard.board, guard.outcome, guard.moves.len(), guard.updated_ms);
    guard.apply(req.column);
    let mut agent_move = None;
    if !guard.outcome.is_over() {
        let (g, reply) = agent_reply(guard, app.config.time).await;
        guard = g;
        match reply {
            Ok(col) => agent_move = Some(col),
            Err(e) => {
                // roll back so the human can try again
                (guard.board, guard.outcome) = (before.0, before.1);
                guard.moves.truncate(before.2);
                guard.updated_ms = before.3;
                return error(StatusCode::INTERNAL_SERVER_ERROR, e);
            }
        }
    }
    let state = guard.snapshot(app.config.time);
    let finished = guard.outcome.is_over();
    drop(guard);
    {
        let mut store = app.store.lock().expect("store lock");
        store.touch(&id, finished);
        store.evict(app.config.max_sessions);
    }
    let status = state.status;
    Json(json!({ "state": state, "agent_move": agent_move, "status": status })).into_response()
}

async fn get_game(State(app): State<Shared>, Path(id): Path<String>) -> Response {
    let Some(session) = lookup(&app, &id) else {
        return error(StatusCode::NOT_FOUND, format!("no game {id}"));
    };
    let guard = session.lock().await;
    Json(guard.snapshot(app.config.time)).into_response()
}

async fn list_agents() -> Response {
    Json(AgentSpec::catalog()).into_response()
}

/// The service's routes, with static files from `static_dir` (if any) at `/`.
pub fn router(config: ServeConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let state = Arc::new(AppState {
        config,
        store: Mutex::new(Store::default()),
    });
    let api = Router::new()
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game))
        .route("/api/games/{id}/moves", post(post_move))
        .route("/api/agents", get(list_agents))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until Ctrl-C.
pub async fn run(addr: &str, config: ServeConfig) -> anyhow::Result<()> {
    if let Some(dir) = &config.static_dir {
        anyhow::ensure!(dir.is_dir(), "static directory {} does not exist", dir.display());
    }
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
