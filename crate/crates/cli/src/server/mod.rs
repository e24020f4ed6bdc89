//! HTTP service: stateless space analysis plus in-memory game sessions.
//!
//! Analyses are computed once per uploaded space and never change. Each
//! session sits behind its own mutex; the maps holding spaces and sessions
//! are only locked long enough to look an entry up.

mod wire;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use scottrank::game::{engine_move, Phase};
use scottrank::space::{decode, encode};
use scottrank::{Clock, Error, GameState, Limits, MetricSpace, Move, Player, RefinementTable, TuplePair};

use crate::report::AnalysisReport;

pub use wire::{SessionView, SpaceView};

/// One analyzed space. Write-once.
pub struct SpaceEntry {
    pub id: String,
    pub space: Arc<MetricSpace>,
    pub table: Arc<RefinementTable>,
    pub report: AnalysisReport,
}

pub struct Session {
    pub id: String,
    pub space: Arc<SpaceEntry>,
    pub human: Player,
    pub state: GameState,
    pub hints: bool,
    last_used: Instant,
}

pub struct AppState {
    spaces: RwLock<HashMap<String, Arc<SpaceEntry>>>,
    games: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    limits: Limits,
    idle: Duration,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn new(idle: Duration) -> Shared {
        Arc::new(AppState {
            spaces: RwLock::new(HashMap::new()),
            games: RwLock::new(HashMap::new()),
            limits: Limits::default(),
            idle,
        })
    }

    fn space(&self, id: &str) -> Option<Arc<SpaceEntry>> {
        self.spaces.read().unwrap().get(id).cloned()
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.games.read().unwrap().get(id).cloned()
    }

    /// Drops sessions idle for longer than the configured timeout. Returns
    /// how many were dropped.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let mut games = self.games.write().unwrap();
        let before = games.len();
        games.retain(|_, s| {
            let s = s.lock().unwrap();
            now.saturating_duration_since(s.last_used) <= self.idle
        });
        before - games.len()
    }

    pub fn session_count(&self) -> usize {
        self.games.read().unwrap().len()
    }

    /// Writes every live session to `dir` as `<id>.json`: the space in its
    /// text format plus the start position and move log.
    pub fn dump(&self, dir: &Path) -> std::io::Result<usize> {
        std::fs::create_dir_all(dir)?;
        let games: Vec<Arc<Mutex<Session>>> = self.games.read().unwrap().values().cloned().collect();
        for g in &games {
            let s = g.lock().unwrap();
            let doc = json!({
                "space": serde_json::from_str::<Value>(&encode(&s.space.space)).expect("codec emits JSON"),
                "a": s.state.tuples().a(),
                "b": s.state.tuples().b(),
                "clock": s.state.initial_clock(),
                "role": s.human,
                "log": s.state.log(),
            });
            let text = serde_json::to_string_pretty(&doc).expect("plain JSON");
            std::fs::write(dir.join(format!("{}.json", s.id)), text + "\n")?;
        }
        Ok(games.len())
    }
}

/// An error response: status plus `{"error": kind, "message": ...}` and any
/// extra fields.
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    fn not_found(what: &str, id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "NotFound", format!("no {what} with id {id:?}"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> ApiError {
        let (status, kind) = match &e {
            Error::Space(_) => (StatusCode::BAD_REQUEST, "ParseError"),
            Error::SpaceTooLarge { .. } => (StatusCode::PAYLOAD_TOO_LARGE, "SpaceTooLarge"),
            Error::IndexOutOfRange { .. } | Error::LengthMismatch { .. } => (StatusCode::BAD_REQUEST, "BadTuples"),
            Error::GameOver => (StatusCode::CONFLICT, "GameOver"),
            Error::IllegalMove { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "IllegalMove"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "Rejected"),
        };
        ApiError::new(status, kind, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "ParseError", e.to_string()))
}

async fn post_space(State(app): State<Shared>, body: Bytes) -> ApiResult {
    let text = std::str::from_utf8(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "ParseError", e.to_string()))?;
    let space = decode(text).map_err(Error::from)?;
    let id = space.fingerprint();
    if let Some(entry) = app.space(&id) {
        return Ok((StatusCode::OK, Json(json!({ "id": id, "report": entry.report })))
            .into_response());
    }
    if space.n() > app.limits.refine_max_n {
        return Err(Error::SpaceTooLarge {
            n: space.n(),
            limit: app.limits.refine_max_n,
        }
        .into());
    }
    let analyzed = tokio::task::spawn_blocking(move || {
        AnalysisReport::analyze(&space).map(|(table, report)| (space, table, report))
    })
    .await
    .expect("analysis does not panic");
    let (space, table, report) = analyzed?;
    let entry = Arc::new(SpaceEntry {
        id: id.clone(),
        space: Arc::new(space),
        table: Arc::new(table),
        report,
    });
    let entry = app
        .spaces
        .write()
        .unwrap()
        .entry(id.clone())
        .or_insert(entry)
        .clone();
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "report": entry.report }))).into_response())
}

async fn get_space(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let entry = app.space(&id).ok_or_else(|| ApiError::not_found("space", &id))?;
    Ok(Json(SpaceView::of(&entry)).into_response())
}

async fn get_analysis(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let entry = app.space(&id).ok_or_else(|| ApiError::not_found("space", &id))?;
    Ok(Json(&entry.report).into_response())
}

#[derive(Deserialize)]
struct NewGame {
    space: String,
    #[serde(default)]
    a: Vec<usize>,
    #[serde(default)]
    b: Vec<usize>,
    clock: Clock,
    role: Player,
    #[serde(default)]
    hints: bool,
}

/// Plays engine moves until the human is to move or the game is over.
fn advance(session: &mut Session) -> Result<Vec<Move>, Error> {
    let mut played = Vec::new();
    while let Some(p) = session.state.to_move() {
        if p == session.human {
            break;
        }
        let mv = engine_move(&session.state, &session.space.table)?;
        session.state = session.state.apply_move(mv)?;
        played.push(mv);
    }
    Ok(played)
}

fn new_id() -> String {
    format!("g{:016x}", rand::random::<u64>())
}

async fn post_game(State(app): State<Shared>, body: Bytes) -> ApiResult {
    let req: NewGame = parse_json(&body)?;
    let entry = app.space(&req.space).ok_or_else(|| ApiError::not_found("space", &req.space))?;
    let tuples = TuplePair::new(req.a, req.b)?;
    let state = GameState::new(entry.space.clone(), tuples, req.clock)?;
    let mut session = Session {
        id: new_id(),
        space: entry,
        human: req.role,
        state,
        hints: req.hints,
        last_used: Instant::now(),
    };
    let engine = advance(&mut session)?;
    let view = SessionView::of(&session, engine)?;
    app.games
        .write()
        .unwrap()
        .insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_game(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let session = app.session(&id).ok_or_else(|| ApiError::not_found("game", &id))?;
    let mut s = session.lock().unwrap();
    s.last_used = Instant::now();
    Ok(Json(SessionView::of(&s, Vec::new())?).into_response())
}

async fn post_move(State(app): State<Shared>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id).ok_or_else(|| ApiError::not_found("game", &id))?;
    let mv: Move = parse_json(&body)?;
    let mut s = session.lock().unwrap();
    s.last_used = Instant::now();
    let Some(to_move) = s.state.to_move() else {
        return Err(Error::GameOver.into());
    };
    let mover = match mv {
        Move::Challenge(_) => Player::I,
        Move::Response { .. } => Player::II,
    };
    if mover != s.human || to_move != s.human {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "NotYourTurn",
            format!("you play {}; Player {to_move} is to move", s.human),
        ));
    }
    // The session refuses invalid extensions instead of scoring them as a
    // loss, so a misclick cannot end the game.
    if let (Move::Response { point }, Phase::AwaitResponse(ch)) = (mv, s.state.phase()) {
        if let Err(reason) = s.state.map().extend(ch.side, ch.point, point) {
            let valid: Vec<Move> = (0..s.space.space.n())
                .filter(|&y| s.state.map().extend(ch.side, ch.point, y).is_ok())
                .map(|point| Move::Response { point })
                .collect();
            let mut err = ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "IllegalMove",
                format!("response {point} is not a valid extension ({reason})"),
            );
            err.body["legal"] = serde_json::to_value(valid).expect("moves serialize");
            return Err(err);
        }
    }
    let next = match s.state.apply_move(mv) {
        Ok(next) => next,
        Err(e @ Error::IllegalMove { .. }) => {
            let mut err = ApiError::from(e);
            err.body["legal"] = serde_json::to_value(s.state.legal_moves()?).expect("moves serialize");
            return Err(err);
        }
        Err(e) => return Err(e.into()),
    };
    s.state = next;
    let engine = advance(&mut s)?;
    Ok(Json(SessionView::of(&s, engine)?).into_response())
}

async fn delete_game(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult {
    match app.games.write().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT.into_response()),
        None => Err(ApiError::not_found("game", &id)),
    }
}

#[derive(Deserialize)]
struct HintToggle {
    on: bool,
}

async fn put_hints(State(app): State<Shared>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id).ok_or_else(|| ApiError::not_found("game", &id))?;
    let toggle: HintToggle = parse_json(&body)?;
    let mut s = session.lock().unwrap();
    s.last_used = Instant::now();
    s.hints = toggle.on;
    Ok(Json(SessionView::of(&s, Vec::new())?).into_response())
}

pub fn router(app: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/spaces", post(post_space))
        .route("/spaces/{id}", get(get_space))
        .route("/spaces/{id}/analysis", get(get_analysis))
        .route("/games", post(post_game))
        .route("/games/{id}", get(get_game).delete(delete_game))
        .route("/games/{id}/moves", post(post_move))
        .route("/games/{id}/hints", put(put_hints))
        .with_state(app);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub struct ServeOptions {
    pub port: u16,
    pub static_dir: Option<PathBuf>,
    pub idle: Duration,
    pub dump: Option<PathBuf>,
}

/// Runs until interrupted, then writes the session dump if requested.
pub async fn serve(opts: ServeOptions) -> std::io::Result<()> {
    let app = AppState::new(opts.idle);
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", opts.port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.expire_idle(Instant::now());
        }
    });
    axum::serve(listener, router(app.clone(), opts.static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(dir) = opts.dump {
        let count = app.dump(&dir)?;
        eprintln!("wrote {count} sessions to {}", dir.display());
    }
    Ok(())
}
