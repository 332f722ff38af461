use std::collections::HashMap;
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::watch;

use corrida_core::engines::Engine;

use crate::session::{CreateSession, Event, SessionCore, Snapshot};
use crate::store::MoveLog;
use crate::ServiceError;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Directory for move logs; `None` keeps sessions in memory only.
    pub store: Option<PathBuf>,
    pub idle_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            store: None,
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
        }
    }
}

struct Session {
    core: Mutex<SessionCore>,
    engine: Mutex<Option<Box<dyn Engine>>>,
    /// Latest event seq, for waking subscribers.
    seq: watch::Sender<u64>,
    last_active: Mutex<Instant>,
}

impl Session {
    fn new(core: SessionCore) -> Arc<Session> {
        let (seq, _) = watch::channel(core.seq());
        Arc::new(Session {
            core: Mutex::new(core),
            engine: Mutex::new(None),
            seq,
            last_active: Mutex::new(Instant::now()),
        })
    }

    fn touch(&self) {
        *self.last_active.lock().unwrap() = Instant::now();
    }

    fn publish(&self, seq: u64) {
        self.seq.send_replace(seq);
    }
}

struct Inner {
    sessions: Mutex<HashMap<String, Arc<Session>>>,
    log: Option<MoveLog>,
    idle_timeout: Duration,
}

/// Session registry shared by all request handlers.
#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

impl Service {
    /// Opens the service, restoring every logged session. Must run inside a Tokio runtime when
    /// restored sessions have the engine to move.
    pub fn open(config: ServiceConfig) -> Result<Service, ServiceError> {
        let log = config.store.as_deref().map(MoveLog::open).transpose()?;
        let mut sessions = HashMap::new();
        if let Some(log) = &log {
            for core in log.load_all()? {
                sessions.insert(core.id.clone(), Session::new(core));
            }
        }
        let service = Service {
            inner: Arc::new(Inner {
                sessions: Mutex::new(sessions),
                log,
                idle_timeout: config.idle_timeout,
            }),
        };
        let pending: Vec<_> = service.inner.sessions.lock().unwrap().values().cloned().collect();
        for s in pending {
            service.schedule_engine(s);
        }
        Ok(service)
    }

    fn session(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        let s = self
            .inner
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))?;
        s.touch();
        Ok(s)
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<_> = self.inner.sessions.lock().unwrap().keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn create_session(&self, params: CreateSession) -> Result<Snapshot, ServiceError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let core = SessionCore::new(id.clone(), params.clone())?;
        if let Some(log) = &self.inner.log {
            log.create(&id, &params)?;
        }
        let snapshot = core.snapshot();
        let session = Session::new(core);
        self.inner.sessions.lock().unwrap().insert(id, session.clone());
        self.schedule_engine(session);
        Ok(snapshot)
    }

    pub fn get_state(&self, id: &str) -> Result<Snapshot, ServiceError> {
        Ok(self.session(id)?.core.lock().unwrap().snapshot())
    }

    /// Applies a human move; the engine reply, if any, arrives later as events.
    pub fn submit_move(&self, id: &str, text: &str) -> Result<(usize, u64), ServiceError> {
        let session = self.session(id)?;
        let (ply, seq) = {
            let mut core = session.core.lock().unwrap();
            let mut trial = core.clone();
            let ply = trial.submit(text)?;
            if let Some(log) = &self.inner.log {
                log.append(id, &trial.last_move_text().expect("move just played"))?;
            }
            *core = trial;
            (ply, core.seq())
        };
        session.publish(seq);
        self.schedule_engine(session);
        Ok((ply, seq))
    }

    /// Events after `from`, without waiting.
    pub fn events_after(&self, id: &str, from: u64) -> Result<Vec<Event>, ServiceError> {
        Ok(self.session(id)?.core.lock().unwrap().events_after(from).to_vec())
    }

    /// Replays events after `from`, then follows new ones as they are appended.
    pub fn subscribe(&self, id: &str, from: u64) -> Result<impl Stream<Item = Event> + Send + 'static, ServiceError> {
        let session = self.session(id)?;
        let rx = session.seq.subscribe();
        let state = (session, rx, from, Vec::<Event>::new().into_iter());
        Ok(stream::unfold(state, |(session, mut rx, cursor, mut buffered)| async move {
            loop {
                if let Some(e) = buffered.next() {
                    let cursor = e.seq;
                    return Some((e, (session, rx, cursor, buffered)));
                }
                let fresh = session.core.lock().unwrap().events_after(cursor).to_vec();
                if !fresh.is_empty() {
                    buffered = fresh.into_iter();
                    continue;
                }
                rx.borrow_and_update();
                if session.core.lock().unwrap().seq() > cursor {
                    continue;
                }
                if rx.changed().await.is_err() {
                    return None;
                }
            }
        }))
    }

    /// Drops sessions idle for longer than the configured timeout, with their logs.
    pub fn expire_idle(&self) -> Vec<String> {
        let now = Instant::now();
        let mut sessions = self.inner.sessions.lock().unwrap();
        let expired: Vec<String> = sessions
            .iter()
            .filter(|(_, s)| now.duration_since(*s.last_active.lock().unwrap()) > self.inner.idle_timeout)
            .map(|(id, _)| id.clone())
            .collect();
        for id in &expired {
            sessions.remove(id);
            if let Some(log) = &self.inner.log {
                let _ = log.remove(id);
            }
        }
        expired
    }

    /// Runs the engine on a blocking thread when it is the engine's turn.
    fn schedule_engine(&self, session: Arc<Session>) {
        if !session.core.lock().unwrap().engine_to_move() {
            return;
        }
        let log = self.inner.log.clone();
        tokio::task::spawn_blocking(move || {
            let (pos, history, params, ply) = {
                let core = session.core.lock().unwrap();
                if !core.engine_to_move() {
                    return;
                }
                (core.position().clone(), core.history().to_vec(), core.params.clone(), core.record().plies.len())
            };
            let result = {
                let mut engine = session.engine.lock().unwrap();
                if engine.is_none() {
                    match params.engine.start(params.variant) {
                        Ok(e) => *engine = Some(e),
                        Err(e) => {
                            let mut core = session.core.lock().unwrap();
                            core.engine_failed(&e.to_string());
                            session.publish(core.seq());
                            return;
                        }
                    }
                }
                engine.as_mut().expect("engine started").search(&pos, &history)
            };
            let mut core = session.core.lock().unwrap();
            if core.record().plies.len() != ply {
                return;
            }
            match result {
                Ok(r) => {
                    let mut trial = core.clone();
                    match trial.engine_move(r.best) {
                        Ok(_) => {
                            let logged = match &log {
                                Some(log) => log.append(&trial.id, &trial.last_move_text().expect("move just played")),
                                None => Ok(()),
                            };
                            match logged {
                                Ok(()) => *core = trial,
                                Err(e) => core.engine_failed(&e.to_string()),
                            }
                        }
                        Err(e) => core.engine_failed(&e.to_string()),
                    }
                }
                Err(e) => core.engine_failed(&e.to_string()),
            }
            session.publish(core.seq());
        });
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/sessions", post(create_handler))
            .route("/sessions/{id}", get(state_handler))
            .route("/sessions/{id}/moves", post(move_handler))
            .route("/sessions/{id}/events", get(events_handler))
            .with_state(self.clone())
    }

    /// Periodically expires idle sessions until the runtime shuts down.
    pub fn spawn_expiry(&self, every: Duration) -> tokio::task::JoinHandle<()> {
        let service = self.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            loop {
                tick.tick().await;
                service.expire_idle();
            }
        })
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::UnsupportedCombination(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotYourTurn | ServiceError::SessionClosed => StatusCode::CONFLICT,
            ServiceError::IllegalMove { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let ServiceError::IllegalMove { ply, .. } = &self {
            body["ply"] = json!(ply);
        }
        (status, Json(body)).into_response()
    }
}

fn body<T>(r: Result<Json<T>, axum::extract::rejection::JsonRejection>) -> Result<T, ServiceError> {
    r.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

async fn create_handler(
    State(service): State<Service>,
    params: Result<Json<CreateSession>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<Snapshot>), ServiceError> {
    let params = body(params)?;
    Ok((StatusCode::CREATED, Json(service.create_session(params)?)))
}

async fn state_handler(State(service): State<Service>, Path(id): Path<String>) -> Result<Json<Snapshot>, ServiceError> {
    Ok(Json(service.get_state(&id)?))
}

#[derive(Deserialize)]
struct MoveBody {
    #[serde(rename = "move")]
    text: String,
}

async fn move_handler(
    State(service): State<Service>,
    Path(id): Path<String>,
    mv: Result<Json<MoveBody>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<serde_json::Value>), ServiceError> {
    let mv = body(mv)?;
    let (ply, seq) = service.submit_move(&id, &mv.text)?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "accepted": true, "ply": ply, "seq": seq }))))
}

#[derive(Deserialize)]
struct EventsQuery {
    from: Option<u64>,
    /// Return the backlog as a JSON array instead of streaming.
    #[serde(default)]
    once: bool,
}

async fn events_handler(
    State(service): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let resume = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse().ok());
    let from = q.from.or(resume).unwrap_or(0);
    if q.once {
        return Ok(Json(service.events_after(&id, from)?).into_response());
    }
    let events = service.subscribe(&id, from)?;
    let sse = futures::StreamExt::map(events, |e| {
        Ok::<_, Infallible>(
            SseEvent::default()
                .id(e.seq.to_string())
                .event(format!("{:?}", e.kind))
                .data(serde_json::to_string(&e).expect("event serializes")),
        )
    });
    Ok(Sse::new(sse).keep_alive(KeepAlive::default()).into_response())
}
