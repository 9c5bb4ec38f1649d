//! Shared server state: live sessions, their event channels, and a cache of
//! datasets loaded from the data directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use blendvis_core::data::{load_csv, CsvOptions, Dataset};
use blendvis_core::recommend::RecState;
use blendvis_core::{Session, SessionConfig};

use crate::error::ApiError;

const EVENT_BUFFER: usize = 1024;

/// Pushed to every open event stream of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    SpecChanged { revision: u64 },
    RecommendationsChanged { revision: u64, set_id: Option<String> },
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::SpecChanged { .. } => "spec_changed",
            Event::RecommendationsChanged { .. } => "recommendations_changed",
        }
    }
}

pub struct SessionHandle {
    session: Mutex<Session>,
    events: broadcast::Sender<Event>,
}

type Fingerprint = Option<(String, Vec<RecState>)>;

fn fingerprint(s: &Session) -> Fingerprint {
    s.recommendations().map(|set| (set.set_id.clone(), set.items.iter().map(|r| r.state).collect()))
}

impl SessionHandle {
    fn new(session: Session) -> Self {
        SessionHandle { session: Mutex::new(session), events: broadcast::channel(EVENT_BUFFER).0 }
    }

    pub fn lock(&self) -> MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Event> {
        self.events.subscribe()
    }

    /// Runs `f` as the session's single writer. When `base_revision` is given
    /// it must match the current revision. Publishes one event per kind of
    /// state that changed, while still holding the lock so streams see
    /// revisions in order.
    pub fn write<T>(
        &self,
        base_revision: Option<u64>,
        f: impl FnOnce(&mut Session) -> blendvis_core::Result<T>,
    ) -> Result<(T, u64), ApiError> {
        let mut session = self.lock();
        if let Some(expected) = base_revision {
            if expected != session.revision() {
                return Err(blendvis_core::Error::StaleRevision { expected, actual: session.revision() }.into());
            }
        }
        let revision = session.revision();
        let recs = fingerprint(&session);
        let result = f(&mut session);
        let now = session.revision();
        if now != revision {
            let _ = self.events.send(Event::SpecChanged { revision: now });
        }
        let after = fingerprint(&session);
        if after != recs {
            let set_id = after.map(|(id, _)| id);
            let _ = self.events.send(Event::RecommendationsChanged { revision: now, set_id });
        }
        Ok((result?, now))
    }
}

pub struct AppState {
    data_dir: PathBuf,
    config: SessionConfig,
    sessions: RwLock<HashMap<String, Arc<SessionHandle>>>,
    datasets: Mutex<HashMap<String, Arc<Dataset>>>,
    next_id: AtomicU64,
}

fn valid_session_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>, config: SessionConfig) -> Self {
        AppState {
            data_dir: data_dir.into(),
            config,
            sessions: RwLock::new(HashMap::new()),
            datasets: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    /// A CSV from the data directory, by plain file name.
    pub fn dataset(&self, name: &str) -> Result<Arc<Dataset>, ApiError> {
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(ApiError::BadRequest(format!("dataset name `{name}` must be a plain file name")));
        }
        let mut cache = self.datasets.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(ds) = cache.get(name) {
            return Ok(ds.clone());
        }
        let path = self.data_dir.join(name);
        let text = std::fs::read_to_string(&path).map_err(|_| ApiError::UnknownDataset(name.to_string()))?;
        let id = name.strip_suffix(".csv").unwrap_or(name);
        let ds = Arc::new(load_csv(text.as_bytes(), &CsvOptions::named(id))?);
        cache.insert(name.to_string(), ds.clone());
        Ok(ds)
    }

    pub fn create(&self, id: Option<String>, dataset: Arc<Dataset>) -> Result<String, ApiError> {
        let mut sessions = self.sessions.write().unwrap_or_else(|p| p.into_inner());
        let id = match id {
            Some(id) if !valid_session_id(&id) => {
                return Err(ApiError::BadRequest(format!("session id `{id}` may only use letters, digits, - and _")))
            }
            Some(id) if sessions.contains_key(&id) => return Err(ApiError::SessionExists(id)),
            Some(id) => id,
            None => loop {
                let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
                if !sessions.contains_key(&id) {
                    break id;
                }
            },
        };
        let session = Session::with_config(id.clone(), dataset, self.config);
        sessions.insert(id.clone(), Arc::new(SessionHandle::new(session)));
        Ok(id)
    }

    pub fn session(&self, id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.get(id).cloned().ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    pub fn remove(&self, id: &str) -> Result<(), ApiError> {
        let mut sessions = self.sessions.write().unwrap_or_else(|p| p.into_inner());
        sessions.remove(id).map(|_| ()).ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    /// The session owning a recommendation id `{session}.{set}.{rank}`.
    pub fn session_for_recommendation(&self, rec_id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        let mut parts = rec_id.rsplitn(3, '.');
        let (_, _, session) = (parts.next(), parts.next(), parts.next());
        let session = session.ok_or_else(|| blendvis_core::Error::UnknownRecommendation(rec_id.to_string()))?;
        self.session(session).map_err(|_| blendvis_core::Error::UnknownRecommendation(rec_id.to_string()).into())
    }
}
