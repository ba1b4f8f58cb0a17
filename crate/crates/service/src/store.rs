//! Sessions kept in memory, each backed by an append-only JSONL event log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::Mutex;

use crate::error::ServiceError;
use crate::session::{Event, ServiceConfig, Session};

struct Entry {
    session: Session,
    log: Option<File>,
}

/// Thread-safe session registry. With a directory, every accepted event is
/// appended and synced before the new state becomes visible.
pub struct SessionStore {
    config: ServiceConfig,
    dir: Option<PathBuf>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Entry>>>>,
}

fn storage(e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Storage(e.to_string())
}

fn append(log: &mut File, event: &Event) -> Result<(), ServiceError> {
    let mut line = serde_json::to_string(event).map_err(storage)?;
    line.push('\n');
    log.write_all(line.as_bytes()).map_err(storage)?;
    log.sync_data().map_err(storage)
}

/// Events of one log. A torn final line from an interrupted write is dropped.
fn read_log(path: &Path) -> Result<Vec<Event>, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(storage)?;
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    let mut events = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let complete = line.ends_with('\n');
        match serde_json::from_str(line.trim_end()) {
            Ok(e) if complete => events.push(e),
            _ if i + 1 == lines.len() && !complete => break,
            Ok(_) => unreachable!(),
            Err(e) => return Err(storage(format!("{}:{}: {e}", path.display(), i + 1))),
        }
    }
    Ok(events)
}

impl SessionStore {
    pub fn in_memory(config: ServiceConfig) -> Self {
        SessionStore {
            config,
            dir: None,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    /// Opens `dir`, replaying every `*.jsonl` log found there.
    pub fn open(dir: impl Into<PathBuf>, config: ServiceConfig) -> Result<Self, ServiceError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(storage)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(&dir).map_err(storage)? {
            let path = entry.map_err(storage)?.path();
            if path.extension().is_none_or(|x| x != "jsonl") {
                continue;
            }
            let events = read_log(&path)?;
            if events.is_empty() {
                continue;
            }
            let session = Session::replay(&events, &config)?;
            rewrite_if_torn(&path, &events)?;
            let log = OpenOptions::new().append(true).open(&path).map_err(storage)?;
            sessions.insert(
                session.id.clone(),
                Arc::new(Mutex::new(Entry {
                    session,
                    log: Some(log),
                })),
            );
        }
        Ok(SessionStore {
            config,
            dir: Some(dir),
            sessions: Mutex::new(sessions),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn create(&self) -> Result<Session, ServiceError> {
        let id = uuid::Uuid::new_v4().to_string();
        let event = Event::Created { id: id.clone() };
        let log = match &self.dir {
            Some(dir) => {
                let mut f = OpenOptions::new()
                    .create_new(true)
                    .append(true)
                    .open(dir.join(format!("{id}.jsonl")))
                    .map_err(storage)?;
                append(&mut f, &event)?;
                Some(f)
            }
            None => None,
        };
        let session = Session::new(id.clone());
        self.sessions.lock().insert(
            id,
            Arc::new(Mutex::new(Entry {
                session: session.clone(),
                log,
            })),
        );
        Ok(session)
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ServiceError> {
        self.sessions
            .lock()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NoSession(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session, ServiceError> {
        Ok(self.entry(id)?.lock().session.clone())
    }

    /// Applies `event` if the session is still at `expected_version`.
    pub fn apply(&self, id: &str, expected_version: u64, event: Event) -> Result<Session, ServiceError> {
        let entry = self.entry(id)?;
        let mut entry = entry.lock();
        if entry.session.version != expected_version {
            return Err(ServiceError::VersionConflict {
                expected: expected_version,
                actual: entry.session.version,
            });
        }
        let next = entry.session.apply(&event, &self.config)?;
        if let Some(log) = entry.log.as_mut() {
            append(log, &event)?;
        }
        entry.session = next.clone();
        Ok(next)
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.lock().keys().cloned().collect();
        ids.sort();
        ids
    }
}

fn rewrite_if_torn(path: &Path, events: &[Event]) -> Result<(), ServiceError> {
    let text = std::fs::read_to_string(path).map_err(storage)?;
    if text.is_empty() || text.ends_with('\n') {
        return Ok(());
    }
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).map_err(storage)?);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(storage)
}
