//! Journal-backed session storage.
//!
//! Each session lives in `sessions/<id>.jsonl`, an append-only journal of
//! the inputs it accepted and the records they produced. `index.jsonl` lists
//! the sessions in creation order. The in-memory state is always what
//! replaying the journals gives, so a restart loses nothing that was
//! acknowledged.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use hidden_single_core::export::{session_rows, ExportRow};
use hidden_single_core::protocol::journal::{append, write_header};
use hidden_single_core::protocol::{
    replay_prefix, screen, step_session, Input, JournalError, Phase, ProtocolConfig, ProtocolError, Session,
    TimedInput,
};
use hidden_single_core::protocol::screen::ScreenPayload;
use hidden_single_core::rng::derive_seed;

/// Source of server time in milliseconds since the Unix epoch.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }
}

/// A clock that only moves when told to. Clones share the same time.
#[derive(Debug, Clone, Default)]
pub struct ManualClock(Arc<AtomicU64>);

impl ManualClock {
    pub fn new(start_ms: u64) -> Self {
        ManualClock(Arc::new(AtomicU64::new(start_ms)))
    }

    pub fn set(&self, ms: u64) {
        self.0.store(ms, Ordering::SeqCst);
    }

    pub fn advance(&self, ms: u64) -> u64 {
        self.0.fetch_add(ms, Ordering::SeqCst) + ms
    }
}

impl Clock for ManualClock {
    fn now_ms(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone)]
pub struct StoreConfig {
    pub dir: PathBuf,
    pub protocol: ProtocolConfig,
    /// Session seeds are derived from this and the creation count when set,
    /// otherwise drawn from the operating system.
    pub base_seed: Option<u64>,
    /// Lets `create_session` take a seed from the request. For testing.
    pub allow_client_seed: bool,
    /// Flush journal writes to disk before acknowledging them.
    pub fsync: bool,
}

impl StoreConfig {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        StoreConfig {
            dir: dir.into(),
            protocol: ProtocolConfig::default(),
            base_seed: None,
            allow_client_seed: false,
            fsync: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("session {id}: {source}")]
    Journal { id: String, source: JournalError },
    #[error("index line {line}: {source}")]
    Index { line: usize, source: serde_json::Error },
    #[error("client-chosen seeds are disabled")]
    SeedNotAllowed,
    #[error("storage: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub session_id: String,
    pub seed: u64,
    pub created_ms: u64,
    /// Relative to the store directory.
    pub journal: String,
}

/// Narrows an export.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct ExportFilter {
    pub phase: Option<Phase>,
    pub session: Option<String>,
    #[serde(default)]
    pub finished_only: bool,
}

struct Entry {
    session: Session,
    file: File,
    /// Bytes of journal acknowledged so far.
    len: u64,
}

struct Creation {
    index: File,
    next: u64,
}

pub struct SessionStore {
    config: StoreConfig,
    clock: Arc<dyn Clock>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Entry>>>>,
    creation: Mutex<Creation>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    // state is only replaced after a successful write, so a panic elsewhere
    // cannot leave it half-updated
    m.lock().unwrap_or_else(|p| p.into_inner())
}

fn journal_name(id: &str) -> String {
    format!("sessions/{id}.jsonl")
}

/// Reads JSON lines, dropping an unterminated final line that does not
/// parse. Returns the records and the length of the valid prefix.
fn read_index(path: &Path) -> Result<(Vec<IndexEntry>, u64), StoreError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    let (mut valid, mut offset, mut n) = (0u64, 0u64, 0usize);
    loop {
        let mut buf = String::new();
        let read = reader.read_line(&mut buf)?;
        if read == 0 {
            break;
        }
        n += 1;
        offset += read as u64;
        if buf.trim().is_empty() {
            valid = offset;
            continue;
        }
        match serde_json::from_str(buf.trim_end()) {
            Ok(e) if buf.ends_with('\n') => {
                out.push(e);
                valid = offset;
            }
            Ok(_) => break,
            Err(_) if !buf.ends_with('\n') => break,
            Err(source) => return Err(StoreError::Index { line: n, source }),
        }
    }
    Ok((out, valid))
}

fn load_journal(path: &Path, id: &str) -> Result<Entry, StoreError> {
    let (session, len) = replay_prefix(BufReader::new(File::open(path)?))
        .map_err(|source| StoreError::Journal { id: id.to_string(), source })?;
    let file = OpenOptions::new().append(true).open(path)?;
    // drop the remains of an interrupted write
    if file.metadata()?.len() != len {
        file.set_len(len)?;
    }
    Ok(Entry { session, file, len })
}

impl SessionStore {
    /// Opens the store at `config.dir`, creating it if needed, and replays
    /// every journal.
    pub fn open(config: StoreConfig, clock: Arc<dyn Clock>) -> Result<Self, StoreError> {
        fs::create_dir_all(config.dir.join("sessions"))?;
        let index_path = config.dir.join("index.jsonl");
        let (mut listed, valid) =
            if index_path.exists() { read_index(&index_path)? } else { (Vec::new(), 0) };
        let index = OpenOptions::new().create(true).append(true).open(&index_path)?;
        if index.metadata()?.len() != valid {
            index.set_len(valid)?;
        }

        let mut sessions = BTreeMap::new();
        for e in &listed {
            let entry = load_journal(&config.dir.join(&e.journal), &e.session_id)?;
            sessions.insert(e.session_id.clone(), Arc::new(Mutex::new(entry)));
        }

        // a crash between writing a journal header and its index line
        // leaves a journal the index does not know about
        let known: BTreeSet<String> = listed.iter().map(|e| e.journal.clone()).collect();
        let mut orphans: Vec<PathBuf> = fs::read_dir(config.dir.join("sessions"))?
            .filter_map(|d| d.ok().map(|d| d.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        orphans.sort();
        let mut creation = Creation { index, next: listed.len() as u64 };
        for path in orphans {
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else { continue };
            if known.contains(&journal_name(&id)) {
                continue;
            }
            let entry = match load_journal(&path, &id) {
                // the header itself never made it to disk
                Err(StoreError::Journal { source: JournalError::Empty, .. }) => {
                    fs::remove_file(&path)?;
                    continue;
                }
                r => r?,
            };
            let e = IndexEntry {
                session_id: id.clone(),
                seed: entry.session.seed,
                created_ms: entry.session.created_ms,
                journal: journal_name(&id),
            };
            write_index(&mut creation.index, &e, config.fsync)?;
            listed.push(e);
            creation.next += 1;
            sessions.insert(id, Arc::new(Mutex::new(entry)));
        }

        Ok(SessionStore { config, clock, sessions: RwLock::new(sessions), creation: Mutex::new(creation) })
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn now_ms(&self) -> u64 {
        self.clock.now_ms()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.sessions.read().unwrap_or_else(|p| p.into_inner()).keys().cloned().collect()
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, StoreError> {
        self.sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownSession(id.to_string()))
    }

    /// Starts a session and returns its first screen.
    pub fn create_session(&self, seed: Option<u64>) -> Result<ScreenPayload, StoreError> {
        if seed.is_some() && !self.config.allow_client_seed {
            return Err(StoreError::SeedNotAllowed);
        }
        let mut c = lock(&self.creation);
        let n = c.next;
        let seed = seed
            .or_else(|| self.config.base_seed.map(|b| derive_seed(b, "session", n)))
            .unwrap_or_else(rand::random);
        let id = format!("s{n:06}-{:08x}", (seed ^ (seed >> 32)) as u32);
        let now = self.clock.now_ms();
        let session = Session::new(id.clone(), seed, now, self.config.protocol.clone())?;

        let rel = journal_name(&id);
        let mut file = OpenOptions::new().create_new(true).append(true).open(self.config.dir.join(&rel))?;
        let mut buf = Vec::new();
        write_header(&mut buf, &session)?;
        file.write_all(&buf)?;
        if self.config.fsync {
            file.sync_data()?;
        }
        let e = IndexEntry { session_id: id.clone(), seed, created_ms: now, journal: rel };
        write_index(&mut c.index, &e, self.config.fsync)?;
        c.next += 1;

        let payload = screen(&session, now);
        let entry = Entry { session, file, len: buf.len() as u64 };
        self.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(id, Arc::new(Mutex::new(entry)));
        Ok(payload)
    }

    /// Applies one participant input, stamped with the server clock.
    ///
    /// The input is journaled before the new state becomes visible; if the
    /// write fails the session is left as it was.
    pub fn post_event(&self, id: &str, input: Input, client_ms: Option<u64>) -> Result<ScreenPayload, StoreError> {
        let entry = self.entry(id)?;
        let mut e = lock(&entry);
        let now = self.clock.now_ms().max(e.session.last_ms);
        let timed = TimedInput { at_ms: now, client_ms, input };
        let mut next = e.session.clone();
        let derived = step_session(&mut next, &timed)?;
        let mut buf = Vec::new();
        append(&mut buf, &timed, &derived)?;
        let written = e.file.write_all(&buf).and_then(|_| if self.config.fsync { e.file.sync_data() } else { Ok(()) });
        if let Err(err) = written {
            let len = e.len;
            let _ = e.file.set_len(len);
            return Err(err.into());
        }
        e.len += buf.len() as u64;
        e.session = next;
        Ok(screen(&e.session, now))
    }

    pub fn screen(&self, id: &str) -> Result<ScreenPayload, StoreError> {
        let entry = self.entry(id)?;
        let e = lock(&entry);
        Ok(screen(&e.session, self.clock.now_ms().max(e.session.last_ms)))
    }

    /// A copy of the current session state.
    pub fn session(&self, id: &str) -> Result<Session, StoreError> {
        let entry = self.entry(id)?;
        let session = lock(&entry).session.clone();
        Ok(session)
    }

    /// Per-trial rows of every matching session, ordered by session id.
    /// Each session is read under its own lock, so every session's rows
    /// come from one consistent state.
    pub fn export(&self, filter: &ExportFilter) -> Vec<ExportRow> {
        let entries: Vec<(String, Arc<Mutex<Entry>>)> = self
            .sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .iter()
            .filter(|(id, _)| filter.session.as_ref().is_none_or(|s| s == *id))
            .map(|(id, e)| (id.clone(), e.clone()))
            .collect();
        let mut rows = Vec::new();
        for (_, entry) in entries {
            let e = lock(&entry);
            if filter.finished_only && !e.session.is_finished() {
                continue;
            }
            rows.extend(session_rows(&e.session).into_iter().filter(|r| filter.phase.is_none_or(|p| p == r.phase)));
        }
        rows
    }
}

fn write_index(index: &mut File, e: &IndexEntry, fsync: bool) -> io::Result<()> {
    let mut line = serde_json::to_vec(e)?;
    line.push(b'\n');
    index.write_all(&line)?;
    if fsync {
        index.sync_data()?;
    }
    Ok(())
}
