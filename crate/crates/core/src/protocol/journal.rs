//! Line-delimited JSON journal of a session.
//!
//! Line 1 is the header. Every accepted input is written as an `input` line
//! followed by the records it produced (`trial` and `answer` lines). Replay
//! feeds the inputs back through the state machine and checks that they
//! produce the same records.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{step_session, Derived, ProtocolConfig, ProtocolError, Session, TimedInput, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub format_version: u32,
    pub session_id: String,
    pub seed: u64,
    pub created_ms: u64,
    pub config: ProtocolConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JournalRecord {
    Header(SessionHeader),
    Input(TimedInput),
    Derived(Derived),
}

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("journal is empty")]
    Empty,
    #[error("line {line}: the first record must be a header")]
    MissingHeader { line: usize },
    #[error("unsupported journal format version {0}")]
    Version(u32),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("line {line}: input rejected on replay: {source}")]
    Rejected { line: usize, source: ProtocolError },
    #[error("line {line}: recorded output differs from replay")]
    Divergence { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_record<W: Write>(w: &mut W, r: &JournalRecord) -> io::Result<()> {
    serde_json::to_writer(&mut *w, r)?;
    w.write_all(b"\n")
}

pub fn write_header<W: Write>(w: &mut W, s: &Session) -> io::Result<()> {
    write_record(w, &JournalRecord::Header(s.header()))
}

/// The lines for one accepted input.
pub fn entry_lines(input: &TimedInput, derived: &[Derived]) -> Vec<JournalRecord> {
    std::iter::once(JournalRecord::Input(input.clone()))
        .chain(derived.iter().cloned().map(JournalRecord::Derived))
        .collect()
}

pub fn append<W: Write>(w: &mut W, input: &TimedInput, derived: &[Derived]) -> io::Result<()> {
    // one buffered write so a crash leaves at most one partial line
    let mut buf = Vec::new();
    for r in entry_lines(input, derived) {
        write_record(&mut buf, &r)?;
    }
    w.write_all(&buf)
}

/// Rebuilds a session from its journal.
///
/// A final line without a newline is taken to be a write cut short by a
/// crash and is dropped, together with the entry it belongs to.
pub fn replay<R: BufRead>(reader: R) -> Result<Session, JournalError> {
    replay_prefix(reader).map(|(s, _)| s)
}

/// Like [`replay`], also returning the byte length of the journal prefix
/// that was applied. Anything past it is the remains of an interrupted
/// write and can be truncated before appending again.
pub fn replay_prefix<R: BufRead>(reader: R) -> Result<(Session, u64), JournalError> {
    // (line number, text, ends with newline, byte offset after the line)
    let mut lines: Vec<(usize, String, bool, u64)> = Vec::new();
    let mut reader = reader;
    let mut n = 0;
    let mut offset = 0u64;
    loop {
        let mut buf = String::new();
        let read = reader.read_line(&mut buf)?;
        if read == 0 {
            break;
        }
        n += 1;
        offset += read as u64;
        let complete = buf.ends_with('\n');
        let text = buf.trim_end_matches(['\n', '\r']).to_string();
        if !text.trim().is_empty() {
            lines.push((n, text, complete, offset));
        }
    }
    let mut records = Vec::with_capacity(lines.len());
    let total = lines.len();
    for (i, (line, text, complete, end)) in lines.into_iter().enumerate() {
        // every write ends with a newline, so an unterminated last line is
        // incomplete even when it happens to parse
        if i + 1 == total && !complete {
            break;
        }
        let r = serde_json::from_str::<JournalRecord>(&text).map_err(|source| JournalError::Parse { line, source })?;
        records.push((line, r, end));
    }

    let mut iter = records.into_iter().peekable();
    let (line, first, mut valid) = iter.next().ok_or(JournalError::Empty)?;
    let JournalRecord::Header(h) = first else {
        return Err(JournalError::MissingHeader { line });
    };
    if h.format_version != FORMAT_VERSION {
        return Err(JournalError::Version(h.format_version));
    }
    let mut session = Session::new(h.session_id, h.seed, h.created_ms, h.config)
        .map_err(|source| JournalError::Rejected { line, source })?;

    while let Some((line, rec, input_end)) = iter.next() {
        let input = match rec {
            JournalRecord::Input(i) => i,
            JournalRecord::Header(_) | JournalRecord::Derived(_) => return Err(JournalError::Divergence { line }),
        };
        let mut recorded = Vec::new();
        let mut end = input_end;
        while let Some((_, JournalRecord::Derived(_), _)) = iter.peek() {
            if let Some((_, JournalRecord::Derived(d), e)) = iter.next() {
                recorded.push(d);
                end = e;
            }
        }
        let mut trial = session.clone();
        let produced = step_session(&mut trial, &input).map_err(|source| JournalError::Rejected { line, source })?;
        if produced == recorded {
            session = trial;
            valid = end;
        } else if iter.peek().is_none() && recorded.len() < produced.len() && produced.starts_with(&recorded) {
            // last entry was cut short; the input never took effect
            break;
        } else {
            return Err(JournalError::Divergence { line });
        }
    }
    Ok((session, valid))
}
