//! Refresh-interval cache around any backend, with a JSONL record of every
//! backend response and a backend that replays such a record.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::pare::Advice;

use super::{reply_from_text, AdviceQuery, Advisor, AdvisorError, AdvisorReply};

/// One backend response as persisted in a replay file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvisorRecord {
    pub state_key: String,
    pub raw_response: String,
    /// `None` when the response could not be parsed.
    pub advice: Option<Advice>,
    pub latency_ms: f64,
}

struct CacheState {
    calls: u64,
    inner_calls: u64,
    last: Option<AdvisorReply>,
    recorder: Option<BufWriter<File>>,
}

/// Queries the inner backend on every `interval`-th call and replays the
/// last reply in between. The lock is held across the inner call, so
/// concurrent callers never trigger duplicate refreshes.
pub struct CachedAdvisor<A> {
    inner: A,
    interval: u32,
    state: Mutex<CacheState>,
}

impl<A: Advisor> CachedAdvisor<A> {
    pub fn new(inner: A, interval: u32) -> Self {
        CachedAdvisor {
            inner,
            interval: interval.max(1),
            state: Mutex::new(CacheState { calls: 0, inner_calls: 0, last: None, recorder: None }),
        }
    }

    /// Appends an [`AdvisorRecord`] to `path` for every inner response.
    pub fn recording_to(self, path: &Path) -> std::io::Result<Self> {
        let file = File::create(path)?;
        self.state.lock().expect("cache lock").recorder = Some(BufWriter::new(file));
        Ok(self)
    }

    pub fn interval(&self) -> u32 {
        self.interval
    }

    pub fn inner_calls(&self) -> u64 {
        self.state.lock().expect("cache lock").inner_calls
    }

    pub fn flush(&self) -> std::io::Result<()> {
        match self.state.lock().expect("cache lock").recorder.as_mut() {
            Some(w) => w.flush(),
            None => Ok(()),
        }
    }
}

fn record_line(w: &mut BufWriter<File>, record: &AdvisorRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, record)?;
    w.write_all(b"\n")
}

impl<A: Advisor> Advisor for CachedAdvisor<A> {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        let mut st = self.state.lock().expect("cache lock");
        let refresh = st.calls % u64::from(self.interval) == 0 || st.last.is_none();
        st.calls += 1;
        if !refresh {
            return Ok(st.last.clone().expect("checked above"));
        }
        st.inner_calls += 1;
        let result = self.inner.advise(query);
        if let Some(w) = st.recorder.as_mut() {
            let record = match &result {
                Ok(r) => Some(AdvisorRecord {
                    state_key: query.state_key(),
                    raw_response: r.raw_response.clone(),
                    advice: Some(r.advice),
                    latency_ms: r.latency.as_secs_f64() * 1e3,
                }),
                Err(AdvisorError::Unparseable { raw, .. }) => Some(AdvisorRecord {
                    state_key: query.state_key(),
                    raw_response: raw.clone(),
                    advice: None,
                    latency_ms: 0.0,
                }),
                Err(_) => None,
            };
            if let Some(record) = record {
                record_line(w, &record)?;
            }
        }
        let reply = result?;
        st.last = Some(reply.clone());
        Ok(reply)
    }

    fn needs_prompt(&self) -> bool {
        self.inner.needs_prompt()
    }
}

impl<A> Drop for CachedAdvisor<A> {
    fn drop(&mut self) {
        if let Ok(st) = self.state.get_mut() {
            if let Some(w) = st.recorder.as_mut() {
                let _ = w.flush();
            }
        }
    }
}

pub fn load_replay(path: &Path) -> Result<Vec<AdvisorRecord>, AdvisorError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| {
            AdvisorError::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}:{}: {e}", path.display(), n + 1),
            ))
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Serves recorded responses without any network access. Records are
/// consumed in order; when the next record's key does not match, the first
/// record with a matching key is used instead.
pub struct ReplayAdvisor {
    records: Vec<AdvisorRecord>,
    by_key: HashMap<String, usize>,
    cursor: Mutex<usize>,
}

impl ReplayAdvisor {
    pub fn new(records: Vec<AdvisorRecord>) -> Self {
        let mut by_key = HashMap::new();
        for (k, r) in records.iter().enumerate() {
            by_key.entry(r.state_key.clone()).or_insert(k);
        }
        ReplayAdvisor { records, by_key, cursor: Mutex::new(0) }
    }

    pub fn from_file(path: &Path) -> Result<Self, AdvisorError> {
        Ok(Self::new(load_replay(path)?))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl Advisor for ReplayAdvisor {
    fn advise(&self, query: &AdviceQuery<'_>) -> Result<AdvisorReply, AdvisorError> {
        let key = query.state_key();
        let mut cursor = self.cursor.lock().expect("replay lock");
        let index = match self.records.get(*cursor) {
            Some(r) if r.state_key == key => {
                *cursor += 1;
                *cursor - 1
            }
            _ => *self.by_key.get(&key).ok_or(AdvisorError::ReplayMiss(key))?,
        };
        reply_from_text(self.records[index].raw_response.clone(), Duration::ZERO)
    }

    fn needs_prompt(&self) -> bool {
        false
    }
}
