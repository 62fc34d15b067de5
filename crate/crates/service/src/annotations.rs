//! Reviewer annotations, persisted as an append-only NDJSON log per match.
//!
//! Every create and delete is one line. Deletes are tombstones: the record
//! stays in the log and only disappears from listings. A line is fsynced
//! before the write is acknowledged.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use grieferlens_core::detect::GrieferType;
use grieferlens_core::telemetry::MatchTelemetry;
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, IoContext, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    Label,
    Note,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub annotation_id: String,
    pub match_id: String,
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub target_player: String,
    pub kind: AnnotationKind,
    pub griefer_types: Vec<GrieferType>,
    pub time_range: Option<[f64; 2]>,
    pub tags: Vec<String>,
    pub text: String,
}

/// Request body for a new annotation; the server fills in the id and
/// timestamp.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewAnnotation {
    /// Optional; must equal the match in the URL when given.
    #[serde(default)]
    pub match_id: Option<String>,
    #[serde(default = "anonymous")]
    pub author: String,
    pub target_player: String,
    pub kind: AnnotationKind,
    #[serde(default)]
    pub griefer_types: Vec<GrieferType>,
    #[serde(default)]
    pub time_range: Option<[f64; 2]>,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub text: String,
}

fn anonymous() -> String {
    "anonymous".into()
}

impl NewAnnotation {
    /// Checks the record against the match it annotates. Griefer types are
    /// a set, so they come back sorted and deduplicated.
    pub fn validate(mut self, m: &MatchTelemetry) -> Result<NewAnnotation, ApiError> {
        let invalid = |path: &str, msg: String| Err(ApiError::bad_request("invalid_record", msg).with_path(path));
        if let Some(id) = &self.match_id {
            if id != m.match_id() {
                return invalid("match_id", format!("body names match `{id}` but the URL names `{}`", m.match_id()));
            }
        }
        if self.author.trim().is_empty() {
            return invalid("author", "author must not be empty".into());
        }
        if !m.is_roster_player(&self.target_player) {
            return invalid("target_player", format!("`{}` is not in the match roster", self.target_player));
        }
        self.griefer_types.sort();
        self.griefer_types.dedup();
        match self.kind {
            AnnotationKind::Label if self.griefer_types.is_empty() => {
                return invalid("griefer_types", "a label needs at least one griefer type".into());
            }
            AnnotationKind::Note if self.text.trim().is_empty() => {
                return invalid("text", "a note needs text".into());
            }
            _ => {}
        }
        if let Some([t0, t1]) = self.time_range {
            let d = m.duration_s();
            if !(t0.is_finite() && t1.is_finite() && 0.0 <= t0 && t0 <= t1 && t1 <= d) {
                return invalid("time_range", format!("[{t0}, {t1}] must satisfy 0 <= t0 <= t1 <= {d}"));
            }
        }
        if let Some(i) = self.tags.iter().position(|t| t.trim().is_empty()) {
            return invalid(&format!("tags[{i}]"), "tags must not be empty".into());
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum LogEntry {
    Create { record: AnnotationRecord },
    Delete { annotation_id: String, deleted_at: DateTime<Utc> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tombstone {
    pub annotation_id: String,
    pub deleted_at: DateTime<Utc>,
}

/// In-memory view of one match's log plus the open file it appends to.
#[derive(Debug)]
pub struct AnnotationLog {
    path: PathBuf,
    file: File,
    records: Vec<AnnotationRecord>,
    deleted: BTreeSet<String>,
}

impl AnnotationLog {
    /// Opens (or creates) the log and replays it. A torn final line left by
    /// a crash mid-append is cut off; any other unreadable line is an error.
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let raw = match std::fs::read(path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e).at(path),
        };
        let complete = raw.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let mut records = Vec::new();
        let mut deleted = BTreeSet::new();
        for (i, line) in raw[..complete].split(|&b| b == b'\n').enumerate() {
            if line.is_empty() {
                continue;
            }
            let entry: LogEntry = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            match entry {
                LogEntry::Create { record } => records.push(record),
                LogEntry::Delete { annotation_id, .. } => {
                    deleted.insert(annotation_id);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).at(path)?;
        if complete < raw.len() {
            tracing::warn!(path = %path.display(), "dropping torn trailing annotation line");
            file.set_len(complete as u64).at(path)?;
            file.sync_all().at(path)?;
        }
        Ok(AnnotationLog { path: path.to_path_buf(), file, records, deleted })
    }

    fn append(&mut self, entry: &LogEntry) -> Result<(), StoreError> {
        let mut line = serde_json::to_vec(entry).expect("log entries always serialize");
        line.push(b'\n');
        self.file.write_all(&line).at(&self.path)?;
        self.file.sync_data().at(&self.path)
    }

    /// Appends a validated annotation and returns the stored record.
    pub fn create(&mut self, match_id: &str, new: NewAnnotation) -> Result<AnnotationRecord, StoreError> {
        // Ids count every record ever created, so tombstoned ids are never
        // handed out again.
        let annotation_id = format!("{match_id}-a{:05}", self.records.len() + 1);
        let now = Utc::now();
        let created_at = self.records.last().map_or(now, |r| r.created_at.max(now));
        let record = AnnotationRecord {
            annotation_id,
            match_id: match_id.to_string(),
            author: new.author,
            created_at,
            target_player: new.target_player,
            kind: new.kind,
            griefer_types: new.griefer_types,
            time_range: new.time_range,
            tags: new.tags,
            text: new.text,
        };
        self.append(&LogEntry::Create { record: record.clone() })?;
        self.records.push(record.clone());
        Ok(record)
    }

    /// Tombstones a live annotation. `None` when there is no such live id.
    pub fn delete(&mut self, annotation_id: &str) -> Result<Option<Tombstone>, StoreError> {
        if self.deleted.contains(annotation_id) || !self.records.iter().any(|r| r.annotation_id == annotation_id) {
            return Ok(None);
        }
        let deleted_at = Utc::now();
        self.append(&LogEntry::Delete { annotation_id: annotation_id.to_string(), deleted_at })?;
        self.deleted.insert(annotation_id.to_string());
        Ok(Some(Tombstone { annotation_id: annotation_id.to_string(), deleted_at }))
    }

    /// Live records ordered by creation time.
    pub fn live(&self) -> Vec<AnnotationRecord> {
        let mut out: Vec<AnnotationRecord> =
            self.records.iter().filter(|r| !self.deleted.contains(&r.annotation_id)).cloned().collect();
        out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.annotation_id.cmp(&b.annotation_id)));
        out
    }

    /// Every record ever created, tombstoned or not.
    pub fn history_len(&self) -> usize {
        self.records.len()
    }
}
