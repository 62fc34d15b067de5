//! On-disk match store.
//!
//! ```text
//! DIR/matches/{match_id}/telemetry.json           canonical telemetry
//! DIR/matches/{match_id}/summaries.{hash}.json    detector output cache
//! DIR/matches/{match_id}/annotations.ndjson       annotation log
//! ```
//!
//! Detectors run once per match and configuration; the cache file name
//! carries the config hash so a config change simply misses the cache.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use grieferlens_core::config::DetectorConfig;
use grieferlens_core::detect::{run_all_detectors, PlayerSummary};
use grieferlens_core::report::SummaryDocument;
use grieferlens_core::spatial::{default_layout, ZoneLayout};
use grieferlens_core::telemetry::{parse_match, MatchTelemetry};
use serde::Deserialize;

use crate::annotations::AnnotationLog;
use crate::error::{ApiError, IoContext, StoreError};

pub struct MatchEntry {
    pub telemetry: MatchTelemetry,
    pub summaries: Vec<PlayerSummary>,
    /// Serialized summary document, served as is.
    pub summary_json: String,
    annotations: Mutex<AnnotationLog>,
}

impl MatchEntry {
    /// The match's single annotation writer.
    pub fn annotations(&self) -> MutexGuard<'_, AnnotationLog> {
        self.annotations.lock().unwrap_or_else(|p| p.into_inner())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ingested {
    Created,
    Unchanged,
}

pub struct Store {
    root: PathBuf,
    config: DetectorConfig,
    config_hash: String,
    layout: ZoneLayout,
    matches: RwLock<BTreeMap<String, Arc<MatchEntry>>>,
    ingest: Mutex<()>,
}

#[derive(Deserialize)]
struct CachedSummaries {
    match_id: String,
    config_hash: String,
    players: Vec<PlayerSummary>,
}

impl Store {
    /// Opens the store under `root`, loading every stored match.
    pub fn open(root: &Path, config: DetectorConfig) -> Result<Self, StoreError> {
        let dir = root.join("matches");
        fs::create_dir_all(&dir).at(&dir)?;
        let store = Store {
            root: root.to_path_buf(),
            config_hash: config.hash(),
            config,
            layout: default_layout(),
            matches: RwLock::new(BTreeMap::new()),
            ingest: Mutex::new(()),
        };
        let mut names: Vec<PathBuf> = fs::read_dir(&dir)
            .at(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("telemetry.json").is_file())
            .collect();
        names.sort();
        let mut loaded = BTreeMap::new();
        for path in names {
            let entry = store.load(&path)?;
            loaded.insert(entry.telemetry.match_id().to_string(), Arc::new(entry));
        }
        tracing::info!(matches = loaded.len(), root = %root.display(), "store opened");
        *store.matches.write().unwrap_or_else(|p| p.into_inner()) = loaded;
        Ok(store)
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn layout(&self) -> &ZoneLayout {
        &self.layout
    }

    pub fn get(&self, match_id: &str) -> Result<Arc<MatchEntry>, ApiError> {
        self.matches
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(match_id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_match(match_id))
    }

    pub fn list(&self) -> Vec<Arc<MatchEntry>> {
        self.matches.read().unwrap_or_else(|p| p.into_inner()).values().cloned().collect()
    }

    fn match_dir(&self, match_id: &str) -> PathBuf {
        self.root.join("matches").join(match_id)
    }

    fn load(&self, dir: &Path) -> Result<MatchEntry, StoreError> {
        let path = dir.join("telemetry.json");
        let raw = fs::read(&path).at(&path)?;
        let telemetry = parse_match(&raw)?;
        self.entry(dir, telemetry)
    }

    /// Builds the in-memory entry, reusing cached summaries when they match
    /// this match and config.
    fn entry(&self, dir: &Path, telemetry: MatchTelemetry) -> Result<MatchEntry, StoreError> {
        let cache = dir.join(format!("summaries.{}.json", self.config_hash));
        let cached = fs::read_to_string(&cache)
            .ok()
            .and_then(|s| serde_json::from_str::<CachedSummaries>(&s).ok().map(|c| (s, c)))
            .filter(|(_, c)| c.match_id == telemetry.match_id() && c.config_hash == self.config_hash);
        let (summary_json, summaries) = match cached {
            Some((json, c)) => (json, c.players),
            None => {
                let summaries = run_all_detectors(&telemetry, &self.layout, &self.config)?;
                let json = SummaryDocument {
                    match_id: telemetry.match_id(),
                    config_hash: &self.config_hash,
                    players: &summaries,
                }
                .to_json();
                write_atomic(&cache, json.as_bytes())?;
                (json, summaries)
            }
        };
        let annotations = AnnotationLog::open(&dir.join("annotations.ndjson"))?;
        Ok(MatchEntry { telemetry, summaries, summary_json, annotations: Mutex::new(annotations) })
    }

    /// Validates and stores a telemetry document. Re-sending identical
    /// content is a no-op; different content under a taken id conflicts.
    pub fn ingest(&self, raw: &[u8]) -> Result<(String, Ingested), StoreError> {
        let telemetry = parse_match(raw)?;
        let id = telemetry.match_id().to_string();
        check_match_id(&id)?;

        let _guard = self.ingest.lock().unwrap_or_else(|p| p.into_inner());
        if let Ok(existing) = self.get(&id) {
            return if existing.telemetry.document() == telemetry.document() {
                Ok((id, Ingested::Unchanged))
            } else {
                Err(StoreError::Conflict(id))
            };
        }
        let dir = self.match_dir(&id);
        fs::create_dir_all(&dir).at(&dir)?;
        let canonical = telemetry.document().to_json();
        let entry = self.entry(&dir, telemetry)?;
        // Written last: a directory without telemetry is ignored on startup.
        write_atomic(&dir.join("telemetry.json"), canonical.as_bytes())?;
        self.matches.write().unwrap_or_else(|p| p.into_inner()).insert(id.clone(), Arc::new(entry));
        tracing::info!(match_id = %id, "match ingested");
        Ok((id, Ingested::Created))
    }
}

/// Match ids become directory names, so keep them to a safe alphabet.
fn check_match_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::Invalid(grieferlens_core::Error::SchemaViolation {
            path: "match_id".into(),
            message: format!("`{id}` must be 1-128 characters from [A-Za-z0-9._-] and not start with '.'"),
        }))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).at(&tmp)?;
    f.write_all(bytes).at(&tmp)?;
    f.sync_all().at(&tmp)?;
    fs::rename(&tmp, path).at(path)?;
    if let Some(dir) = path.parent() {
        fs::File::open(dir).and_then(|d| d.sync_all()).at(dir)?;
    }
    Ok(())
}
