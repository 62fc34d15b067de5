//! Read-side payloads. Each is a pure function of the stored match, the
//! pinned config and the annotation log; floats go out at four decimals.

use std::collections::HashMap;

use chrono::{DateTime, Utc};
use grieferlens_core::detect::GrieferType;
use grieferlens_core::metrics::{contribution_series, detect_team_fights, gold_series, jungle_share_series, MetricSeries};
use grieferlens_core::report::{round4, ser_f64, ser_ranges};
use grieferlens_core::spatial::{dwell_heatmap, trajectory};
use grieferlens_core::telemetry::{EventPayload, TimeRange};
use serde::Serialize;

use crate::annotations::{AnnotationKind, AnnotationRecord};
use crate::error::ApiError;
use crate::store::{MatchEntry, Store};

/// Cells with strictly more dwell than this are flagged hot.
pub const HOT_CELL_S: f64 = 30.0;
pub const DEFAULT_GRID: usize = 64;
pub const MAX_GRID: usize = 512;

pub type Params = HashMap<String, String>;

fn param<'a>(q: &'a Params, key: &str) -> Option<&'a str> {
    q.get(key).map(String::as_str)
}

fn required<'a>(q: &'a Params, key: &str) -> Result<&'a str, ApiError> {
    param(q, key).ok_or_else(|| {
        ApiError::bad_request("missing_parameter", format!("query parameter `{key}` is required")).with_path(key)
    })
}

fn number(q: &Params, key: &str, default: f64) -> Result<f64, ApiError> {
    match param(q, key) {
        None => Ok(default),
        Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
            ApiError::bad_request("invalid_parameter", format!("`{key}` must be a finite number, got `{s}`"))
                .with_path(key)
        }),
    }
}

/// `from`/`to` default to the whole match.
fn window(entry: &MatchEntry, q: &Params) -> Result<(f64, f64), ApiError> {
    let t0 = number(q, "from", 0.0)?;
    let t1 = number(q, "to", entry.telemetry.duration_s())?;
    entry.telemetry.check_window(t0, t1)?;
    Ok((t0, t1))
}

fn player<'a>(entry: &MatchEntry, q: &'a Params) -> Result<&'a str, ApiError> {
    let p = required(q, "player")?;
    entry.telemetry.player(p)?;
    Ok(p)
}

#[derive(Serialize)]
pub struct MatchListing<'a> {
    pub match_id: &'a str,
    pub duration_s: f64,
    pub flagged_players: usize,
}

pub fn listing(entry: &MatchEntry) -> MatchListing<'_> {
    MatchListing {
        match_id: entry.telemetry.match_id(),
        duration_s: entry.telemetry.duration_s(),
        flagged_players: entry.summaries.iter().filter(|s| !s.findings.is_empty()).count(),
    }
}

#[derive(Serialize)]
pub struct KeyEvent {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    pub player_id: String,
    pub kind: &'static str,
    /// Victim of a kill, killer of a death, objective type.
    pub other: Option<String>,
}

#[derive(Serialize)]
pub struct FightSpan {
    #[serde(serialize_with = "ser_f64")]
    pub t_start: f64,
    #[serde(serialize_with = "ser_f64")]
    pub t_end: f64,
    pub participants: Vec<String>,
}

#[derive(Serialize)]
pub struct Series {
    pub metric_id: String,
    #[serde(serialize_with = "ser_f64")]
    pub window_s: f64,
    pub values: Vec<f64>,
}

impl From<MetricSeries> for Series {
    fn from(s: MetricSeries) -> Self {
        Series { metric_id: s.metric_id, window_s: s.window_s, values: s.values.into_iter().map(round4).collect() }
    }
}

#[derive(Serialize)]
pub struct PlayerSeries {
    pub player_id: String,
    pub contribution: Series,
    pub gold: Series,
    pub jungle_share: Series,
}

#[derive(Serialize)]
pub struct SuspiciousRange {
    pub player_id: String,
    pub griefer_type: GrieferType,
    #[serde(serialize_with = "ser_ranges")]
    pub ranges: Vec<TimeRange>,
}

#[derive(Serialize)]
pub struct Timeline {
    pub match_id: String,
    #[serde(serialize_with = "ser_f64")]
    pub duration_s: f64,
    pub key_events: Vec<KeyEvent>,
    pub team_fights: Vec<FightSpan>,
    /// Present when a `player` was requested.
    pub series: Option<PlayerSeries>,
    pub suspicious_ranges: Vec<SuspiciousRange>,
}

pub fn timeline(store: &Store, entry: &MatchEntry, q: &Params) -> Result<Timeline, ApiError> {
    let m = &entry.telemetry;
    let cfg = store.config();
    let mut key_events = Vec::new();
    for e in m.events() {
        let ev = |player_id: &str, kind, other: Option<&str>| KeyEvent {
            t: e.t,
            player_id: player_id.to_string(),
            kind,
            other: other.map(str::to_string),
        };
        match &e.payload {
            EventPayload::Kill { victim, .. } => {
                key_events.push(ev(&e.actor, "kill", Some(victim)));
                key_events.push(ev(victim, "death", Some(&e.actor)));
            }
            EventPayload::Objective { subtype, .. } => {
                let name = serde_json::to_value(subtype).ok().and_then(|v| v.as_str().map(str::to_string));
                key_events.push(ev(&e.actor, "objective", name.as_deref()));
            }
            EventPayload::Recall => key_events.push(ev(&e.actor, "recall", None)),
            _ => {}
        }
    }
    let team_fights = detect_team_fights(m, &cfg.team_fight)
        .into_iter()
        .map(|f| FightSpan { t_start: f.t_start, t_end: f.t_end, participants: f.participants })
        .collect();
    let series = match param(q, "player") {
        None => None,
        Some(p) => {
            m.player(p)?;
            let w = cfg.metric_window_s;
            Some(PlayerSeries {
                player_id: p.to_string(),
                contribution: contribution_series(m, p, &cfg.weights, w)?.into(),
                gold: gold_series(m, p, w)?.into(),
                jungle_share: jungle_share_series(m, p, w)?.into(),
            })
        }
    };
    let suspicious_ranges = entry
        .summaries
        .iter()
        .flat_map(|s| &s.findings)
        .map(|f| SuspiciousRange {
            player_id: f.player_id.clone(),
            griefer_type: f.griefer_type,
            ranges: f.time_ranges.clone(),
        })
        .collect();
    Ok(Timeline {
        match_id: m.match_id().to_string(),
        duration_s: m.duration_s(),
        key_events,
        team_fights,
        series,
        suspicious_ranges,
    })
}

#[derive(Serialize)]
pub struct HeatCell {
    pub ix: usize,
    pub iy: usize,
    #[serde(serialize_with = "ser_f64")]
    pub seconds: f64,
    pub hot: bool,
}

#[derive(Serialize)]
pub struct Heatmap {
    pub match_id: String,
    pub player_id: String,
    pub grid_n: usize,
    pub window: [f64; 2],
    #[serde(serialize_with = "ser_f64")]
    pub hot_threshold_s: f64,
    #[serde(serialize_with = "ser_f64")]
    pub total_s: f64,
    /// Nonzero cells only, row-major.
    pub cells: Vec<HeatCell>,
}

pub fn heatmap(entry: &MatchEntry, q: &Params) -> Result<Heatmap, ApiError> {
    let p = player(entry, q)?;
    let (t0, t1) = window(entry, q)?;
    let grid = match param(q, "grid") {
        None => DEFAULT_GRID,
        Some(s) => s.parse::<usize>().ok().filter(|n| (1..=MAX_GRID).contains(n)).ok_or_else(|| {
            ApiError::bad_request("invalid_parameter", format!("`grid` must be an integer in 1..={MAX_GRID}"))
                .with_path("grid")
        })?,
    };
    let h = dwell_heatmap(&entry.telemetry, p, t0, t1, grid)?;
    Ok(Heatmap {
        match_id: entry.telemetry.match_id().to_string(),
        player_id: p.to_string(),
        grid_n: grid,
        window: [round4(t0), round4(t1)],
        hot_threshold_s: HOT_CELL_S,
        total_s: h.total(),
        cells: h.nonzero().map(|(ix, iy, seconds)| HeatCell { ix, iy, seconds, hot: seconds > HOT_CELL_S }).collect(),
    })
}

#[derive(Serialize)]
pub struct Point {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    #[serde(serialize_with = "ser_f64")]
    pub x: f64,
    #[serde(serialize_with = "ser_f64")]
    pub y: f64,
}

#[derive(Serialize)]
pub struct Trajectory {
    pub match_id: String,
    pub player_id: String,
    pub window: [f64; 2],
    /// One polyline per alive stretch inside the window.
    pub polylines: Vec<Vec<Point>>,
}

pub fn trajectory_view(entry: &MatchEntry, q: &Params) -> Result<Trajectory, ApiError> {
    let p = player(entry, q)?;
    let (t0, t1) = window(entry, q)?;
    let lines = trajectory(&entry.telemetry, p, t0, t1, 1.0)?;
    Ok(Trajectory {
        match_id: entry.telemetry.match_id().to_string(),
        player_id: p.to_string(),
        window: [round4(t0), round4(t1)],
        polylines: lines
            .into_iter()
            .map(|l| l.into_iter().map(|tp| Point { t: tp.t, x: tp.x, y: tp.y }).collect())
            .collect(),
    })
}

#[derive(Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ExportEntry {
    Algorithm {
        player_id: String,
        griefer_type: GrieferType,
        #[serde(serialize_with = "ser_f64")]
        severity: f64,
        #[serde(serialize_with = "ser_ranges")]
        time_ranges: Vec<TimeRange>,
        explanation: String,
    },
    Human {
        annotation_id: String,
        player_id: String,
        kind: AnnotationKind,
        griefer_types: Vec<GrieferType>,
        time_range: Option<[f64; 2]>,
        tags: Vec<String>,
        text: String,
        author: String,
        created_at: DateTime<Utc>,
    },
}

#[derive(Serialize)]
pub struct Export {
    pub match_id: String,
    pub config_hash: String,
    pub entries: Vec<ExportEntry>,
}

/// Detector findings and live human annotations side by side, grouped by
/// player; within a player, findings come first in type order, then
/// annotations in creation order.
pub fn export(store: &Store, entry: &MatchEntry, annotations: Vec<AnnotationRecord>) -> Export {
    let mut entries = Vec::new();
    for s in &entry.summaries {
        for f in &s.findings {
            entries.push(ExportEntry::Algorithm {
                player_id: f.player_id.clone(),
                griefer_type: f.griefer_type,
                severity: f.severity,
                time_ranges: f.time_ranges.clone(),
                explanation: f.explanation.clone(),
            });
        }
        for a in annotations.iter().filter(|a| a.target_player == s.player_id) {
            entries.push(ExportEntry::Human {
                annotation_id: a.annotation_id.clone(),
                player_id: a.target_player.clone(),
                kind: a.kind,
                griefer_types: a.griefer_types.clone(),
                time_range: a.time_range,
                tags: a.tags.clone(),
                text: a.text.clone(),
                author: a.author.clone(),
                created_at: a.created_at,
            });
        }
    }
    Export { match_id: entry.telemetry.match_id().to_string(), config_hash: store.config_hash().to_string(), entries }
}
