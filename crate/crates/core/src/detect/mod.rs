//! Rule-based griefer detectors.
//!
//! Each detector is a pure function of the match and the configuration and
//! yields at most one [`SuspicionFinding`] per player. [`run_all_detectors`]
//! groups them into one [`PlayerSummary`] per roster slot.

mod afk;
mod feeding;
mod jungle;
mod lane;
mod participation;
mod position;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use afk::detect_afk;
pub use feeding::detect_feeding;
pub use jungle::detect_jungle_stealing;
pub use lane::detect_lane_stealing;
pub use participation::detect_non_participation;
pub use position::detect_position_stealing;

use crate::config::DetectorConfig;
use crate::error::{Error, Result};
use crate::explain::render_explanation;
use crate::report::{round4, ser_f64, ser_ranges};
use crate::spatial::ZoneLayout;
use crate::telemetry::{tick_count, HeroType, MatchTelemetry, Position, Team, TimeRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrieferType {
    Afk,
    Feeding,
    LaneStealing,
    JungleStealing,
    NonParticipation,
    PositionStealing,
}

impl GrieferType {
    pub const ALL: [GrieferType; 6] = [
        GrieferType::Afk,
        GrieferType::Feeding,
        GrieferType::LaneStealing,
        GrieferType::JungleStealing,
        GrieferType::NonParticipation,
        GrieferType::PositionStealing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GrieferType::Afk => "afk",
            GrieferType::Feeding => "feeding",
            GrieferType::LaneStealing => "lane_stealing",
            GrieferType::JungleStealing => "jungle_stealing",
            GrieferType::NonParticipation => "non_participation",
            GrieferType::PositionStealing => "position_stealing",
        }
    }
}

impl fmt::Display for GrieferType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrieferType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GrieferType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown griefer type `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvidenceValue {
    Count(u64),
    Number(#[serde(serialize_with = "ser_f64")] f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub key: String,
    pub value: EvidenceValue,
}

impl Evidence {
    pub fn number(key: &str, v: f64) -> Self {
        Evidence { key: key.into(), value: EvidenceValue::Number(v) }
    }

    pub fn count(key: &str, v: u64) -> Self {
        Evidence { key: key.into(), value: EvidenceValue::Count(v) }
    }

    pub fn text(key: &str, v: impl Into<String>) -> Self {
        Evidence { key: key.into(), value: EvidenceValue::Text(v.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspicionFinding {
    pub player_id: String,
    pub griefer_type: GrieferType,
    #[serde(serialize_with = "ser_f64")]
    pub severity: f64,
    #[serde(serialize_with = "ser_ranges")]
    pub time_ranges: Vec<TimeRange>,
    pub evidence: Vec<Evidence>,
    pub explanation: String,
}

impl SuspicionFinding {
    pub fn evidence_value(&self, key: &str) -> Option<&EvidenceValue> {
        self.evidence.iter().find(|e| e.key == key).map(|e| &e.value)
    }

    pub fn evidence_number(&self, key: &str) -> Option<f64> {
        match self.evidence_value(key)? {
            EvidenceValue::Number(x) => Some(*x),
            EvidenceValue::Count(n) => Some(*n as f64),
            EvidenceValue::Text(_) => None,
        }
    }

    pub fn evidence_text(&self, key: &str) -> Option<&str> {
        match self.evidence_value(key)? {
            EvidenceValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSummary {
    pub player_id: String,
    pub team: Team,
    pub hero_type: HeroType,
    pub assigned_position: Position,
    pub report_count: u32,
    pub findings: Vec<SuspicionFinding>,
    pub suspicion_paragraph: String,
}

pub const NO_SUSPICION: &str = "No suspicious behavior detected.";

/// Builds a finding and renders its explanation from the configured template.
pub(crate) fn finding(
    m: &MatchTelemetry,
    cfg: &DetectorConfig,
    player_id: &str,
    griefer_type: GrieferType,
    severity: f64,
    time_ranges: Vec<TimeRange>,
    evidence: Vec<Evidence>,
) -> Result<SuspicionFinding> {
    let mut f = SuspicionFinding {
        player_id: player_id.to_string(),
        griefer_type,
        severity: severity.clamp(0.0, 1.0),
        time_ranges,
        evidence,
        explanation: String::new(),
    };
    f.explanation = render_explanation(&f, m, cfg.templates.get(griefer_type))?;
    Ok(f)
}

/// A player's state at each whole second of the match.
pub(crate) struct Track {
    /// Position when alive (and sampled), indexed by second.
    pub pos: Vec<Option<(f64, f64)>>,
    /// Alive-interval index, indexed by second.
    pub seg: Vec<Option<usize>>,
}

impl Track {
    pub fn build(m: &MatchTelemetry, player_id: &str) -> Result<Track> {
        let n = tick_count(m.duration_s(), 1.0);
        let mut pos = Vec::with_capacity(n);
        let mut seg = Vec::with_capacity(n);
        for k in 0..n {
            let t = (k as f64).min(m.duration_s());
            let s = m.alive_segment_at(player_id, t)?;
            let p = match (s, m.position_at(player_id, t)) {
                (Some(_), Ok(p)) => Some(p),
                (_, Err(Error::NoSamples(_))) | (None, _) => None,
                (_, Err(e)) => return Err(e),
            };
            pos.push(p);
            seg.push(s);
        }
        Ok(Track { pos, seg })
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }
}

/// Runs all six detectors and groups findings per player, in roster order
/// sorted by player id.
pub fn run_all_detectors(
    m: &MatchTelemetry,
    layout: &ZoneLayout,
    cfg: &DetectorConfig,
) -> Result<Vec<PlayerSummary>> {
    let mut all = Vec::new();
    all.extend(detect_afk(m, layout, cfg)?);
    all.extend(detect_feeding(m, cfg)?);
    all.extend(detect_lane_stealing(m, cfg)?);
    all.extend(detect_jungle_stealing(m, cfg)?);
    all.extend(detect_non_participation(m, cfg)?);
    all.extend(detect_position_stealing(m, layout, cfg)?);

    let mut players: Vec<_> = m.players().iter().collect();
    players.sort_by(|a, b| a.player_id.cmp(&b.player_id));
    Ok(players
        .into_iter()
        .map(|p| {
            let mut findings: Vec<SuspicionFinding> =
                all.iter().filter(|f| f.player_id == p.player_id).cloned().collect();
            findings.sort_by_key(|f| f.griefer_type);
            let mut by_severity: Vec<&SuspicionFinding> = findings.iter().collect();
            by_severity.sort_by(|a, b| {
                round4(b.severity)
                    .total_cmp(&round4(a.severity))
                    .then(a.griefer_type.cmp(&b.griefer_type))
            });
            let suspicion_paragraph = if by_severity.is_empty() {
                NO_SUSPICION.to_string()
            } else {
                by_severity.iter().map(|f| f.explanation.as_str()).collect::<Vec<_>>().join(" ")
            };
            PlayerSummary {
                player_id: p.player_id.clone(),
                team: p.team,
                hero_type: p.hero_type,
                assigned_position: p.assigned_position,
                report_count: p.report_count,
                findings,
                suspicion_paragraph,
            }
        })
        .collect())
}
