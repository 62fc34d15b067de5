//! Match telemetry: the on-disk document, validation, and time-indexed access.
//!
//! A match document is a single JSON object holding the roster, time-sorted
//! position samples and time-sorted game events. [`parse_match`] validates it
//! into an immutable [`MatchTelemetry`] that also carries per-player indexes
//! (sample tracks and alive intervals) used by every analysis module.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const ROSTER_SIZE: usize = 10;
pub const TEAM_SIZE: usize = 5;

/// Tolerance used when turning a float duration into a tick count.
const TICK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Blue,
    Red,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Blue => Team::Red,
            Team::Red => Team::Blue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Team::Blue => "blue",
            Team::Red => "red",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeroType {
    Tank,
    Fighter,
    Assassin,
    Mage,
    Marksman,
    Support,
}

impl fmt::Display for HeroType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HeroType::Tank => "Tank",
            HeroType::Fighter => "Fighter",
            HeroType::Assassin => "Assassin",
            HeroType::Mage => "Mage",
            HeroType::Marksman => "Marksman",
            HeroType::Support => "Support",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Top,
    Jungle,
    Mid,
    BotCarry,
    BotSupport,
}

impl Position {
    pub const ALL: [Position; 5] = [
        Position::Top,
        Position::Jungle,
        Position::Mid,
        Position::BotCarry,
        Position::BotSupport,
    ];

    /// The lane this position is assigned to, if any.
    pub fn lane(self) -> Option<Lane> {
        match self {
            Position::Top => Some(Lane::Top),
            Position::Mid => Some(Lane::Mid),
            Position::BotCarry | Position::BotSupport => Some(Lane::Bot),
            Position::Jungle => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Position::Top => "top",
            Position::Jungle => "jungle",
            Position::Mid => "mid",
            Position::BotCarry => "bot_carry",
            Position::BotSupport => "bot_support",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lane {
    Top,
    Mid,
    Bot,
}

impl Lane {
    pub const ALL: [Lane; 3] = [Lane::Top, Lane::Mid, Lane::Bot];

    pub fn as_str(self) -> &'static str {
        match self {
            Lane::Top => "top",
            Lane::Mid => "mid",
            Lane::Bot => "bot",
        }
    }

    pub fn cs_source(self) -> CsSource {
        match self {
            Lane::Top => CsSource::Top,
            Lane::Mid => CsSource::Mid,
            Lane::Bot => CsSource::Bot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsSource {
    Top,
    Mid,
    Bot,
    JungleBlue,
    JungleRed,
}

impl CsSource {
    pub fn is_jungle(self) -> bool {
        matches!(self, CsSource::JungleBlue | CsSource::JungleRed)
    }

    pub fn jungle_of(team: Team) -> CsSource {
        match team {
            Team::Blue => CsSource::JungleBlue,
            Team::Red => CsSource::JungleRed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Tower,
    Crystal,
    Dragon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerInfo {
    pub player_id: String,
    pub team: Team,
    pub hero_type: HeroType,
    pub assigned_position: Position,
    pub report_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionSample {
    pub t: f64,
    pub player_id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub t: f64,
    pub actor: String,
    #[serde(flatten)]
    pub payload: EventPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventPayload {
    Kill {
        victim: String,
        #[serde(default)]
        assists: Vec<String>,
        x: f64,
        y: f64,
    },
    /// `target` may name a non-roster unit (tower, monster); such damage is
    /// treated as objective damage.
    Damage {
        target: String,
        amount: f64,
        x: f64,
        y: f64,
    },
    Heal {
        target: String,
        amount: f64,
    },
    Cs {
        source: CsSource,
        gold: f64,
    },
    Gold {
        amount: f64,
        source: String,
    },
    Objective {
        subtype: ObjectiveKind,
        team: Team,
        x: f64,
        y: f64,
    },
    Recall,
    Respawn,
}

impl EventPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            EventPayload::Kill { .. } => "kill",
            EventPayload::Damage { .. } => "damage",
            EventPayload::Heal { .. } => "heal",
            EventPayload::Cs { .. } => "cs",
            EventPayload::Gold { .. } => "gold",
            EventPayload::Objective { .. } => "objective",
            EventPayload::Recall => "recall",
            EventPayload::Respawn => "respawn",
        }
    }

    /// Map location attached to the event, for kinds that carry one.
    pub fn location(&self) -> Option<(f64, f64)> {
        match *self {
            EventPayload::Kill { x, y, .. }
            | EventPayload::Damage { x, y, .. }
            | EventPayload::Objective { x, y, .. } => Some((x, y)),
            _ => None,
        }
    }
}

/// The serialized form of a match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryDocument {
    pub match_id: String,
    pub duration_s: f64,
    pub players: Vec<PlayerInfo>,
    pub position_samples: Vec<PositionSample>,
    pub events: Vec<GameEvent>,
}

impl TelemetryDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("telemetry documents always serialize")
    }
}

/// A closed time interval `[start, end]` in seconds; serialized as a
/// two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeRange(pub f64, pub f64);

impl TimeRange {
    pub fn new(start: f64, end: f64) -> Self {
        TimeRange(start, end)
    }

    pub fn start(&self) -> f64 {
        self.0
    }

    pub fn end(&self) -> f64 {
        self.1
    }

    pub fn len(&self) -> f64 {
        self.1 - self.0
    }

    pub fn is_empty(&self) -> bool {
        self.1 <= self.0
    }

    pub fn contains(&self, t: f64) -> bool {
        self.0 <= t && t <= self.1
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.0 + self.1)
    }
}

/// Sorts ranges and merges any that overlap or lie within `gap` of each other.
pub fn merge_ranges(mut ranges: Vec<TimeRange>, gap: f64) -> Vec<TimeRange> {
    ranges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<TimeRange> = Vec::with_capacity(ranges.len());
    for r in ranges {
        match out.last_mut() {
            Some(last) if r.0 <= last.1 + gap => last.1 = last.1.max(r.1),
            _ => out.push(r),
        }
    }
    out
}

/// Number of `1/hz` ticks in `[0, span]`, counting both endpoints.
pub fn tick_count(span: f64, hz: f64) -> usize {
    (span * hz + TICK_EPS).floor() as usize + 1
}

/// A validated, immutable match with per-player indexes.
#[derive(Debug, Clone)]
pub struct MatchTelemetry {
    doc: TelemetryDocument,
    index: HashMap<String, usize>,
    tracks: Vec<Vec<(f64, f64, f64)>>,
    alive: Vec<Vec<TimeRange>>,
}

impl PartialEq for MatchTelemetry {
    fn eq(&self, other: &Self) -> bool {
        self.doc == other.doc
    }
}

/// Parses and validates a telemetry document.
pub fn parse_match(raw: &[u8]) -> Result<MatchTelemetry> {
    let root: Value = serde_json::from_slice(raw).map_err(|e| Error::MalformedInput {
        message: e.to_string(),
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected a JSON object"))?;

    let field = |key: &str| -> Result<&Value> {
        obj.get(key)
            .ok_or_else(|| Error::schema(key, "missing field"))
    };
    let match_id: String = typed(field("match_id")?, "match_id")?;
    let duration_s: f64 = typed(field("duration_s")?, "duration_s")?;
    let players = typed_list::<PlayerInfo>(field("players")?, "players")?;
    let position_samples = typed_list::<PositionSample>(field("position_samples")?, "position_samples")?;
    let events = typed_list::<GameEvent>(field("events")?, "events")?;

    MatchTelemetry::from_document(TelemetryDocument {
        match_id,
        duration_s,
        players,
        position_samples,
        events,
    })
}

fn typed<T: DeserializeOwned>(v: &Value, path: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::schema(path, e.to_string()))
}

fn typed_list<T: DeserializeOwned>(v: &Value, path: &str) -> Result<Vec<T>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| typed(item, &format!("{path}[{i}]")))
        .collect()
}

fn check_unit(path: impl Fn() -> String, x: f64, y: f64) -> Result<()> {
    for (axis, v) in [("x", x), ("y", y)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invariant(
                format!("{}.{axis}", path()),
                format!("coordinate {v} outside [0, 1]"),
            ));
        }
    }
    Ok(())
}

fn check_amount(path: impl Fn() -> String, key: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invariant(
            format!("{}.{key}", path()),
            format!("amount {v} must be finite and >= 0"),
        ));
    }
    Ok(())
}

impl MatchTelemetry {
    /// Validates a document and builds the per-player indexes.
    pub fn from_document(doc: TelemetryDocument) -> Result<Self> {
        if !(doc.duration_s.is_finite() && doc.duration_s > 0.0) {
            return Err(Error::invariant(
                "duration_s",
                format!("expected a positive duration, got {}", doc.duration_s),
            ));
        }
        let duration = doc.duration_s;

        if doc.players.len() != ROSTER_SIZE {
            return Err(Error::invariant(
                "players",
                format!("expected {ROSTER_SIZE}, got {}", doc.players.len()),
            ));
        }
        let mut index = HashMap::with_capacity(ROSTER_SIZE);
        for (i, p) in doc.players.iter().enumerate() {
            if index.insert(p.player_id.clone(), i).is_some() {
                return Err(Error::invariant(
                    format!("players[{i}].player_id"),
                    format!("duplicate player id `{}`", p.player_id),
                ));
            }
        }
        for team in [Team::Blue, Team::Red] {
            let members: Vec<&PlayerInfo> = doc.players.iter().filter(|p| p.team == team).collect();
            if members.len() != TEAM_SIZE {
                return Err(Error::invariant(
                    "players",
                    format!("team {}: expected {TEAM_SIZE} players, got {}", team.as_str(), members.len()),
                ));
            }
            let positions: HashSet<Position> = members.iter().map(|p| p.assigned_position).collect();
            if positions.len() != TEAM_SIZE {
                return Err(Error::invariant(
                    "players",
                    format!("team {}: each assigned position must appear exactly once", team.as_str()),
                ));
            }
        }

        let known = |path: &dyn Fn() -> String, key: &str, id: &str| -> Result<()> {
            if index.contains_key(id) {
                Ok(())
            } else {
                Err(Error::invariant(
                    format!("{}.{key}", path()),
                    format!("unknown player id `{id}`"),
                ))
            }
        };
        let check_time = |path: &dyn Fn() -> String, t: f64, prev: f64| -> Result<()> {
            if !(t.is_finite() && (0.0..=duration).contains(&t)) {
                return Err(Error::invariant(
                    format!("{}.t", path()),
                    format!("timestamp {t} outside [0, {duration}]"),
                ));
            }
            if t < prev {
                return Err(Error::invariant(
                    format!("{}.t", path()),
                    format!("timestamps must be nondecreasing ({t} after {prev})"),
                ));
            }
            Ok(())
        };

        let mut tracks: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); ROSTER_SIZE];
        let mut prev = 0.0;
        for (i, s) in doc.position_samples.iter().enumerate() {
            let path = || format!("position_samples[{i}]");
            check_time(&path, s.t, prev)?;
            prev = s.t;
            known(&path, "player_id", &s.player_id)?;
            check_unit(path, s.x, s.y)?;
            tracks[index[&s.player_id]].push((s.t, s.x, s.y));
        }

        let mut dead: HashSet<&str> = HashSet::new();
        let mut prev = 0.0;
        for (i, e) in doc.events.iter().enumerate() {
            let path = || format!("events[{i}]");
            check_time(&path, e.t, prev)?;
            prev = e.t;
            known(&path, "actor", &e.actor)?;
            match &e.payload {
                EventPayload::Kill { victim, assists, x, y } => {
                    known(&path, "victim", victim)?;
                    for (j, a) in assists.iter().enumerate() {
                        known(&path, &format!("assists[{j}]"), a)?;
                    }
                    check_unit(path, *x, *y)?;
                    dead.insert(victim.as_str());
                }
                EventPayload::Damage { amount, x, y, .. } => {
                    check_amount(path, "amount", *amount)?;
                    check_unit(path, *x, *y)?;
                }
                EventPayload::Heal { target, amount } => {
                    known(&path, "target", target)?;
                    check_amount(path, "amount", *amount)?;
                }
                EventPayload::Cs { gold, .. } => check_amount(path, "gold", *gold)?,
                EventPayload::Gold { amount, .. } => check_amount(path, "amount", *amount)?,
                EventPayload::Objective { x, y, .. } => check_unit(path, *x, *y)?,
                EventPayload::Recall => {}
                EventPayload::Respawn => {
                    if !dead.remove(e.actor.as_str()) {
                        return Err(Error::invariant(
                            format!("events[{i}]"),
                            format!("respawn of `{}` without a preceding death", e.actor),
                        ));
                    }
                }
            }
        }

        let alive = (0..ROSTER_SIZE)
            .map(|i| compute_alive(&doc, &doc.players[i].player_id))
            .collect();

        Ok(MatchTelemetry {
            doc,
            index,
            tracks,
            alive,
        })
    }

    pub fn document(&self) -> &TelemetryDocument {
        &self.doc
    }

    pub fn into_document(self) -> TelemetryDocument {
        self.doc
    }

    pub fn match_id(&self) -> &str {
        &self.doc.match_id
    }

    pub fn duration_s(&self) -> f64 {
        self.doc.duration_s
    }

    pub fn players(&self) -> &[PlayerInfo] {
        &self.doc.players
    }

    pub fn events(&self) -> &[GameEvent] {
        &self.doc.events
    }

    pub fn position_samples(&self) -> &[PositionSample] {
        &self.doc.position_samples
    }

    pub fn player_index(&self, player_id: &str) -> Result<usize> {
        self.index
            .get(player_id)
            .copied()
            .ok_or_else(|| Error::UnknownPlayer(player_id.to_string()))
    }

    pub fn player(&self, player_id: &str) -> Result<&PlayerInfo> {
        Ok(&self.doc.players[self.player_index(player_id)?])
    }

    pub fn is_roster_player(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn team_of(&self, player_id: &str) -> Option<Team> {
        self.index.get(player_id).map(|&i| self.doc.players[i].team)
    }

    pub fn teammates(&self, team: Team) -> impl Iterator<Item = &PlayerInfo> {
        self.doc.players.iter().filter(move |p| p.team == team)
    }

    /// Checks `0 <= t0 <= t1 <= duration_s`.
    pub fn check_window(&self, t0: f64, t1: f64) -> Result<()> {
        let reason = if !(t0.is_finite() && t1.is_finite()) {
            Some("bounds must be finite")
        } else if t0 > t1 {
            Some("start after end")
        } else if t0 < 0.0 || t1 > self.doc.duration_s {
            Some("window outside match duration")
        } else {
            None
        };
        match reason {
            Some(r) => Err(Error::BadWindow {
                t0,
                t1,
                reason: r.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Disjoint, sorted intervals during which the player is alive.
    pub fn alive_intervals(&self, player_id: &str) -> Result<&[TimeRange]> {
        Ok(&self.alive[self.player_index(player_id)?])
    }

    /// Index of the alive interval containing `t`, if any.
    pub fn alive_segment_at(&self, player_id: &str, t: f64) -> Result<Option<usize>> {
        let intervals = self.alive_intervals(player_id)?;
        Ok(segment_containing(intervals, t))
    }

    pub fn is_alive_at(&self, player_id: &str, t: f64) -> Result<bool> {
        Ok(self.alive_segment_at(player_id, t)?.is_some())
    }

    /// Total alive seconds inside `[t0, t1]`.
    pub fn alive_seconds_in(&self, player_id: &str, t0: f64, t1: f64) -> Result<f64> {
        Ok(self
            .alive_intervals(player_id)?
            .iter()
            .map(|r| (r.1.min(t1) - r.0.max(t0)).max(0.0))
            .sum())
    }

    /// Linearly interpolated position, held constant outside the sampled span.
    pub fn position_at(&self, player_id: &str, t: f64) -> Result<(f64, f64)> {
        let idx = self.player_index(player_id)?;
        if !(0.0..=self.doc.duration_s).contains(&t) {
            return Err(Error::BadTime {
                t,
                duration_s: self.doc.duration_s,
            });
        }
        let track = &self.tracks[idx];
        if track.is_empty() {
            return Err(Error::NoSamples(player_id.to_string()));
        }
        Ok(interpolate(track, t))
    }

    /// Positions on the regular grid `t = k / hz`, `k = 0..=floor(duration * hz)`.
    pub fn resample_positions(&self, player_id: &str, hz: f64) -> Result<Vec<(f64, f64, f64)>> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(Error::InvalidConfig(format!("sample rate must be positive, got {hz}")));
        }
        let n = tick_count(self.doc.duration_s, hz);
        (0..n)
            .map(|k| {
                let t = (k as f64 / hz).min(self.doc.duration_s);
                self.position_at(player_id, t).map(|(x, y)| (t, x, y))
            })
            .collect()
    }
}

pub(crate) fn segment_containing(intervals: &[TimeRange], t: f64) -> Option<usize> {
    let i = intervals.partition_point(|r| r.0 <= t);
    if i == 0 {
        return None;
    }
    intervals[i - 1].contains(t).then_some(i - 1)
}

fn interpolate(track: &[(f64, f64, f64)], t: f64) -> (f64, f64) {
    let i = track.partition_point(|s| s.0 <= t);
    if i == 0 {
        return (track[0].1, track[0].2);
    }
    if i == track.len() {
        let last = track[i - 1];
        return (last.1, last.2);
    }
    let (ta, xa, ya) = track[i - 1];
    let (tb, xb, yb) = track[i];
    // ta <= t < tb, so the span is strictly positive.
    let f = (t - ta) / (tb - ta);
    (xa + f * (xb - xa), ya + f * (yb - ya))
}

fn compute_alive(doc: &TelemetryDocument, player_id: &str) -> Vec<TimeRange> {
    let mut out = Vec::new();
    let mut alive_since = Some(0.0);
    for e in &doc.events {
        match &e.payload {
            EventPayload::Kill { victim, .. } if victim == player_id => {
                if let Some(start) = alive_since.take() {
                    if e.t > start {
                        out.push(TimeRange(start, e.t));
                    }
                }
            }
            EventPayload::Respawn if e.actor == player_id && alive_since.is_none() => {
                alive_since = Some(e.t);
            }
            _ => {}
        }
    }
    if let Some(start) = alive_since {
        if doc.duration_s > start {
            out.push(TimeRange(start, doc.duration_s));
        }
    }
    out
}

/// The ten-player roster used by the bundled simulator and fixtures:
/// P01..P05 blue, P06..P10 red, each team ordered top, mid, bot_support,
/// jungle, bot_carry.
pub fn standard_roster() -> Vec<PlayerInfo> {
    let layout = [
        (Position::Top, HeroType::Fighter),
        (Position::Mid, HeroType::Mage),
        (Position::BotSupport, HeroType::Support),
        (Position::Jungle, HeroType::Assassin),
        (Position::BotCarry, HeroType::Marksman),
    ];
    let mut roster = Vec::with_capacity(ROSTER_SIZE);
    for (t, team) in [Team::Blue, Team::Red].into_iter().enumerate() {
        for (i, &(pos, hero)) in layout.iter().enumerate() {
            roster.push(PlayerInfo {
                player_id: format!("P{:02}", t * TEAM_SIZE + i + 1),
                team,
                hero_type: hero,
                assigned_position: pos,
                report_count: 0,
            });
        }
    }
    roster
}
