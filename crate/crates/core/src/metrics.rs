//! Windowed per-player metric series and team-fight detection.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telemetry::{EventPayload, Lane, MatchTelemetry, Team, TimeRange};

pub const DEFAULT_WINDOW_S: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub metric_id: String,
    pub window_s: f64,
    pub values: Vec<f64>,
}

/// Weights of the per-window contribution score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContributionWeights {
    pub w_damage: f64,
    pub w_objective_damage: f64,
    pub w_heal: f64,
    pub w_gold: f64,
    pub w_cs: f64,
}

impl Default for ContributionWeights {
    fn default() -> Self {
        Self {
            w_damage: 1.0,
            w_objective_damage: 1.0,
            w_heal: 1.0,
            w_gold: 0.5,
            w_cs: 0.5,
        }
    }
}

impl ContributionWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.w_damage, self.w_objective_damage, self.w_heal, self.w_gold, self.w_cs];
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig("contribution weights must be finite and >= 0".into()));
        }
        if !w.iter().any(|v| *v > 0.0) {
            return Err(Error::InvalidConfig("at least one contribution weight must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TeamFightParams {
    pub cluster_radius: f64,
    pub time_gap_s: f64,
    pub min_duration_s: f64,
    pub min_per_team: usize,
}

impl Default for TeamFightParams {
    fn default() -> Self {
        Self {
            cluster_radius: 0.12,
            time_gap_s: 10.0,
            min_duration_s: 5.0,
            min_per_team: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamFight {
    pub t_start: f64,
    pub t_end: f64,
    pub centroid: (f64, f64),
    /// Sorted player ids from both teams.
    pub participants: Vec<String>,
}

impl TeamFight {
    pub fn range(&self) -> TimeRange {
        TimeRange(self.t_start, self.t_end)
    }

    pub fn has_participant(&self, id: &str) -> bool {
        self.participants.binary_search_by(|p| p.as_str().cmp(id)).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Early,
    Mid,
    Late,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Early => "early",
            Stage::Mid => "mid",
            Stage::Late => "late",
        }
    }
}

/// Thirds of the match: `[0, D/3)`, `[D/3, 2D/3)`, `[2D/3, D]`.
pub fn stage_of(t: f64, duration_s: f64) -> Result<Stage> {
    if !(t.is_finite() && (0.0..=duration_s).contains(&t)) {
        return Err(Error::BadTime { t, duration_s });
    }
    Ok(if t < duration_s / 3.0 {
        Stage::Early
    } else if t < 2.0 * duration_s / 3.0 {
        Stage::Mid
    } else {
        Stage::Late
    })
}

/// `ceil(duration / window)` windows; the last one may be short.
pub fn window_count(duration_s: f64, window_s: f64) -> usize {
    ((duration_s / window_s) - 1e-9).ceil().max(1.0) as usize
}

/// Bucket for time `t`. Events at exactly `duration_s` land in the last window.
fn window_index(t: f64, window_s: f64, n: usize) -> usize {
    ((t / window_s).floor() as usize).min(n - 1)
}

fn check_window_len(window_s: f64) -> Result<()> {
    if window_s.is_finite() && window_s > 0.0 {
        Ok(())
    } else {
        Err(Error::BadWindow {
            t0: 0.0,
            t1: window_s,
            reason: "window length must be positive".into(),
        })
    }
}

fn raw_contribution(m: &MatchTelemetry, w: &ContributionWeights, window_s: f64) -> Vec<Vec<f64>> {
    let n = window_count(m.duration_s(), window_s);
    let mut raw = vec![vec![0.0; n]; m.players().len()];
    for e in m.events() {
        let Ok(i) = m.player_index(&e.actor) else { continue };
        let k = window_index(e.t, window_s, n);
        raw[i][k] += match &e.payload {
            EventPayload::Damage { target, amount, .. } if m.is_roster_player(target) => {
                w.w_damage * amount
            }
            EventPayload::Damage { amount, .. } => w.w_objective_damage * amount,
            EventPayload::Heal { amount, .. } => w.w_heal * amount,
            EventPayload::Gold { amount, .. } => w.w_gold * amount,
            EventPayload::Cs { gold, .. } => w.w_cs * gold,
            _ => 0.0,
        };
    }
    raw
}

/// Weighted contribution per window, normalized by the best teammate in
/// that window. Low values read as inactivity.
pub fn contribution_series(
    m: &MatchTelemetry,
    player_id: &str,
    weights: &ContributionWeights,
    window_s: f64,
) -> Result<MetricSeries> {
    let idx = m.player_index(player_id)?;
    check_window_len(window_s)?;
    weights.validate()?;
    let raw = raw_contribution(m, weights, window_s);
    let team = m.players()[idx].team;
    let mates: Vec<usize> = (0..m.players().len())
        .filter(|&j| m.players()[j].team == team)
        .collect();
    let values = (0..raw[idx].len())
        .map(|k| {
            let best = mates.iter().map(|&j| raw[j][k]).fold(0.0, f64::max);
            if best > 0.0 {
                raw[idx][k] / best
            } else {
                0.0
            }
        })
        .collect();
    Ok(MetricSeries {
        metric_id: "contribution".into(),
        window_s,
        values,
    })
}

/// Gold plus CS gold per window.
pub fn gold_series(m: &MatchTelemetry, player_id: &str, window_s: f64) -> Result<MetricSeries> {
    m.player_index(player_id)?;
    check_window_len(window_s)?;
    let n = window_count(m.duration_s(), window_s);
    let mut values = vec![0.0; n];
    for e in m.events().iter().filter(|e| e.actor == player_id) {
        let amount = match e.payload {
            EventPayload::Gold { amount, .. } => amount,
            EventPayload::Cs { gold, .. } => gold,
            _ => continue,
        };
        values[window_index(e.t, window_s, n)] += amount;
    }
    Ok(MetricSeries {
        metric_id: "gold".into(),
        window_s,
        values,
    })
}

/// Jungle CS gold per roster player in `[t0, t1)`.
fn jungle_gold(m: &MatchTelemetry, t0: f64, t1: f64) -> Vec<f64> {
    let mut gold = vec![0.0; m.players().len()];
    for e in m.events() {
        if e.t < t0 || e.t >= t1 {
            continue;
        }
        if let EventPayload::Cs { source, gold: g } = e.payload {
            if source.is_jungle() {
                if let Ok(i) = m.player_index(&e.actor) {
                    gold[i] += g;
                }
            }
        }
    }
    gold
}

/// `(player share, player jungle gold)` over `[t0, t1)`.
pub(crate) fn jungle_share_and_gold(
    m: &MatchTelemetry,
    player_id: &str,
    t0: f64,
    t1: f64,
) -> Result<(f64, f64)> {
    let idx = m.player_index(player_id)?;
    m.check_window(t0, t1)?;
    let gold = jungle_gold(m, t0, t1);
    let team = m.players()[idx].team;
    let total: f64 = m
        .players()
        .iter()
        .zip(&gold)
        .filter(|(p, _)| p.team == team)
        .map(|(_, g)| g)
        .sum();
    let share = if total > 0.0 { gold[idx] / total } else { 0.0 };
    Ok((share, gold[idx]))
}

/// Player's fraction of their team's jungle CS gold in `[t0, t1)`.
pub fn jungle_economy_share(m: &MatchTelemetry, player_id: &str, t0: f64, t1: f64) -> Result<f64> {
    jungle_share_and_gold(m, player_id, t0, t1).map(|(s, _)| s)
}

/// Jungle share per metric window, for the timeline.
pub fn jungle_share_series(m: &MatchTelemetry, player_id: &str, window_s: f64) -> Result<MetricSeries> {
    m.player_index(player_id)?;
    check_window_len(window_s)?;
    let n = window_count(m.duration_s(), window_s);
    let d = m.duration_s();
    let values = (0..n)
        .map(|k| {
            let t0 = k as f64 * window_s;
            let t1 = ((k + 1) as f64 * window_s).min(d);
            jungle_share_and_gold(m, player_id, t0.min(t1), t1).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricSeries {
        metric_id: "jungle_share".into(),
        window_s,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneCsRow {
    pub player_id: String,
    pub cs_count: u32,
    pub cs_gold: f64,
}

/// Lane CS per roster player over the half-open window `[t0, t1)`.
pub fn lane_cs_stats(m: &MatchTelemetry, lane: Lane, t0: f64, t1: f64) -> Result<Vec<LaneCsRow>> {
    m.check_window(t0, t1)?;
    let source = lane.cs_source();
    let mut rows: Vec<LaneCsRow> = m
        .players()
        .iter()
        .map(|p| LaneCsRow {
            player_id: p.player_id.clone(),
            cs_count: 0,
            cs_gold: 0.0,
        })
        .collect();
    for e in m.events() {
        if e.t < t0 || e.t >= t1 {
            continue;
        }
        if let EventPayload::Cs { source: s, gold } = e.payload {
            if s == source {
                if let Ok(i) = m.player_index(&e.actor) {
                    rows[i].cs_count += 1;
                    rows[i].cs_gold += gold;
                }
            }
        }
    }
    Ok(rows)
}

/// A champion-vs-champion combat event, as seen by fight clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct CombatEvent {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Actor, victim or damage target, and assists.
    pub involved: Vec<String>,
}

/// Damage between roster players and kills, in match order.
pub fn combat_events(m: &MatchTelemetry) -> Vec<CombatEvent> {
    m.events()
        .iter()
        .filter_map(|e| match &e.payload {
            EventPayload::Damage { target, x, y, .. } if m.is_roster_player(target) => Some(CombatEvent {
                t: e.t,
                x: *x,
                y: *y,
                involved: vec![e.actor.clone(), target.clone()],
            }),
            EventPayload::Kill { victim, assists, x, y } => {
                let mut involved = vec![e.actor.clone(), victim.clone()];
                involved.extend(assists.iter().cloned());
                Some(CombatEvent { t: e.t, x: *x, y: *y, involved })
            }
            _ => None,
        })
        .collect()
}

struct Cluster {
    members: Vec<usize>,
    last_t: f64,
    sum: (f64, f64),
}

impl Cluster {
    fn centroid(&self) -> (f64, f64) {
        let n = self.members.len() as f64;
        (self.sum.0 / n, self.sum.1 / n)
    }
}

/// Greedy single pass over combat events in time order. Each event joins the
/// earliest-opened cluster whose last event is within `time_gap_s` and whose
/// running centroid is within `cluster_radius`; otherwise it opens a new one.
pub fn cluster_team_fights(
    events: &[CombatEvent],
    team_of: impl Fn(&str) -> Option<Team>,
    params: &TeamFightParams,
) -> Vec<TeamFight> {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (i, e) in events.iter().enumerate() {
        open.retain(|&c| e.t - clusters[c].last_t <= params.time_gap_s);
        let joined = open.iter().copied().find(|&c| {
            let (cx, cy) = clusters[c].centroid();
            (e.x - cx).hypot(e.y - cy) <= params.cluster_radius
        });
        match joined {
            Some(c) => {
                let cl = &mut clusters[c];
                cl.members.push(i);
                cl.last_t = e.t;
                cl.sum.0 += e.x;
                cl.sum.1 += e.y;
            }
            None => {
                open.push(clusters.len());
                clusters.push(Cluster {
                    members: vec![i],
                    last_t: e.t,
                    sum: (e.x, e.y),
                });
            }
        }
    }

    let mut fights: Vec<TeamFight> = clusters
        .iter()
        .filter_map(|c| {
            let t_start = events[c.members[0]].t;
            let t_end = c.last_t;
            if t_end - t_start < params.min_duration_s {
                return None;
            }
            let participants: BTreeSet<&str> = c
                .members
                .iter()
                .flat_map(|&i| events[i].involved.iter().map(String::as_str))
                .collect();
            let per_team = |team| participants.iter().filter(|p| team_of(p) == Some(team)).count();
            if per_team(Team::Blue) < params.min_per_team || per_team(Team::Red) < params.min_per_team {
                return None;
            }
            Some(TeamFight {
                t_start,
                t_end,
                centroid: c.centroid(),
                participants: participants.into_iter().map(String::from).collect(),
            })
        })
        .collect();
    fights.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
    fights
}

pub fn detect_team_fights(m: &MatchTelemetry, params: &TeamFightParams) -> Vec<TeamFight> {
    cluster_team_fights(&combat_events(m), |id| m.team_of(id), params)
}
