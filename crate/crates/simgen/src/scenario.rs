use std::fmt;
use std::str::FromStr;

use grieferlens_core::config::DetectorConfig;
use grieferlens_core::detect::GrieferType;
use grieferlens_core::metrics::Stage;
use grieferlens_core::spatial::home_zone;
use grieferlens_core::telemetry::{standard_roster, Lane, PlayerInfo, Position};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const DEFAULT_DURATION_S: f64 = 1200.0;
pub const DEFAULT_AFK_LEN_S: f64 = 200.0;
pub const FEEDING_START_S: f64 = 60.0;

/// Fractions of the match at which the scheduled team fights start.
pub const FIGHT_FRACTIONS: [f64; 4] = [0.3, 0.5, 0.7, 0.95];
pub const FIGHT_LEN_S: f64 = 16.0;
/// How early players start walking to a scheduled fight.
pub const GATHER_LEAD_S: f64 = 60.0;
/// How early a non-participant starts walking away from one.
pub const AVOID_LEAD_S: f64 = 70.0;

/// Scripted griefing behavior for one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "behavior", rename_all = "snake_case")]
pub enum Behavior {
    /// Freeze in place over `[t0, t1]`.
    Afk { t0: f64, t1: f64 },
    /// From `t0` on, walk into enemy territory and die, over and over.
    Feeding { t0: f64 },
    /// Farm `lane` instead of the own assignment through the laning phase.
    LaneSteal { lane: Lane },
    /// Farm own-team jungle camps during `stage`.
    JungleSteal { stage: Stage },
    /// Stay away from every scheduled fight.
    NonParticipation,
    /// Occupy `victim`'s home zone through the laning phase.
    PositionSteal { victim: String },
}

impl Behavior {
    pub fn griefer_type(&self) -> GrieferType {
        match self {
            Behavior::Afk { .. } => GrieferType::Afk,
            Behavior::Feeding { .. } => GrieferType::Feeding,
            Behavior::LaneSteal { .. } => GrieferType::LaneStealing,
            Behavior::JungleSteal { .. } => GrieferType::JungleStealing,
            Behavior::NonParticipation => GrieferType::NonParticipation,
            Behavior::PositionSteal { .. } => GrieferType::PositionStealing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub player_id: String,
    #[serde(flatten)]
    pub behavior: Behavior,
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.player_id, self.behavior.griefer_type())?;
        match &self.behavior {
            Behavior::Afk { t0, t1 } => write!(f, ":{t0}-{t1}"),
            Behavior::Feeding { t0 } => write!(f, ":{t0}"),
            Behavior::LaneSteal { lane } => write!(f, ":{}", lane.as_str()),
            Behavior::JungleSteal { stage } => write!(f, ":{}", stage.as_str()),
            Behavior::NonParticipation => Ok(()),
            Behavior::PositionSteal { victim } => write!(f, ":{victim}"),
        }
    }
}

fn parse_type(s: &str) -> Result<GrieferType> {
    let canonical = match s {
        "lane_steal" => "lane_stealing",
        "jungle_steal" => "jungle_stealing",
        "position_steal" => "position_stealing",
        other => other,
    };
    GrieferType::from_str(canonical).map_err(|_| SimError::InvalidScenario(format!("unknown griefer type `{s}`")))
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| SimError::InvalidScenario(format!("{what}: expected a number, got `{s}`")))
}

impl FromStr for Injection {
    type Err = SimError;

    /// `PLAYER:TYPE[:PARAMS]`, e.g. `P03:afk:200-400`, `P02:lane_steal:bot`,
    /// `P03:jungle_steal:late`, `P01:position_steal:P02`, `P07:feeding`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let player_id = parts.next().unwrap_or_default().to_string();
        let kind = parse_type(parts.next().ok_or_else(|| {
            SimError::InvalidScenario(format!("injection `{s}`: expected PLAYER:TYPE[:PARAMS]"))
        })?)?;
        let params = parts.next();
        let missing = || SimError::InvalidScenario(format!("injection `{s}`: missing parameters"));
        let behavior = match kind {
            GrieferType::Afk => match params {
                Some(p) => {
                    let (a, b) = p
                        .split_once('-')
                        .ok_or_else(|| SimError::InvalidScenario(format!("afk span `{p}`: expected T0-T1")))?;
                    Behavior::Afk { t0: parse_num(a, "afk t0")?, t1: parse_num(b, "afk t1")? }
                }
                None => return Err(missing()),
            },
            GrieferType::Feeding => Behavior::Feeding {
                t0: params.map(|p| parse_num(p, "feeding t0")).transpose()?.unwrap_or(FEEDING_START_S),
            },
            GrieferType::LaneStealing => {
                let p = params.ok_or_else(missing)?;
                let lane = Lane::ALL
                    .into_iter()
                    .find(|l| l.as_str() == p)
                    .ok_or_else(|| SimError::InvalidScenario(format!("unknown lane `{p}`")))?;
                Behavior::LaneSteal { lane }
            }
            GrieferType::JungleStealing => {
                let stage = match params.unwrap_or("late") {
                    "early" => Stage::Early,
                    "mid" => Stage::Mid,
                    "late" => Stage::Late,
                    other => return Err(SimError::InvalidScenario(format!("unknown stage `{other}`"))),
                };
                Behavior::JungleSteal { stage }
            }
            GrieferType::NonParticipation => Behavior::NonParticipation,
            GrieferType::PositionStealing => Behavior::PositionSteal { victim: params.ok_or_else(missing)?.to_string() },
        };
        Ok(Injection { player_id, behavior })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub duration_s: f64,
    pub injections: Vec<Injection>,
}

impl Scenario {
    pub fn baseline(seed: u64) -> Self {
        Scenario { seed, duration_s: DEFAULT_DURATION_S, injections: Vec::new() }
    }

    pub fn with(mut self, injection: Injection) -> Self {
        self.injections.push(injection);
        self
    }

    pub fn match_id(&self) -> String {
        format!("sim-{}", self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if !(self.duration_s.is_finite() && self.duration_s >= 120.0) {
            return bad(format!("duration must be at least 120 s, got {}", self.duration_s));
        }
        let roster = standard_roster();
        let find = |id: &str| roster.iter().find(|p| p.player_id == id);
        let mut seen: Vec<&str> = Vec::new();
        for inj in &self.injections {
            let Some(p) = find(&inj.player_id) else {
                return bad(format!("unknown player `{}`", inj.player_id));
            };
            if seen.contains(&inj.player_id.as_str()) {
                return bad(format!("player `{}` has more than one injection", inj.player_id));
            }
            seen.push(&inj.player_id);
            match &inj.behavior {
                Behavior::Afk { t0, t1 } => {
                    if !(0.0 <= *t0 && t0 < t1 && *t1 <= self.duration_s) {
                        return bad(format!("afk span [{t0}, {t1}] must lie inside [0, {}]", self.duration_s));
                    }
                }
                Behavior::Feeding { t0 } => {
                    if !(0.0..self.duration_s).contains(t0) {
                        return bad(format!("feeding start {t0} outside the match"));
                    }
                }
                Behavior::LaneSteal { lane } => {
                    if p.assigned_position.lane() == Some(*lane) {
                        return bad(format!("`{}` is assigned to the {} lane already", p.player_id, lane.as_str()));
                    }
                }
                Behavior::JungleSteal { .. } => {
                    if p.assigned_position == Position::Jungle {
                        return bad(format!("`{}` is the jungler", p.player_id));
                    }
                }
                Behavior::NonParticipation => {}
                Behavior::PositionSteal { victim } => {
                    let Some(v) = find(victim) else {
                        return bad(format!("unknown victim `{victim}`"));
                    };
                    if v.team != p.team || home(v) == home(p) {
                        return bad(format!(
                            "`{victim}` must be a teammate of `{}` with a different home zone",
                            p.player_id
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Laning phase used by the detectors' default configuration.
    pub fn laning_phase(&self) -> (f64, f64) {
        let l = DetectorConfig::default().laning;
        (l.laning_start_s, l.laning_end_s.min(self.duration_s))
    }

    pub fn fight_starts(&self) -> Vec<f64> {
        FIGHT_FRACTIONS.iter().map(|f| (f * self.duration_s).round()).collect()
    }

    /// Span over which an injection's behavior is active.
    pub fn label_span(&self, behavior: &Behavior) -> (f64, f64) {
        let d = self.duration_s;
        match behavior {
            Behavior::Afk { t0, t1 } => (*t0, *t1),
            Behavior::Feeding { t0 } => (*t0, d),
            Behavior::LaneSteal { .. } | Behavior::PositionSteal { .. } => self.laning_phase(),
            Behavior::JungleSteal { stage } => stage_span(*stage, d),
            Behavior::NonParticipation => {
                let starts = self.fight_starts();
                let first = starts.first().copied().unwrap_or(0.0);
                let last = starts.last().copied().unwrap_or(0.0);
                ((first - AVOID_LEAD_S).max(0.0), (last + FIGHT_LEN_S).min(d))
            }
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth {
            match_id: self.match_id(),
            labels: self
                .injections
                .iter()
                .map(|inj| {
                    let (t0, t1) = self.label_span(&inj.behavior);
                    Label { player_id: inj.player_id.clone(), griefer_type: inj.behavior.griefer_type(), t0, t1 }
                })
                .collect(),
        }
    }
}

pub(crate) fn home(p: &PlayerInfo) -> grieferlens_core::spatial::ZoneId {
    home_zone(p.assigned_position, p.team)
}

pub fn stage_span(stage: Stage, duration_s: f64) -> (f64, f64) {
    let third = duration_s / 3.0;
    match stage {
        Stage::Early => (0.0, third),
        Stage::Mid => (third, 2.0 * third),
        Stage::Late => (2.0 * third, duration_s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub player_id: String,
    #[serde(rename = "type")]
    pub griefer_type: GrieferType,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub match_id: String,
    pub labels: Vec<Label>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth always serializes")
    }
}
