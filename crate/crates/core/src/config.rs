//! Analysis configuration: every threshold the metrics and detectors read,
//! plus the explanation templates. Loaded from a single JSON document where
//! any omitted field keeps its default.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detect::GrieferType;
use crate::error::{Error, Result};
use crate::explain;
use crate::metrics::{ContributionWeights, TeamFightParams, DEFAULT_WINDOW_S};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AfkConfig {
    /// Length of the sliding sub-window used for the idle test.
    pub idle_window_s: f64,
    pub idle_min_s: f64,
    pub idle_eps: f64,
    pub fountain_stay_s: f64,
    pub post_recall_grace_s: f64,
    pub respawn_grace_s: f64,
    pub total_afk_min_s: f64,
    pub single_interval_flag_s: f64,
    pub severity_full_s: f64,
}

impl Default for AfkConfig {
    fn default() -> Self {
        Self {
            idle_window_s: 60.0,
            idle_min_s: 60.0,
            idle_eps: 0.01,
            fountain_stay_s: 20.0,
            post_recall_grace_s: 10.0,
            respawn_grace_s: 10.0,
            total_afk_min_s: 90.0,
            single_interval_flag_s: 60.0,
            severity_full_s: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeedingConfig {
    pub min_deaths: u32,
    pub kda_ratio: f64,
    pub passive_frac: f64,
    pub pre_death_window_s: f64,
    pub severity_full_ratio: f64,
}

impl Default for FeedingConfig {
    fn default() -> Self {
        Self {
            min_deaths: 8,
            kda_ratio: 3.0,
            passive_frac: 0.10,
            pre_death_window_s: 15.0,
            severity_full_ratio: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaningPhase {
    pub laning_start_s: f64,
    pub laning_end_s: f64,
}

impl Default for LaningPhase {
    fn default() -> Self {
        Self {
            laning_start_s: 90.0,
            laning_end_s: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaneStealingConfig {
    pub steal_min_cs: u32,
    pub steal_share: f64,
    pub owner_alive_frac: f64,
    pub range_window_s: f64,
    pub severity_full_share: f64,
}

impl Default for LaneStealingConfig {
    fn default() -> Self {
        Self {
            steal_min_cs: 25,
            steal_share: 0.30,
            owner_alive_frac: 0.5,
            range_window_s: 20.0,
            severity_full_share: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JungleStealingConfig {
    pub jungle_window_s: f64,
    pub jungle_step_s: f64,
    pub jungle_share_thresh: f64,
    pub jungle_min_gold: f64,
    pub jungler_alive_frac: f64,
    pub severity_full_share: f64,
}

impl Default for JungleStealingConfig {
    fn default() -> Self {
        Self {
            jungle_window_s: 300.0,
            jungle_step_s: 60.0,
            jungle_share_thresh: 0.40,
            jungle_min_gold: 150.0,
            jungler_alive_frac: 0.5,
            severity_full_share: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NonParticipationConfig {
    pub participate_radius: f64,
    pub min_team_participants: usize,
    pub min_missed: u32,
    pub missed_frac: f64,
}

impl Default for NonParticipationConfig {
    fn default() -> Self {
        Self {
            participate_radius: 0.15,
            min_team_participants: 3,
            min_missed: 2,
            missed_frac: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PositionStealingConfig {
    pub squat_frac: f64,
    pub own_frac: f64,
    pub range_gap_s: f64,
}

impl Default for PositionStealingConfig {
    fn default() -> Self {
        Self {
            squat_frac: 0.6,
            own_frac: 0.2,
            range_gap_s: 30.0,
        }
    }
}

/// One explanation template per griefer type. `{player}` and `{hero_type}`
/// are always available; every other placeholder names an evidence key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Templates {
    pub afk: String,
    pub feeding: String,
    pub lane_stealing: String,
    pub jungle_stealing: String,
    pub non_participation: String,
    pub position_stealing: String,
}

impl Default for Templates {
    fn default() -> Self {
        Self {
            afk: "{player} ({hero_type}) was away from keyboard for {afk_total_s} s in total, \
                  longest stretch {afk_longest_s} s during the {stage} stage."
                .into(),
            feeding: "{player} ({hero_type}) died {deaths} times with {kills} kills and {assists} assists, \
                      dealing {pre_death_damage} damage before each death against a team average of \
                      {team_pre_death_damage}."
                .into(),
            lane_stealing: "{player} ({hero_type}) took {lane_cs} CS in the {lane} lane ({share_pct}% of team) \
                            during the laning phase."
                .into(),
            jungle_stealing: "{player} ({hero_type}) had a high jungle economy value ({share_pct}% of team) \
                              during the {stage} stage."
                .into(),
            non_participation: "{player} ({hero_type}) stayed away from {missed} of {eligible} team fights \
                                their team joined."
                .into(),
            position_stealing: "{player} ({hero_type}) spent {squat_pct}% of the laning phase in {squatted_zone}, \
                                the home zone of {victim}, and {own_pct}% in their own."
                .into(),
        }
    }
}

impl Templates {
    pub fn get(&self, t: GrieferType) -> &str {
        match t {
            GrieferType::Afk => &self.afk,
            GrieferType::Feeding => &self.feeding,
            GrieferType::LaneStealing => &self.lane_stealing,
            GrieferType::JungleStealing => &self.jungle_stealing,
            GrieferType::NonParticipation => &self.non_participation,
            GrieferType::PositionStealing => &self.position_stealing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub metric_window_s: f64,
    pub weights: ContributionWeights,
    pub team_fight: TeamFightParams,
    pub laning: LaningPhase,
    pub afk: AfkConfig,
    pub feeding: FeedingConfig,
    pub lane_stealing: LaneStealingConfig,
    pub jungle_stealing: JungleStealingConfig,
    pub non_participation: NonParticipationConfig,
    pub position_stealing: PositionStealingConfig,
    pub templates: Templates,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            metric_window_s: DEFAULT_WINDOW_S,
            weights: ContributionWeights::default(),
            team_fight: TeamFightParams::default(),
            laning: LaningPhase::default(),
            afk: AfkConfig::default(),
            feeding: FeedingConfig::default(),
            lane_stealing: LaneStealingConfig::default(),
            jungle_stealing: JungleStealingConfig::default(),
            non_participation: NonParticipationConfig::default(),
            position_stealing: PositionStealingConfig::default(),
            templates: Templates::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
    }
}

fn fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1], got {v}")))
    }
}

impl DetectorConfig {
    pub fn from_json(raw: &str) -> Result<Self> {
        let cfg: DetectorConfig =
            serde_json::from_str(raw).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        positive("metric_window_s", self.metric_window_s)?;
        self.weights.validate()?;

        let tf = &self.team_fight;
        positive("team_fight.cluster_radius", tf.cluster_radius)?;
        positive("team_fight.time_gap_s", tf.time_gap_s)?;
        positive("team_fight.min_duration_s", tf.min_duration_s)?;
        positive("team_fight.min_per_team", tf.min_per_team as f64)?;

        positive("laning.laning_start_s", self.laning.laning_start_s)?;
        positive("laning.laning_end_s", self.laning.laning_end_s)?;
        if self.laning.laning_end_s <= self.laning.laning_start_s {
            return Err(Error::InvalidConfig("laning phase must end after it starts".into()));
        }

        let a = &self.afk;
        positive("afk.idle_window_s", a.idle_window_s)?;
        positive("afk.idle_min_s", a.idle_min_s)?;
        positive("afk.idle_eps", a.idle_eps)?;
        positive("afk.fountain_stay_s", a.fountain_stay_s)?;
        positive("afk.post_recall_grace_s", a.post_recall_grace_s)?;
        positive("afk.respawn_grace_s", a.respawn_grace_s)?;
        positive("afk.total_afk_min_s", a.total_afk_min_s)?;
        positive("afk.single_interval_flag_s", a.single_interval_flag_s)?;
        positive("afk.severity_full_s", a.severity_full_s)?;

        let f = &self.feeding;
        positive("feeding.min_deaths", f.min_deaths as f64)?;
        positive("feeding.kda_ratio", f.kda_ratio)?;
        fraction("feeding.passive_frac", f.passive_frac)?;
        positive("feeding.pre_death_window_s", f.pre_death_window_s)?;
        positive("feeding.severity_full_ratio", f.severity_full_ratio)?;

        let l = &self.lane_stealing;
        positive("lane_stealing.steal_min_cs", l.steal_min_cs as f64)?;
        fraction("lane_stealing.steal_share", l.steal_share)?;
        fraction("lane_stealing.owner_alive_frac", l.owner_alive_frac)?;
        positive("lane_stealing.range_window_s", l.range_window_s)?;
        fraction("lane_stealing.severity_full_share", l.severity_full_share)?;

        let j = &self.jungle_stealing;
        positive("jungle_stealing.jungle_window_s", j.jungle_window_s)?;
        positive("jungle_stealing.jungle_step_s", j.jungle_step_s)?;
        fraction("jungle_stealing.jungle_share_thresh", j.jungle_share_thresh)?;
        positive("jungle_stealing.jungle_min_gold", j.jungle_min_gold)?;
        fraction("jungle_stealing.jungler_alive_frac", j.jungler_alive_frac)?;
        fraction("jungle_stealing.severity_full_share", j.severity_full_share)?;

        let n = &self.non_participation;
        positive("non_participation.participate_radius", n.participate_radius)?;
        positive("non_participation.min_team_participants", n.min_team_participants as f64)?;
        positive("non_participation.min_missed", n.min_missed as f64)?;
        fraction("non_participation.missed_frac", n.missed_frac)?;

        let p = &self.position_stealing;
        fraction("position_stealing.squat_frac", p.squat_frac)?;
        fraction("position_stealing.own_frac", p.own_frac)?;
        positive("position_stealing.range_gap_s", p.range_gap_s)?;

        for t in GrieferType::ALL {
            explain::check_template(t, self.templates.get(t))?;
        }
        Ok(())
    }

    /// Short stable digest of the full configuration, reported alongside
    /// every computed output.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config always serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
