use crate::config::DetectorConfig;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding};
use crate::error::{Error, Result};
use crate::metrics::{detect_team_fights, TeamFight};
use crate::telemetry::{tick_count, MatchTelemetry, PlayerInfo, TimeRange};

enum Outcome {
    Ineligible,
    Joined,
    Missed,
}

fn outcome(m: &MatchTelemetry, cfg: &DetectorConfig, p: &PlayerInfo, fight: &TeamFight) -> Result<Outcome> {
    let c = &cfg.non_participation;
    let team_present = fight
        .participants
        .iter()
        .filter(|id| **id != p.player_id && m.team_of(id) == Some(p.team))
        .count();
    if team_present < c.min_team_participants {
        return Ok(Outcome::Ineligible);
    }
    let span = fight.t_end - fight.t_start;
    if m.alive_seconds_in(&p.player_id, fight.t_start, fight.t_end)? < span - 1e-9 {
        return Ok(Outcome::Ineligible);
    }
    if fight.has_participant(&p.player_id) {
        return Ok(Outcome::Joined);
    }
    for k in 0..tick_count(span, 1.0) {
        let t = (fight.t_start + k as f64).min(fight.t_end);
        let (x, y) = match m.position_at(&p.player_id, t) {
            Ok(pos) => pos,
            Err(Error::NoSamples(_)) => return Ok(Outcome::Ineligible),
            Err(e) => return Err(e),
        };
        if (x - fight.centroid.0).hypot(y - fight.centroid.1) <= c.participate_radius {
            return Ok(Outcome::Joined);
        }
    }
    Ok(Outcome::Missed)
}

/// A player who stays away from most team fights their team commits to.
pub fn detect_non_participation(m: &MatchTelemetry, cfg: &DetectorConfig) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.non_participation;
    let fights = detect_team_fights(m, &cfg.team_fight);
    let mut out = Vec::new();
    for p in m.players() {
        let mut eligible = 0u32;
        let mut missed: Vec<TimeRange> = Vec::new();
        for fight in &fights {
            match outcome(m, cfg, p, fight)? {
                Outcome::Ineligible => {}
                Outcome::Joined => eligible += 1,
                Outcome::Missed => {
                    eligible += 1;
                    missed.push(fight.range());
                }
            }
        }
        let n_missed = missed.len() as u32;
        if n_missed < c.min_missed {
            continue;
        }
        let frac = n_missed as f64 / eligible as f64;
        if frac < c.missed_frac {
            continue;
        }
        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::NonParticipation,
            frac,
            missed,
            vec![
                Evidence::count("missed", n_missed as u64),
                Evidence::count("eligible", eligible as u64),
                Evidence::number("missed_frac", frac),
            ],
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::MatchBuilder;

    const FIGHTERS: [(&str, &str); 3] = [("P01", "P06"), ("P02", "P07"), ("P04", "P08")];

    /// Six players trade damage around `at` for eight seconds from `t`.
    fn fight(mut b: MatchBuilder, t: f64, at: (f64, f64)) -> MatchBuilder {
        for k in 0..8 {
            for (i, (blue, red)) in FIGHTERS.iter().enumerate() {
                let tt = t + k as f64 + 0.1 * i as f64;
                b = b.damage(tt, blue, red, 50.0, at).damage(tt + 0.05, red, blue, 50.0, at);
            }
        }
        b
    }

    /// Everyone except `away` stands at the fight spot; `away` stands at
    /// the blue top corner.
    fn setup(away: &str, fights: &[f64]) -> MatchTelemetry {
        let mut b = MatchBuilder::new(1200.0);
        for i in 1..=10 {
            let id = format!("P{i:02}");
            b = if id == away { b.stationary(&id, 0.05, 0.95) } else { b.stationary(&id, 0.5, 0.5) };
        }
        for &t in fights {
            b = fight(b, t, (0.5, 0.5));
        }
        b.build()
    }

    fn run(m: &MatchTelemetry) -> Vec<SuspicionFinding> {
        detect_non_participation(m, &DetectorConfig::default()).unwrap()
    }

    #[test]
    fn absentee_is_flagged() {
        let f = run(&setup("P03", &[200.0, 500.0, 800.0]));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].player_id, "P03");
        assert_eq!(f[0].severity, 1.0);
        assert_eq!(f[0].evidence_number("missed"), Some(3.0));
        assert_eq!(f[0].time_ranges.len(), 3);
    }

    #[test]
    fn one_missed_fight_is_not_enough() {
        assert!(run(&setup("P03", &[200.0])).is_empty());
    }

    #[test]
    fn standing_near_the_fight_counts_as_joining() {
        assert!(run(&setup("", &[200.0, 500.0, 800.0])).is_empty());
    }

    #[test]
    fn dead_player_is_not_eligible() {
        let m = MatchBuilder::new(1200.0);
        let mut b = m;
        for i in 1..=10 {
            let id = format!("P{i:02}");
            b = if id == "P03" { b.stationary(&id, 0.05, 0.95) } else { b.stationary(&id, 0.5, 0.5) };
        }
        b = fight(b, 200.0, (0.5, 0.5));
        b = fight(b, 500.0, (0.5, 0.5));
        // Dead across the second fight.
        b = b.kill(450.0, "P06", "P03", &[], (0.05, 0.95)).respawn(600.0, "P03");
        let f = detect_non_participation(&b.build(), &DetectorConfig::default()).unwrap();
        assert!(f.is_empty());
    }
}
