use std::collections::BTreeMap;

use crate::config::DetectorConfig;
use crate::detect::lane::laning_phase;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding};
use crate::error::{Error, Result};
use crate::spatial::{alive_ticks, home_zone, Tick, ZoneId, ZoneLayout};
use crate::telemetry::{merge_ranges, MatchTelemetry, TimeRange};

/// A player spending the laning phase in a teammate's home zone rather than
/// their own.
pub fn detect_position_stealing(
    m: &MatchTelemetry,
    layout: &ZoneLayout,
    cfg: &DetectorConfig,
) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.position_stealing;
    let Some((start, end)) = laning_phase(m, cfg) else {
        return Ok(Vec::new());
    };
    let (start, end) = (start.ceil(), end.floor());
    if end < start {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for p in m.players() {
        let ticks: Vec<Tick> = match alive_ticks(m, &p.player_id, start, end, 1.0) {
            Ok(t) => t,
            Err(Error::NoSamples(_)) => continue,
            Err(e) => return Err(e),
        };
        if ticks.is_empty() {
            continue;
        }
        let zones: Vec<ZoneId> = ticks.iter().map(|t| layout.classify(t.x, t.y)).collect();
        let mut counts: BTreeMap<ZoneId, usize> = BTreeMap::new();
        for z in &zones {
            *counts.entry(*z).or_default() += 1;
        }
        let frac = |z: ZoneId| counts.get(&z).copied().unwrap_or(0) as f64 / ticks.len() as f64;

        let own = home_zone(p.assigned_position, p.team);
        let own_frac = frac(own);
        if own_frac >= c.own_frac {
            continue;
        }
        // (zone, fraction, victim) for each teammate home zone over the bar.
        let mut best: Option<(ZoneId, f64, &str)> = None;
        for q in m.teammates(p.team) {
            let zone = home_zone(q.assigned_position, q.team);
            if zone == own {
                continue;
            }
            let f = frac(zone);
            if f >= c.squat_frac && best.is_none_or(|(_, bf, _)| f > bf) {
                best = Some((zone, f, &q.player_id));
            }
        }
        let Some((zone, squat, victim)) = best else {
            continue;
        };

        let mut runs: Vec<TimeRange> = Vec::new();
        for (tick, z) in ticks.iter().zip(&zones) {
            if *z != zone {
                continue;
            }
            match runs.last_mut() {
                Some(r) if tick.t - r.1 <= 1.0 + 1e-9 => r.1 = tick.t,
                _ => runs.push(TimeRange(tick.t, tick.t)),
            }
        }
        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::PositionStealing,
            squat,
            merge_ranges(runs, c.range_gap_s),
            vec![
                Evidence::text("squatted_zone", zone.as_str()),
                Evidence::text("victim", victim),
                Evidence::number("squat_frac", squat),
                Evidence::number("squat_pct", squat * 100.0),
                Evidence::number("own_pct", own_frac * 100.0),
            ],
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::MatchBuilder;
    use crate::spatial::default_layout;

    /// All players at home during laning; P01 (top) instead sits in mid for
    /// `squat_s` seconds from t = 90, then returns to top.
    fn squatter(squat_s: f64) -> MatchTelemetry {
        let homes = [
            (0.05, 0.6),
            (0.4, 0.4),
            (0.7, 0.05),
            (0.25, 0.45),
            (0.75, 0.05),
            (0.4, 0.95),
            (0.6, 0.6),
            (0.95, 0.3),
            (0.75, 0.55),
            (0.95, 0.25),
        ];
        let mut b = MatchBuilder::new(1200.0);
        for (i, (x, y)) in homes.iter().enumerate() {
            let id = format!("P{:02}", i + 1);
            if id != "P01" {
                b = b.stationary(&id, *x, *y);
            }
        }
        let back = 90.0 + squat_s;
        b.path("P01", &[(0.0, 0.4, 0.4), (back, 0.4, 0.4), (back + 1.0, 0.05, 0.6)]).build()
    }

    fn run(m: &MatchTelemetry) -> Vec<SuspicionFinding> {
        detect_position_stealing(m, &default_layout(), &DetectorConfig::default()).unwrap()
    }

    #[test]
    fn sitting_in_mid_is_flagged() {
        // 80% of the 511 phase ticks in mid.
        let m = squatter(408.0);
        let f = run(&m);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].player_id, "P01");
        assert_eq!(f[0].evidence_text("squatted_zone"), Some("mid_lane"));
        assert_eq!(f[0].evidence_text("victim"), Some("P02"));
        assert!((f[0].severity - 409.0 / 511.0).abs() < 1e-12);
        assert_eq!(f[0].time_ranges, vec![TimeRange(90.0, 498.0)]);
    }

    #[test]
    fn mostly_home_is_clean() {
        assert!(run(&squatter(200.0)).is_empty());
    }

    #[test]
    fn everyone_home_is_clean() {
        assert!(run(&squatter(0.0)).is_empty());
    }
}
