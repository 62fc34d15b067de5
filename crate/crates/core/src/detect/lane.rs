use crate::config::DetectorConfig;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding};
use crate::error::Result;
use crate::metrics::lane_cs_stats;
use crate::telemetry::{merge_ranges, EventPayload, Lane, MatchTelemetry, TimeRange};

/// Laning phase clipped to the match, or `None` when it is empty.
pub(crate) fn laning_phase(m: &MatchTelemetry, cfg: &DetectorConfig) -> Option<(f64, f64)> {
    let start = cfg.laning.laning_start_s;
    let end = cfg.laning.laning_end_s.min(m.duration_s());
    (end > start).then_some((start, end))
}

struct Candidate {
    lane: Lane,
    count: u32,
    team_total: u32,
    share: f64,
}

/// A player farming a lane assigned to a living teammate.
pub fn detect_lane_stealing(m: &MatchTelemetry, cfg: &DetectorConfig) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.lane_stealing;
    let Some((start, end)) = laning_phase(m, cfg) else {
        return Ok(Vec::new());
    };
    let phase_len = end - start;
    let mut per_lane = Vec::new();
    for lane in Lane::ALL {
        per_lane.push((lane, lane_cs_stats(m, lane, start, end)?));
    }

    let mut out = Vec::new();
    for (i, p) in m.players().iter().enumerate() {
        let mut hits: Vec<Candidate> = Vec::new();
        for (lane, rows) in &per_lane {
            if p.assigned_position.lane() == Some(*lane) {
                continue;
            }
            let count = rows[i].cs_count;
            if count < c.steal_min_cs {
                continue;
            }
            let team_total: u32 = m
                .players()
                .iter()
                .zip(rows)
                .filter(|(q, _)| q.team == p.team)
                .map(|(_, r)| r.cs_count)
                .sum();
            let share = count as f64 / team_total as f64;
            if share < c.steal_share {
                continue;
            }
            let mut owner_alive = false;
            for q in m.teammates(p.team).filter(|q| q.assigned_position.lane() == Some(*lane)) {
                if m.alive_seconds_in(&q.player_id, start, end)? >= c.owner_alive_frac * phase_len {
                    owner_alive = true;
                }
            }
            if owner_alive {
                hits.push(Candidate { lane: *lane, count, team_total, share });
            }
        }
        let Some(best) = hits.iter().max_by(|a, b| a.share.total_cmp(&b.share)) else {
            continue;
        };

        let w = c.range_window_s;
        let windows: Vec<TimeRange> = m
            .events()
            .iter()
            .filter(|e| e.actor == p.player_id && e.t >= start && e.t < end)
            .filter(|e| matches!(e.payload, EventPayload::Cs { source, .. } if hits.iter().any(|h| h.lane.cs_source() == source)))
            .map(|e| {
                let k = (e.t / w).floor();
                TimeRange(k * w, ((k + 1.0) * w).min(m.duration_s()))
            })
            .collect();

        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::LaneStealing,
            best.share / c.severity_full_share,
            merge_ranges(windows, 0.0),
            vec![
                Evidence::text("lane", best.lane.as_str()),
                Evidence::count("lane_cs", best.count as u64),
                Evidence::count("team_lane_cs", best.team_total as u64),
                Evidence::number("share", best.share),
                Evidence::number("share_pct", best.share * 100.0),
            ],
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::MatchBuilder;
    use crate::telemetry::CsSource;

    /// Adds `n` cs events for `player` from `source`, spread over [100, 590).
    fn farm(mut b: MatchBuilder, player: &str, source: CsSource, n: usize) -> MatchBuilder {
        for k in 0..n {
            b = b.cs(100.0 + 490.0 * k as f64 / n as f64, player, source, 20.0);
        }
        b
    }

    fn run(m: &MatchTelemetry) -> Vec<SuspicionFinding> {
        detect_lane_stealing(m, &DetectorConfig::default()).unwrap()
    }

    #[test]
    fn mid_laner_farming_bot_is_flagged() {
        // 40 of the blue team's 100 bot cs.
        let b = farm(MatchBuilder::new(1200.0), "P02", CsSource::Bot, 40);
        let b = farm(b, "P05", CsSource::Bot, 55);
        let b = farm(b, "P03", CsSource::Bot, 5);
        let f = run(&b.build());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].player_id, "P02");
        assert!((f[0].severity - 0.4 / 0.6).abs() < 1e-12);
        assert_eq!(f[0].evidence_text("lane"), Some("bot"));
        assert_eq!(f[0].evidence_number("lane_cs"), Some(40.0));
        assert_eq!(f[0].evidence_number("team_lane_cs"), Some(100.0));
        assert!(!f[0].time_ranges.is_empty());
        assert!(f[0].time_ranges.iter().all(|r| r.0 >= 100.0 && r.1 <= 600.0));
    }

    #[test]
    fn few_incidental_cs_ignored() {
        let b = farm(MatchBuilder::new(1200.0), "P04", CsSource::Mid, 5);
        assert!(run(&b.build()).is_empty());
    }

    #[test]
    fn assigned_laners_are_exempt() {
        let b = farm(MatchBuilder::new(1200.0), "P03", CsSource::Bot, 80);
        let b = farm(b, "P05", CsSource::Bot, 10);
        assert!(run(&b.build()).is_empty());
    }

    #[test]
    fn dead_owner_means_no_theft() {
        // P01 (top) dies at 95 and never returns; P04 farms top freely.
        let b = farm(MatchBuilder::new(1200.0), "P04", CsSource::Top, 40)
            .kill(95.0, "P06", "P01", &[], (0.05, 0.5));
        assert!(run(&b.build()).is_empty());
    }

    #[test]
    fn cs_outside_laning_phase_ignored() {
        let mut b = MatchBuilder::new(1200.0);
        for k in 0..40 {
            b = b.cs(700.0 + k as f64, "P02", CsSource::Bot, 20.0);
        }
        assert!(run(&b.build()).is_empty());
    }
}
