use crate::config::DetectorConfig;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding};
use crate::error::Result;
use crate::metrics::{jungle_share_and_gold, stage_of};
use crate::telemetry::{merge_ranges, MatchTelemetry, Position, TimeRange};

/// Sliding windows `[s, s + len)` with `s = 0, step, 2 step, ...` that fit in
/// the match, plus one window flush with the end if the last one stops
/// short of it. Matches shorter than `len` get a single whole-match window.
pub(crate) fn sliding_windows(duration_s: f64, len: f64, step: f64) -> Vec<TimeRange> {
    if duration_s <= len {
        return vec![TimeRange(0.0, duration_s)];
    }
    let mut out = Vec::new();
    let mut s = 0.0;
    while s + len <= duration_s + 1e-9 {
        out.push(TimeRange(s, (s + len).min(duration_s)));
        s += step;
    }
    if out.last().is_some_and(|w| w.1 < duration_s) {
        out.push(TimeRange(duration_s - len, duration_s));
    }
    out
}

/// A non-jungler taking a large share of the team's jungle gold while the
/// team's jungler is alive to farm it.
pub fn detect_jungle_stealing(m: &MatchTelemetry, cfg: &DetectorConfig) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.jungle_stealing;
    let windows = sliding_windows(m.duration_s(), c.jungle_window_s, c.jungle_step_s);
    let mut out = Vec::new();
    for p in m.players() {
        if p.assigned_position == Position::Jungle {
            continue;
        }
        let junglers: Vec<&str> = m
            .teammates(p.team)
            .filter(|q| q.assigned_position == Position::Jungle)
            .map(|q| q.player_id.as_str())
            .collect();

        let mut hits: Vec<(TimeRange, f64, f64)> = Vec::new();
        for &w in &windows {
            let (share, gold) = jungle_share_and_gold(m, &p.player_id, w.0, w.1)?;
            if share < c.jungle_share_thresh || gold < c.jungle_min_gold {
                continue;
            }
            let mut jungler_alive = false;
            for j in &junglers {
                if m.alive_seconds_in(j, w.0, w.1)? >= c.jungler_alive_frac * w.len() {
                    jungler_alive = true;
                }
            }
            if jungler_alive {
                hits.push((w, share, gold));
            }
        }
        let Some(&(best_w, share, gold)) = hits.iter().max_by(|a, b| a.1.total_cmp(&b.1)) else {
            continue;
        };
        let ranges = merge_ranges(hits.iter().map(|h| h.0).collect(), 0.0);
        let span = ranges
            .iter()
            .copied()
            .find(|r| r.0 <= best_w.0 && best_w.1 <= r.1)
            .unwrap_or(best_w);
        let stage = stage_of(span.midpoint(), m.duration_s())?;
        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::JungleStealing,
            share / c.severity_full_share,
            ranges,
            vec![
                Evidence::number("share", share),
                Evidence::number("share_pct", share * 100.0),
                Evidence::number("jungle_gold", gold),
                Evidence::text("stage", stage.as_str()),
            ],
        )?);
    }
    Ok(out)
}
