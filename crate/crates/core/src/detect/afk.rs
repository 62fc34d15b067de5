use crate::config::DetectorConfig;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding, Track};
use crate::error::Result;
use crate::metrics::stage_of;
use crate::spatial::{ZoneId, ZoneLayout};
use crate::telemetry::{merge_ranges, EventPayload, MatchTelemetry, TimeRange};

/// Idle stretches outside the own fountain, plus unexplained stays inside it.
///
/// A sub-window `[s, s + w]` is idle when the player is alive throughout it,
/// never in their own fountain, and travels less than `idle_eps` in total.
/// Runs of consecutive idle sub-windows form one interval. Fountain stays
/// that begin right after a recall or a (re)spawn are exempt.
pub fn detect_afk(m: &MatchTelemetry, layout: &ZoneLayout, cfg: &DetectorConfig) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.afk;
    let mut out = Vec::new();
    for p in m.players() {
        let track = Track::build(m, &p.player_id)?;
        let fountain = ZoneId::fountain_of(p.team);
        let in_fountain: Vec<bool> = track
            .pos
            .iter()
            .map(|pos| pos.is_some_and(|(x, y)| layout.classify(x, y) == fountain))
            .collect();

        let mut idle = idle_intervals(&track, &in_fountain, c.idle_window_s, c.idle_eps);
        idle.retain(|r| r.len() >= c.idle_min_s);
        let n_idle = idle.len();

        let recalls: Vec<f64> = player_events(m, &p.player_id, |e| matches!(e, EventPayload::Recall));
        let mut spawns = vec![0.0];
        spawns.extend(player_events(m, &p.player_id, |e| matches!(e, EventPayload::Respawn)));
        let exempt = |start: f64, times: &[f64], grace: f64| times.iter().any(|&t| start >= t && start - t <= grace);
        let stays: Vec<TimeRange> = fountain_stays(&track, &in_fountain)
            .into_iter()
            .filter(|r| r.len() >= c.fountain_stay_s)
            .filter(|r| !exempt(r.0, &recalls, c.post_recall_grace_s) && !exempt(r.0, &spawns, c.respawn_grace_s))
            .collect();
        let n_stays = stays.len();

        let ranges = merge_ranges(idle.into_iter().chain(stays).collect(), 0.0);
        let total: f64 = ranges.iter().map(TimeRange::len).sum();
        let Some(longest) = ranges.iter().copied().max_by(|a, b| a.len().total_cmp(&b.len())) else {
            continue;
        };
        if total < c.total_afk_min_s && longest.len() < c.single_interval_flag_s {
            continue;
        }
        let stage = stage_of(longest.midpoint(), m.duration_s())?;
        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::Afk,
            total / c.severity_full_s,
            ranges,
            vec![
                Evidence::number("afk_total_s", total),
                Evidence::number("afk_longest_s", longest.len()),
                Evidence::count("idle_intervals", n_idle as u64),
                Evidence::count("fountain_intervals", n_stays as u64),
                Evidence::text("stage", stage.as_str()),
            ],
        )?);
    }
    Ok(out)
}

fn player_events(m: &MatchTelemetry, player: &str, pred: impl Fn(&EventPayload) -> bool) -> Vec<f64> {
    m.events()
        .iter()
        .filter(|e| e.actor == player && pred(&e.payload))
        .map(|e| e.t)
        .collect()
}

fn idle_intervals(track: &Track, in_fountain: &[bool], window_s: f64, eps: f64) -> Vec<TimeRange> {
    let w = window_s.round().max(1.0) as usize;
    let n = track.len();
    if n <= w {
        return Vec::new();
    }
    // travelled[k]: path length from tick 0 to tick k, counting only steps
    // inside one alive interval.
    let mut travelled = vec![0.0; n];
    let mut fountain_ticks = vec![0usize; n + 1];
    for k in 0..n {
        fountain_ticks[k + 1] = fountain_ticks[k] + usize::from(in_fountain[k]);
        if k == 0 {
            continue;
        }
        let step = match (track.pos[k - 1], track.pos[k]) {
            (Some(a), Some(b)) if track.seg[k - 1] == track.seg[k] => (b.0 - a.0).hypot(b.1 - a.1),
            _ => 0.0,
        };
        travelled[k] = travelled[k - 1] + step;
    }
    let qualifies = |s: usize| {
        let e = s + w;
        let same_life = track.seg[s].is_some() && track.seg[s] == track.seg[e];
        let sampled = track.pos[s].is_some() && track.pos[e].is_some();
        same_life
            && sampled
            && fountain_ticks[e + 1] == fountain_ticks[s]
            && travelled[e] - travelled[s] < eps
    };

    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for s in 0..n - w {
        if qualifies(s) {
            run = match run {
                Some((a, _)) => Some((a, s)),
                None => Some((s, s)),
            };
        } else if let Some((a, b)) = run.take() {
            out.push(TimeRange(a as f64, (b + w) as f64));
        }
    }
    if let Some((a, b)) = run {
        out.push(TimeRange(a as f64, (b + w) as f64));
    }
    out
}

fn fountain_stays(track: &Track, in_fountain: &[bool]) -> Vec<TimeRange> {
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for k in 0..track.len() {
        let continues = run.is_some_and(|(_, b)| b + 1 == k && track.seg[b] == track.seg[k]);
        if in_fountain[k] {
            run = match run {
                Some((a, _)) if continues => Some((a, k)),
                Some((a, b)) => {
                    out.push(TimeRange(a as f64, b as f64));
                    Some((k, k))
                }
                None => Some((k, k)),
            };
        } else if let Some((a, b)) = run.take() {
            out.push(TimeRange(a as f64, b as f64));
        }
    }
    if let Some((a, b)) = run {
        out.push(TimeRange(a as f64, b as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::MatchBuilder;
    use crate::spatial::default_layout;

    /// Samples every 20 s alternating between `x` and `x + 0.3` at height
    /// `y` (0.015 units/s), starting at `x` at `t0`.
    fn patrol(mut b: MatchBuilder, id: &str, t0: f64, t1: f64, x: f64, y: f64) -> MatchBuilder {
        let mut t = t0;
        let mut k = 0;
        while t <= t1 {
            b = b.sample(id, t, if k % 2 == 0 { x } else { x + 0.3 }, y);
            t += 20.0;
            k += 1;
        }
        b
    }

    /// Everyone patrols in their own jungle except `skip`.
    fn patrolling(duration: f64, skip: &str) -> MatchBuilder {
        let mut b = MatchBuilder::new(duration);
        for i in 1..=10 {
            let id = format!("P{i:02}");
            if id == skip {
                continue;
            }
            let (x, y) = if i <= 5 { (0.2, 0.2 + 0.05 * i as f64) } else { (0.5, 0.5 + 0.05 * (i - 5) as f64) };
            b = patrol(b, &id, 0.0, duration, x, y);
        }
        b
    }

    /// P03 patrols, stands still at (0.25, 0.4) over [200, end], then patrols.
    fn idler(duration: f64, end: f64) -> MatchBuilder {
        let b = patrol(patrolling(duration, "P03"), "P03", 0.0, 200.0, 0.25, 0.4);
        patrol(b, "P03", end, duration, 0.25, 0.4)
    }

    fn run(m: &MatchTelemetry) -> Vec<SuspicionFinding> {
        detect_afk(m, &default_layout(), &DetectorConfig::default()).unwrap()
    }

    #[test]
    fn moving_players_are_clean() {
        assert!(run(&patrolling(600.0, "").build()).is_empty());
    }

    #[test]
    fn stationary_stretch_in_jungle_is_flagged() {
        let f = run(&idler(600.0, 400.0).build());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].player_id, "P03");
        assert_eq!(f[0].time_ranges, vec![TimeRange(200.0, 400.0)]);
        assert!((f[0].severity - 200.0 / 300.0).abs() < 1e-12);
        assert_eq!(f[0].evidence_number("afk_total_s"), Some(200.0));
    }

    #[test]
    fn longer_idle_never_lowers_severity() {
        let mut last = 0.0;
        for end in [260.0, 300.0, 350.0, 400.0, 500.0] {
            let f = run(&idler(600.0, end).build());
            let sev = f.first().map_or(0.0, |f| f.severity);
            assert!(sev >= last, "severity dropped at end={end}");
            last = sev;
        }
    }

    #[test]
    fn fountain_idle_after_recall_is_exempt() {
        let b = patrol(patrolling(600.0, "P02"), "P02", 0.0, 100.0, 0.2, 0.3)
            .path("P02", &[(101.0, 0.03, 0.03), (121.0, 0.03, 0.03)]);
        let b = patrol(b, "P02", 131.0, 600.0, 0.2, 0.3).recall(100.0, "P02");
        assert!(run(&b.build()).is_empty());
    }

    #[test]
    fn unexplained_fountain_stays_add_up() {
        // Two 50 s stays in the fountain with no recall: 100 s total >= 90.
        let mut b = patrol(patrolling(900.0, "P02"), "P02", 0.0, 180.0, 0.2, 0.3);
        b = b.path("P02", &[(200.0, 0.03, 0.03), (250.0, 0.03, 0.03)]);
        b = patrol(b, "P02", 270.0, 380.0, 0.2, 0.3);
        b = b.path("P02", &[(400.0, 0.03, 0.03), (450.0, 0.03, 0.03)]);
        b = patrol(b, "P02", 470.0, 900.0, 0.2, 0.3);
        let f = run(&b.build());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].evidence_number("fountain_intervals"), Some(2.0));
        assert!(f[0].evidence_number("afk_total_s").unwrap() >= 100.0);
    }

    #[test]
    fn death_breaks_idle_windows() {
        // Standing still, but dead for most of the stretch.
        let b = idler(600.0, 400.0)
            .kill(230.0, "P06", "P03", &[], (0.25, 0.4))
            .respawn(380.0, "P03");
        assert!(run(&b.build()).is_empty());
    }
}
