use crate::config::DetectorConfig;
use crate::detect::{finding, Evidence, GrieferType, SuspicionFinding};
use crate::error::Result;
use crate::telemetry::{merge_ranges, EventPayload, MatchTelemetry, TimeRange};

#[derive(Debug, Default, Clone)]
struct Record {
    kills: u32,
    assists: u32,
    deaths: Vec<f64>,
}

/// Damage dealt by `player` in `[t - window, t]`.
fn damage_before(m: &MatchTelemetry, player: &str, t: f64, window: f64) -> f64 {
    m.events()
        .iter()
        .filter(|e| e.actor == player && e.t >= t - window && e.t <= t)
        .filter_map(|e| match e.payload {
            EventPayload::Damage { amount, .. } => Some(amount),
            _ => None,
        })
        .sum()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Many deaths, few takedowns, and almost no damage dealt before dying
/// compared with how teammates die.
pub fn detect_feeding(m: &MatchTelemetry, cfg: &DetectorConfig) -> Result<Vec<SuspicionFinding>> {
    let c = &cfg.feeding;
    let mut records = vec![Record::default(); m.players().len()];
    for e in m.events() {
        if let EventPayload::Kill { victim, assists, .. } = &e.payload {
            records[m.player_index(&e.actor)?].kills += 1;
            records[m.player_index(victim)?].deaths.push(e.t);
            for a in assists {
                records[m.player_index(a)?].assists += 1;
            }
        }
    }
    let pre_death: Vec<Vec<f64>> = m
        .players()
        .iter()
        .zip(&records)
        .map(|(p, r)| {
            r.deaths
                .iter()
                .map(|&t| damage_before(m, &p.player_id, t, c.pre_death_window_s))
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for (i, p) in m.players().iter().enumerate() {
        let r = &records[i];
        let deaths = r.deaths.len() as u32;
        let ratio = deaths as f64 / (r.kills + r.assists + 1) as f64;
        if deaths < c.min_deaths || ratio < c.kda_ratio {
            continue;
        }
        let dpd = mean(&pre_death[i]);
        let team: Vec<f64> = m
            .players()
            .iter()
            .enumerate()
            .filter(|(j, q)| *j != i && q.team == p.team)
            .flat_map(|(j, _)| pre_death[j].iter().copied())
            .collect();
        let team_dpd = mean(&team);
        if team_dpd > 0.0 && dpd > c.passive_frac * team_dpd {
            continue;
        }
        let ranges = merge_ranges(
            r.deaths
                .iter()
                .map(|&t| TimeRange((t - c.pre_death_window_s).max(0.0), t))
                .collect(),
            0.0,
        );
        out.push(finding(
            m,
            cfg,
            &p.player_id,
            GrieferType::Feeding,
            ratio / c.severity_full_ratio,
            ranges,
            vec![
                Evidence::count("deaths", deaths as u64),
                Evidence::count("kills", r.kills as u64),
                Evidence::count("assists", r.assists as u64),
                Evidence::number("death_ratio", ratio),
                Evidence::number("pre_death_damage", dpd),
                Evidence::number("team_pre_death_damage", team_dpd),
            ],
        )?);
    }
    Ok(out)
}
