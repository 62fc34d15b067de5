//! Template filling for finding explanations.

use crate::detect::{EvidenceValue, GrieferType, SuspicionFinding};
use crate::error::{Error, Result};
use crate::telemetry::MatchTelemetry;

/// Evidence keys each detector attaches to its findings.
pub fn evidence_keys(t: GrieferType) -> &'static [&'static str] {
    match t {
        GrieferType::Afk => &["afk_total_s", "afk_longest_s", "idle_intervals", "fountain_intervals", "stage"],
        GrieferType::Feeding => &[
            "deaths",
            "kills",
            "assists",
            "death_ratio",
            "pre_death_damage",
            "team_pre_death_damage",
        ],
        GrieferType::LaneStealing => &["lane", "lane_cs", "team_lane_cs", "share", "share_pct"],
        GrieferType::JungleStealing => &["share", "share_pct", "jungle_gold", "stage"],
        GrieferType::NonParticipation => &["missed", "eligible", "missed_frac"],
        GrieferType::PositionStealing => &["squatted_zone", "victim", "squat_frac", "squat_pct", "own_pct"],
    }
}

const ALWAYS: [&str; 2] = ["player", "hero_type"];

/// Placeholder names in a template, in order of appearance.
fn placeholders(template: &str) -> impl Iterator<Item = &str> {
    template.split('{').skip(1).filter_map(|s| s.split_once('}').map(|(k, _)| k))
}

pub(crate) fn check_template(t: GrieferType, template: &str) -> Result<()> {
    if template.trim().is_empty() {
        return Err(Error::InvalidConfig(format!("template for {t} is empty")));
    }
    let keys = evidence_keys(t);
    match placeholders(template).find(|k| !ALWAYS.contains(k) && !keys.contains(k)) {
        Some(k) => Err(Error::MissingEvidenceKey(k.to_string())),
        None => Ok(()),
    }
}

fn format_value(v: &EvidenceValue) -> String {
    match v {
        EvidenceValue::Count(n) => n.to_string(),
        EvidenceValue::Number(x) => format!("{x:.1}"),
        EvidenceValue::Text(s) => s.clone(),
    }
}

/// Fills `template` from the finding's player, hero type and evidence.
/// Numbers are rounded to one decimal.
pub fn render_explanation(finding: &SuspicionFinding, m: &MatchTelemetry, template: &str) -> Result<String> {
    let player = m.player(&finding.player_id)?;
    let mut out = String::with_capacity(template.len() + 32);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let Some(close) = after.find('}') else {
            out.push_str(&rest[open..]);
            rest = "";
            break;
        };
        let key = &after[..close];
        let value = match key {
            "player" => player.player_id.clone(),
            "hero_type" => player.hero_type.to_string(),
            _ => finding
                .evidence_value(key)
                .map(format_value)
                .ok_or_else(|| Error::MissingEvidenceKey(key.to_string()))?,
        };
        out.push_str(&value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}
