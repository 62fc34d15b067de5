//! Labelled corpora: a fixed number of matches per griefer archetype plus
//! clean baselines, each written as telemetry and ground-truth files.

use std::fs;
use std::path::{Path, PathBuf};

use grieferlens_core::detect::GrieferType;
use grieferlens_core::metrics::Stage;
use grieferlens_core::telemetry::{standard_roster, Lane, Position};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scenario::{home, Behavior, Injection, Scenario, DEFAULT_AFK_LEN_S, DEFAULT_DURATION_S, FEEDING_START_S};
use crate::sim::generate_match;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub match_id: String,
    pub seed: u64,
    /// `None` for baseline matches.
    pub archetype: Option<GrieferType>,
    pub telemetry: String,
    pub truth: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub base_seed: u64,
    pub per_archetype: usize,
    pub baseline: usize,
    pub entries: Vec<ManifestEntry>,
}

/// Builds the scenario for one corpus slot. The injected player and its
/// parameters are drawn from a stream keyed by the seed, so a slot is fully
/// determined by `(seed, archetype)`.
pub fn archetype_scenario(seed: u64, archetype: GrieferType) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let d = DEFAULT_DURATION_S;
    let roster = standard_roster();
    let pick = |rng: &mut ChaCha8Rng, ok: &dyn Fn(&grieferlens_core::telemetry::PlayerInfo) -> bool| {
        let pool: Vec<_> = roster.iter().filter(|p| ok(p)).collect();
        (*pool.choose(rng).expect("non-empty pool")).clone()
    };
    let (player, behavior) = match archetype {
        GrieferType::Afk => {
            let p = pick(&mut rng, &|_| true);
            let t0 = (rng.random_range(0.15..0.55) * d).round();
            (p, Behavior::Afk { t0, t1: t0 + DEFAULT_AFK_LEN_S })
        }
        GrieferType::Feeding => (pick(&mut rng, &|_| true), Behavior::Feeding { t0: FEEDING_START_S }),
        GrieferType::LaneStealing => {
            let p = pick(&mut rng, &|_| true);
            let own = p.assigned_position.lane();
            let lanes: Vec<Lane> = [Lane::Top, Lane::Mid, Lane::Bot].into_iter().filter(|l| Some(*l) != own).collect();
            let lane = *lanes.choose(&mut rng).expect("two lanes left");
            (p, Behavior::LaneSteal { lane })
        }
        GrieferType::JungleStealing => (
            pick(&mut rng, &|p| p.assigned_position != Position::Jungle),
            Behavior::JungleSteal { stage: Stage::Late },
        ),
        GrieferType::NonParticipation => (pick(&mut rng, &|_| true), Behavior::NonParticipation),
        GrieferType::PositionStealing => {
            let p = pick(&mut rng, &|_| true);
            let victim = pick(&mut rng, &|v| v.team == p.team && home(v) != home(&p));
            (p, Behavior::PositionSteal { victim: victim.player_id })
        }
    };
    Scenario::baseline(seed).with(Injection { player_id: player.player_id, behavior })
}

/// Writes `per_archetype` matches for every archetype and `baseline` clean
/// matches into `dir`, plus a `manifest.json` listing them.
///
/// Archetype `k` uses seeds `base_seed + k * per_archetype + i`; baselines
/// follow after the last archetype.
pub fn generate_corpus(base_seed: u64, per_archetype: usize, baseline: usize, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io { path: dir.to_path_buf(), source })?;
    let n = per_archetype as u64;
    let mut slots: Vec<(u64, Option<GrieferType>)> = Vec::new();
    for (k, a) in GrieferType::ALL.into_iter().enumerate() {
        slots.extend((0..n).map(|i| (base_seed + k as u64 * n + i, Some(a))));
    }
    let after = base_seed + GrieferType::ALL.len() as u64 * n;
    slots.extend((0..baseline as u64).map(|i| (after + i, None)));

    let mut entries = Vec::with_capacity(slots.len());
    for (seed, archetype) in slots {
        let scenario = match archetype {
            Some(a) => archetype_scenario(seed, a),
            None => Scenario::baseline(seed),
        };
        let (doc, truth) = generate_match(&scenario)?;
        let telemetry = format!("{}.telemetry.json", doc.match_id);
        let truth_file = format!("{}.truth.json", doc.match_id);
        write(&dir.join(&telemetry), &doc.to_json())?;
        write(&dir.join(&truth_file), &truth.to_json())?;
        entries.push(ManifestEntry { match_id: doc.match_id, seed, archetype, telemetry, truth: truth_file });
    }
    let manifest = Manifest { base_seed, per_archetype, baseline, entries };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest always serializes");
    write(&dir.join("manifest.json"), &json)?;
    Ok(manifest)
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| SimError::Io { path: PathBuf::from(path), source })
}
