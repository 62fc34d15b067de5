//! Map zones, point classification, dwell heatmaps and trajectories.
//!
//! All geometry lives in the unit square. Blue's fountain sits near the
//! origin and red's near `(1, 1)`; the jungle halves are split by the
//! anti-diagonal and serve as the fallback so classification is total.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telemetry::{segment_containing, tick_count, MatchTelemetry, Position, Team};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneId {
    FountainBlue,
    FountainRed,
    BaseBlue,
    BaseRed,
    River,
    MidLane,
    TopLane,
    BotLane,
    JungleBlue,
    JungleRed,
}

impl ZoneId {
    pub const ALL: [ZoneId; 10] = [
        ZoneId::FountainBlue,
        ZoneId::FountainRed,
        ZoneId::BaseBlue,
        ZoneId::BaseRed,
        ZoneId::River,
        ZoneId::MidLane,
        ZoneId::TopLane,
        ZoneId::BotLane,
        ZoneId::JungleBlue,
        ZoneId::JungleRed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ZoneId::FountainBlue => "fountain_blue",
            ZoneId::FountainRed => "fountain_red",
            ZoneId::BaseBlue => "base_blue",
            ZoneId::BaseRed => "base_red",
            ZoneId::River => "river",
            ZoneId::MidLane => "mid_lane",
            ZoneId::TopLane => "top_lane",
            ZoneId::BotLane => "bot_lane",
            ZoneId::JungleBlue => "jungle_blue",
            ZoneId::JungleRed => "jungle_red",
        }
    }

    pub fn fountain_of(team: Team) -> ZoneId {
        match team {
            Team::Blue => ZoneId::FountainBlue,
            Team::Red => ZoneId::FountainRed,
        }
    }

    pub fn base_of(team: Team) -> ZoneId {
        match team {
            Team::Blue => ZoneId::BaseBlue,
            Team::Red => ZoneId::BaseRed,
        }
    }

    pub fn jungle_of(team: Team) -> ZoneId {
        match team {
            Team::Blue => ZoneId::JungleBlue,
            Team::Red => ZoneId::JungleRed,
        }
    }

    /// Describes the zone relative to a team, e.g. `jungle_red` is the
    /// "enemy jungle" for blue.
    pub fn relative_name(self, team: Team) -> String {
        let side = |owner: Team| if owner == team { "own" } else { "enemy" };
        match self {
            ZoneId::FountainBlue => format!("{} fountain", side(Team::Blue)),
            ZoneId::FountainRed => format!("{} fountain", side(Team::Red)),
            ZoneId::BaseBlue => format!("{} base", side(Team::Blue)),
            ZoneId::BaseRed => format!("{} base", side(Team::Red)),
            ZoneId::JungleBlue => format!("{} jungle", side(Team::Blue)),
            ZoneId::JungleRed => format!("{} jungle", side(Team::Red)),
            ZoneId::River => "river".into(),
            ZoneId::MidLane => "mid lane".into(),
            ZoneId::TopLane => "top lane".into(),
            ZoneId::BotLane => "bot lane".into(),
        }
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ZoneId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ZoneId::ALL
            .into_iter()
            .find(|z| z.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown zone `{s}`")))
    }
}

/// Zone a player is expected to occupy given their assignment.
pub fn home_zone(position: Position, team: Team) -> ZoneId {
    match position {
        Position::Top => ZoneId::TopLane,
        Position::Mid => ZoneId::MidLane,
        Position::BotCarry | Position::BotSupport => ZoneId::BotLane,
        Position::Jungle => ZoneId::jungle_of(team),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    Disk { center: [f64; 2], radius: f64 },
    Rect { min: [f64; 2], max: [f64; 2] },
    Corridor { points: Vec<[f64; 2]>, half_width: f64 },
}

impl Geometry {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Geometry::Disk { center, radius } => {
                (x - center[0]).hypot(y - center[1]) <= *radius
            }
            Geometry::Rect { min, max } => {
                (min[0]..=max[0]).contains(&x) && (min[1]..=max[1]).contains(&y)
            }
            Geometry::Corridor { points, half_width } => {
                polyline_distance(points, x, y) <= *half_width
            }
        }
    }
}

/// Euclidean distance from a point to a segment.
pub fn segment_distance(a: [f64; 2], b: [f64; 2], x: f64, y: f64) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let f = if len2 == 0.0 {
        0.0
    } else {
        (((x - a[0]) * dx + (y - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (x - (a[0] + f * dx)).hypot(y - (a[1] + f * dy))
}

fn polyline_distance(points: &[[f64; 2]], x: f64, y: f64) -> f64 {
    match points {
        [] => f64::INFINITY,
        [p] => (x - p[0]).hypot(y - p[1]),
        _ => points
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], x, y))
            .fold(f64::INFINITY, f64::min),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneShape {
    pub zone: ZoneId,
    pub geometry: Geometry,
}

/// Priority-ordered zone geometry. Points matched by no shape fall back to
/// `jungle_blue` when `x + y < 1` and `jungle_red` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneLayout {
    pub zones: Vec<ZoneShape>,
}

impl Default for ZoneLayout {
    fn default() -> Self {
        default_layout()
    }
}

pub fn default_layout() -> ZoneLayout {
    use Geometry::*;
    let shape = |zone, geometry| ZoneShape { zone, geometry };
    ZoneLayout {
        zones: vec![
            shape(ZoneId::FountainBlue, Disk { center: [0.03, 0.03], radius: 0.04 }),
            shape(ZoneId::FountainRed, Disk { center: [0.97, 0.97], radius: 0.04 }),
            shape(ZoneId::BaseBlue, Rect { min: [0.0, 0.0], max: [0.12, 0.12] }),
            shape(ZoneId::BaseRed, Rect { min: [0.88, 0.88], max: [1.0, 1.0] }),
            shape(
                ZoneId::River,
                Corridor { points: vec![[0.05, 0.95], [0.95, 0.05]], half_width: 0.05 },
            ),
            shape(
                ZoneId::MidLane,
                Corridor { points: vec![[0.05, 0.05], [0.95, 0.95]], half_width: 0.06 },
            ),
            shape(
                ZoneId::TopLane,
                Corridor {
                    points: vec![[0.05, 0.05], [0.05, 0.95], [0.95, 0.95]],
                    half_width: 0.07,
                },
            ),
            shape(
                ZoneId::BotLane,
                Corridor {
                    points: vec![[0.05, 0.05], [0.95, 0.05], [0.95, 0.95]],
                    half_width: 0.07,
                },
            ),
        ],
    }
}

impl ZoneLayout {
    pub fn from_json(raw: &str) -> Result<Self> {
        let layout: ZoneLayout =
            serde_json::from_str(raw).map_err(|e| Error::InvalidConfig(format!("zone layout: {e}")))?;
        let mut seen = std::collections::HashSet::new();
        for s in &layout.zones {
            if matches!(s.zone, ZoneId::JungleBlue | ZoneId::JungleRed) {
                return Err(Error::InvalidConfig(format!(
                    "zone layout: {} is the fallback and cannot be given geometry",
                    s.zone
                )));
            }
            if !seen.insert(s.zone) {
                return Err(Error::InvalidConfig(format!("zone layout: duplicate zone {}", s.zone)));
            }
        }
        Ok(layout)
    }

    /// Every zone id the layout can produce, including the jungle fallback.
    pub fn zone_ids(&self) -> Vec<ZoneId> {
        let mut ids: Vec<ZoneId> = self.zones.iter().map(|s| s.zone).collect();
        ids.extend([ZoneId::JungleBlue, ZoneId::JungleRed]);
        ids
    }

    pub fn classify(&self, x: f64, y: f64) -> ZoneId {
        self.zones
            .iter()
            .find(|s| s.geometry.contains(x, y))
            .map(|s| s.zone)
            .unwrap_or(if x + y < 1.0 { ZoneId::JungleBlue } else { ZoneId::JungleRed })
    }
}

pub fn classify_zone(layout: &ZoneLayout, x: f64, y: f64) -> Result<ZoneId> {
    if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
        return Err(Error::OutOfBounds { x, y });
    }
    Ok(layout.classify(x, y))
}

/// One alive 1 Hz tick of a player inside an analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Index of the alive interval the tick falls in.
    pub segment: usize,
}

/// Alive ticks at `t0, t0 + 1/hz, ...` up to `t1` inclusive.
pub fn alive_ticks(
    m: &MatchTelemetry,
    player_id: &str,
    t0: f64,
    t1: f64,
    hz: f64,
) -> Result<Vec<Tick>> {
    m.check_window(t0, t1)?;
    if !(hz.is_finite() && hz > 0.0) {
        return Err(Error::InvalidConfig(format!("sample rate must be positive, got {hz}")));
    }
    let intervals = m.alive_intervals(player_id)?;
    let n = tick_count(t1 - t0, hz);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = (t0 + k as f64 / hz).min(t1);
        if let Some(segment) = segment_containing(intervals, t) {
            let (x, y) = m.position_at(player_id, t)?;
            out.push(Tick { t, x, y, segment });
        }
    }
    Ok(out)
}

/// Seconds spent per grid cell. `cells[iy][ix]` covers
/// `[ix/n, (ix+1)/n) x [iy/n, (iy+1)/n)`, with the far edges folded into
/// the last row and column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwellHeatmap {
    pub grid_n: usize,
    pub window: [f64; 2],
    pub cells: Vec<Vec<f64>>,
}

impl DwellHeatmap {
    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }

    pub fn cell_of(grid_n: usize, x: f64, y: f64) -> (usize, usize) {
        let idx = |v: f64| ((v * grid_n as f64).floor().max(0.0) as usize).min(grid_n - 1);
        (idx(x), idx(y))
    }

    /// Nonzero cells as `(ix, iy, seconds)`, row-major.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cells.iter().enumerate().flat_map(|(iy, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &s)| s > 0.0)
                .map(move |(ix, &s)| (ix, iy, s))
        })
    }
}

pub fn dwell_heatmap(
    m: &MatchTelemetry,
    player_id: &str,
    t0: f64,
    t1: f64,
    grid_n: usize,
) -> Result<DwellHeatmap> {
    if grid_n == 0 {
        return Err(Error::InvalidConfig("grid size must be at least 1".into()));
    }
    let mut cells = vec![vec![0.0; grid_n]; grid_n];
    for tick in alive_ticks(m, player_id, t0, t1, 1.0)? {
        let (ix, iy) = DwellHeatmap::cell_of(grid_n, tick.x, tick.y);
        cells[iy][ix] += 1.0;
    }
    Ok(DwellHeatmap {
        grid_n,
        window: [t0, t1],
        cells,
    })
}

/// Alive seconds per zone in `[t0, t1]` at 1 Hz. Every zone of the layout is
/// present, zero or not.
pub fn zone_occupancy(
    m: &MatchTelemetry,
    layout: &ZoneLayout,
    player_id: &str,
    t0: f64,
    t1: f64,
) -> Result<BTreeMap<ZoneId, f64>> {
    let mut occ: BTreeMap<ZoneId, f64> = layout.zone_ids().into_iter().map(|z| (z, 0.0)).collect();
    for tick in alive_ticks(m, player_id, t0, t1, 1.0)? {
        *occ.entry(layout.classify(tick.x, tick.y)).or_insert(0.0) += 1.0;
    }
    Ok(occ)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Resampled path inside the window, split wherever the player was dead.
pub fn trajectory(
    m: &MatchTelemetry,
    player_id: &str,
    t0: f64,
    t1: f64,
    hz: f64,
) -> Result<Vec<Vec<TrackPoint>>> {
    let mut lines: Vec<Vec<TrackPoint>> = Vec::new();
    let mut current: Option<usize> = None;
    for tick in alive_ticks(m, player_id, t0, t1, hz)? {
        let point = TrackPoint { t: tick.t, x: tick.x, y: tick.y };
        match (current, lines.last_mut()) {
            (Some(seg), Some(line)) if seg == tick.segment => line.push(point),
            _ => lines.push(vec![point]),
        }
        current = Some(tick.segment);
    }
    Ok(lines)
}

/// Net displacement and travelled path length over alive 1 Hz ticks.
pub fn path_displacement(
    m: &MatchTelemetry,
    player_id: &str,
    t0: f64,
    t1: f64,
) -> Result<(f64, f64)> {
    let ticks = alive_ticks(m, player_id, t0, t1, 1.0)?;
    Ok(displacement_of(ticks.iter().map(|t| (t.x, t.y))))
}

pub(crate) fn displacement_of(points: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut first = None;
    let mut last: Option<(f64, f64)> = None;
    let mut path = 0.0;
    for p in points {
        if let Some(prev) = last {
            path += (p.0 - prev.0).hypot(p.1 - prev.1);
        } else {
            first = Some(p);
        }
        last = Some(p);
    }
    match (first, last) {
        (Some(a), Some(b)) => ((b.0 - a.0).hypot(b.1 - a.1), path),
        _ => (0.0, 0.0),
    }
}
