//! Waypoint-based agent simulation at 1 Hz.
//!
//! Every agent follows its assignment (laners wander their lane and last-hit,
//! junglers circuit their camps), recalls now and then, and walks to four
//! scheduled team fights. Injected behaviors replace the routine for their
//! span. All randomness comes from one ChaCha8 stream seeded by the scenario.

use grieferlens_core::telemetry::{
    standard_roster, CsSource, EventPayload, GameEvent, Lane, MatchTelemetry, ObjectiveKind, PlayerInfo,
    Position, PositionSample, Team, TelemetryDocument,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scenario::{
    stage_span, Behavior, GroundTruth, Scenario, AVOID_LEAD_S, FIGHT_LEN_S, GATHER_LEAD_S,
};

const TRAVEL_SPEED: f64 = 0.014;
const WANDER_SPEED: f64 = 0.006;
const FEED_SPEED: f64 = 0.015;
/// Fighters within this distance of the fight center can act in it.
const PRESENT_RADIUS: f64 = 0.1;
/// Largest position error tolerated when dropping redundant samples.
const COMPRESS_TOL: f64 = 1.5e-4;

type Point = (f64, f64);

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn fountain(team: Team) -> Point {
    match team {
        Team::Blue => (0.03, 0.03),
        Team::Red => (0.97, 0.97),
    }
}

fn mirror(p: Point, team: Team) -> Point {
    match team {
        Team::Blue => p,
        Team::Red => (1.0 - p.0, 1.0 - p.1),
    }
}

const BLUE_CAMPS: [Point; 4] = [(0.2, 0.42), (0.3, 0.56), (0.56, 0.3), (0.42, 0.2)];

fn camps(team: Team) -> [Point; 4] {
    BLUE_CAMPS.map(|c| mirror(c, team))
}

/// A box the agent wanders inside: `anchor ± along * a ± perp * p`.
#[derive(Debug, Clone, Copy)]
struct Spot {
    anchor: Point,
    along: Point,
    spread_along: f64,
    spread_perp: f64,
}

impl Spot {
    fn local(&self, p: Point) -> (f64, f64) {
        let d = (p.0 - self.anchor.0, p.1 - self.anchor.1);
        let a = d.0 * self.along.0 + d.1 * self.along.1;
        let q = -d.0 * self.along.1 + d.1 * self.along.0;
        (a, q)
    }

    fn contains(&self, p: Point) -> bool {
        let (a, q) = self.local(p);
        a.abs() <= self.spread_along + 0.01 && q.abs() <= self.spread_perp + 0.01
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Point {
        let a = rng.random_range(-self.spread_along..=self.spread_along);
        let q = rng.random_range(-self.spread_perp..=self.spread_perp);
        (
            round4(self.anchor.0 + a * self.along.0 - q * self.along.1),
            round4(self.anchor.1 + a * self.along.1 + q * self.along.0),
        )
    }
}

fn lane_spot(lane: Lane, team: Team) -> Spot {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (anchor, along) = match (lane, team) {
        (Lane::Top, Team::Blue) => ((0.05, 0.65), (0.0, 1.0)),
        (Lane::Top, Team::Red) => ((0.35, 0.95), (1.0, 0.0)),
        (Lane::Mid, Team::Blue) => ((0.35, 0.35), (s, s)),
        (Lane::Mid, Team::Red) => ((0.65, 0.65), (s, s)),
        (Lane::Bot, Team::Blue) => ((0.65, 0.05), (1.0, 0.0)),
        (Lane::Bot, Team::Red) => ((0.95, 0.35), (0.0, 1.0)),
    };
    let spread_along = if lane == Lane::Mid { 0.07 } else { 0.1 };
    Spot { anchor, along, spread_along, spread_perp: 0.015 }
}

fn camp_spot(c: Point) -> Spot {
    Spot { anchor: c, along: (1.0, 0.0), spread_along: 0.02, spread_perp: 0.02 }
}

fn fight_spot(center: Point, team: Team) -> Spot {
    let off = match team {
        Team::Blue => -0.025,
        Team::Red => 0.025,
    };
    Spot { anchor: (center.0 + off, center.1 + off), along: (1.0, 0.0), spread_along: 0.025, spread_perp: 0.025 }
}

/// Waypoints a feeder walks from its fountain until it dies: down its own
/// lane to the enemy end, or across the river for a jungler. Staying in the
/// own home zone keeps the walk from reading as squatting.
fn feed_route(p: &PlayerInfo) -> Vec<Point> {
    let blue = match p.assigned_position.lane() {
        Some(Lane::Top) => vec![(0.05, 0.65), (0.05, 0.95), (0.35, 0.95)],
        Some(Lane::Mid) => vec![(0.35, 0.35), (0.65, 0.65)],
        Some(Lane::Bot) => vec![(0.65, 0.05), (0.95, 0.05), (0.95, 0.35)],
        None => vec![BLUE_CAMPS[1], mirror(BLUE_CAMPS[2], Team::Red)],
    };
    match (p.team, p.assigned_position.lane()) {
        (Team::Blue, _) => blue,
        // Reflecting across the anti-diagonal keeps top as top for red.
        (Team::Red, Some(Lane::Top | Lane::Bot)) => blue.into_iter().map(|(x, y)| (1.0 - y, 1.0 - x)).collect(),
        (Team::Red, _) => blue.into_iter().map(|q| mirror(q, Team::Red)).collect(),
    }
}

fn home_spot(p: &PlayerInfo) -> Spot {
    match p.assigned_position.lane() {
        Some(lane) => lane_spot(lane, p.team),
        None => camp_spot(camps(p.team)[0]),
    }
}

struct Fight {
    start: f64,
    center: Point,
    kill_ticks: Vec<f64>,
    acted: Vec<bool>,
    kills: [u32; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Activity {
    Freeze,
    Fight(usize),
    Avoid(usize),
    Feed,
    Squat,
    LaneFarm(Lane),
    Jungle,
}

struct Agent {
    info: PlayerInfo,
    behavior: Option<Behavior>,
    pos: Point,
    alive: bool,
    respawn_at: f64,
    segments: Vec<Vec<(f64, f64, f64)>>,
    last_activity: Option<Activity>,
    wander: Option<Point>,
    next_recall: f64,
    teleport: bool,
    pause_until: f64,
    next_cs: f64,
    camp: usize,
    camp_leave: Option<f64>,
    camp_cs: Vec<f64>,
    feed_wp: usize,
}

impl Agent {
    fn team_idx(&self) -> usize {
        match self.info.team {
            Team::Blue => 0,
            Team::Red => 1,
        }
    }
}

struct Sim<'a> {
    scenario: &'a Scenario,
    rng: ChaCha8Rng,
    agents: Vec<Agent>,
    fights: Vec<Fight>,
    events: Vec<GameEvent>,
    laning_end: f64,
}

/// Generates the telemetry and ground truth for a scenario. The same
/// scenario always yields byte-identical output.
pub fn generate_match(scenario: &Scenario) -> Result<(TelemetryDocument, GroundTruth)> {
    scenario.validate()?;
    let mut sim = Sim::new(scenario);
    sim.run();
    let doc = sim.into_document();
    MatchTelemetry::from_document(doc.clone())?;
    Ok((doc, scenario.ground_truth()))
}

impl<'a> Sim<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        let agents = standard_roster()
            .into_iter()
            .map(|mut info| {
                let behavior = scenario
                    .injections
                    .iter()
                    .find(|i| i.player_id == info.player_id)
                    .map(|i| i.behavior.clone());
                info.report_count = if behavior.is_some() { rng.random_range(2..=5) } else { rng.random_range(0..=1) };
                Agent {
                    pos: fountain(info.team),
                    info,
                    behavior,
                    alive: true,
                    respawn_at: 0.0,
                    segments: vec![Vec::new()],
                    last_activity: None,
                    wander: None,
                    next_recall: rng.random_range(200.0..280.0_f64).round(),
                    teleport: false,
                    pause_until: 0.0,
                    next_cs: 0.0,
                    camp: 0,
                    camp_leave: None,
                    camp_cs: Vec::new(),
                    feed_wp: 0,
                }
            })
            .collect();
        let fights = scenario
            .fight_starts()
            .into_iter()
            .map(|start| {
                let u = rng.random_range(-0.15..0.15);
                let n_kills = rng.random_range(1..=3);
                let mut kill_ticks: Vec<f64> = Vec::new();
                while kill_ticks.len() < n_kills {
                    let k = start + rng.random_range(5..=14) as f64;
                    if !kill_ticks.contains(&k) {
                        kill_ticks.push(k);
                    }
                }
                Fight {
                    start,
                    center: (round4(0.5 + u), round4(0.5 - u)),
                    kill_ticks,
                    acted: vec![false; 10],
                    kills: [0, 0],
                }
            })
            .collect();
        Sim {
            scenario,
            rng,
            agents,
            fights,
            events: Vec::new(),
            laning_end: scenario.laning_phase().1,
        }
    }

    fn duration(&self) -> f64 {
        self.scenario.duration_s
    }

    fn push(&mut self, t: f64, actor: usize, payload: EventPayload) {
        let t = round2(t).min(self.duration());
        let actor = self.agents[actor].info.player_id.clone();
        self.events.push(GameEvent { t, actor, payload });
    }

    fn run(&mut self) {
        let last = (self.duration() + 1e-9).floor() as usize;
        for tick in 0..=last {
            let t = tick as f64;
            for a in 0..self.agents.len() {
                self.step(a, t);
            }
            for k in 0..self.fights.len() {
                let f = &self.fights[k];
                if t >= f.start && t < f.start + FIGHT_LEN_S {
                    self.fight_tick(k, t);
                } else if t == f.start + FIGHT_LEN_S {
                    self.fight_end(k, t);
                }
            }
            if tick > 0 && tick % 30 == 0 {
                for a in 0..self.agents.len() {
                    self.push(t, a, EventPayload::Gold { amount: 45.0, source: "passive".into() });
                }
            }
        }
    }

    fn attends(&self, a: usize, k: usize) -> bool {
        let start = self.fights[k].start;
        let span = (start - GATHER_LEAD_S, start + FIGHT_LEN_S);
        match &self.agents[a].behavior {
            Some(Behavior::NonParticipation) => false,
            Some(Behavior::Feeding { t0 }) => span.1 < *t0,
            Some(Behavior::Afk { t0, t1 }) => span.1 < *t0 || span.0 > *t1,
            Some(Behavior::PositionSteal { .. }) => start >= self.laning_end,
            _ => true,
        }
    }

    fn activity(&self, a: usize, t: f64) -> Activity {
        let ag = &self.agents[a];
        if let Some(Behavior::Afk { t0, t1 }) = ag.behavior {
            if t >= t0 && t <= t1 {
                return Activity::Freeze;
            }
        }
        for (k, f) in self.fights.iter().enumerate() {
            if matches!(ag.behavior, Some(Behavior::NonParticipation))
                && t >= f.start - AVOID_LEAD_S
                && t <= f.start + FIGHT_LEN_S + 5.0
            {
                return Activity::Avoid(k);
            }
            if t >= f.start - GATHER_LEAD_S && t < f.start + FIGHT_LEN_S && self.attends(a, k) {
                return Activity::Fight(k);
            }
        }
        match &ag.behavior {
            Some(Behavior::Feeding { t0 }) if t >= *t0 => return Activity::Feed,
            Some(Behavior::PositionSteal { .. }) if t < self.laning_end => return Activity::Squat,
            Some(Behavior::LaneSteal { lane }) if t < self.laning_end => return Activity::LaneFarm(*lane),
            Some(Behavior::JungleSteal { stage }) => {
                let (s0, s1) = stage_span(*stage, self.duration());
                if t >= s0 && t <= s1 {
                    return Activity::Jungle;
                }
            }
            _ => {}
        }
        match ag.info.assigned_position.lane() {
            Some(lane) => Activity::LaneFarm(lane),
            None => Activity::Jungle,
        }
    }

    fn recall_blocked(&self, a: usize, t: f64) -> bool {
        let fights_near = (0..self.fights.len()).any(|k| {
            let s = self.fights[k].start;
            t >= s - AVOID_LEAD_S - 15.0 && t <= s + FIGHT_LEN_S
        });
        let afk_near = matches!(self.agents[a].behavior, Some(Behavior::Afk { t0, t1 }) if t >= t0 - 30.0 && t <= t1);
        fights_near || afk_near
    }

    fn record(&mut self, a: usize, t: f64) {
        let ag = &mut self.agents[a];
        let p = ag.pos;
        ag.segments.last_mut().expect("segment").push((t, p.0, p.1));
    }

    fn step(&mut self, a: usize, t: f64) {
        if !self.agents[a].alive {
            if t < self.agents[a].respawn_at {
                return;
            }
            let ag = &mut self.agents[a];
            ag.alive = true;
            ag.pos = fountain(ag.info.team);
            ag.segments.push(Vec::new());
            ag.last_activity = None;
            ag.teleport = false;
            ag.pause_until = 0.0;
            self.push(t, a, EventPayload::Respawn);
        }
        if self.agents[a].teleport {
            let pause = self.rng.random_range(3..=8) as f64;
            let ag = &mut self.agents[a];
            ag.teleport = false;
            ag.pos = fountain(ag.info.team);
            ag.pause_until = t + pause;
            ag.last_activity = None;
            self.record(a, t);
            return;
        }
        if t < self.agents[a].pause_until {
            self.record(a, t);
            return;
        }

        let act = self.activity(a, t);
        if self.agents[a].last_activity != Some(act) {
            let ag = &mut self.agents[a];
            ag.last_activity = Some(act);
            ag.wander = None;
            ag.camp_leave = None;
            ag.camp_cs.clear();
            ag.feed_wp = 0;
            ag.next_cs = t + 2.0;
            if act == Activity::Jungle {
                let team = ag.info.team;
                let pos = ag.pos;
                ag.camp = (0..4)
                    .min_by(|&i, &j| dist(camps(team)[i], pos).total_cmp(&dist(camps(team)[j], pos)))
                    .unwrap_or(0);
            }
        }

        let routine = matches!(act, Activity::LaneFarm(_) | Activity::Jungle | Activity::Squat);
        if routine && t >= self.agents[a].next_recall && !self.recall_blocked(a, t) {
            let next = t + self.rng.random_range(200.0..280.0_f64).round();
            self.agents[a].next_recall = next;
            self.agents[a].teleport = true;
            self.push(t, a, EventPayload::Recall);
            self.record(a, t);
            return;
        }

        let team = self.agents[a].info.team;
        match act {
            Activity::Freeze => self.record(a, t),
            Activity::Fight(k) => {
                let spot = fight_spot(self.fights[k].center, team);
                self.wander(a, spot);
                self.record(a, t);
            }
            Activity::Avoid(k) => {
                // Keep busy somewhere on the own side, as far from the fight
                // as possible. Only the own assignment yields last-hits.
                let center = self.fights[k].center;
                let info = &self.agents[a].info;
                let spots: Vec<(Spot, Option<CsSource>)> = match info.assigned_position.lane() {
                    Some(own) => [Lane::Top, Lane::Mid, Lane::Bot]
                        .into_iter()
                        .map(|l| (lane_spot(l, team), (l == own).then(|| l.cs_source())))
                        .collect(),
                    None => camps(team).into_iter().map(|c| (camp_spot(c), Some(CsSource::jungle_of(team)))).collect(),
                };
                let (spot, source) = spots
                    .into_iter()
                    .max_by(|p, q| dist(p.0.anchor, center).total_cmp(&dist(q.0.anchor, center)))
                    .expect("candidate spots");
                self.wander(a, spot);
                self.record(a, t);
                if let Some(source) = source {
                    if spot.contains(self.agents[a].pos) && t >= self.agents[a].next_cs {
                        let gap = self.rng.random_range(5..=8) as f64;
                        let gold = self.rng.random_range(15..=40) as f64;
                        self.agents[a].next_cs = t + gap;
                        self.push(t, a, EventPayload::Cs { source, gold });
                    }
                }
            }
            Activity::Feed => {
                let route = feed_route(&self.agents[a].info);
                let wp = self.agents[a].feed_wp.min(route.len() - 1);
                let reached = self.move_toward(a, route[wp], FEED_SPEED);
                self.record(a, t);
                if reached {
                    if wp + 1 < route.len() {
                        self.agents[a].feed_wp += 1;
                    } else {
                        self.feed_death(a, t);
                    }
                }
            }
            Activity::Squat => {
                let victim = match &self.agents[a].behavior {
                    Some(Behavior::PositionSteal { victim }) => victim.clone(),
                    _ => unreachable!("squatting without a victim"),
                };
                let v = self.agents.iter().find(|g| g.info.player_id == victim).expect("validated victim");
                let spot = home_spot(&v.info);
                self.wander(a, spot);
                self.record(a, t);
            }
            Activity::LaneFarm(lane) => {
                let spot = lane_spot(lane, team);
                self.wander(a, spot);
                self.record(a, t);
                if spot.contains(self.agents[a].pos) && t >= self.agents[a].next_cs {
                    let gap = self.lane_cs_gap(a, lane, t);
                    let gold = self.rng.random_range(15..=25) as f64;
                    self.agents[a].next_cs = t + gap;
                    self.push(t, a, EventPayload::Cs { source: lane.cs_source(), gold });
                }
            }
            Activity::Jungle => {
                self.jungle(a, t);
            }
        }
    }

    /// Seconds until the next last-hit for an agent farming `lane`.
    fn lane_cs_gap(&mut self, a: usize, lane: Lane, t: f64) -> f64 {
        let ag = &self.agents[a];
        let stealing = matches!(ag.behavior, Some(Behavior::LaneSteal { .. }));
        let contested = !stealing
            && self.agents.iter().any(|g| {
                g.info.team == ag.info.team
                    && matches!(g.behavior, Some(Behavior::LaneSteal { lane: l }) if l == lane)
                    && t < self.laning_end
            });
        let support = ag.info.assigned_position == Position::BotSupport && !stealing;
        let (lo, hi) = if stealing {
            (3, 5)
        } else if support {
            (25, 35)
        } else {
            (4, 6)
        };
        let gap = self.rng.random_range(lo..=hi) as f64;
        if contested {
            gap * 2.0
        } else {
            gap
        }
    }

    fn jungle(&mut self, a: usize, t: f64) {
        let team = self.agents[a].info.team;
        let camp = camps(team)[self.agents[a].camp];
        match self.agents[a].camp_leave {
            None => {
                self.move_toward(a, camp, TRAVEL_SPEED);
                if dist(self.agents[a].pos, camp) <= 0.03 {
                    let ag = &self.agents[a];
                    let thief_active = ag.info.assigned_position == Position::Jungle
                        && self.agents.iter().any(|g| {
                            g.info.team == team
                                && matches!(g.behavior, Some(Behavior::JungleSteal { stage }) if {
                                    let (s0, s1) = stage_span(stage, self.duration());
                                    t >= s0 && t <= s1
                                })
                        });
                    let n = if thief_active { 1 } else { self.rng.random_range(2..=3) };
                    let stay = self.rng.random_range(9..=12) as f64;
                    let ag = &mut self.agents[a];
                    ag.camp_cs = (1..=n).map(|i| t + 3.0 * i as f64).collect();
                    ag.camp_leave = Some(t + stay);
                }
            }
            Some(leave) => {
                self.wander(a, camp_spot(camp));
                if t >= leave {
                    let ag = &mut self.agents[a];
                    ag.camp = (ag.camp + 1) % 4;
                    ag.camp_leave = None;
                    ag.camp_cs.clear();
                    ag.wander = None;
                }
            }
        }
        self.record(a, t);
        while self.agents[a].camp_cs.first().is_some_and(|&c| c <= t) {
            self.agents[a].camp_cs.remove(0);
            let gold = self.rng.random_range(30..=50) as f64;
            self.push(t, a, EventPayload::Cs { source: CsSource::jungle_of(team), gold });
        }
    }

    fn move_toward(&mut self, a: usize, goal: Point, speed: f64) -> bool {
        let ag = &mut self.agents[a];
        let d = dist(ag.pos, goal);
        if d <= speed {
            ag.pos = goal;
            true
        } else {
            let f = speed / d;
            ag.pos = (
                round4(ag.pos.0 + f * (goal.0 - ag.pos.0)),
                round4(ag.pos.1 + f * (goal.1 - ag.pos.1)),
            );
            false
        }
    }

    fn wander(&mut self, a: usize, spot: Spot) {
        if !spot.contains(self.agents[a].pos) {
            self.agents[a].wander = None;
            self.move_toward(a, spot.anchor, TRAVEL_SPEED);
            return;
        }
        let target = match self.agents[a].wander {
            Some(w) => w,
            None => {
                let w = spot.random_point(&mut self.rng);
                self.agents[a].wander = Some(w);
                w
            }
        };
        if self.move_toward(a, target, WANDER_SPEED) {
            self.agents[a].wander = None;
        }
    }

    fn kill(&mut self, killer: usize, victim: usize, assists: Vec<usize>, t: f64) {
        let (x, y) = self.agents[victim].pos;
        let payload = EventPayload::Kill {
            victim: self.agents[victim].info.player_id.clone(),
            assists: assists.iter().map(|&i| self.agents[i].info.player_id.clone()).collect(),
            x,
            y,
        };
        self.push(t, killer, payload);
        self.push(t, killer, EventPayload::Gold { amount: 300.0, source: "kill".into() });
        for &i in &assists {
            self.push(t, i, EventPayload::Gold { amount: 150.0, source: "assist".into() });
        }
        let ag = &mut self.agents[victim];
        ag.alive = false;
        ag.respawn_at = (t + 8.0 + 0.02 * t).ceil();
        ag.last_activity = None;
    }

    fn feed_death(&mut self, a: usize, t: f64) {
        let team = self.agents[a].info.team;
        let enemies: Vec<usize> =
            (0..self.agents.len()).filter(|&i| self.agents[i].info.team != team && self.agents[i].alive).collect();
        let Some(&killer) = enemies.choose(&mut self.rng) else {
            return;
        };
        self.kill(killer, a, Vec::new(), t + 0.5);
    }

    fn present(&self, k: usize) -> Vec<usize> {
        let center = self.fights[k].center;
        (0..self.agents.len())
            .filter(|&i| self.agents[i].alive && self.attends(i, k) && dist(self.agents[i].pos, center) <= PRESENT_RADIUS)
            .collect()
    }

    fn fight_tick(&mut self, k: usize, t: f64) {
        let present = self.present(k);
        let n_events = self.rng.random_range(1..=2);
        for _ in 0..n_events {
            let fresh: Vec<usize> = present.iter().copied().filter(|&i| !self.fights[k].acted[i]).collect();
            let actor = match fresh.first() {
                Some(&i) => i,
                None => match present.choose(&mut self.rng) {
                    Some(&i) => i,
                    None => return,
                },
            };
            let team = self.agents[actor].info.team;
            let at = t + self.rng.random_range(0.0..0.85);
            let (x, y) = self.agents[actor].pos;
            let heal = self.fights[k].acted[actor]
                && self.agents[actor].info.assigned_position == Position::BotSupport
                && self.rng.random_bool(0.3);
            let pool: Vec<usize> = present
                .iter()
                .copied()
                .filter(|&i| (self.agents[i].info.team == team) == heal && i != actor)
                .collect();
            let Some(&target) = pool.choose(&mut self.rng) else {
                continue;
            };
            let target_id = self.agents[target].info.player_id.clone();
            let amount = self.rng.random_range(60..=180) as f64;
            let payload = if heal {
                EventPayload::Heal { target: target_id, amount }
            } else {
                EventPayload::Damage { target: target_id, amount, x, y }
            };
            self.fights[k].acted[actor] = true;
            self.push(at, actor, payload);
        }

        if self.fights[k].kill_ticks.contains(&t) {
            let Some(&victim) = present.choose(&mut self.rng) else {
                return;
            };
            let vteam = self.agents[victim].info.team;
            let enemies: Vec<usize> =
                present.iter().copied().filter(|&i| self.agents[i].info.team != vteam).collect();
            let Some(&killer) = enemies.choose(&mut self.rng) else {
                return;
            };
            let mut mates: Vec<usize> = enemies.into_iter().filter(|&i| i != killer).collect();
            mates.shuffle(&mut self.rng);
            mates.truncate(self.rng.random_range(0..=2));
            mates.sort_unstable();
            let kteam = self.agents[killer].team_idx();
            self.fights[k].kills[kteam] += 1;
            self.kill(killer, victim, mates, t + 0.9);
        }
    }

    fn fight_end(&mut self, k: usize, t: f64) {
        let kills = self.fights[k].kills;
        let winner = if kills[0] >= kills[1] { Team::Blue } else { Team::Red };
        let alive: Vec<usize> = (0..self.agents.len())
            .filter(|&i| self.agents[i].alive && self.agents[i].info.team == winner && self.attends(i, k))
            .collect();
        if let Some(&actor) = alive.choose(&mut self.rng) {
            let (x, y) = self.fights[k].center;
            self.push(t, actor, EventPayload::Objective { subtype: ObjectiveKind::Dragon, team: winner, x, y });
        }
    }

    fn into_document(mut self) -> TelemetryDocument {
        let mut samples = Vec::new();
        for ag in &self.agents {
            for seg in &ag.segments {
                for (t, x, y) in compress(seg) {
                    samples.push(PositionSample { t, player_id: ag.info.player_id.clone(), x, y });
                }
            }
        }
        samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.events.sort_by(|a, b| a.t.total_cmp(&b.t));
        TelemetryDocument {
            match_id: self.scenario.match_id(),
            duration_s: self.scenario.duration_s,
            players: self.agents.into_iter().map(|a| a.info).collect(),
            position_samples: samples,
            events: self.events,
        }
    }
}

/// Drops samples that linear interpolation between the kept neighbors
/// reproduces to within [`COMPRESS_TOL`].
fn compress(seg: &[(f64, f64, f64)]) -> Vec<(f64, f64, f64)> {
    const MAX_SPAN: usize = 60;
    if seg.len() <= 2 {
        return seg.to_vec();
    }
    let fits = |i: usize, j: usize| {
        let (ta, xa, ya) = seg[i];
        let (tb, xb, yb) = seg[j];
        (i + 1..j).all(|m| {
            let (t, x, y) = seg[m];
            let f = (t - ta) / (tb - ta);
            (xa + f * (xb - xa) - x).abs() <= COMPRESS_TOL && (ya + f * (yb - ya) - y).abs() <= COMPRESS_TOL
        })
    };
    let mut out = vec![seg[0]];
    let mut i = 0;
    while i < seg.len() - 1 {
        let mut j = i + 1;
        while j + 1 < seg.len() && j + 1 - i <= MAX_SPAN && fits(i, j + 1) {
            j += 1;
        }
        out.push(seg[j]);
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_keeps_corners() {
        let seg: Vec<_> = (0..10).map(|k| (k as f64, 0.1 * k as f64 / 10.0, 0.2)).collect();
        assert_eq!(compress(&seg), vec![seg[0], seg[9]]);
        let mut bent = seg.clone();
        bent.extend((10..20).map(|k| (k as f64, 0.09, 0.2 + 0.01 * (k - 9) as f64)));
        let c = compress(&bent);
        assert!(c.contains(&bent[9]));
        assert_eq!(c.last(), bent.last());
    }

    #[test]
    fn default_spots_sit_in_their_zones() {
        use grieferlens_core::spatial::{default_layout, home_zone, ZoneId};
        let layout = default_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in standard_roster() {
            let spot = home_spot(&p);
            let want = home_zone(p.assigned_position, p.team);
            for _ in 0..500 {
                let (x, y) = spot.random_point(&mut rng);
                assert_eq!(layout.classify(x, y), want, "{} at ({x}, {y})", p.player_id);
            }
        }
        for team in [Team::Blue, Team::Red] {
            for c in camps(team) {
                for _ in 0..200 {
                    let (x, y) = camp_spot(c).random_point(&mut rng);
                    assert_eq!(layout.classify(x, y), ZoneId::jungle_of(team));
                }
            }
        }
    }
}
