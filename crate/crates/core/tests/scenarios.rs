//! Worked examples checked against independent hand computations.

use grieferlens_core::config::DetectorConfig;
use grieferlens_core::detect::{detect_afk, detect_lane_stealing, run_all_detectors, NO_SUSPICION};
use grieferlens_core::fixtures::MatchBuilder;
use grieferlens_core::metrics::{
    contribution_series, detect_team_fights, gold_series, ContributionWeights, TeamFightParams,
};
use grieferlens_core::report::SummaryDocument;
use grieferlens_core::spatial::{
    classify_zone, default_layout, dwell_heatmap, path_displacement, trajectory, zone_occupancy, ZoneId,
};
use grieferlens_core::telemetry::{CsSource, TimeRange};

fn point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let u = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p.0 - a.0 - u * dx).hypot(p.1 - a.1 - u * dy)
}

#[test]
fn off_corridor_point_falls_back_to_blue_jungle() {
    let p = (0.7, 0.2);
    // Every corridor predicate of the default layout, evaluated directly.
    assert!(point_segment(p, (0.05, 0.95), (0.95, 0.05)) > 0.05);
    assert!(point_segment(p, (0.05, 0.05), (0.95, 0.95)) > 0.06);
    let top = point_segment(p, (0.05, 0.05), (0.05, 0.95)).min(point_segment(p, (0.05, 0.95), (0.95, 0.95)));
    assert!(top > 0.07);
    let bot = point_segment(p, (0.05, 0.05), (0.95, 0.05)).min(point_segment(p, (0.95, 0.05), (0.95, 0.95)));
    assert!(bot > 0.07);
    assert!(p.0 + p.1 < 1.0);
    assert_eq!(classify_zone(&default_layout(), p.0, p.1).unwrap(), ZoneId::JungleBlue);
}

#[test]
fn diagonal_walker_splits_between_quadrants() {
    let m = MatchBuilder::new(300.0)
        .path("P01", &[(0.0, 0.1, 0.1), (80.0, 0.9, 0.9)])
        .build();
    let h = dwell_heatmap(&m, "P01", 0.0, 80.0, 2).unwrap();
    // Oracle: tick k sits at 0.1 + 0.01 k on both axes.
    let mut expect = [[0.0; 2]; 2];
    for k in 0..=80 {
        let v: f64 = 0.1 + 0.8 * k as f64 / 80.0;
        let i = ((v * 2.0).floor() as usize).min(1);
        expect[i][i] += 1.0;
    }
    assert_eq!(h.cells[0][0], expect[0][0]);
    assert_eq!(h.cells[1][1], expect[1][1]);
    assert_eq!(h.cells[0][1], 0.0);
    assert_eq!(h.cells[1][0], 0.0);
    assert!((h.cells[0][0] - 40.0).abs() <= 1.0 && (h.cells[1][1] - 40.0).abs() <= 1.0);
}

#[test]
fn stationary_dwell_and_single_tick() {
    let m = MatchBuilder::new(300.0).stationary("P01", 0.5, 0.5).build();
    let h = dwell_heatmap(&m, "P01", 100.0, 140.0, 64).unwrap();
    let cells: Vec<_> = h.nonzero().collect();
    assert_eq!(cells, vec![(32, 32, 41.0)]);
    assert_eq!(dwell_heatmap(&m, "P01", 50.0, 50.0, 64).unwrap().total(), 1.0);
}

#[test]
fn mid_walker_occupancy_matches_brute_force() {
    let m = MatchBuilder::new(300.0)
        .path("P02", &[(0.0, 0.2, 0.2), (60.0, 0.8, 0.8)])
        .build();
    let occ = zone_occupancy(&m, &default_layout(), "P02", 0.0, 60.0).unwrap();
    let river = (0..=60)
        .map(|k| 0.2 + 0.6 * k as f64 / 60.0)
        .filter(|&v| ((v + v - 1.0) / 2f64.sqrt()).abs() <= 0.05)
        .count() as f64;
    assert_eq!(occ[&ZoneId::River], river);
    assert_eq!(occ[&ZoneId::MidLane] + occ[&ZoneId::River], 61.0);
}

#[test]
fn occupancy_is_zero_while_dead() {
    let m = MatchBuilder::new(300.0)
        .stationary("P01", 0.03, 0.03)
        .kill(10.0, "P06", "P01", &[], (0.3, 0.3))
        .respawn(200.0, "P01")
        .build();
    let occ = zone_occupancy(&m, &default_layout(), "P01", 50.0, 150.0).unwrap();
    assert!(occ.values().all(|v| *v == 0.0));
    let occ = zone_occupancy(&m, &default_layout(), "P01", 200.0, 260.0).unwrap();
    assert_eq!(occ[&ZoneId::FountainBlue], 61.0);
}

#[test]
fn trajectory_and_displacement_examples() {
    let m = MatchBuilder::new(300.0)
        .path("P01", &[(0.0, 0.0, 0.0), (10.0, 0.3, 0.4), (20.0, 0.0, 0.0)])
        .kill(40.0, "P06", "P01", &[], (0.0, 0.0))
        .respawn(50.0, "P01")
        .build();
    let (net, path) = path_displacement(&m, "P01", 0.0, 10.0).unwrap();
    assert!((net - 0.5).abs() < 1e-12 && (path - 0.5).abs() < 1e-12);
    let (net, path) = path_displacement(&m, "P01", 0.0, 20.0).unwrap();
    assert!(net.abs() < 1e-12 && (path - 1.0).abs() < 1e-12);

    assert_eq!(trajectory(&m, "P01", 0.0, 30.0, 1.0).unwrap()[0].len(), 31);
    let split = trajectory(&m, "P01", 30.0, 60.0, 1.0).unwrap();
    assert_eq!(split.len(), 2);
    assert_eq!(split[0].last().unwrap().t, 40.0);
    assert_eq!(split[1][0].t, 50.0);
    assert_eq!(trajectory(&m, "P01", 5.0, 5.0, 1.0).unwrap(), vec![vec![split_point(&m, 5.0)]]);
}

fn split_point(m: &grieferlens_core::telemetry::MatchTelemetry, t: f64) -> grieferlens_core::spatial::TrackPoint {
    let (x, y) = m.position_at("P01", t).unwrap();
    grieferlens_core::spatial::TrackPoint { t, x, y }
}

#[test]
fn twenty_second_windows() {
    let m = MatchBuilder::new(600.0).gold(25.0, "P01", 300.0).cs(25.0, "P01", CsSource::Top, 20.0).build();
    let c = contribution_series(&m, "P01", &ContributionWeights::default(), 20.0).unwrap();
    assert_eq!(c.values.len(), 30);
    assert_eq!(c.values[1], 1.0);
    let g = gold_series(&m, "P01", 20.0).unwrap();
    assert_eq!(g.values[1], 320.0);
    assert_eq!(g.values.iter().sum::<f64>(), 320.0);
}

#[test]
fn burst_of_damage_is_one_fight() {
    let pairs = [("P01", "P06"), ("P02", "P07"), ("P06", "P01"), ("P07", "P02")];
    let mut b = MatchBuilder::new(600.0);
    for k in 0..12 {
        let (a, t) = pairs[k % 4];
        let at = if k == 11 { 107.0 } else { 100.0 + 0.7 * k as f64 };
        b = b.damage(at, a, t, 30.0, (0.5, 0.5));
    }
    let fights = detect_team_fights(&b.build(), &TeamFightParams::default());
    assert_eq!(fights.len(), 1);
    assert_eq!(fights[0].range(), TimeRange(100.0, 107.0));
    assert_eq!(fights[0].participants, vec!["P01", "P02", "P06", "P07"]);
}

#[test]
fn lane_steal_example_serializes_rounded_severity() {
    let mut b = MatchBuilder::new(1200.0);
    for k in 0..100 {
        let who = if k % 5 < 2 { "P02" } else { "P05" };
        b = b.cs(100.0 + 4.5 * k as f64, who, CsSource::Bot, 20.0);
    }
    let m = b.build();
    let f = detect_lane_stealing(&m, &DetectorConfig::default()).unwrap();
    assert_eq!(f.len(), 1);
    let json = serde_json::to_value(&f[0]).unwrap();
    assert_eq!(json["severity"], serde_json::json!(0.6667));
    assert_eq!(
        f[0].explanation,
        "P02 (Mage) took 40 CS in the bot lane (40.0% of team) during the laning phase."
    );
}

#[test]
fn afk_explanation_mentions_total() {
    let mut b = MatchBuilder::new(600.0);
    for i in 1..=10 {
        let id = format!("P{i:02}");
        if id == "P03" {
            continue;
        }
        let mut t = 0.0;
        let mut k = 0;
        while t <= 600.0 {
            b = b.sample(&id, t, if k % 2 == 0 { 0.2 } else { 0.5 }, 0.3);
            t += 20.0;
            k += 1;
        }
    }
    let b = b.path("P03", &[(0.0, 0.2, 0.4), (20.0, 0.5, 0.4), (40.0, 0.25, 0.4), (200.0, 0.25, 0.4)]);
    let b = b.path("P03", &[(400.0, 0.25, 0.4), (420.0, 0.55, 0.4), (440.0, 0.25, 0.4), (460.0, 0.55, 0.4)]);
    let b = b.path("P03", &[(480.0, 0.25, 0.4), (500.0, 0.55, 0.4), (520.0, 0.25, 0.4), (540.0, 0.55, 0.4)]);
    let m = b.path("P03", &[(560.0, 0.25, 0.4), (580.0, 0.55, 0.4), (600.0, 0.25, 0.4)]).build();
    let f = detect_afk(&m, &default_layout(), &DetectorConfig::default()).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].time_ranges, vec![TimeRange(40.0, 400.0)]);
    assert!(f[0].explanation.contains("360.0"));
    assert!(f[0].explanation.contains("away from keyboard"));
}

#[test]
fn quiet_match_has_ten_clean_summaries() {
    let mut b = MatchBuilder::new(900.0);
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
    for (i, (x, y)) in homes.iter().enumerate() {
        let id = format!("P{:02}", i + 1);
        // Small back-and-forth around home so nobody reads as idle.
        let mut t = 0.0;
        let mut k = 0;
        while t <= 900.0 {
            let dx = if k % 2 == 0 { 0.0 } else { 0.02 };
            b = b.sample(&id, t, x + dx - 0.01, *y);
            t += 10.0;
            k += 1;
        }
    }
    let m = b.build();
    let cfg = DetectorConfig::default();
    let s = run_all_detectors(&m, &default_layout(), &cfg).unwrap();
    assert_eq!(s.len(), 10);
    assert!(s.iter().all(|p| p.findings.is_empty() && p.suspicion_paragraph == NO_SUSPICION));
    let doc = SummaryDocument { match_id: m.match_id(), config_hash: &cfg.hash(), players: &s };
    let v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
    assert_eq!(v["players"][0]["player_id"], "P01");
    assert_eq!(v["players"][0]["findings"], serde_json::json!([]));
}
