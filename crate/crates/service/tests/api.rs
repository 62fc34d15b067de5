mod common;

use axum::http::{Method, StatusCode};
use common::{app, call, dwell_match, get, post, simulated};
use grieferlens_core::detect::NO_SUSPICION;
use grieferlens_core::fixtures::MatchBuilder;
use grieferlens_simgen::Behavior;
use serde_json::{json, Value};

#[tokio::test]
async fn ingest_is_idempotent_and_conflicts_on_new_content() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let doc = simulated(1, None);

    let r = post(&app, "/matches", doc.clone()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json(), json!({"match_id": "sim-1"}));
    let r = post(&app, "/matches", doc).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["match_id"], "sim-1");

    // Same id, different seed content.
    let mut other: Value = serde_json::from_str(&simulated(2, None)).unwrap();
    other["match_id"] = json!("sim-1");
    let r = post(&app, "/matches", other.to_string()).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["error"]["code"], "conflict");

    let list = get(&app, "/matches").await.json();
    assert_eq!(list.as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn ingest_rejects_bad_documents() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let mut doc: Value = serde_json::from_str(&simulated(1, None)).unwrap();
    doc["players"].as_array_mut().unwrap().pop();
    let r = post(&app, "/matches", doc.to_string()).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let err = r.json()["error"].clone();
    assert_eq!(err["code"], "invariant_violation");
    assert_eq!(err["path"], "players");
    assert!(err["message"].as_str().unwrap().contains("10"), "{err}");

    let r = post(&app, "/matches", "{not json").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"]["code"], "malformed_input");

    let bad_id = MatchBuilder::new(100.0).match_id("../escape").document().to_json();
    let r = post(&app, "/matches", bad_id).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"]["path"], "match_id");
}

#[tokio::test]
async fn summaries_for_baseline_and_afk() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(101, None)).await;
    post(&app, "/matches", simulated(7, Some(("P03", Behavior::Afk { t0: 200.0, t1: 400.0 })))).await;

    let base = get(&app, "/matches/sim-101/summary").await.json();
    let players = base["players"].as_array().unwrap();
    assert_eq!(players.len(), 10);
    for p in players {
        assert_eq!(p["suspicion_paragraph"], NO_SUSPICION);
        assert!(p["hero_type"].is_string() && p["assigned_position"].is_string());
        assert!(p["report_count"].is_u64());
    }

    let afk = get(&app, "/matches/sim-7/summary").await.json();
    let p03 = afk["players"].as_array().unwrap().iter().find(|p| p["player_id"] == "P03").unwrap();
    assert!(p03["findings"].as_array().unwrap().iter().any(|f| f["griefer_type"] == "afk"));

    let r = get(&app, "/matches/nope/summary").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["error"]["code"], "unknown_match");
}

#[tokio::test]
async fn timeline_matches_summary() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(7, Some(("P03", Behavior::Afk { t0: 200.0, t1: 400.0 })))).await;
    let t = get(&app, "/matches/sim-7/timeline?player=P03").await.json();
    assert_eq!(t["series"]["contribution"]["values"].as_array().unwrap().len(), 60);
    assert_eq!(t["series"]["gold"]["values"].as_array().unwrap().len(), 60);
    assert_eq!(t["team_fights"].as_array().unwrap().len(), 4);

    let summary = get(&app, "/matches/sim-7/summary").await.json();
    let mut from_summary = Vec::new();
    for p in summary["players"].as_array().unwrap() {
        for f in p["findings"].as_array().unwrap() {
            from_summary.push((f["player_id"].clone(), f["griefer_type"].clone(), f["time_ranges"].clone()));
        }
    }
    let from_timeline: Vec<_> = t["suspicious_ranges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["player_id"].clone(), r["griefer_type"].clone(), r["ranges"].clone()))
        .collect();
    assert_eq!(from_timeline, from_summary);
    assert!(from_timeline.iter().all(|(p, _, _)| p == "P03"));

    let kinds: Vec<&str> = t["key_events"].as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"kill") && kinds.contains(&"death") && kinds.contains(&"recall"));

    let bare = get(&app, "/matches/sim-7/timeline").await.json();
    assert!(bare["series"].is_null());
    assert_eq!(get(&app, "/matches/sim-7/timeline?player=P42").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn heatmap_hot_cells_and_bad_windows() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", dwell_match("dwell40", 40.0)).await;
    post(&app, "/matches", dwell_match("dwell25", 25.0)).await;

    let h = get(&app, "/matches/dwell40/heatmap?player=P01").await.json();
    assert_eq!(h["grid_n"], 64);
    let hot: Vec<&Value> = h["cells"].as_array().unwrap().iter().filter(|c| c["hot"] == true).collect();
    assert_eq!(hot.len(), 1);
    assert_eq!((hot[0]["ix"].as_u64(), hot[0]["iy"].as_u64()), (Some(32), Some(32)));
    assert!(hot[0]["seconds"].as_f64().unwrap() >= 41.0);
    assert_eq!(h["total_s"], 301.0);

    let h = get(&app, "/matches/dwell25/heatmap?player=P01").await.json();
    assert!(h["cells"].as_array().unwrap().iter().all(|c| c["hot"] == false));

    let h = get(&app, "/matches/dwell40/heatmap?player=P01&from=100&to=140&grid=8").await.json();
    assert_eq!(h["cells"], json!([{"ix": 4, "iy": 4, "seconds": 41.0, "hot": true}]));

    for q in ["from=200&to=100", "from=-1", "to=301", "from=abc", "grid=0", "grid=10000"] {
        let r = get(&app, &format!("/matches/dwell40/heatmap?player=P01&{q}")).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{q}");
    }
    assert_eq!(get(&app, "/matches/dwell40/heatmap").await.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/matches/dwell40/heatmap?player=P99").await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/matches/zzz/heatmap?player=P01").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn trajectory_breaks_at_death() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let doc = MatchBuilder::new(300.0)
        .match_id("deaths")
        .path("P01", &[(0.0, 0.1, 0.1), (100.0, 0.5, 0.5)])
        .kill(120.0, "P06", "P01", &[], (0.5, 0.5))
        .respawn(150.0, "P01")
        .document()
        .to_json();
    post(&app, "/matches", doc).await;

    let t = get(&app, "/matches/deaths/trajectory?player=P01&from=0&to=100").await.json();
    let lines = t["polylines"].as_array().unwrap();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].as_array().unwrap().len(), 101);

    let t = get(&app, "/matches/deaths/trajectory?player=P01&from=100&to=200").await.json();
    let lines = t["polylines"].as_array().unwrap();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].as_array().unwrap().last().unwrap()["t"], 120.0);
    assert_eq!(lines[1][0]["t"], 150.0);

    assert_eq!(get(&app, "/matches/deaths/trajectory?player=P77").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn annotation_round_trips_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(3, None)).await;

    let label = json!({"author": "rev1", "target_player": "P03", "kind": "label",
                       "griefer_types": ["non_participation", "jungle_stealing", "jungle_stealing"]});
    let r = post(&app, "/matches/sim-3/annotations", label.to_string()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let stored = r.json();
    assert_eq!(stored["annotation_id"], "sim-3-a00001");
    assert_eq!(stored["griefer_types"], json!(["jungle_stealing", "non_participation"]));

    let note = json!({"author": "rev1", "target_player": "P03", "kind": "note", "time_range": [780.0, 840.0],
                      "tags": ["aimless", "fountain"], "text": "wanders between fountain and jungle"});
    let r = post(&app, "/matches/sim-3/annotations", note.to_string()).await;
    assert_eq!(r.status, StatusCode::CREATED);

    let list = get(&app, "/matches/sim-3/annotations").await.json();
    let list = list.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0], stored);
    assert_eq!(list[1]["time_range"], json!([780.0, 840.0]));
    assert_eq!(list[1]["tags"], json!(["aimless", "fountain"]));

    let bad = [
        (json!({"target_player": "P03", "kind": "note", "time_range": [780.0, 1300.0], "text": "x"}), "time_range"),
        (json!({"target_player": "P03", "kind": "note", "time_range": [900.0, 800.0], "text": "x"}), "time_range"),
        (json!({"target_player": "P03", "kind": "label"}), "griefer_types"),
        (json!({"target_player": "P03", "kind": "note"}), "text"),
        (json!({"target_player": "P11", "kind": "note", "text": "x"}), "target_player"),
        (json!({"target_player": "P03", "kind": "note", "text": "x", "match_id": "sim-9"}), "match_id"),
    ];
    for (body, path) in bad {
        let r = post(&app, "/matches/sim-3/annotations", body.to_string()).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(r.json()["error"]["path"], path);
    }
    let r = post(&app, "/matches/sim-3/annotations", r#"{"target_player": "P03", "kind": "vote"}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = post(&app, "/matches/sim-9/annotations", label.to_string()).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn delete_tombstones_and_ids_are_not_reused() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(3, None)).await;
    let body = json!({"target_player": "P05", "kind": "note", "text": "check bot"}).to_string();
    post(&app, "/matches/sim-3/annotations", body.clone()).await;
    post(&app, "/matches/sim-3/annotations", body.clone()).await;

    let r = call(&app, Method::DELETE, "/matches/sim-3/annotations/sim-3-a00002", None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["annotation_id"], "sim-3-a00002");
    let r = call(&app, Method::DELETE, "/matches/sim-3/annotations/sim-3-a00002", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::DELETE, "/matches/sim-3/annotations/sim-3-a00099", None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);

    let ids: Vec<Value> =
        get(&app, "/matches/sim-3/annotations").await.json().as_array().unwrap().iter().map(|a| a["annotation_id"].clone()).collect();
    assert_eq!(ids, vec![json!("sim-3-a00001")]);

    // History survives in the log, and a restart keeps counting from it.
    let log = std::fs::read_to_string(dir.path().join("matches/sim-3/annotations.ndjson")).unwrap();
    assert_eq!(log.lines().count(), 3);
    let app = common::app(dir.path());
    let r = post(&app, "/matches/sim-3/annotations", body).await;
    assert_eq!(r.json()["annotation_id"], "sim-3-a00003");
}

#[tokio::test]
async fn export_combines_sources_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(7, Some(("P03", Behavior::Afk { t0: 200.0, t1: 400.0 })))).await;
    post(&app, "/matches", simulated(101, None)).await;

    let empty = get(&app, "/matches/sim-101/labels/export").await.json();
    assert_eq!(empty["match_id"], "sim-101");
    assert_eq!(empty["entries"], json!([]));
    assert!(empty["config_hash"].is_string());

    let label = json!({"target_player": "P03", "kind": "label", "griefer_types": ["afk"]});
    post(&app, "/matches/sim-7/annotations", label.to_string()).await;
    let a = get(&app, "/matches/sim-7/labels/export").await;
    let doc = a.json();
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["source"], "algorithm");
    assert_eq!(entries[0]["griefer_type"], "afk");
    assert_eq!(entries[1]["source"], "human");
    assert_eq!(entries[1]["griefer_types"], json!(["afk"]));

    let b = get(&app, "/matches/sim-7/labels/export").await;
    assert_eq!(a.bytes, b.bytes);
}

#[tokio::test]
async fn reads_are_byte_identical_between_writes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(9, Some(("P08", Behavior::NonParticipation)))).await;
    for uri in [
        "/matches",
        "/matches/sim-9/summary",
        "/matches/sim-9/timeline?player=P08",
        "/matches/sim-9/heatmap?player=P08&from=300&to=700",
        "/matches/sim-9/trajectory?player=P08&from=0&to=200",
        "/matches/sim-9/annotations",
        "/matches/sim-9/labels/export",
    ] {
        let a = get(&app, uri).await;
        let b = get(&app, uri).await;
        assert_eq!(a.status, StatusCode::OK, "{uri}");
        assert_eq!(a.bytes, b.bytes, "{uri}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_posts_lose_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    post(&app, "/matches", simulated(4, None)).await;
    let n = 64;
    let tasks: Vec<_> = (0..n)
        .map(|i| {
            let app = app.clone();
            tokio::spawn(async move {
                let body = json!({"target_player": "P02", "kind": "note", "text": format!("note {i}")});
                post(&app, "/matches/sim-4/annotations", body.to_string()).await.status
            })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::CREATED);
    }
    let list = get(&app, "/matches/sim-4/annotations").await.json();
    let list = list.as_array().unwrap();
    assert_eq!(list.len(), n);
    let mut texts: Vec<&str> = list.iter().map(|a| a["text"].as_str().unwrap()).collect();
    texts.sort();
    texts.dedup();
    assert_eq!(texts.len(), n);
    let mut ids: Vec<&str> = list.iter().map(|a| a["annotation_id"].as_str().unwrap()).collect();
    ids.dedup();
    assert_eq!(ids.len(), n);
}
