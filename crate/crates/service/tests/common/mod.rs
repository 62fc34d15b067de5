#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use grieferlens_core::config::DetectorConfig;
use grieferlens_core::fixtures::MatchBuilder;
use grieferlens_service::{router, Store};
use grieferlens_simgen::{generate_match, Behavior, Injection, Scenario};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn app(dir: &Path) -> Router {
    router(Arc::new(Store::open(dir, DetectorConfig::default()).unwrap()))
}

pub struct Reply {
    pub status: StatusCode,
    pub bytes: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, bytes }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None).await
}

pub async fn post(app: &Router, uri: &str, body: impl Into<String>) -> Reply {
    call(app, Method::POST, uri, Some(body.into())).await
}

pub fn simulated(seed: u64, injection: Option<(&str, Behavior)>) -> String {
    let mut s = Scenario::baseline(seed);
    if let Some((p, behavior)) = injection {
        s = s.with(Injection { player_id: p.into(), behavior });
    }
    generate_match(&s).unwrap().0.to_json()
}

/// P01 walks to the map center, stands there for `dwell` seconds from
/// t = 100, then keeps walking until the end. Everyone else stands still.
pub fn dwell_match(id: &str, dwell: f64) -> String {
    let mut b = MatchBuilder::new(300.0).match_id(id);
    let leave = 100.0 + dwell;
    b = b.path("P01", &[(0.0, 0.1, 0.1), (100.0, 0.5, 0.5), (leave, 0.5, 0.5), (leave + 60.0, 0.9, 0.5), (300.0, 0.9, 0.95)]);
    for (i, id) in ["P02", "P03", "P04", "P05", "P06", "P07", "P08", "P09", "P10"].iter().enumerate() {
        b = b.stationary(id, 0.05 + 0.1 * i as f64, 0.05);
    }
    b.document().to_json()
}
