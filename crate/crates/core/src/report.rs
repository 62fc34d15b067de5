//! Stable JSON output for summaries. Floats are rounded to four decimals and
//! field order follows struct declaration order, so equal inputs always
//! produce byte-identical documents.

use serde::{Serialize, Serializer};

use crate::detect::PlayerSummary;
use crate::telemetry::TimeRange;

pub fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    // Avoid emitting "-0.0".
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round4(*x))
}

pub fn ser_ranges<S: Serializer>(ranges: &[TimeRange], s: S) -> Result<S::Ok, S::Error> {
    let rounded: Vec<[f64; 2]> = ranges.iter().map(|r| [round4(r.0), round4(r.1)]).collect();
    rounded.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryDocument<'a> {
    pub match_id: &'a str,
    pub config_hash: &'a str,
    pub players: &'a [PlayerSummary],
}

impl SummaryDocument<'_> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summaries always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries always serialize")
    }
}
