use grieferlens_core::fixtures::MatchBuilder;
use grieferlens_core::telemetry::{CsSource, MatchTelemetry};
use proptest::collection::vec;
use proptest::prelude::*;

pub const IDS: [&str; 10] = ["P01", "P02", "P03", "P04", "P05", "P06", "P07", "P08", "P09", "P10"];

const SOURCES: [CsSource; 5] = [
    CsSource::Top,
    CsSource::Mid,
    CsSource::Bot,
    CsSource::JungleBlue,
    CsSource::JungleRed,
];

/// (kind, time fraction, actor, other, amount, x, y)
pub type RawEvent = (u8, f64, usize, usize, f64, f64, f64);

/// Builds a valid match from raw draws. Kills of already-dead players are
/// dropped and every kill gets a respawn 10 s later if that fits.
pub fn assemble(
    duration: f64,
    starts: &[(f64, f64)],
    samples: &[(usize, f64, f64, f64)],
    events: &[RawEvent],
    gold_scale: f64,
) -> MatchTelemetry {
    let mut b = MatchBuilder::new(duration);
    for (i, &(x, y)) in starts.iter().enumerate() {
        b = b.sample(IDS[i], 0.0, x, y);
    }
    for &(p, tf, x, y) in samples {
        b = b.sample(IDS[p], tf * duration, x, y);
    }
    let mut sorted: Vec<RawEvent> = events.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut respawn_at = [f64::NEG_INFINITY; 10];
    for (kind, tf, actor, other, amount, x, y) in sorted {
        let t = tf * duration;
        b = match kind {
            0 => b.damage(t, IDS[actor], IDS[other], amount, (x, y)),
            1 => b.damage(t, IDS[actor], "tower", amount, (x, y)),
            2 => b.cs(t, IDS[actor], SOURCES[other % 5], amount * gold_scale),
            3 => b.gold(t, IDS[actor], amount * gold_scale),
            4 => {
                if actor == other || t <= respawn_at[other] {
                    continue;
                }
                let assist = IDS[(actor + 1) % 10];
                let assists: Vec<&str> = if assist != IDS[other] { vec![assist] } else { vec![] };
                b = b.kill(t, IDS[actor], IDS[other], &assists, (x, y));
                let r = t + 10.0;
                if r <= duration {
                    respawn_at[other] = r;
                    b.respawn(r, IDS[other])
                } else {
                    respawn_at[other] = f64::INFINITY;
                    b
                }
            }
            _ => b.recall(t, IDS[actor]),
        };
    }
    b.build()
}

pub fn raw_event() -> impl Strategy<Value = RawEvent> {
    (0u8..6, 0.0f64..=1.0, 0usize..10, 0usize..10, 1.0f64..400.0, 0.0f64..=1.0, 0.0f64..=1.0)
}

pub fn arb_parts() -> impl Strategy<Value = (f64, Vec<(f64, f64)>, Vec<(usize, f64, f64, f64)>, Vec<RawEvent>)> {
    (
        60.0f64..1500.0,
        vec((0.0f64..=1.0, 0.0f64..=1.0), 10),
        vec((0usize..10, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0), 0..120),
        vec(raw_event(), 0..150),
    )
}

pub fn arb_match() -> impl Strategy<Value = MatchTelemetry> {
    arb_parts().prop_map(|(d, starts, samples, events)| assemble(d, &starts, &samples, &events, 1.0))
}
