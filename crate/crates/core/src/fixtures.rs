//! Hand-built matches for tests and examples.

use crate::telemetry::{
    standard_roster, CsSource, EventPayload, GameEvent, MatchTelemetry, PositionSample,
    TelemetryDocument,
};

/// Assembles a standard-roster match; samples and events may be added in
/// any order and are stably sorted by time on [`MatchBuilder::build`].
#[derive(Debug, Clone)]
pub struct MatchBuilder {
    doc: TelemetryDocument,
}

impl MatchBuilder {
    pub fn new(duration_s: f64) -> Self {
        MatchBuilder {
            doc: TelemetryDocument {
                match_id: "fixture".into(),
                duration_s,
                players: standard_roster(),
                position_samples: Vec::new(),
                events: Vec::new(),
            },
        }
    }

    pub fn match_id(mut self, id: &str) -> Self {
        self.doc.match_id = id.into();
        self
    }

    pub fn sample(mut self, player: &str, t: f64, x: f64, y: f64) -> Self {
        self.doc.position_samples.push(PositionSample { t, player_id: player.into(), x, y });
        self
    }

    /// A single sample at t = 0; the player holds that position all match.
    pub fn stationary(self, player: &str, x: f64, y: f64) -> Self {
        self.sample(player, 0.0, x, y)
    }

    pub fn path(mut self, player: &str, points: &[(f64, f64, f64)]) -> Self {
        for &(t, x, y) in points {
            self = self.sample(player, t, x, y);
        }
        self
    }

    pub fn event(mut self, t: f64, actor: &str, payload: EventPayload) -> Self {
        self.doc.events.push(GameEvent { t, actor: actor.into(), payload });
        self
    }

    pub fn kill(self, t: f64, actor: &str, victim: &str, assists: &[&str], at: (f64, f64)) -> Self {
        self.event(
            t,
            actor,
            EventPayload::Kill {
                victim: victim.into(),
                assists: assists.iter().map(|s| s.to_string()).collect(),
                x: at.0,
                y: at.1,
            },
        )
    }

    pub fn respawn(self, t: f64, player: &str) -> Self {
        self.event(t, player, EventPayload::Respawn)
    }

    pub fn recall(self, t: f64, player: &str) -> Self {
        self.event(t, player, EventPayload::Recall)
    }

    pub fn damage(self, t: f64, actor: &str, target: &str, amount: f64, at: (f64, f64)) -> Self {
        self.event(t, actor, EventPayload::Damage { target: target.into(), amount, x: at.0, y: at.1 })
    }

    pub fn cs(self, t: f64, actor: &str, source: CsSource, gold: f64) -> Self {
        self.event(t, actor, EventPayload::Cs { source, gold })
    }

    pub fn gold(self, t: f64, actor: &str, amount: f64) -> Self {
        self.event(t, actor, EventPayload::Gold { amount, source: "passive".into() })
    }

    pub fn document(mut self) -> TelemetryDocument {
        self.doc.position_samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.doc.events.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.doc
    }

    pub fn build(self) -> MatchTelemetry {
        MatchTelemetry::from_document(self.document()).expect("fixture match is valid")
    }
}
