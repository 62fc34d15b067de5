//! Seeded match generator for exercising the detectors.
//!
//! A [`Scenario`] names a seed, a duration and a list of griefer
//! injections. [`generate_match`] turns it into schema-valid telemetry and
//! a ground-truth label file; the same scenario always produces the same
//! bytes.

pub mod corpus;
pub mod error;
pub mod scenario;
pub mod sim;

pub use corpus::{archetype_scenario, generate_corpus, Manifest, ManifestEntry};
pub use error::{Result, SimError};
pub use scenario::{Behavior, GroundTruth, Injection, Label, Scenario};
pub use sim::generate_match;
