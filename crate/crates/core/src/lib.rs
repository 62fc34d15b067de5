//! Telemetry analysis for MOBA matches: parsing and validation, spatial
//! queries over player movement, windowed economy and combat metrics, and
//! rule-based griefer detectors with templated explanations.

pub mod config;
pub mod detect;
pub mod error;
pub mod explain;
pub mod fixtures;
pub mod metrics;
pub mod report;
pub mod spatial;
pub mod telemetry;

pub use error::{Error, Result};
