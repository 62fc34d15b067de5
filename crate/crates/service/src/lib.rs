//! HTTP service over a directory of ingested matches: detector summaries,
//! replay payloads (timeline, heatmap, trajectory) and reviewer
//! annotations.

pub mod annotations;
pub mod api;
pub mod error;
pub mod store;
pub mod views;

pub use api::router;
pub use error::{ApiError, StoreError};
pub use store::{Ingested, Store};
