//! Text formats: trip and feature CSV, histogram and KS CSV, model and
//! report JSON.

mod csvio;
pub mod features;
pub mod json;
pub mod stats;
pub mod trips;

pub use features::{parse_features, write_features, FEATURE_HEADER};
pub use json::{model_from_json, model_to_json, report_from_json, report_to_json};
pub use trips::{parse_trips, write_trips, TRIP_HEADER};
