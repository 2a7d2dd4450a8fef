//! Travel mode detection from GPS trajectories.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithmic piece
//! of the pipeline: record/trip types, great-circle motion series, boxplot
//! error filtering, interval subsampling, movement features, two-sample KS
//! statistics, a CART random forest, cross-validation and a seeded synthetic
//! trip generator. File formats, the CLI and threaded training live in the
//! `modetrace` crate.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod eval;
pub mod features;
pub mod forest;
pub mod geodesy;
pub mod model;
pub mod preprocess;
pub mod resample;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use eval::{EvalReport, FoldPlan, KFoldOptions};
pub use features::{dataset_features, extract_features, FeatureConfig, FeatureVector};
pub use forest::{ForestModel, ForestParams, TreeNode};
pub use geodesy::{haversine, motion_series, MotionSeries};
pub use model::{Dataset, GpsRecord, Mode, Trip};
pub use preprocess::{error_box_stats, filter_by_error, BoxStats, FilterOutcome};
pub use resample::{subsample, subsample_sweep, DEFAULT_SWEEP};
pub use stats::{ecdf_at, ks_statistic, KsResult};
pub use synth::{generate_dataset, generate_trip, SynthSpec};
