//! The ten movement features computed per moving segment.
//!
//! With `D_i` the great-circle distance and `V_i = D_i / dt_i` the velocity
//! between records `i` and `i + 1`:
//!
//! | feature          | value                                        |
//! |------------------|----------------------------------------------|
//! | distance         | `Σ D_i`                                      |
//! | time             | `t_n - t_1`                                  |
//! | points           | `n`                                          |
//! | vcr / mvcr       | mean / max of `|V_{i+1} - V_i| / V_i`        |
//! | max_acceleration | max of `|V_{i+1} - V_i| / dt_i`              |
//! | avgspeed_1       | `distance / time`                            |
//! | minspeed/maxspeed| min / max of `V_i`                           |
//! | avgspeed_2       | `Σ V_i / points` (or `/ (n - 1)`)            |
//!
//! Change-rate pairs whose base velocity is at most [`ZERO_VELOCITY_EPS`] are
//! skipped; when none remain vcr and mvcr are both zero.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesy::{motion_series, MotionSeries};
use crate::model::{Dataset, Mode, Trip};

pub const N_FEATURES: usize = 10;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "distance",
    "time",
    "points",
    "vcr",
    "mvcr",
    "max_acceleration",
    "avgspeed_1",
    "minspeed",
    "maxspeed",
    "avgspeed_2",
];

/// Velocities at or below this (m/s) are not used as change-rate bases.
pub const ZERO_VELOCITY_EPS: f64 = 1e-6;

pub const MIN_SEGMENT_POINTS: usize = 3;

/// Denominator of the count-averaged speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Avgspeed2Denominator {
    /// Number of records `n`.
    #[default]
    Points,
    /// Number of velocities `n - 1`.
    Velocities,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureConfig {
    pub avgspeed2_denominator: Avgspeed2Denominator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub trip_id: String,
    pub label: Mode,
    pub distance: f64,
    pub time: f64,
    pub points: usize,
    pub vcr: f64,
    pub mvcr: f64,
    pub max_acceleration: f64,
    pub avgspeed_1: f64,
    pub minspeed: f64,
    pub maxspeed: f64,
    pub avgspeed_2: f64,
}

impl FeatureVector {
    /// Feature values in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> [f64; N_FEATURES] {
        [
            self.distance,
            self.time,
            self.points as f64,
            self.vcr,
            self.mvcr,
            self.max_acceleration,
            self.avgspeed_1,
            self.minspeed,
            self.maxspeed,
            self.avgspeed_2,
        ]
    }
}

/// Velocity change rates and accelerations between consecutive velocities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateSeries {
    pub vcr_values: Vec<f64>,
    pub acc_values: Vec<f64>,
}

pub fn rate_series(series: &MotionSeries) -> RateSeries {
    let mut rates = RateSeries::default();
    for i in 0..series.len().saturating_sub(1) {
        let (v, next) = (series.velocities[i], series.velocities[i + 1]);
        let delta = libm::fabs(next - v);
        if v > ZERO_VELOCITY_EPS {
            rates.vcr_values.push(delta / v);
        }
        rates.acc_values.push(delta / series.dt[i]);
    }
    rates
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn extract_features(trip: &Trip, config: &FeatureConfig) -> Result<FeatureVector> {
    let n = trip.len();
    if n < MIN_SEGMENT_POINTS {
        return Err(Error::SegmentTooShort { trip_id: trip.trip_id().into(), points: n });
    }
    let series = motion_series(trip);
    let rates = rate_series(&series);

    let distance: f64 = series.distances.iter().sum();
    let time = trip.duration() as f64;
    let speed_sum: f64 = series.velocities.iter().sum();
    let avgspeed_2 = match config.avgspeed2_denominator {
        Avgspeed2Denominator::Points => speed_sum / n as f64,
        Avgspeed2Denominator::Velocities => speed_sum / series.len() as f64,
    };
    let (vcr, mvcr) = if rates.vcr_values.is_empty() {
        (0.0, 0.0)
    } else {
        let sum: f64 = rates.vcr_values.iter().sum();
        (sum / rates.vcr_values.len() as f64, max_of(&rates.vcr_values))
    };

    Ok(FeatureVector {
        trip_id: trip.trip_id().into(),
        label: trip.mode(),
        distance,
        time,
        points: n,
        vcr,
        mvcr,
        max_acceleration: max_of(&rates.acc_values),
        avgspeed_1: distance / time,
        minspeed: min_of(&series.velocities),
        maxspeed: max_of(&series.velocities),
        avgspeed_2,
    })
}

/// Trips skipped because they were shorter than [`MIN_SEGMENT_POINTS`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DropReport {
    pub dropped: Vec<(String, usize)>,
}

impl DropReport {
    pub fn count(&self) -> usize {
        self.dropped.len()
    }
}

/// One feature vector per trip with enough records, in trip order.
pub fn dataset_features(dataset: &Dataset, config: &FeatureConfig) -> (Vec<FeatureVector>, DropReport) {
    let mut out = Vec::with_capacity(dataset.trips().len());
    let mut report = DropReport::default();
    for trip in dataset.trips() {
        match extract_features(trip, config) {
            Ok(fv) => out.push(fv),
            Err(_) => report.dropped.push((trip.trip_id().into(), trip.len())),
        }
    }
    (out, report)
}
