//! Seeded synthetic trips with 1 s fixes.
//!
//! Each trip is a smooth random-heading walk: the heading performs a
//! Gaussian random walk and the speed follows an AR(1) process around the
//! mode's mean, floored at half the mean (and never below 0.6 m/s). Round
//! trips are repeated out-and-back excursions of `round_trip_period`
//! seconds that retrace their outbound positions, so every period ends
//! exactly at the origin. Positions are rounded to 1e-7 degrees and errors
//! to 0.1 m.
//!
//! Normal deviates come from the Box-Muller transform evaluated with
//! `libm`, so datasets are byte-identical on every platform.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesy::EARTH_RADIUS_M;
use crate::model::{Dataset, GpsRecord, Mode, Trip};
use crate::seed;

/// 2020-10-01T00:00:00+09:00.
pub const EPOCH_START: i64 = 1_601_478_000;

const MONTH_SECONDS: i64 = 31 * 86_400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedModel {
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProfile {
    pub mode: Mode,
    pub count: usize,
    pub speed: SpeedModel,
}

/// Reported-error model: `offset + |N(0, sigma)|`, replaced with
/// probability `outlier_rate` by a uniform draw in `[outlier_min, outlier_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    pub offset: f64,
    pub sigma: f64,
    pub outlier_rate: f64,
    pub outlier_min: f64,
    pub outlier_max: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self { offset: 3.0, sigma: 20.0, outlier_rate: 0.02, outlier_min: 100.0, outlier_max: 300.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub profiles: Vec<ModeProfile>,
    /// Seconds.
    pub min_duration: i64,
    pub max_duration: i64,
    pub native_interval: i64,
    pub round_trip_fraction: f64,
    /// Length in seconds of one out-and-back excursion.
    pub round_trip_period: i64,
    /// Speed autocorrelation time in seconds.
    pub speed_correlation: f64,
    /// Heading diffusion, radians per √s.
    pub heading_sigma: f64,
    pub error: ErrorModel,
    /// Center of the region trips start in, degrees.
    pub origin: (f64, f64),
    /// Half-width of the start region, degrees.
    pub origin_spread: f64,
    pub master_seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        let profile = |mode, count, mean, stddev| ModeProfile { mode, count, speed: SpeedModel { mean, stddev } };
        Self {
            profiles: alloc::vec![
                profile(Mode::Walk, 212, 1.4, 0.3),
                profile(Mode::Bike, 138, 4.2, 1.0),
                profile(Mode::Bus, 56, 6.0, 3.0),
                profile(Mode::Railway, 69, 15.0, 6.0),
            ],
            min_duration: 600,
            max_duration: 1800,
            native_interval: 1,
            round_trip_fraction: 0.2,
            round_trip_period: 300,
            speed_correlation: 30.0,
            heading_sigma: 0.06,
            error: ErrorModel::default(),
            // Kashiwa, Chiba
            origin: (35.8617, 139.9753),
            origin_spread: 0.05,
            master_seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn with_seed(master_seed: u64) -> Self {
        Self { master_seed, ..Self::default() }
    }

    /// Keeps only the given modes' profiles.
    pub fn only_modes(mut self, modes: &[Mode]) -> Self {
        self.profiles.retain(|p| modes.contains(&p.mode));
        self
    }

    pub fn set_count(&mut self, mode: Mode, count: usize) {
        if let Some(p) = self.profiles.iter_mut().find(|p| p.mode == mode) {
            p.count = count;
        }
    }

    pub fn profile(&self, mode: Mode) -> Result<&ModeProfile> {
        self.profiles
            .iter()
            .find(|p| p.mode == mode)
            .ok_or_else(|| Error::InvalidParameter(format!("no speed model for mode {mode}")))
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.profiles {
            if !(p.speed.mean > 0.0 && p.speed.stddev >= 0.0) {
                return Err(Error::InvalidParameter(format!("speed model for {} must have positive mean", p.mode)));
            }
        }
        if self.native_interval < 1 || self.min_duration < self.native_interval {
            return Err(Error::InvalidParameter("min duration must be at least the native interval".into()));
        }
        if self.max_duration < self.min_duration {
            return Err(Error::InvalidParameter("max duration below min duration".into()));
        }
        if !(0.0..=1.0).contains(&self.round_trip_fraction) || self.round_trip_period < 2 * self.native_interval {
            return Err(Error::InvalidParameter("round trip settings out of range".into()));
        }
        let e = &self.error;
        if !(e.offset >= 0.0 && e.sigma >= 0.0 && (0.0..=1.0).contains(&e.outlier_rate) && e.outlier_min < e.outlier_max) {
            return Err(Error::InvalidParameter("error model out of range".into()));
        }
        Ok(())
    }
}

/// Whether a trip wanders off or keeps returning to its origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripShape {
    Open,
    RoundTrip,
}

struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u is in (0, 1], keeping ln finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(2.0 * PI * u2);
        self.spare = Some(r * s);
        r * c
    }
}

fn quantize(x: f64, scale: f64) -> f64 {
    libm::round(x * scale) / scale
}

/// Planar (east, north) positions in meters, one per native tick.
fn open_path(s: &mut Sampler, speed: SpeedModel, spec: &SynthSpec, steps: usize) -> Vec<(f64, f64)> {
    let phi = libm::exp(-(spec.native_interval as f64) / spec.speed_correlation);
    let innovation = speed.stddev * libm::sqrt(1.0 - phi * phi);
    let floor = (0.5 * speed.mean).max(0.6);
    let dt = spec.native_interval as f64;
    let heading_step = spec.heading_sigma * libm::sqrt(dt);

    let mut v = (speed.mean + speed.stddev * s.normal()).max(floor);
    let mut heading = 2.0 * PI * s.uniform();
    let mut pos = (0.0, 0.0);
    let mut path = Vec::with_capacity(steps + 1);
    path.push(pos);
    for _ in 0..steps {
        v = (speed.mean + phi * (v - speed.mean) + innovation * s.normal()).max(floor);
        heading += heading_step * s.normal();
        let (sin_h, cos_h) = libm::sincos(heading);
        pos = (pos.0 + v * dt * sin_h, pos.1 + v * dt * cos_h);
        path.push(pos);
    }
    path
}

fn round_trip_path(s: &mut Sampler, speed: SpeedModel, spec: &SynthSpec, steps: usize) -> Vec<(f64, f64)> {
    let period = (spec.round_trip_period / spec.native_interval) as usize;
    let half = period / 2;
    let mut path = Vec::with_capacity(steps + 1);
    path.push((0.0, 0.0));
    while path.len() < steps + 1 {
        let out = open_path(s, speed, spec, half);
        path.extend_from_slice(&out[1..]);
        path.extend(out[..half].iter().rev());
        // odd periods dwell one tick at the origin
        if period % 2 == 1 {
            path.push((0.0, 0.0));
        }
    }
    path.truncate(steps + 1);
    path
}

fn sample_error(s: &mut Sampler, model: &ErrorModel) -> f64 {
    let e = if s.uniform() < model.outlier_rate {
        model.outlier_min + (model.outlier_max - model.outlier_min) * s.uniform()
    } else {
        model.offset + libm::fabs(model.sigma * s.normal())
    };
    quantize(e, 10.0)
}

fn build_trip(
    trip_id: alloc::string::String,
    mode: Mode,
    duration: i64,
    shape: TripShape,
    s: &mut Sampler,
    spec: &SynthSpec,
) -> Result<Trip> {
    let speed = spec.profile(mode)?.speed;
    let start = EPOCH_START + (s.uniform() * (MONTH_SECONDS - 2 * spec.max_duration) as f64) as i64;
    let lat0 = spec.origin.0 + spec.origin_spread * (2.0 * s.uniform() - 1.0);
    let lon0 = spec.origin.1 + spec.origin_spread * (2.0 * s.uniform() - 1.0);
    let steps = (duration / spec.native_interval) as usize;
    let path = match shape {
        TripShape::Open => open_path(s, speed, spec, steps),
        TripShape::RoundTrip => round_trip_path(s, speed, spec, steps),
    };
    let meters_per_deg_lat = EARTH_RADIUS_M * PI / 180.0;
    let meters_per_deg_lon = meters_per_deg_lat * libm::cos(lat0.to_radians());
    let records = path
        .iter()
        .enumerate()
        .map(|(i, &(east, north))| {
            let lat = quantize(lat0 + north / meters_per_deg_lat, 1e7).clamp(-90.0, 90.0);
            let lon = quantize(lon0 + east / meters_per_deg_lon, 1e7).clamp(-180.0, 180.0);
            let t = start + i as i64 * spec.native_interval;
            GpsRecord::new(lat, lon, t, sample_error(s, &spec.error))
        })
        .collect::<Result<Vec<_>>>()?;
    Trip::new(trip_id, mode, records)
}

fn check_duration(duration: i64, spec: &SynthSpec) -> Result<()> {
    if duration < spec.min_duration {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} s is below the minimum of {} s",
            spec.min_duration
        )));
    }
    Ok(())
}

/// Generates one trip of exactly `duration` seconds with the given shape.
pub fn generate_trip_shaped(mode: Mode, duration: i64, shape: TripShape, seed: u64, spec: &SynthSpec) -> Result<Trip> {
    spec.validate()?;
    check_duration(duration, spec)?;
    let mut s = Sampler { rng: seed::rng(seed), spare: None };
    build_trip(format!("{mode}_{seed:016x}"), mode, duration, shape, &mut s, spec)
}

/// Generates one trip, choosing a round trip with probability
/// `round_trip_fraction`.
pub fn generate_trip(mode: Mode, duration: i64, seed: u64, spec: &SynthSpec) -> Result<Trip> {
    spec.validate()?;
    check_duration(duration, spec)?;
    let mut s = Sampler { rng: seed::rng(seed), spare: None };
    let shape = if s.uniform() < spec.round_trip_fraction { TripShape::RoundTrip } else { TripShape::Open };
    build_trip(format!("{mode}_{seed:016x}"), mode, duration, shape, &mut s, spec)
}

/// Seed of the `index`-th trip of a dataset.
pub fn trip_seed(master_seed: u64, index: usize) -> u64 {
    seed::derive(seed::tagged(master_seed, seed::stream::TRIP), index as u64)
}

/// Generates the `index`-th trip of the dataset described by `spec`, with
/// its duration, shape and stream all drawn from [`trip_seed`].
pub fn generate_indexed_trip(spec: &SynthSpec, index: usize, mode: Mode, ordinal: usize) -> Result<Trip> {
    let mut s = Sampler { rng: seed::rng(trip_seed(spec.master_seed, index)), spare: None };
    let span = spec.max_duration - spec.min_duration;
    let duration = spec.min_duration + (s.uniform() * (span + 1) as f64) as i64;
    let duration = duration.min(spec.max_duration);
    let shape = if s.uniform() < spec.round_trip_fraction { TripShape::RoundTrip } else { TripShape::Open };
    build_trip(format!("{mode}_{ordinal:04}"), mode, duration, shape, &mut s, spec)
}

/// `(dataset index, mode, per-mode ordinal)` of every trip in `spec`.
pub fn trip_plan(spec: &SynthSpec) -> Vec<(usize, Mode, usize)> {
    let mut plan = Vec::new();
    for p in &spec.profiles {
        for ordinal in 0..p.count {
            plan.push((plan.len(), p.mode, ordinal));
        }
    }
    plan
}

pub fn generate_dataset(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let trips = trip_plan(spec)
        .into_iter()
        .map(|(index, mode, ordinal)| generate_indexed_trip(spec, index, mode, ordinal))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(trips, format!("synthetic seed={}", spec.master_seed))
}
