//! Great-circle distance and per-trip motion series.

use alloc::vec::Vec;

use crate::model::Trip;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Haversine distance in meters between two `(latitude, longitude)` pairs
/// given in decimal degrees.
pub fn haversine(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let sin_dlat = libm::sin((lat2 - lat1) / 2.0);
    let sin_dlon = libm::sin((lon2 - lon1) / 2.0);
    let h = sin_dlat * sin_dlat + libm::cos(lat1) * libm::cos(lat2) * sin_dlon * sin_dlon;
    // rounding can push h a hair past 1 for antipodal points
    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h.clamp(0.0, 1.0)))
}

/// Segment distances, elapsed times and velocities between consecutive
/// records. All three have length `n - 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MotionSeries {
    pub distances: Vec<f64>,
    pub dt: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl MotionSeries {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

pub fn motion_series(trip: &Trip) -> MotionSeries {
    let records = trip.records();
    let n = records.len().saturating_sub(1);
    let mut series = MotionSeries {
        distances: Vec::with_capacity(n),
        dt: Vec::with_capacity(n),
        velocities: Vec::with_capacity(n),
    };
    for w in records.windows(2) {
        let d = haversine((w[0].latitude(), w[0].longitude()), (w[1].latitude(), w[1].longitude()));
        let dt = (w[1].timestamp() - w[0].timestamp()) as f64;
        series.distances.push(d);
        series.dt.push(dt);
        series.velocities.push(d / dt);
    }
    series
}
