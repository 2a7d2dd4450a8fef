//! Trajectory domain types.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Travel mode label.
///
/// Variants are declared in lexicographic order of their labels so the
/// derived `Ord` agrees with string ordering; tie-breaks rely on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Bike,
    Bus,
    Railway,
    Unknown,
    Walk,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Bike, Mode::Bus, Mode::Railway, Mode::Unknown, Mode::Walk];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bike => "bike",
            Mode::Bus => "bus",
            Mode::Railway => "railway",
            Mode::Unknown => "unknown",
            Mode::Walk => "walk",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidRecord(format!("unknown mode label {s:?}")))
    }
}

/// One timestamped position fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsRecord {
    latitude: f64,
    longitude: f64,
    timestamp: i64,
    error: f64,
}

impl GpsRecord {
    /// `timestamp` is UTC epoch seconds, `error` the reported horizontal
    /// accuracy in meters.
    pub fn new(latitude: f64, longitude: f64, timestamp: i64, error: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::InvalidRecord(format!("latitude {latitude} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(Error::InvalidRecord(format!("longitude {longitude} outside [-180, 180]")));
        }
        if !error.is_finite() || error < 0.0 {
            return Err(Error::InvalidRecord(format!("error {error} must be finite and non-negative")));
        }
        Ok(Self { latitude, longitude, timestamp, error })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn timestamp(&self) -> i64 {
        self.timestamp
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    /// Same fix with the timestamp replaced.
    pub fn at_time(&self, timestamp: i64) -> Self {
        Self { timestamp, ..*self }
    }
}

/// Ordered, labeled sequence of fixes. Non-empty with strictly increasing
/// timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    trip_id: String,
    mode: Mode,
    records: Vec<GpsRecord>,
}

impl Trip {
    pub fn new(trip_id: impl Into<String>, mode: Mode, records: Vec<GpsRecord>) -> Result<Self> {
        let trip_id = trip_id.into();
        if records.is_empty() {
            return Err(Error::InvalidTrip { trip_id, reason: "no records".to_string() });
        }
        if let Some(w) = records.windows(2).find(|w| w[1].timestamp <= w[0].timestamp) {
            let reason = if w[1].timestamp == w[0].timestamp {
                format!("duplicate timestamp {}", w[0].timestamp)
            } else {
                format!("timestamp {} follows {}", w[1].timestamp, w[0].timestamp)
            };
            return Err(Error::InvalidTrip { trip_id, reason });
        }
        Ok(Self { trip_id, mode, records })
    }

    /// Caller guarantees the records are a non-empty subsequence of a valid trip.
    pub(crate) fn subsequence_of(&self, records: Vec<GpsRecord>) -> Self {
        debug_assert!(!records.is_empty());
        debug_assert!(records.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        Self { trip_id: self.trip_id.clone(), mode: self.mode, records }
    }

    pub fn trip_id(&self) -> &str {
        &self.trip_id
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn records(&self) -> &[GpsRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Seconds between first and last record.
    pub fn duration(&self) -> i64 {
        self.records[self.records.len() - 1].timestamp - self.records[0].timestamp
    }

    pub fn into_records(self) -> Vec<GpsRecord> {
        self.records
    }
}

/// A collection of trips with unique identifiers, kept sorted by trip id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    trips: Vec<Trip>,
    provenance: String,
}

impl Dataset {
    pub fn new(mut trips: Vec<Trip>, provenance: impl Into<String>) -> Result<Self> {
        trips.sort_by(|a, b| a.trip_id.cmp(&b.trip_id));
        let mut seen = BTreeSet::new();
        for trip in &trips {
            if !seen.insert(trip.trip_id()) {
                return Err(Error::DuplicateTrip(trip.trip_id().to_string()));
            }
        }
        Ok(Self { trips, provenance: provenance.into() })
    }

    pub fn trips(&self) -> &[Trip] {
        &self.trips
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn into_trips(self) -> Vec<Trip> {
        self.trips
    }

    pub fn record_count(&self) -> usize {
        self.trips.iter().map(Trip::len).sum()
    }

    /// Keeps only the trips whose mode is in `modes`.
    pub fn retain_modes(&self, modes: &[Mode]) -> Dataset {
        Dataset {
            trips: self.trips.iter().filter(|t| modes.contains(&t.mode())).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Replaces every trip through `f`; trips mapped to `None` are dropped.
    pub fn filter_map_trips(&self, f: impl FnMut(&Trip) -> Option<Trip>) -> Dataset {
        Dataset { trips: self.trips.iter().filter_map(f).collect(), provenance: self.provenance.clone() }
    }
}
