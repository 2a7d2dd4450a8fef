//! Trip CSV: `trip_id,mode,timestamp,lat,lon,error_m`, one record per row,
//! integer epoch seconds, decimal degrees, error in meters. Rows are written
//! sorted by trip id then timestamp.

use std::collections::BTreeMap;

use modetrace_core::{Dataset, GpsRecord, Mode, Trip};

use super::csvio::{field, finish, read_rows, writer};
use crate::error::FormatError;

pub const TRIP_HEADER: &str = "trip_id,mode,timestamp,lat,lon,error_m";

/// Parses trip CSV. Records are grouped by trip id and sorted by
/// timestamp; the result carries `provenance` as its source tag.
pub fn parse_trips(text: &str, provenance: &str) -> Result<Dataset, FormatError> {
    let mut grouped: BTreeMap<String, (Mode, Vec<(u64, GpsRecord)>)> = BTreeMap::new();
    for (line, row) in read_rows(text, TRIP_HEADER)? {
        let trip_id = row[0].to_string();
        let mode: Mode = field(line, "mode", &row[1])?;
        let timestamp: i64 = field(line, "timestamp", &row[2])?;
        let lat: f64 = field(line, "lat", &row[3])?;
        let lon: f64 = field(line, "lon", &row[4])?;
        let error: f64 = field(line, "error_m", &row[5])?;
        let record = GpsRecord::new(lat, lon, timestamp, error).map_err(|e| FormatError::at(line, e))?;
        let entry = grouped.entry(trip_id.clone()).or_insert_with(|| (mode, Vec::new()));
        if entry.0 != mode {
            return Err(FormatError::at(line, format!("trip {trip_id:?} labeled both {} and {mode}", entry.0)));
        }
        entry.1.push((line, record));
    }

    let mut trips = Vec::with_capacity(grouped.len());
    for (trip_id, (mode, mut records)) in grouped {
        records.sort_by_key(|(_, r)| r.timestamp());
        if let Some(w) = records.windows(2).find(|w| w[0].1.timestamp() == w[1].1.timestamp()) {
            return Err(FormatError::Validation(format!(
                "trip {trip_id:?} repeats timestamp {} (lines {} and {})",
                w[0].1.timestamp(),
                w[0].0,
                w[1].0
            )));
        }
        trips.push(Trip::new(trip_id, mode, records.into_iter().map(|(_, r)| r).collect())?);
    }
    Ok(Dataset::new(trips, provenance)?)
}

pub fn write_trips(dataset: &Dataset) -> Result<String, FormatError> {
    let mut w = writer();
    w.write_record(TRIP_HEADER.split(','))?;
    let mut trips: Vec<&Trip> = dataset.trips().iter().collect();
    trips.sort_by(|a, b| a.trip_id().cmp(b.trip_id()));
    for trip in trips {
        for r in trip.records() {
            w.write_record([
                trip.trip_id(),
                trip.mode().as_str(),
                &r.timestamp().to_string(),
                &r.latitude().to_string(),
                &r.longitude().to_string(),
                &r.error().to_string(),
            ])?;
        }
    }
    finish(w)
}
