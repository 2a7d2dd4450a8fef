//! Interval subsampling of dense trajectories.
//!
//! Starting from the first record, the next sample is the record whose
//! timestamp lies closest to `reference + interval` among records strictly
//! after the reference (ties go to the earlier record). The chosen record
//! becomes the new reference, so drift against a fixed grid is kept.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Dataset, Trip};

/// One to five minutes.
pub const DEFAULT_SWEEP: [i64; 5] = [60, 120, 180, 240, 300];

pub fn subsample(trip: &Trip, interval: i64) -> Result<Trip> {
    if interval < 1 {
        return Err(Error::InvalidParameter(alloc::format!("interval {interval} s must be at least 1 s")));
    }
    let records = trip.records();
    let mut out = Vec::with_capacity(records.len());
    let mut reference = 0usize;
    out.push(records[0]);
    while reference + 1 < records.len() {
        let target = records[reference].timestamp() + interval;
        let after = &records[reference + 1..];
        // first record at or past the target; its predecessor is the other candidate
        let idx = after.partition_point(|r| r.timestamp() < target);
        let pick = if idx == after.len() {
            idx - 1
        } else if idx == 0 {
            0
        } else {
            let below = target - after[idx - 1].timestamp();
            let above = after[idx].timestamp() - target;
            if below <= above {
                idx - 1
            } else {
                idx
            }
        };
        reference += 1 + pick;
        out.push(records[reference]);
    }
    Ok(trip.subsequence_of(out))
}

/// Subsamples the original trip once per interval.
pub fn subsample_sweep(trip: &Trip, intervals: &[i64]) -> Result<BTreeMap<i64, Trip>> {
    if intervals.is_empty() {
        return Err(Error::EmptyInput("interval sweep"));
    }
    intervals.iter().map(|&k| Ok((k, subsample(trip, k)?))).collect()
}

pub fn subsample_dataset(dataset: &Dataset, interval: i64) -> Result<Dataset> {
    let trips = dataset.trips().iter().map(|t| subsample(t, interval)).collect::<Result<Vec<_>>>()?;
    Dataset::new(trips, dataset.provenance())
}
