//! Positional-error outlier removal using boxplot whiskers.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Dataset, Trip};

/// Multiplier applied to the interquartile range for the upper whisker.
pub const WHISKER: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxStats {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub upper_bound: f64,
}

/// Quantile `p` of sorted data, interpolating linearly between the order
/// statistics around zero-based position `p * (n - 1)`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn error_box_stats(errors: &[f64]) -> Result<BoxStats> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("error sample"));
    }
    if let Some(bad) = errors.iter().find(|e| !e.is_finite() || **e < 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("error value {bad} is not finite and non-negative")));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(BoxStats { q1, q3, iqr, upper_bound: q3 + WHISKER * iqr })
}

/// Error box statistics over every record of every trip.
pub fn dataset_box_stats(dataset: &Dataset) -> Result<BoxStats> {
    let pooled: Vec<f64> = dataset.trips().iter().flat_map(|t| t.records().iter().map(|r| r.error())).collect();
    error_box_stats(&pooled)
}

/// Result of filtering a trip. `Emptied` means no record survived and the
/// trip should be dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterOutcome {
    Retained(Trip),
    Emptied,
}

impl FilterOutcome {
    pub fn into_trip(self) -> Option<Trip> {
        match self {
            FilterOutcome::Retained(t) => Some(t),
            FilterOutcome::Emptied => None,
        }
    }
}

/// Keeps the records whose reported error is at most `bound` meters.
pub fn filter_by_error(trip: &Trip, bound: f64) -> FilterOutcome {
    let kept: Vec<_> = trip.records().iter().filter(|r| r.error() <= bound).copied().collect();
    if kept.is_empty() {
        FilterOutcome::Emptied
    } else {
        FilterOutcome::Retained(trip.subsequence_of(kept))
    }
}

/// Summary of a dataset-wide filtering pass.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreprocessReport {
    pub stats: BoxStats,
    pub bound: f64,
    pub records_in: usize,
    pub records_removed: usize,
    pub trips_dropped: Vec<alloc::string::String>,
}

/// Filters every trip against `bound`, or against the whisker bound of the
/// pooled errors when `bound` is `None`.
pub fn preprocess_dataset(dataset: &Dataset, bound: Option<f64>) -> Result<(Dataset, PreprocessReport)> {
    let stats = dataset_box_stats(dataset)?;
    let bound = bound.unwrap_or(stats.upper_bound);
    if bound.is_nan() || bound < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("error bound {bound} must be non-negative")));
    }
    let mut dropped = Vec::new();
    let filtered = dataset.filter_map_trips(|trip| {
        let out = filter_by_error(trip, bound).into_trip();
        if out.is_none() {
            dropped.push(trip.trip_id().into());
        }
        out
    });
    let records_in = dataset.record_count();
    let report = PreprocessReport {
        stats,
        bound,
        records_in,
        records_removed: records_in - filtered.record_count(),
        trips_dropped: dropped,
    };
    Ok((filtered, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GpsRecord, Mode};
    use alloc::vec;
    use proptest::prelude::*;

    fn trip_with_errors(errors: &[f64]) -> Trip {
        let recs = errors
            .iter()
            .enumerate()
            .map(|(i, &e)| GpsRecord::new(35.0, 139.0 + i as f64 * 1e-4, i as i64, e).unwrap())
            .collect();
        Trip::new("t", Mode::Bike, recs).unwrap()
    }

    #[test]
    fn ten_value_example() {
        let s = error_box_stats(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0]).unwrap();
        assert_eq!(s, BoxStats { q1: 32.5, q3: 77.5, iqr: 45.0, upper_bound: 145.0 });
    }

    #[test]
    fn constant_values() {
        let s = error_box_stats(&[7.0; 5]).unwrap();
        assert_eq!(s, BoxStats { q1: 7.0, q3: 7.0, iqr: 0.0, upper_bound: 7.0 });
        let one = error_box_stats(&[4.0]).unwrap();
        assert_eq!(one.q1, 4.0);
    }

    #[test]
    fn empty_errors() {
        assert_eq!(error_box_stats(&[]), Err(Error::EmptyInput("error sample")));
    }

    #[test]
    fn filter_examples() {
        let t = trip_with_errors(&[5.0, 100.0, 50.0]);
        let FilterOutcome::Retained(kept) = filter_by_error(&t, 93.1) else { panic!("emptied") };
        assert_eq!(kept.records(), &[t.records()[0], t.records()[2]]);

        assert_eq!(filter_by_error(&t, 500.0), FilterOutcome::Retained(t.clone()));
        assert_eq!(filter_by_error(&t, 1.0), FilterOutcome::Emptied);
    }

    #[test]
    fn dataset_pass_reports_drops() {
        let a = trip_with_errors(&[1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 3.0, 2.0]);
        let b = Trip::new("b", Mode::Walk, vec![GpsRecord::new(0.0, 0.0, 0, 400.0).unwrap()]).unwrap();
        let ds = Dataset::new(vec![a, b], "t").unwrap();
        let (out, report) = preprocess_dataset(&ds, None).unwrap();
        assert_eq!(out.trips().len(), 1);
        assert_eq!(report.trips_dropped, vec![alloc::string::String::from("b")]);
        assert_eq!(report.records_removed, 1);
        assert_eq!(report.bound, report.stats.upper_bound);
    }

    proptest! {
        #[test]
        fn order_statistics_bracket(mut xs in proptest::collection::vec(0.0f64..500.0, 1..60)) {
            let s = error_box_stats(&xs).unwrap();
            xs.sort_by(f64::total_cmp);
            prop_assert!(xs[0] <= s.q1 && s.q1 <= s.q3 && s.q3 <= xs[xs.len() - 1]);
            prop_assert_eq!(s.iqr, s.q3 - s.q1);
            xs.reverse();
            prop_assert_eq!(error_box_stats(&xs).unwrap(), s);
        }

        #[test]
        fn filter_is_idempotent_subsequence(
            errors in proptest::collection::vec(0.0f64..200.0, 1..40),
            bound in 0.0f64..200.0,
        ) {
            let t = trip_with_errors(&errors);
            if let FilterOutcome::Retained(once) = filter_by_error(&t, bound) {
                prop_assert!(once.records().iter().all(|r| r.error() <= bound));
                let mut it = t.records().iter();
                prop_assert!(once.records().iter().all(|r| it.any(|x| x == r)));
                prop_assert_eq!(filter_by_error(&once, bound), FilterOutcome::Retained(once.clone()));
            } else {
                prop_assert!(errors.iter().all(|&e| e > bound));
            }
        }
    }
}
