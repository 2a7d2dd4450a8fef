//! Histogram (`bin_low,bin_high,count`) and KS sweep
//! (`interval_s,ks_statistic,n_a,n_b`) CSV.

use modetrace_core::stats::{HistogramBin, KsSweepRow};

use super::csvio::{finish, writer};
use crate::error::FormatError;

pub const HISTOGRAM_HEADER: &str = "bin_low,bin_high,count";
pub const KS_HEADER: &str = "interval_s,ks_statistic,n_a,n_b";

pub fn write_histogram(bins: &[HistogramBin]) -> Result<String, FormatError> {
    let mut w = writer();
    w.write_record(HISTOGRAM_HEADER.split(','))?;
    for b in bins {
        w.write_record([b.low.to_string(), b.high.to_string(), b.count.to_string()])?;
    }
    finish(w)
}

pub fn write_ks_sweep(rows: &[KsSweepRow]) -> Result<String, FormatError> {
    let mut w = writer();
    w.write_record(KS_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.interval.to_string(),
            r.result.statistic.to_string(),
            r.result.n_a.to_string(),
            r.result.n_b.to_string(),
        ])?;
    }
    finish(w)
}
