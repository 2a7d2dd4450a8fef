//! Empirical distributions of segment velocities.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geodesy::motion_series;
use crate::model::{Dataset, Mode};
use crate::resample::subsample;

/// Histogram bin width in m/s.
pub const BIN_WIDTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsResult {
    pub statistic: f64,
    pub n_a: usize,
    pub n_b: usize,
}

fn check_sample(samples: &[f64], what: &'static str) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter(alloc::format!("{what} contains NaN")));
    }
    Ok(())
}

/// Fraction of `samples` that are `<= x`.
pub fn ecdf_at(samples: &[f64], x: f64) -> Result<f64> {
    check_sample(samples, "ECDF sample")?;
    let below = samples.iter().filter(|&&s| s <= x).count();
    Ok(below as f64 / samples.len() as f64)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
///
/// Both ECDFs are step functions that only jump at sample values, so the
/// supremum is attained at one of the pooled values; the left limit at a
/// value equals the right value at its predecessor, which is visited too.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<KsResult> {
    check_sample(a, "first KS sample")?;
    check_sample(b, "second KS sample")?;
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        sup = sup.max(libm::fabs(i as f64 / na - j as f64 / nb));
    }
    Ok(KsResult { statistic: sup, n_a: xa.len(), n_b: xb.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

/// Fixed-width histogram starting at zero, covering every bin up to the
/// one holding the largest sample.
pub fn histogram(samples: &[f64]) -> Vec<HistogramBin> {
    let mut counts: Vec<usize> = Vec::new();
    for &v in samples {
        let idx = libm::floor(v.max(0.0) / BIN_WIDTH) as usize;
        if idx >= counts.len() {
            counts.resize(idx + 1, 0);
        }
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin { low: i as f64 * BIN_WIDTH, high: (i + 1) as f64 * BIN_WIDTH, count })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDistribution {
    pub mode: Mode,
    pub interval: i64,
    pub samples: Vec<f64>,
    pub histogram: Vec<HistogramBin>,
}

/// Pools the segment velocities of every `mode` trip after subsampling at
/// `interval` seconds.
pub fn velocity_distribution(dataset: &Dataset, mode: Mode, interval: i64) -> Result<VelocityDistribution> {
    let mut samples = Vec::new();
    let mut found = false;
    for trip in dataset.trips().iter().filter(|t| t.mode() == mode) {
        found = true;
        samples.extend(motion_series(&subsample(trip, interval)?).velocities);
    }
    if !found {
        return Err(Error::NoTripsForMode(mode));
    }
    let histogram = histogram(&samples);
    Ok(VelocityDistribution { mode, interval, samples, histogram })
}

/// One row of a KS-versus-interval sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsSweepRow {
    pub interval: i64,
    pub result: KsResult,
}

pub fn ks_sweep(dataset: &Dataset, mode_a: Mode, mode_b: Mode, intervals: &[i64]) -> Result<Vec<KsSweepRow>> {
    intervals
        .iter()
        .map(|&interval| {
            let a = velocity_distribution(dataset, mode_a, interval)?;
            let b = velocity_distribution(dataset, mode_b, interval)?;
            Ok(KsSweepRow { interval, result: ks_statistic(&a.samples, &b.samples)? })
        })
        .collect()
}
