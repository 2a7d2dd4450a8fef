//! Acceptance criteria for the whole pipeline. Each criterion prints one
//! `PASS`/`FAIL` line with its runtime; the test fails if any criterion
//! misses its threshold or its time budget.

use std::fs;
use std::time::{Duration, Instant};

use rand::Rng;

use modetrace::cli;
use modetrace::parallel;
use modetrace_core::features::{extract_features, FeatureConfig};
use modetrace_core::forest::{rows_from_features, train_forest};
use modetrace_core::geodesy::{haversine, motion_series, EARTH_RADIUS_M};
use modetrace_core::preprocess::{error_box_stats, filter_by_error, preprocess_dataset, FilterOutcome};
use modetrace_core::resample::{subsample, subsample_dataset, DEFAULT_SWEEP};
use modetrace_core::seed::rng;
use modetrace_core::stats::{ks_statistic, velocity_distribution};
use modetrace_core::synth::{generate_trip_shaped, TripShape};
use modetrace_core::{
    generate_dataset, FeatureVector, ForestParams, GpsRecord, KFoldOptions, Mode, SynthSpec, Trip,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_trip(r: &mut impl Rng, id: &str, n: usize, dense: bool) -> Trip {
    let (mut lat, mut lon) = (35.0 + r.random::<f64>(), 139.0 + r.random::<f64>());
    let mut t = r.random_range(0..1_000_000i64);
    let mut recs = Vec::with_capacity(n);
    for _ in 0..n {
        recs.push(GpsRecord::new(lat, lon, t, r.random_range(0.0..200.0)).unwrap());
        lat += r.random_range(-0.003..0.003);
        lon += r.random_range(-0.003..0.003);
        t += if dense { 1 } else { r.random_range(1..300) };
    }
    Trip::new(id, Mode::Walk, recs).unwrap()
}

/// Great-circle distance through the atan2 form of the haversine.
fn oracle_distance(a: &GpsRecord, b: &GpsRecord) -> f64 {
    let (p1, p2) = (a.latitude().to_radians(), b.latitude().to_radians());
    let dp = p2 - p1;
    let dl = (b.longitude() - a.longitude()).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().atan2((1.0 - h).sqrt())
}

/// Direct loop expansion of the feature equations.
fn oracle_features(trip: &Trip) -> [f64; 10] {
    let p = trip.records();
    let n = p.len();
    let mut d = vec![0.0; n - 1];
    let mut v = vec![0.0; n - 1];
    for i in 0..n - 1 {
        d[i] = oracle_distance(&p[i], &p[i + 1]);
        v[i] = d[i] / (p[i + 1].timestamp() - p[i].timestamp()) as f64;
    }
    let mut distance = 0.0;
    for x in &d {
        distance += x;
    }
    let time = (p[n - 1].timestamp() - p[0].timestamp()) as f64;
    let (mut vcr_sum, mut vcr_n, mut mvcr, mut max_acc) = (0.0, 0usize, 0.0f64, 0.0f64);
    for i in 0..n - 2 {
        let dv = (v[i + 1] - v[i]).abs();
        if v[i] > 1e-6 {
            vcr_sum += dv / v[i];
            vcr_n += 1;
            mvcr = mvcr.max(dv / v[i]);
        }
        max_acc = max_acc.max(dv / (p[i + 1].timestamp() - p[i].timestamp()) as f64);
    }
    let vcr = if vcr_n == 0 { 0.0 } else { vcr_sum / vcr_n as f64 };
    let mut vsum = 0.0;
    for x in &v {
        vsum += x;
    }
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(0.0, f64::max);
    [distance, time, n as f64, vcr, mvcr, max_acc, distance / time, min, max, vsum / n as f64]
}

fn c1_feature_oracle() -> Outcome {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for k in 0..25 {
        let n = r.random_range(3..=10);
        let trip = random_trip(&mut r, &format!("f{k}"), n, false);
        let got = extract_features(&trip, &FeatureConfig::default()).map_err(|e| e.to_string())?.values();
        let want = oracle_features(&trip);
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            let rel = if *w == 0.0 { g.abs() } else { ((g - w) / w).abs() };
            worst = worst.max(rel);
            check(rel <= 1e-9, format!("trip {k} feature {i}: {g} vs {w}"))?;
        }
    }
    Ok(format!("25 trips, worst relative error {worst:.2e}"))
}

fn c2_geodesy() -> Outcome {
    let degree = haversine((0.0, 0.0), (0.0, 1.0));
    check((degree - 111_194.93).abs() <= 0.01, format!("equatorial degree {degree}"))?;
    check((degree - 2.0 * std::f64::consts::PI * EARTH_RADIUS_M / 360.0).abs() <= 0.01, "2πR/360")?;
    let quarter = haversine((90.0, 0.0), (0.0, 0.0));
    check((quarter - 10_007_543.0).abs() <= 1.0, format!("pole to equator {quarter}"))?;
    check((quarter - std::f64::consts::PI * EARTH_RADIUS_M / 2.0).abs() <= 1.0, "πR/2")?;
    let mut r = rng(102);
    for _ in 0..1000 {
        let a = (r.random_range(-90.0..=90.0), r.random_range(-180.0..=180.0));
        let b = (r.random_range(-90.0..=90.0), r.random_range(-180.0..=180.0));
        check(haversine(a, b) == haversine(b, a), format!("asymmetric at {a:?} {b:?}"))?;
        check(haversine(a, a) == 0.0, format!("nonzero identity at {a:?}"))?;
    }
    Ok(format!("degree {degree:.4} m, quarter {quarter:.2} m, 1000 pairs symmetric"))
}

fn brute_ks(a: &[f64], b: &[f64]) -> f64 {
    let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    let mut grid: Vec<f64> = a.iter().chain(b).copied().collect();
    grid.sort_by(f64::total_cmp);
    let mut probes = grid.clone();
    probes.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probes.push(grid[0] - 1.0);
    probes.iter().map(|&x| (ecdf(a, x) - ecdf(b, x)).abs()).fold(0.0, f64::max)
}

fn c3_ks_brute_force() -> Outcome {
    let mut r = rng(103);
    for k in 0..200 {
        let (na, nb) = (r.random_range(1..=50), r.random_range(1..=50));
        // coarse values so ties are common
        let a: Vec<f64> = (0..na).map(|_| r.random_range(0..40) as f64 * 0.25).collect();
        let b: Vec<f64> = (0..nb).map(|_| r.random_range(0..40) as f64 * 0.25 + 0.5).collect();
        let got = ks_statistic(&a, &b).map_err(|e| e.to_string())?.statistic;
        check(got == brute_ks(&a, &b), format!("pair {k}: {got} vs {}", brute_ks(&a, &b)))?;
    }
    Ok("200 pairs exact".into())
}

fn c4_ks_trend() -> Outcome {
    let raw = parallel::generate_dataset(&SynthSpec::default()).map_err(|e| e.to_string())?;
    let (ds, _) = preprocess_dataset(&raw, None).map_err(|e| e.to_string())?;
    let ks_at = |interval| -> Result<f64, String> {
        let w = velocity_distribution(&ds, Mode::Walk, interval).map_err(|e| e.to_string())?;
        let b = velocity_distribution(&ds, Mode::Bike, interval).map_err(|e| e.to_string())?;
        Ok(ks_statistic(&w.samples, &b.samples).map_err(|e| e.to_string())?.statistic)
    };
    let (k60, k300) = (ks_at(60)?, ks_at(300)?);
    check(k60 > 0.5, format!("KS at 60 s = {k60}"))?;
    check(k300 < k60, format!("KS at 300 s = {k300} not below {k60}"))?;
    Ok(format!("KS 60 s = {k60:.4}, 300 s = {k300:.4}"))
}

fn c5_round_trip_artifact() -> Outcome {
    let trip = generate_trip_shaped(Mode::Walk, 600, TripShape::RoundTrip, 5, &SynthSpec::default())
        .map_err(|e| e.to_string())?;
    let r = trip.records();
    let end = (r[r.len() - 1].latitude(), r[r.len() - 1].longitude());
    let gap = haversine((r[0].latitude(), r[0].longitude()), end);
    check(trip.duration() == 600 && gap <= 50.0, format!("not a 600 s round trip (gap {gap} m)"))?;
    let dense_min = motion_series(&trip).velocities.iter().cloned().fold(f64::INFINITY, f64::min);
    check(dense_min > 0.5, format!("1 s speed dips to {dense_min}"))?;
    let coarse = subsample(&trip, 300).map_err(|e| e.to_string())?;
    let slow = motion_series(&coarse).velocities.iter().cloned().fold(f64::INFINITY, f64::min);
    check(slow < 0.1, format!("slowest 300 s velocity {slow}"))?;
    Ok(format!("1 s min {dense_min:.3} m/s, 300 s min {slow:.4} m/s"))
}

fn c6_boxplot_filter() -> Outcome {
    let s = error_box_stats(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0]).map_err(|e| e.to_string())?;
    check(s.q1 == 32.5 && s.q3 == 77.5 && s.upper_bound == 145.0, format!("{s:?}"))?;
    let mut r = rng(106);
    for k in 0..100 {
        let n = r.random_range(1..200);
        let dense = r.random::<bool>();
        let trip = random_trip(&mut r, "e", n, dense);
        let bound = r.random_range(0.0..200.0);
        match filter_by_error(&trip, bound) {
            FilterOutcome::Retained(once) => {
                let mut it = trip.records().iter();
                check(once.records().iter().all(|x| it.any(|y| y == x)), format!("trip {k} not a subsequence"))?;
                check(once.records().iter().all(|x| x.error() <= bound), format!("trip {k} keeps large error"))?;
                check(filter_by_error(&once, bound) == FilterOutcome::Retained(once.clone()), format!("trip {k} not idempotent"))?;
            }
            FilterOutcome::Emptied => {
                check(trip.records().iter().all(|x| x.error() > bound), format!("trip {k} wrongly emptied"))?;
            }
        }
    }
    Ok("box stats exact, 100 trips filtered".into())
}

fn walk_bike_features() -> Result<Vec<FeatureVector>, String> {
    let spec = SynthSpec::with_seed(0).only_modes(&[Mode::Walk, Mode::Bike]);
    let raw = parallel::generate_dataset(&spec).map_err(|e| e.to_string())?;
    let (clean, _) = preprocess_dataset(&raw, None).map_err(|e| e.to_string())?;
    let coarse = subsample_dataset(&clean, 60).map_err(|e| e.to_string())?;
    Ok(parallel::dataset_features(&coarse, &FeatureConfig::default()).0)
}

fn c7_cross_validation() -> Outcome {
    let feats = walk_bike_features()?;
    check(feats.len() == 350, format!("{} feature rows", feats.len()))?;
    let rows = rows_from_features(&feats);
    let report = parallel::kfold_cv(&rows, 10, &ForestParams::default(), 0, KFoldOptions::default())
        .map_err(|e| e.to_string())?;
    let (mean, min) = (report.mean_fold_accuracy(), report.min_fold_accuracy());
    check(report.fold_accuracies.as_ref().map(Vec::len) == Some(10), "fold count")?;
    check(mean >= 0.95, format!("mean accuracy {mean}"))?;
    check(min >= 0.85, format!("worst fold {min}"))?;
    Ok(format!("mean {mean:.4}, worst fold {min:.4}, pooled {:.4}", report.accuracy))
}

fn c8_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let code = cli::run([
            "modetrace", "pipeline", "--out-dir", d.path().to_str().unwrap(), "--seed", "3",
            "--interval", "60", "--kfold", "10", "--n-trees", "50",
        ]);
        check(code == 0, format!("pipeline exit {code}"))?;
    }
    for name in cli::PIPELINE_FILES {
        let a = fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        check(!a.is_empty() && a == b, format!("{name} differs between runs"))?;
    }
    let rows = rows_from_features(&walk_bike_features()?);
    let params = ForestParams::default();
    let concurrent = parallel::train_forest(&rows, &params, 9).map_err(|e| e.to_string())?;
    let sequential = train_forest(&rows, &params, 9).map_err(|e| e.to_string())?;
    check(concurrent == sequential, "concurrent forest differs from sequential")?;
    let text = modetrace::formats::model_to_json(&concurrent).map_err(|e| e.to_string())?;
    check(text == modetrace::formats::model_to_json(&sequential).unwrap(), "serialized models differ")?;
    check(generate_dataset(&SynthSpec::with_seed(3)).unwrap() == parallel::generate_dataset(&SynthSpec::with_seed(3)).unwrap(), "parallel synth differs")?;
    Ok(format!("{} files identical, concurrent == sequential", cli::PIPELINE_FILES.len()))
}

fn c9_resampling() -> Outcome {
    let mut r = rng(109);
    for k in 0..100 {
        let n = r.random_range(1..1500);
        let trip = random_trip(&mut r, "d", n, true);
        check(subsample(&trip, 1).unwrap() == trip, format!("trip {k}: native interval not identity"))?;
        let mut last = usize::MAX;
        for &interval in &DEFAULT_SWEEP {
            let s = subsample(&trip, interval).unwrap();
            check(s.records()[0] == trip.records()[0], format!("trip {k}: first record lost"))?;
            let mut it = trip.records().iter();
            check(s.records().iter().all(|x| it.any(|y| y == x)), format!("trip {k}: not a subsequence"))?;
            check(s.len() <= last, format!("trip {k}: count grew at {interval} s"))?;
            last = s.len();
        }
    }
    Ok("100 dense trips".into())
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "feature oracle equivalence", budget: Duration::from_secs(1), run: c1_feature_oracle },
        Criterion { id: 2, name: "geodesy oracle", budget: Duration::from_secs(1), run: c2_geodesy },
        Criterion { id: 3, name: "KS brute-force equivalence", budget: Duration::from_secs(5), run: c3_ks_brute_force },
        Criterion { id: 4, name: "KS convergence trend", budget: Duration::from_secs(30), run: c4_ks_trend },
        Criterion { id: 5, name: "round-trip zero-velocity artifact", budget: Duration::from_secs(1), run: c5_round_trip_artifact },
        Criterion { id: 6, name: "boxplot filter oracle", budget: Duration::from_secs(1), run: c6_boxplot_filter },
        Criterion { id: 7, name: "10-fold CV accuracy", budget: Duration::from_secs(60), run: c7_cross_validation },
        Criterion { id: 8, name: "pipeline determinism", budget: Duration::from_secs(120), run: c8_determinism },
        Criterion { id: 9, name: "resampling contracts", budget: Duration::from_secs(5), run: c9_resampling },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; took {elapsed:?}, budget {:?}", c.budget)),
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("PASS [{}] {} ({:.2?}): {detail}", c.id, c.name, elapsed),
            Err(why) => {
                println!("FAIL [{}] {} ({:.2?}): {why}", c.id, c.name, elapsed);
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
