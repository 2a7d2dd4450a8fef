//! Thread-parallel variants of the core training, evaluation and
//! generation loops. Each produces exactly the value of its sequential
//! counterpart because every unit of work owns a derived seed.

use rayon::prelude::*;

use modetrace_core::eval::{assemble_report, run_fold, FoldPlan, FoldResult};
use modetrace_core::features::{extract_features, DropReport};
use modetrace_core::forest::{train_forest_tree, Row};
use modetrace_core::synth::{generate_indexed_trip, trip_plan};
use modetrace_core::{Dataset, EvalReport, FeatureConfig, FeatureVector, ForestModel, ForestParams, KFoldOptions, Mode, Result, SynthSpec};

pub fn train_forest(rows: &[Row], params: &ForestParams, master_seed: u64) -> Result<ForestModel> {
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|k| train_forest_tree(rows, params, master_seed, k))
        .collect::<Result<Vec<_>>>()?;
    ForestModel::from_trees(rows, *params, master_seed, trees)
}

pub fn kfold_results(rows: &[Row], k: usize, params: &ForestParams, seed: u64, options: KFoldOptions) -> Result<Vec<FoldResult>> {
    let labels: Vec<Mode> = rows.iter().map(|r| r.label).collect();
    let plan = FoldPlan::new(&labels, k, seed, options)?;
    (0..plan.k()).into_par_iter().map(|f| run_fold(rows, &plan, f, params, seed)).collect()
}

pub fn kfold_cv(rows: &[Row], k: usize, params: &ForestParams, seed: u64, options: KFoldOptions) -> Result<EvalReport> {
    let folds = kfold_results(rows, k, params, seed, options)?;
    Ok(assemble_report(&folds, seed, *params))
}

pub fn generate_dataset(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let trips = trip_plan(spec)
        .into_par_iter()
        .map(|(index, mode, ordinal)| generate_indexed_trip(spec, index, mode, ordinal))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(trips, format!("synthetic seed={}", spec.master_seed))
}

pub fn dataset_features(dataset: &Dataset, config: &FeatureConfig) -> (Vec<FeatureVector>, DropReport) {
    let results: Vec<_> = dataset.trips().par_iter().map(|t| (t, extract_features(t, config))).collect();
    let mut out = Vec::with_capacity(results.len());
    let mut report = DropReport::default();
    for (trip, r) in results {
        match r {
            Ok(fv) => out.push(fv),
            Err(_) => report.dropped.push((trip.trip_id().to_string(), trip.len())),
        }
    }
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use modetrace_core::forest::rows_from_features;

    fn spec() -> SynthSpec {
        let mut s = SynthSpec::with_seed(4);
        for (m, c) in [(Mode::Walk, 12), (Mode::Bike, 9), (Mode::Bus, 2), (Mode::Railway, 2)] {
            s.set_count(m, c);
        }
        s
    }

    #[test]
    fn matches_sequential() {
        let spec = spec();
        let ds = generate_dataset(&spec).unwrap();
        assert_eq!(ds, modetrace_core::generate_dataset(&spec).unwrap());
        let cfg = FeatureConfig::default();
        let feats = dataset_features(&ds, &cfg);
        assert_eq!(feats, modetrace_core::dataset_features(&ds, &cfg));
        let rows = rows_from_features(&feats.0);
        let params = ForestParams { n_trees: 12, ..ForestParams::default() };
        let a = train_forest(&rows, &params, 8).unwrap();
        assert_eq!(a, modetrace_core::forest::train_forest(&rows, &params, 8).unwrap());
        let opts = KFoldOptions::default();
        assert_eq!(
            kfold_cv(&rows, 5, &params, 2, opts).unwrap(),
            modetrace_core::eval::kfold_cv(&rows, 5, &params, 2, opts).unwrap()
        );
    }
}
