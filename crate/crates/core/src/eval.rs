//! Holdout splits, k-fold cross-validation and accuracy reports.
//!
//! Splitting always happens at row (trip) level.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::forest::{train_forest, ForestModel, ForestParams, Row};
use crate::model::Mode;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassTally {
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    /// Pooled accuracy: total correct over total rows.
    pub accuracy: f64,
    pub per_class: BTreeMap<Mode, ClassTally>,
    pub fold_accuracies: Option<Vec<f64>>,
    pub seed: u64,
    pub params: ForestParams,
}

impl EvalReport {
    fn from_tallies(per_class: BTreeMap<Mode, ClassTally>, fold_accuracies: Option<Vec<f64>>, seed: u64, params: ForestParams) -> Self {
        let correct: usize = per_class.values().map(|t| t.correct).sum();
        let total: usize = per_class.values().map(|t| t.total).sum();
        let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
        EvalReport { accuracy, per_class, fold_accuracies, seed, params }
    }

    /// Unweighted mean of the fold accuracies, or the pooled accuracy when
    /// the report has no folds.
    pub fn mean_fold_accuracy(&self) -> f64 {
        match &self.fold_accuracies {
            Some(f) if !f.is_empty() => f.iter().sum::<f64>() / f.len() as f64,
            _ => self.accuracy,
        }
    }

    pub fn min_fold_accuracy(&self) -> f64 {
        match &self.fold_accuracies {
            Some(f) if !f.is_empty() => f.iter().copied().fold(f64::INFINITY, f64::min),
            _ => self.accuracy,
        }
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng(seed));
    idx
}

/// Round-half-up of `fraction * n`, kept inside `1..n` so both sides are non-empty.
pub fn train_size(n: usize, fraction: f64) -> usize {
    let raw = libm::floor(fraction * n as f64 + 0.5) as usize;
    raw.clamp(1, n - 1)
}

/// Seeded shuffle, then the first `train_size(n, fraction)` rows train.
pub fn split_train_test<T: Clone>(rows: &[T], train_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if rows.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 rows to split, got {}", rows.len())));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("train fraction {train_fraction} must lie in (0, 1)")));
    }
    let idx = shuffled_indices(rows.len(), seed::tagged(seed, seed::stream::SPLIT));
    let cut = train_size(rows.len(), train_fraction);
    let train = idx[..cut].iter().map(|&i| rows[i].clone()).collect();
    let test = idx[cut..].iter().map(|&i| rows[i].clone()).collect();
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KFoldOptions {
    /// Deal rows to folds class by class so each fold mirrors the class mix.
    pub stratified: bool,
}

/// Test-row indices of every fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Seeded shuffle followed by either contiguous chunks (first `n % k`
    /// folds one row larger) or, when stratified, round-robin dealing of
    /// the shuffled rows grouped by label.
    pub fn new(labels: &[Mode], k: usize, seed: u64, options: KFoldOptions) -> Result<Self> {
        let n = labels.len();
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k = {k}, need at least 2 folds")));
        }
        if n < k {
            return Err(Error::InvalidParameter(format!("{n} rows cannot fill {k} folds")));
        }
        let mut order = shuffled_indices(n, seed::tagged(seed, seed::stream::FOLD));
        let mut folds = alloc::vec![Vec::new(); k];
        if options.stratified {
            order.sort_by_key(|&i| labels[i]);
            for (pos, i) in order.into_iter().enumerate() {
                folds[pos % k].push(i);
            }
        } else {
            let (base, extra) = (n / k, n % k);
            let mut start = 0;
            for (f, fold) in folds.iter_mut().enumerate() {
                let size = base + usize::from(f < extra);
                fold.extend_from_slice(&order[start..start + size]);
                start += size;
            }
        }
        Ok(FoldPlan { folds })
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Training rows and test rows for fold `f`.
    pub fn split(&self, rows: &[Row], f: usize) -> (Vec<Row>, Vec<Row>) {
        let mut in_test = alloc::vec![false; rows.len()];
        for &i in &self.folds[f] {
            in_test[i] = true;
        }
        let train = rows.iter().zip(&in_test).filter(|(_, &t)| !t).map(|(r, _)| r.clone()).collect();
        let test = self.folds[f].iter().map(|&i| rows[i].clone()).collect();
        (train, test)
    }
}

/// Outcome of training and scoring one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub model: ForestModel,
    pub per_class: BTreeMap<Mode, ClassTally>,
}

impl FoldResult {
    pub fn accuracy(&self) -> f64 {
        let correct: usize = self.per_class.values().map(|t| t.correct).sum();
        let total: usize = self.per_class.values().map(|t| t.total).sum();
        correct as f64 / total as f64
    }
}

/// Forest seed used for fold `f` under `seed`.
pub fn fold_seed(seed: u64, f: usize) -> u64 {
    seed::derive(seed::tagged(seed, seed::stream::FOLD), f as u64)
}

fn tally(model: &ForestModel, rows: &[Row]) -> BTreeMap<Mode, ClassTally> {
    let mut per_class: BTreeMap<Mode, ClassTally> = BTreeMap::new();
    for r in rows {
        let t = per_class.entry(r.label).or_default();
        t.total += 1;
        if model.predict(&r.features) == r.label {
            t.correct += 1;
        }
    }
    per_class
}

pub fn run_fold(rows: &[Row], plan: &FoldPlan, f: usize, params: &ForestParams, seed: u64) -> Result<FoldResult> {
    let (train, test) = plan.split(rows, f);
    let model = train_forest(&train, params, fold_seed(seed, f))?;
    let per_class = tally(&model, &test);
    Ok(FoldResult { model, per_class })
}

/// Combines fold results (in fold order) into one report.
pub fn assemble_report(folds: &[FoldResult], seed: u64, params: ForestParams) -> EvalReport {
    let mut pooled: BTreeMap<Mode, ClassTally> = BTreeMap::new();
    for fold in folds {
        for (&m, t) in &fold.per_class {
            let p = pooled.entry(m).or_default();
            p.correct += t.correct;
            p.total += t.total;
        }
    }
    let accs = folds.iter().map(FoldResult::accuracy).collect();
    EvalReport::from_tallies(pooled, Some(accs), seed, params)
}

/// Every fold's model and score.
pub fn kfold_results(rows: &[Row], k: usize, params: &ForestParams, seed: u64, options: KFoldOptions) -> Result<Vec<FoldResult>> {
    let labels: Vec<Mode> = rows.iter().map(|r| r.label).collect();
    let plan = FoldPlan::new(&labels, k, seed, options)?;
    (0..plan.k()).map(|f| run_fold(rows, &plan, f, params, seed)).collect()
}

pub fn kfold_cv(rows: &[Row], k: usize, params: &ForestParams, seed: u64, options: KFoldOptions) -> Result<EvalReport> {
    let folds = kfold_results(rows, k, params, seed, options)?;
    Ok(assemble_report(&folds, seed, *params))
}

pub fn evaluate(model: &ForestModel, rows: &[Row]) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("evaluation rows"));
    }
    Ok(EvalReport::from_tallies(tally(model, rows), None, model.master_seed, model.params))
}

/// Splits, trains on the training part and scores on the held-out part.
pub fn holdout(rows: &[Row], train_fraction: f64, params: &ForestParams, seed: u64) -> Result<(ForestModel, EvalReport)> {
    let (train, test) = split_train_test(rows, train_fraction, seed)?;
    let model = train_forest(&train, params, seed)?;
    let mut report = evaluate(&model, &test)?;
    report.seed = seed;
    Ok((model, report))
}
