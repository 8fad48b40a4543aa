//! Train/test splitting, accuracy scoring and the experiment grid.
//!
//! A grid cell is one (dataset, label, strategy, classifier, sample size)
//! combination. Each cell runs a fixed number of iterations; every iteration
//! draws a fresh sample, splits it, trains, and scores test accuracy. The
//! best iteration is the headline number, and mean and standard deviation
//! are kept alongside it.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::classifiers::Classifier;
use crate::config::ConfigDoc;
use crate::dataset::{Dataset, Kind};
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::rng;
use crate::sampler::{self, largest_remainder, SamplingPlan, Strategy, DEFAULT_MINORITY_RATIO};

pub const DEFAULT_SIZES: [usize; 9] = [500, 1000, 2000, 5000, 10000, 15000, 20000, 25000, 30000];
pub const DEFAULT_SPLIT_RATIO: f64 = 0.6;
pub const DEFAULT_ITERATIONS: usize = 10;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Splits `ds` into train and test parts. Train receives `round(ratio * n)`
/// rows, chosen uniformly or, with `stratify`, per class in proportion
/// (largest remainder). Both parts keep the input row order.
///
/// ```
/// # use strata_bench::{Dataset, Column};
/// # use strata_bench::evaluator::split_train_test;
/// let mut ds = Dataset::new(vec![Column::numeric("x")]).unwrap();
/// for i in 0..5 {
///     ds.push_text_row(&[Some(i.to_string())]).unwrap();
/// }
/// let (train, test) = split_train_test(&ds, 0.6, 7, false).unwrap();
/// assert_eq!((train.n_rows(), test.n_rows()), (3, 2));
/// ```
pub fn split_train_test(ds: &Dataset, ratio: f64, seed: u64, stratify: bool) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Split(format!("ratio {ratio} outside (0, 1)")));
    }
    let n = ds.n_rows();
    let n_train = (ratio * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Split(format!("ratio {ratio} on {n} rows leaves one side empty")));
    }
    let mut train: Vec<usize> = if stratify {
        let label = ds
            .label_index()
            .ok_or_else(|| Error::Split("stratified split needs a label column".into()))?;
        // One group per class in class order, then rows with no label.
        let n_classes = ds.column(label).categories().len();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_classes + 1];
        for r in 0..n {
            let g = ds.row(r)[label].as_nominal().map_or(n_classes, |c| c as usize);
            groups[g].push(r);
        }
        let counts: Vec<usize> = groups.iter().map(Vec::len).collect();
        let quotas = largest_remainder(&counts, n_train);
        let mut out = Vec::with_capacity(n_train);
        for (g, (mut rows, q)) in groups.into_iter().zip(quotas).enumerate() {
            rows.shuffle(&mut rng::rng(rng::derive(seed, g as u64)));
            out.extend_from_slice(&rows[..q]);
        }
        out
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng::rng(seed));
        all.truncate(n_train);
        all
    };
    train.sort_unstable();
    let mut in_train = vec![false; n];
    for &r in &train {
        in_train[r] = true;
    }
    let test: Vec<usize> = (0..n).filter(|&r| !in_train[r]).collect();
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

/// Fraction of positions where `predictions` and `truth` agree.
pub fn accuracy(predictions: &[u32], truth: &[u32]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::Evaluation(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Evaluation("nothing to score".into()));
    }
    let hits = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Coordinates of one grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellKey {
    pub dataset: String,
    pub label: String,
    pub strategy: Strategy,
    pub classifier: Classifier,
    pub sample_size: usize,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}/{}",
            self.dataset,
            self.label,
            self.strategy,
            self.classifier.label(),
            self.sample_size
        )
    }
}

/// Per-cell settings shared by every cell of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellOptions {
    pub iterations: usize,
    pub split_ratio: f64,
    pub minority_ratio: f64,
    pub with_replacement: bool,
    pub stratify_split: bool,
}

impl Default for CellOptions {
    fn default() -> Self {
        CellOptions {
            iterations: DEFAULT_ITERATIONS,
            split_ratio: DEFAULT_SPLIT_RATIO,
            minority_ratio: DEFAULT_MINORITY_RATIO,
            with_replacement: false,
            stratify_split: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalCell {
    pub dataset: String,
    pub label: String,
    pub strategy: Strategy,
    pub classifier: String,
    pub sample_size: usize,
    pub seed: u64,
    pub accuracies: Vec<f64>,
    pub status: CellStatus,
}

impl EvalCell {
    fn new(key: &CellKey, seed: u64, accuracies: Vec<f64>, status: CellStatus) -> Self {
        EvalCell {
            dataset: key.dataset.clone(),
            label: key.label.clone(),
            strategy: key.strategy,
            classifier: key.classifier.label(),
            sample_size: key.sample_size,
            seed,
            accuracies,
            status,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.status, CellStatus::Skipped(_))
    }

    pub fn best(&self) -> Option<f64> {
        self.accuracies.iter().copied().reduce(f64::max)
    }

    pub fn mean(&self) -> Option<f64> {
        if self.accuracies.is_empty() {
            return None;
        }
        Some(self.accuracies.iter().sum::<f64>() / self.accuracies.len() as f64)
    }

    /// Sample standard deviation; 0 for a single iteration.
    pub fn stddev(&self) -> Option<f64> {
        let m = self.mean()?;
        let n = self.accuracies.len();
        if n < 2 {
            return Some(0.0);
        }
        let ss: f64 = self.accuracies.iter().map(|a| (a - m).powi(2)).sum();
        Some((ss / (n - 1) as f64).sqrt())
    }
}

/// Sets `label` as the class column and drops rows where it is missing.
fn with_label(ds: &Dataset, label: &str) -> Result<Dataset> {
    let mut out = ds.clone();
    if out.label_name() != Some(label) {
        out.set_label(label)?;
    }
    let l = out.require_label()?;
    out.retain_rows(|r| !r[l].is_missing());
    Ok(out)
}

fn run_iterations(ds: &Dataset, key: &CellKey, opts: &CellOptions, seed: u64) -> Result<Vec<f64>> {
    (0..opts.iterations as u64)
        .into_par_iter()
        .map(|i| {
            let sub = rng::derive(seed, i);
            let plan = SamplingPlan {
                strategy: key.strategy,
                n: key.sample_size,
                seed: rng::derive(sub, 0),
                minority_ratio: opts.minority_ratio,
                with_replacement: opts.with_replacement,
            };
            let sample = sampler::sample(ds, Some(&key.label), &plan)?;
            let (train, test) = split_train_test(&sample, opts.split_ratio, rng::derive(sub, 1), opts.stratify_split)?;
            let model = key.classifier.train(&train)?;
            let predictions = model.predict_all(&test)?;
            let truth: Vec<u32> = (0..test.n_rows()).map(|r| test.label_of(r).unwrap()).collect();
            accuracy(&predictions, &truth)
        })
        .collect()
}

/// Runs one cell. Errors (typically sampling capacity) come back wrapped
/// with the cell coordinates.
pub fn run_cell(ds: &Dataset, key: &CellKey, opts: &CellOptions, seed: u64) -> Result<EvalCell> {
    let wrap = |e: Error| Error::Cell {
        context: format!("cell {key}"),
        source: Box::new(e),
    };
    if opts.iterations == 0 {
        return Err(wrap(Error::Config("iterations must be at least 1".into())));
    }
    let ds = with_label(ds, &key.label).map_err(wrap)?;
    let acc = run_iterations(&ds, key, opts, seed).map_err(wrap)?;
    Ok(EvalCell::new(key, seed, acc, CellStatus::Ok))
}

/// Experiment grid definition, read from the `key = value` dialect:
///
/// ```text
/// datasets = breast, mixed
/// data.breast = breast.csv
/// data.mixed = mixed.csv
/// labels = survival, stage, metastasis
/// strategies = random, stratified, balanced
/// classifiers = DT, NB, KNN
/// sizes = 500, 1000, 2000
/// seed = 42
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub datasets: Vec<String>,
    /// Dataset id → CSV path, as written in the config.
    pub data: BTreeMap<String, PathBuf>,
    pub labels: Vec<String>,
    pub strategies: Vec<Strategy>,
    pub classifiers: Vec<Classifier>,
    pub sizes: Vec<usize>,
    /// Master seed; 0 when unset.
    pub seed: Option<u64>,
    /// Columns removed before every cell besides the non-target labels.
    pub exclude_columns: Vec<String>,
    pub options: CellOptions,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            datasets: Vec::new(),
            data: BTreeMap::new(),
            labels: Vec::new(),
            strategies: Strategy::ALL.to_vec(),
            classifiers: Classifier::defaults().to_vec(),
            sizes: DEFAULT_SIZES.to_vec(),
            seed: None,
            exclude_columns: Vec::new(),
            options: CellOptions::default(),
        }
    }
}

const GRID_KEYS: &[&str] = &[
    "datasets",
    "data.*",
    "labels",
    "strategies",
    "classifiers",
    "sizes",
    "split_ratio",
    "iterations",
    "seed",
    "minority_ratio",
    "with_replacement",
    "stratify_split",
    "exclude_columns",
];

impl GridConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text)?;
        if let Some(s) = doc.sections.first() {
            return Err(Error::Config(format!(
                "line {}: sections are not used in grid configs",
                s.line
            )));
        }
        let top = &doc.top;
        top.check_keys(GRID_KEYS)?;
        let d = GridConfig::default();
        let mut data = BTreeMap::new();
        let mut data_order = Vec::new();
        for (k, v, _) in &top.entries {
            if let Some(id) = k.strip_prefix("data.") {
                data.insert(id.to_string(), PathBuf::from(v));
                data_order.push(id.to_string());
            }
        }
        let cfg = GridConfig {
            datasets: top.list("datasets").unwrap_or(data_order),
            data,
            labels: top.list("labels").unwrap_or_default(),
            strategies: top.parse_list("strategies")?.unwrap_or(d.strategies),
            classifiers: top.parse_list("classifiers")?.unwrap_or(d.classifiers),
            sizes: top.parse_list("sizes")?.unwrap_or(d.sizes),
            seed: top.get("seed").map(|_| top.parse_or("seed", 0u64)).transpose()?,
            exclude_columns: top.list("exclude_columns").unwrap_or_default(),
            options: CellOptions {
                iterations: top.parse_or("iterations", d.options.iterations)?,
                split_ratio: top.parse_or("split_ratio", d.options.split_ratio)?,
                minority_ratio: top.parse_or("minority_ratio", d.options.minority_ratio)?,
                with_replacement: top.parse_or("with_replacement", d.options.with_replacement)?,
                stratify_split: top.parse_or("stratify_split", d.options.stratify_split)?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.datasets.is_empty() {
            return err("no datasets listed".into());
        }
        if self.labels.is_empty() {
            return err("no labels listed".into());
        }
        if self.strategies.is_empty() || self.classifiers.is_empty() {
            return err("strategies and classifiers must not be empty".into());
        }
        if self.sizes.is_empty() || self.sizes[0] == 0 || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return err(format!(
                "sizes {:?} must be positive and strictly increasing",
                self.sizes
            ));
        }
        let o = &self.options;
        if !(o.split_ratio > 0.0 && o.split_ratio < 1.0) {
            return err(format!("split_ratio {} outside (0, 1)", o.split_ratio));
        }
        if o.iterations == 0 {
            return err("iterations must be at least 1".into());
        }
        if !(0.0..1.0).contains(&o.minority_ratio) {
            return err(format!("minority_ratio {} outside [0, 1)", o.minority_ratio));
        }
        for (name, list) in [("datasets", &self.datasets), ("labels", &self.labels)] {
            if let Some(dup) = list.iter().enumerate().find(|(i, x)| list[..*i].contains(x)) {
                return err(format!("{name} lists `{}` twice", dup.1));
            }
        }
        let labels: Vec<String> = self.classifiers.iter().map(Classifier::label).collect();
        if labels.iter().enumerate().any(|(i, l)| labels[..i].contains(l)) {
            return err("classifiers contain a duplicate".into());
        }
        if self
            .strategies
            .iter()
            .enumerate()
            .any(|(i, s)| self.strategies[..i].contains(s))
        {
            return err("strategies contain a duplicate".into());
        }
        Ok(())
    }

    /// Loads every dataset named in `datasets`; relative paths resolve
    /// against `base_dir`.
    pub fn load_datasets(&self, base_dir: &Path) -> Result<Vec<(String, Dataset)>> {
        self.datasets
            .iter()
            .map(|id| {
                let p = self
                    .data
                    .get(id)
                    .ok_or_else(|| Error::Config(format!("dataset `{id}` has no `data.{id}` path")))?;
                Ok((id.clone(), Dataset::read_csv(&base_dir.join(p))?))
            })
            .collect()
    }

    pub fn n_cells(&self) -> usize {
        self.datasets.len() * self.labels.len() * self.strategies.len() * self.classifiers.len() * self.sizes.len()
    }
}

/// Seed of a cell: the master seed mixed with the cell coordinates, so it
/// does not depend on which cells run or in what order.
pub fn cell_seed(master: u64, key: &CellKey) -> u64 {
    rng::derive_str(master, &key.to_string())
}

/// Runs every cell of the grid on a pool of `jobs` threads (0 = rayon's
/// default). Cells that cannot run are recorded as skipped with the reason;
/// only a dataset id with no loaded data is an error.
pub fn run_grid(cfg: &GridConfig, datasets: &[(String, Dataset)], jobs: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    // One prepared table per (dataset, label), or the reason it is unusable.
    let mut prepared: Vec<std::result::Result<Dataset, String>> = Vec::new();
    let mut cells = Vec::with_capacity(cfg.n_cells());
    for id in &cfg.datasets {
        let ds = &datasets
            .iter()
            .find(|(d, _)| d == id)
            .ok_or_else(|| Error::Config(format!("dataset `{id}` was not loaded")))?
            .1;
        for label in &cfg.labels {
            prepared.push(prepare(ds, label, cfg));
            let p = prepared.len() - 1;
            for &strategy in &cfg.strategies {
                for classifier in &cfg.classifiers {
                    for &sample_size in &cfg.sizes {
                        let key = CellKey {
                            dataset: id.clone(),
                            label: label.clone(),
                            strategy,
                            classifier: classifier.clone(),
                            sample_size,
                        };
                        cells.push((p, key));
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    let results = pool.install(|| {
        cells
            .par_iter()
            .map(|(p, key)| {
                let seed = cell_seed(cfg.seed.unwrap_or(0), key);
                match &prepared[*p] {
                    Err(reason) => EvalCell::new(key, seed, Vec::new(), CellStatus::Skipped(reason.clone())),
                    Ok(ds) => match run_iterations(ds, key, &cfg.options, seed) {
                        Ok(acc) => EvalCell::new(key, seed, acc, CellStatus::Ok),
                        Err(e) => EvalCell::new(key, seed, Vec::new(), CellStatus::Skipped(e.to_string())),
                    },
                }
            })
            .collect()
    });
    Ok(ExperimentReport { cells: results })
}

fn prepare(ds: &Dataset, label: &str, cfg: &GridConfig) -> std::result::Result<Dataset, String> {
    let Some(idx) = ds.column_index(label) else {
        return Err(format!("dataset has no column `{label}`"));
    };
    if ds.column(idx).kind != Kind::Nominal {
        return Err(format!("label `{label}` is not nominal"));
    }
    let drop: Vec<&str> = cfg
        .labels
        .iter()
        .chain(&cfg.exclude_columns)
        .map(String::as_str)
        .filter(|c| *c != label)
        .collect();
    with_label(&ds.drop_columns(&drop), label).map_err(|e| e.to_string())
}

/// All cells of a grid run in canonical order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub cells: Vec<EvalCell>,
}

const RESULTS_HEADER: [&str; 7] = [
    "dataset",
    "label",
    "strategy",
    "classifier",
    "sample_size",
    "iteration",
    "accuracy",
];
const SUMMARY_HEADER: [&str; 11] = [
    "dataset",
    "label",
    "strategy",
    "classifier",
    "sample_size",
    "seed",
    "iterations",
    "best",
    "mean",
    "stddev",
    "status",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl ExperimentReport {
    /// `(dataset, label)` pairs in first-seen order.
    pub fn blocks(&self) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = Vec::new();
        for c in &self.cells {
            let k = (c.dataset.as_str(), c.label.as_str());
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    }

    /// Best accuracy per sample size for one strategy/classifier series.
    pub fn series(
        &self,
        dataset: &str,
        label: &str,
        strategy: Strategy,
        classifier: &str,
    ) -> Vec<(usize, Option<f64>)> {
        self.cells
            .iter()
            .filter(|c| {
                c.dataset == dataset && c.label == label && c.strategy == strategy && c.classifier == classifier
            })
            .map(|c| (c.sample_size, c.best()))
            .collect()
    }

    /// One row per iteration of every completed cell.
    pub fn write_results_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(RESULTS_HEADER)?;
        for c in &self.cells {
            for (i, a) in c.accuracies.iter().enumerate() {
                out.write_record([
                    c.dataset.as_str(),
                    &c.label,
                    c.strategy.as_str(),
                    &c.classifier,
                    &c.sample_size.to_string(),
                    &(i + 1).to_string(),
                    &a.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// One row per cell, including skipped ones (`status` carries the
    /// reason).
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(SUMMARY_HEADER)?;
        for c in &self.cells {
            let status = match &c.status {
                CellStatus::Ok => "ok".to_string(),
                CellStatus::Skipped(r) => format!("skipped: {r}"),
            };
            out.write_record([
                c.dataset.as_str(),
                &c.label,
                c.strategy.as_str(),
                &c.classifier,
                &c.sample_size.to_string(),
                &c.seed.to_string(),
                &c.accuracies.len().to_string(),
                &opt(c.best()),
                &opt(c.mean()),
                &opt(c.stddev()),
                &status,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn results_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_results_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_summary_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Writes `results.csv` and `summary.csv` into `dir`, creating it.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join(RESULTS_FILE), self.results_csv()?.as_bytes())?;
        write_atomic(&dir.join(SUMMARY_FILE), self.summary_csv()?.as_bytes())
    }

    /// Rebuilds a report from the summary and results tables.
    pub fn read_from<R: Read>(summary: R, results: R) -> Result<Self> {
        let mut cells = Vec::new();
        let mut rd = csv::Reader::from_reader(summary);
        if rd.headers()?.iter().ne(SUMMARY_HEADER) {
            return Err(Error::Format("summary table has an unexpected header".into()));
        }
        for rec in rd.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<u64> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::Format(format!("summary: bad number `{}`", &rec[i])))
            };
            let status = match &rec[10] {
                "ok" => CellStatus::Ok,
                s => CellStatus::Skipped(
                    s.strip_prefix("skipped: ")
                        .ok_or_else(|| Error::Format(format!("summary: bad status `{s}`")))?
                        .to_string(),
                ),
            };
            cells.push(EvalCell {
                dataset: rec[0].to_string(),
                label: rec[1].to_string(),
                strategy: rec[2].parse()?,
                classifier: rec[3].to_string(),
                sample_size: num(4)? as usize,
                seed: num(5)?,
                accuracies: Vec::with_capacity(num(6)? as usize),
                status,
            });
        }
        let mut rd = csv::Reader::from_reader(results);
        if rd.headers()?.iter().ne(RESULTS_HEADER) {
            return Err(Error::Format("results table has an unexpected header".into()));
        }
        let mut pos = 0;
        for rec in rd.records() {
            let rec = rec?;
            let size: usize = rec[4]
                .parse()
                .map_err(|_| Error::Format(format!("results: bad sample size `{}`", &rec[4])))?;
            let acc: f64 = rec[6]
                .parse()
                .map_err(|_| Error::Format(format!("results: bad accuracy `{}`", &rec[6])))?;
            let same = |c: &EvalCell| {
                c.dataset == rec[0]
                    && c.label == rec[1]
                    && c.strategy.as_str() == &rec[2]
                    && c.classifier == rec[3]
                    && c.sample_size == size
            };
            // Results are grouped by cell in summary order.
            while pos < cells.len()
                && !(same(&cells[pos]) && cells[pos].accuracies.len() < cells[pos].accuracies.capacity())
            {
                pos += 1;
            }
            let cell = cells.get_mut(pos).ok_or_else(|| {
                Error::Format(format!(
                    "results row for unknown cell {}/{}/{}/{}/{size}",
                    &rec[0], &rec[1], &rec[2], &rec[3]
                ))
            })?;
            cell.accuracies.push(acc);
        }
        Ok(ExperimentReport { cells })
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let summary = std::fs::File::open(dir.join(SUMMARY_FILE))?;
        let results = std::fs::File::open(dir.join(RESULTS_FILE))?;
        Self::read_from(summary, results)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::TreeParams;
    use crate::dataset::Column;

    fn rows(n: usize) -> Dataset {
        let mut ds = Dataset::new(vec![Column::numeric("id"), Column::nominal("y")]).unwrap();
        for i in 0..n {
            let y = if i % 10 < 6 { "a" } else { "b" };
            ds.push_text_row(&[Some(i.to_string()), Some(y.to_string())]).unwrap();
        }
        ds.with_label("y").unwrap()
    }

    fn ids(ds: &Dataset) -> Vec<u64> {
        ds.rows().iter().map(|r| r[0].as_numeric().unwrap() as u64).collect()
    }

    #[test]
    fn split_sizes_and_partition() {
        let ds = rows(10);
        let (tr, te) = split_train_test(&ds, 0.6, 3, false).unwrap();
        assert_eq!((tr.n_rows(), te.n_rows()), (6, 4));
        let mut all = ids(&tr);
        all.extend(ids(&te));
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(split_train_test(&ds, 0.6, 3, false).unwrap().0, tr);
    }

    #[test]
    fn stratified_split_keeps_mix() {
        let ds = rows(100);
        let (tr, _) = split_train_test(&ds, 0.6, 9, true).unwrap();
        let a = (0..tr.n_rows()).filter(|&r| tr.label_of(r) == Some(0)).count();
        assert_eq!(tr.n_rows(), 60);
        assert!((35..=37).contains(&a), "{a}");
    }

    #[test]
    fn split_errors() {
        assert!(split_train_test(&rows(1), 0.6, 0, false).is_err());
        assert!(split_train_test(&rows(10), 1.0, 0, false).is_err());
        assert!(split_train_test(&rows(10), 0.0, 0, false).is_err());
        assert!(split_train_test(&rows(10), 0.01, 0, false).is_err());
    }

    #[test]
    fn accuracy_counts() {
        assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 3, 4]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert_eq!(accuracy(&[1, 2, 3, 0], &[1, 2, 3, 4]).unwrap(), 0.75);
        assert!(accuracy(&[1], &[1, 2]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    /// Label is a copy of nominal attribute `a`.
    fn learnable(n: usize) -> Dataset {
        let mut ds = Dataset::new(vec![
            Column::nominal("a"),
            Column::numeric("noise"),
            Column::nominal("y"),
        ])
        .unwrap();
        for i in 0..n {
            let v = ["p", "q", "r"][(i * 7 + i / 3) % 3];
            ds.push_text_row(&[
                Some(v.to_string()),
                Some(((i * 37) % 101).to_string()),
                Some(v.to_string()),
            ])
            .unwrap();
        }
        ds
    }

    fn key(strategy: Strategy, classifier: Classifier, size: usize) -> CellKey {
        CellKey {
            dataset: "d".into(),
            label: "y".into(),
            strategy,
            classifier,
            sample_size: size,
        }
    }

    #[test]
    fn learnable_cells_score_perfectly() {
        let ds = learnable(600);
        for s in Strategy::ALL {
            for c in Classifier::defaults() {
                let cell = run_cell(
                    &ds,
                    &key(s, c, 300),
                    &CellOptions {
                        iterations: 3,
                        ..Default::default()
                    },
                    5,
                )
                .unwrap();
                assert_eq!(cell.accuracies.len(), 3);
                assert_eq!(cell.best(), Some(1.0), "{s} {}", cell.classifier);
            }
        }
    }

    #[test]
    fn run_cell_is_deterministic_and_single_iteration_best() {
        let ds = learnable(300);
        let k = key(Strategy::Random, Classifier::NaiveBayes { alpha: 1.0 }, 100);
        let opts = CellOptions {
            iterations: 1,
            ..Default::default()
        };
        let a = run_cell(&ds, &k, &opts, 11).unwrap();
        assert_eq!(a, run_cell(&ds, &k, &opts, 11).unwrap());
        assert_eq!(a.best(), Some(a.accuracies[0]));
        assert_eq!(a.stddev(), Some(0.0));
    }

    #[test]
    fn run_cell_annotates_capacity_errors() {
        let ds = learnable(90);
        let k = key(Strategy::Random, Classifier::defaults()[0].clone(), 500);
        let err = run_cell(&ds, &k, &CellOptions::default(), 1).unwrap_err();
        assert!(err.to_string().starts_with("cell d/y/random/DT/500"), "{err}");
    }

    fn grid_cfg() -> GridConfig {
        GridConfig::parse(
            "datasets = d\ndata.d = d.csv\nlabels = y\nstrategies = balanced\nclassifiers = DT\n\
             sizes = 100, 200\niterations = 2\nseed = 4\n",
        )
        .unwrap()
    }

    #[test]
    fn grid_cardinality_and_skips() {
        let cfg = grid_cfg();
        assert_eq!(cfg.n_cells(), 2);
        let report = run_grid(&cfg, &[("d".into(), learnable(150))], 2).unwrap();
        assert_eq!(report.cells.len(), 2);
        assert_eq!(report.cells[0].status, CellStatus::Ok);
        match &report.cells[1].status {
            CellStatus::Skipped(r) => assert!(r.contains("capacity"), "{r}"),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn grid_skips_missing_label() {
        let mut cfg = grid_cfg();
        cfg.labels = vec!["y".into(), "nope".into()];
        let report = run_grid(&cfg, &[("d".into(), learnable(300))], 1).unwrap();
        assert_eq!(report.cells.len(), 4);
        assert!(report.cells[2].is_skipped() && report.cells[3].is_skipped());
        assert!(!report.cells[0].is_skipped());
    }

    #[test]
    fn grid_is_independent_of_jobs() {
        let mut cfg = grid_cfg();
        cfg.strategies = Strategy::ALL.to_vec();
        cfg.classifiers = Classifier::defaults().to_vec();
        let data = [("d".to_string(), learnable(400))];
        let a = run_grid(&cfg, &data, 1).unwrap();
        let b = run_grid(&cfg, &data, 4).unwrap();
        assert_eq!(a.results_csv().unwrap(), b.results_csv().unwrap());
        assert_eq!(a.summary_csv().unwrap(), b.summary_csv().unwrap());
    }

    #[test]
    fn report_round_trips_through_csv() {
        let mut cfg = grid_cfg();
        cfg.classifiers = vec![
            Classifier::DecisionTree(TreeParams {
                min_leaf: 1,
                max_depth: None,
            }),
            Classifier::NaiveBayes { alpha: 1.0 },
        ];
        let report = run_grid(&cfg, &[("d".into(), learnable(150))], 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        report.save(dir.path()).unwrap();
        let back = ExperimentReport::load(dir.path()).unwrap();
        assert_eq!(back.cells, report.cells);
    }

    #[test]
    fn config_validation() {
        assert!(GridConfig::parse("data.d = x.csv\nlabels = y\nsizes = 10, 5\n").is_err());
        assert!(GridConfig::parse("data.d = x.csv\nlabels = y\nsplit_ratio = 1\n").is_err());
        assert!(GridConfig::parse("data.d = x.csv\n").is_err());
        assert!(GridConfig::parse("data.d = x.csv\nlabels = y\nclassifiers = DT, dt\n").is_err());
        assert!(GridConfig::parse("data.d = x.csv\nlabels = y\nsizez = 1\n").is_err());
        let cfg =
            GridConfig::parse("data.d = x.csv\nlabels = y, z\nclassifiers = DT(min_leaf=1,max_depth=3), KNN(k=5)\n")
                .unwrap();
        assert_eq!(cfg.datasets, vec!["d"]);
        assert_eq!(cfg.sizes, DEFAULT_SIZES.to_vec());
        assert_eq!(cfg.options.split_ratio, 0.6);
        assert_eq!(cfg.options.iterations, 10);
        assert_eq!(cfg.classifiers[1], Classifier::Knn { k: 5 });
        assert_eq!(cfg.n_cells(), 2 * 3 * 2 * 9);
    }
}
