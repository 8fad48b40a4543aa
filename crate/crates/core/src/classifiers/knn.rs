//! k-nearest neighbours with a mixed nominal/numeric distance.

use std::cmp::Ordering;

use super::{check_row, training_rows};
use crate::dataset::{Cell, Dataset, Kind};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 10;

/// One predictor column as seen by [`mixed_distance`]. For numeric columns
/// `min`/`max` are the training range; both are 0 for nominal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceColumn {
    pub index: usize,
    pub kind: Kind,
    pub min: f64,
    pub max: f64,
}

impl DistanceColumn {
    fn term(&self, a: &Cell, b: &Cell) -> f64 {
        match (a, b) {
            (Cell::Nominal(x), Cell::Nominal(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (Cell::Numeric(x), Cell::Numeric(y)) => {
                let range = self.max - self.min;
                if range > 0.0 {
                    (x.clamp(self.min, self.max) - y.clamp(self.min, self.max)) / range
                } else if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            _ => 1.0,
        }
    }
}

/// Feature columns of `ds` with numeric ranges measured on its rows.
pub fn distance_schema(ds: &Dataset) -> Vec<DistanceColumn> {
    ds.feature_indices()
        .into_iter()
        .map(|index| {
            let kind = ds.column(index).kind;
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            if kind == Kind::Numeric {
                for row in ds.rows() {
                    if let Cell::Numeric(x) = row[index] {
                        min = min.min(x);
                        max = max.max(x);
                    }
                }
            }
            if min > max {
                (min, max) = (0.0, 0.0);
            }
            DistanceColumn { index, kind, min, max }
        })
        .collect()
}

/// Euclidean combination of per-column terms: nominal cells contribute 0 or
/// 1, numeric cells their difference after min-max scaling into `[0, 1]`
/// (values outside the range are clamped), and a missing cell on either
/// side contributes 1.
///
/// ```
/// # use strata_bench::classifiers::{mixed_distance, DistanceColumn};
/// # use strata_bench::{Cell, Kind};
/// let schema = [
///     DistanceColumn { index: 0, kind: Kind::Nominal, min: 0.0, max: 0.0 },
///     DistanceColumn { index: 1, kind: Kind::Numeric, min: 0.0, max: 10.0 },
/// ];
/// let a = [Cell::Nominal(0), Cell::Numeric(0.0)];
/// let b = [Cell::Nominal(1), Cell::Numeric(10.0)];
/// assert_eq!(mixed_distance(&a, &b, &schema), 2f64.sqrt());
/// ```
pub fn mixed_distance(a: &[Cell], b: &[Cell], schema: &[DistanceColumn]) -> f64 {
    schema
        .iter()
        .map(|c| c.term(&a[c.index], &b[c.index]).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub n_cols: usize,
    pub n_classes: usize,
    pub schema: Vec<DistanceColumn>,
    pub rows: Vec<Vec<Cell>>,
    pub labels: Vec<u32>,
}

pub fn train_knn(train: &Dataset, k: usize) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::Training("k must be at least 1".into()));
    }
    let (label, rows) = training_rows(train)?;
    if rows.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    Ok(KnnModel {
        k,
        n_cols: train.n_cols(),
        n_classes: train.class_names().len(),
        schema: distance_schema(train),
        labels: rows
            .iter()
            .map(|&r| train.row(r)[label].as_nominal().unwrap())
            .collect(),
        rows: rows.iter().map(|&r| train.row(r).to_vec()).collect(),
    })
}

fn by_distance(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

impl KnnModel {
    /// The k nearest training rows as `(distance, training index)`, nearest
    /// first; equal distances keep training order.
    pub fn neighbours(&self, row: &[Cell]) -> Result<Vec<(f64, usize)>> {
        check_row(row, self.n_cols)?;
        if self.rows.is_empty() {
            return Err(Error::Prediction("model holds no training rows".into()));
        }
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (mixed_distance(row, r, &self.schema), i))
            .collect();
        let k = self.k.min(d.len());
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, by_distance);
            d.truncate(k);
        }
        d.sort_by(by_distance);
        Ok(d)
    }

    /// Majority vote of the k nearest rows. Vote ties go to the class with
    /// the smaller mean neighbour distance, then to the earlier class.
    pub fn predict(&self, row: &[Cell]) -> Result<u32> {
        let nb = self.neighbours(row)?;
        let mut votes = vec![(0usize, 0.0f64); self.n_classes];
        for &(dist, i) in &nb {
            let v = &mut votes[self.labels[i] as usize];
            v.0 += 1;
            v.1 += dist;
        }
        let mut best = 0;
        for c in 1..votes.len() {
            let (n, s) = votes[c];
            let (bn, bs) = votes[best];
            if n > bn || (n == bn && n > 0 && s / (n as f64) < bs / (bn as f64)) {
                best = c;
            }
        }
        Ok(best as u32)
    }
}
