//! Naive Bayes over mixed attributes.
//!
//! The posterior of class `C` for a row `X` is proportional to
//! `P(C) * prod_i P(x_i | C)`. Nominal likelihoods are Laplace-smoothed
//! frequencies `(count + alpha) / (class_count + alpha * |values|)`; numeric
//! likelihoods are Gaussian with per-class mean and variance. Missing cells
//! contribute no factor.

use serde::{Deserialize, Serialize};

use super::{check_row, training_rows};
use crate::dataset::{Cell, Dataset, Kind};
use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttributeModel {
    Nominal {
        col: usize,
        /// `probs[class][value]`
        probs: Vec<Vec<f64>>,
    },
    Numeric {
        col: usize,
        mean: Vec<f64>,
        var: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    pub n_cols: usize,
    pub class_counts: Vec<usize>,
    pub priors: Vec<f64>,
    pub attributes: Vec<AttributeModel>,
}

pub fn train_naive_bayes(train: &Dataset, alpha: f64) -> Result<NaiveBayesModel> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Training(format!(
            "smoothing alpha {alpha} must be finite and ≥ 0"
        )));
    }
    let (label, rows) = training_rows(train)?;
    if rows.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    let n_classes = train.class_names().len();
    let class_of = |r: usize| train.row(r)[label].as_nominal().unwrap() as usize;
    let mut class_counts = vec![0usize; n_classes];
    for &r in &rows {
        class_counts[class_of(r)] += 1;
    }
    let total = rows.len() as f64;
    let priors = class_counts.iter().map(|&c| c as f64 / total).collect();

    let mut attributes = Vec::new();
    for col in train.feature_indices() {
        match train.column(col).kind {
            Kind::Nominal => {
                let n_values = train.column(col).categories().len();
                let mut counts = vec![vec![0usize; n_values]; n_classes];
                for &r in &rows {
                    if let Cell::Nominal(v) = train.row(r)[col] {
                        counts[class_of(r)][v as usize] += 1;
                    }
                }
                let probs = counts
                    .iter()
                    .map(|row| {
                        let seen: usize = row.iter().sum();
                        let denom = seen as f64 + alpha * n_values as f64;
                        if denom > 0.0 {
                            row.iter().map(|&c| (c as f64 + alpha) / denom).collect()
                        } else {
                            vec![1.0 / n_values.max(1) as f64; n_values]
                        }
                    })
                    .collect();
                attributes.push(AttributeModel::Nominal { col, probs });
            }
            Kind::Numeric => {
                let mut sums = vec![(0usize, 0.0f64, 0.0f64); n_classes];
                for &r in &rows {
                    if let Cell::Numeric(x) = train.row(r)[col] {
                        let s = &mut sums[class_of(r)];
                        s.0 += 1;
                        s.1 += x;
                    }
                }
                let means: Vec<Option<f64>> = sums.iter().map(|s| (s.0 > 0).then(|| s.1 / s.0 as f64)).collect();
                for &r in &rows {
                    if let Cell::Numeric(x) = train.row(r)[col] {
                        let c = class_of(r);
                        sums[c].2 += (x - means[c].unwrap()).powi(2);
                    }
                }
                let seen: usize = sums.iter().map(|s| s.0).sum();
                if seen == 0 {
                    continue;
                }
                // Classes with no observed value borrow the pooled estimate.
                let pooled_mean = sums.iter().map(|s| s.1).sum::<f64>() / seen as f64;
                let pooled_var = rows
                    .iter()
                    .filter_map(|&r| train.row(r)[col].as_numeric())
                    .map(|x| (x - pooled_mean).powi(2))
                    .sum::<f64>()
                    / seen as f64;
                let mean = means.iter().map(|m| m.unwrap_or(pooled_mean)).collect();
                let var = sums
                    .iter()
                    .map(|s| if s.0 > 0 { s.2 / s.0 as f64 } else { pooled_var }.max(VARIANCE_FLOOR))
                    .collect();
                attributes.push(AttributeModel::Numeric { col, mean, var });
            }
        }
    }
    Ok(NaiveBayesModel {
        alpha,
        n_cols: train.n_cols(),
        class_counts,
        priors,
        attributes,
    })
}

impl NaiveBayesModel {
    /// Unnormalized log posterior per class; `-inf` for classes with zero
    /// prior or a zero likelihood factor.
    fn log_scores(&self, row: &[Cell]) -> Vec<f64> {
        let mut scores: Vec<f64> = self.priors.iter().map(|p| p.ln()).collect();
        for a in &self.attributes {
            match a {
                AttributeModel::Nominal { col, probs } => {
                    let Cell::Nominal(v) = row[*col] else { continue };
                    for (s, p) in scores.iter_mut().zip(probs) {
                        if let Some(&pv) = p.get(v as usize) {
                            *s += pv.ln();
                        }
                    }
                }
                AttributeModel::Numeric { col, mean, var } => {
                    let Cell::Numeric(x) = row[*col] else { continue };
                    for ((s, m), v) in scores.iter_mut().zip(mean).zip(var) {
                        *s += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (x - m).powi(2) / (2.0 * v);
                    }
                }
            }
        }
        scores
    }

    /// Most probable class and the normalized posterior vector. If every
    /// class has a zero likelihood (possible only with `alpha = 0`), the
    /// priors are returned as the posterior.
    pub fn predict(&self, row: &[Cell]) -> Result<(u32, Vec<f64>)> {
        check_row(row, self.n_cols)?;
        let scores = self.log_scores(row);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            let best = argmax(&self.priors);
            return Ok((best, self.priors.clone()));
        }
        let weights: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = weights.iter().sum();
        let posterior: Vec<f64> = weights.iter().map(|w| w / z).collect();
        Ok((argmax(&scores), posterior))
    }

    pub fn predict_class(&self, row: &[Cell]) -> Result<u32> {
        self.predict(row).map(|p| p.0)
    }
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> u32 {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as u32
}
