//! Column and row filters: missing-value removal, same-category
//! correlation pruning, and low information-gain pruning.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::dataset::{Cell, Dataset, Kind};
use crate::error::{Error, Result};

pub const DEFAULT_MISSING_THRESHOLD: f64 = 0.5;
pub const DEFAULT_CORRELATION_THRESHOLD: f64 = 0.95;
pub const DEFAULT_MIN_GAIN: f64 = 0.001;
pub const DEFAULT_NUMERIC_BINS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowPolicy {
    DropAnyMissing,
    Keep,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterReport {
    /// (column, missing fraction)
    pub removed_by_missing: Vec<(String, f64)>,
    /// (kept, dropped, association)
    pub removed_by_correlation: Vec<(String, String, f64)>,
    /// (column, information gain in bits)
    pub removed_by_infogain: Vec<(String, f64)>,
    pub rows_removed: usize,
}

impl FilterReport {
    pub fn is_empty(&self) -> bool {
        self.removed_by_missing.is_empty()
            && self.removed_by_correlation.is_empty()
            && self.removed_by_infogain.is_empty()
            && self.rows_removed == 0
    }

    pub fn merge(&mut self, other: FilterReport) {
        self.removed_by_missing.extend(other.removed_by_missing);
        self.removed_by_correlation.extend(other.removed_by_correlation);
        self.removed_by_infogain.extend(other.removed_by_infogain);
        self.rows_removed += other.rows_removed;
    }

    /// CSV with columns `filter,column,reference,score`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(["filter", "column", "reference", "score"])?;
        for (c, f) in &self.removed_by_missing {
            out.write_record(["missing", c, "", &format!("{f:.6}")])?;
        }
        for (kept, dropped, s) in &self.removed_by_correlation {
            out.write_record(["correlation", dropped, kept, &format!("{s:.6}")])?;
        }
        for (c, g) in &self.removed_by_infogain {
            out.write_record(["infogain", c, "", &format!("{g:.6}")])?;
        }
        if self.rows_removed > 0 {
            out.write_record(["rows", "", "", &self.rows_removed.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_predictors_left(ds: &Dataset, what: &str) -> Result<()> {
    if ds.feature_indices().is_empty() {
        return Err(Error::Degenerate(format!("{what} removed every predictor column")));
    }
    Ok(())
}

/// Drops columns whose missing fraction is strictly above `col_threshold`,
/// then (under [`RowPolicy::DropAnyMissing`]) rows with any missing cell.
/// The label column is never dropped.
pub fn remove_missing(ds: &Dataset, col_threshold: f64, row_policy: RowPolicy) -> Result<(Dataset, FilterReport)> {
    if !(0.0..=1.0).contains(&col_threshold) {
        return Err(Error::Config(format!(
            "missing threshold {col_threshold} outside [0, 1]"
        )));
    }
    let mut report = FilterReport::default();
    let n = ds.n_rows();
    let mut drop = vec![false; ds.n_cols()];
    for j in ds.feature_indices() {
        let missing = ds.rows().iter().filter(|r| r[j].is_missing()).count();
        let frac = if n == 0 { 0.0 } else { missing as f64 / n as f64 };
        if frac > col_threshold {
            drop[j] = true;
            report.removed_by_missing.push((ds.column(j).name.clone(), frac));
        }
    }
    let mut out = ds.retain_columns(|j| !drop[j]);
    check_predictors_left(&out, "missing-value filter")?;
    if row_policy == RowPolicy::DropAnyMissing {
        let before = out.n_rows();
        out.retain_rows(|r| !r.iter().any(Cell::is_missing));
        report.rows_removed = before - out.n_rows();
    }
    Ok((out, report))
}

/// Pearson |r| over rows where both cells are present; 0 when undefined.
pub fn pearson_abs(ds: &Dataset, a: usize, b: usize) -> f64 {
    let pairs: Vec<(f64, f64)> = ds
        .rows()
        .iter()
        .filter_map(|r| Some((r[a].as_numeric()?, r[b].as_numeric()?)))
        .collect();
    if pairs.len() < 2 {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).abs().min(1.0)
}

/// Cramér's V over rows where both cells are present; 0 when undefined.
pub fn cramers_v(ds: &Dataset, a: usize, b: usize) -> f64 {
    let mut table: HashMap<(u32, u32), f64> = HashMap::new();
    let mut ra: HashMap<u32, f64> = HashMap::new();
    let mut rb: HashMap<u32, f64> = HashMap::new();
    let mut n = 0.0;
    for r in ds.rows() {
        if let (Some(x), Some(y)) = (r[a].as_nominal(), r[b].as_nominal()) {
            *table.entry((x, y)).or_default() += 1.0;
            *ra.entry(x).or_default() += 1.0;
            *rb.entry(y).or_default() += 1.0;
            n += 1.0;
        }
    }
    let k = ra.len().min(rb.len());
    if k < 2 {
        return 0.0;
    }
    let mut chi2 = 0.0;
    for (&x, &cx) in &ra {
        for (&y, &cy) in &rb {
            let expected = cx * cy / n;
            let observed = table.get(&(x, y)).copied().unwrap_or(0.0);
            chi2 += (observed - expected).powi(2) / expected;
        }
    }
    (chi2 / (n * (k - 1) as f64)).sqrt().min(1.0)
}

/// Association between two columns of the same kind; `None` for mixed pairs.
pub fn association(ds: &Dataset, a: usize, b: usize) -> Option<f64> {
    match (ds.column(a).kind, ds.column(b).kind) {
        (Kind::Numeric, Kind::Numeric) => Some(pearson_abs(ds, a, b)),
        (Kind::Nominal, Kind::Nominal) => Some(cramers_v(ds, a, b)),
        _ => None,
    }
}

/// Greedy single pass in schema order: for every pair of predictor columns
/// sharing a category tag with association ≥ `threshold`, the later column
/// is dropped. Untagged columns are never compared.
pub fn correlation_filter(ds: &Dataset, threshold: f64) -> Result<(Dataset, FilterReport)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "correlation threshold {threshold} outside (0, 1]"
        )));
    }
    let features = ds.feature_indices();
    let mut dropped = vec![false; ds.n_cols()];
    let mut report = FilterReport::default();
    for (pos, &i) in features.iter().enumerate() {
        if dropped[i] {
            continue;
        }
        let Some(tag) = ds.column(i).category.as_deref() else {
            continue;
        };
        let candidates: Vec<usize> = features[pos + 1..]
            .iter()
            .copied()
            .filter(|&j| !dropped[j] && ds.column(j).category.as_deref() == Some(tag))
            .collect();
        let scores: Vec<(usize, Option<f64>)> = candidates.par_iter().map(|&j| (j, association(ds, i, j))).collect();
        for (j, s) in scores {
            if let Some(s) = s.filter(|&s| s >= threshold) {
                dropped[j] = true;
                report
                    .removed_by_correlation
                    .push((ds.column(i).name.clone(), ds.column(j).name.clone(), s));
            }
        }
    }
    let out = ds.retain_columns(|j| !dropped[j]);
    Ok((out, report))
}

/// Shannon entropy in bits of a count vector.
pub fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// Bin index of each cell of column `j`: category id for nominal columns,
/// equal-width bin for numeric ones. Missing cells share their own bin.
fn discretize(ds: &Dataset, rows: &[usize], j: usize, bins: usize) -> Vec<usize> {
    match ds.column(j).kind {
        Kind::Nominal => {
            let missing = ds.column(j).categories().len();
            rows.iter()
                .map(|&r| ds.row(r)[j].as_nominal().map_or(missing, |id| id as usize))
                .collect()
        }
        Kind::Numeric => {
            let bins = bins.max(1);
            let (lo, hi) = rows
                .iter()
                .filter_map(|&r| ds.row(r)[j].as_numeric())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            let width = (hi - lo) / bins as f64;
            rows.iter()
                .map(|&r| match ds.row(r)[j].as_numeric() {
                    None => bins,
                    Some(_) if width <= 0.0 => 0,
                    Some(x) => (((x - lo) / width).floor() as usize).min(bins - 1),
                })
                .collect()
        }
    }
}

/// Information gain of `attr` about `label`, in bits:
/// `H(label) - sum_v |S_v|/|S| * H(label | attr = v)`.
///
/// Rows with a missing label are ignored. Numeric attributes are cut into
/// `numeric_bins` equal-width bins; missing cells form their own bin.
pub fn information_gain(ds: &Dataset, label: &str, attr: &str, numeric_bins: usize) -> Result<f64> {
    let l = ds.require_column(label)?;
    if ds.column(l).kind != Kind::Nominal {
        return Err(Error::Schema(format!("label `{label}` must be nominal")));
    }
    let a = ds.require_column(attr)?;
    Ok(gain_by_index(ds, l, a, numeric_bins))
}

fn gain_by_index(ds: &Dataset, l: usize, a: usize, bins: usize) -> f64 {
    let rows: Vec<usize> = (0..ds.n_rows()).filter(|&r| !ds.row(r)[l].is_missing()).collect();
    if rows.len() < 2 {
        return 0.0;
    }
    let n_classes = ds.column(l).categories().len();
    let labels: Vec<usize> = rows
        .iter()
        .map(|&r| ds.row(r)[l].as_nominal().unwrap() as usize)
        .collect();
    let mut total = vec![0.0; n_classes];
    for &y in &labels {
        total[y] += 1.0;
    }
    let keys = discretize(ds, &rows, a, bins);
    let mut groups: HashMap<usize, Vec<f64>> = HashMap::new();
    for (&k, &y) in keys.iter().zip(&labels) {
        groups.entry(k).or_insert_with(|| vec![0.0; n_classes])[y] += 1.0;
    }
    let n = rows.len() as f64;
    let mut keys: Vec<&usize> = groups.keys().collect();
    keys.sort();
    let conditional: f64 = keys
        .into_iter()
        .map(|k| {
            let g = &groups[k];
            g.iter().sum::<f64>() / n * entropy(g)
        })
        .sum();
    (entropy(&total) - conditional).max(0.0)
}

/// Drops predictor columns whose information gain about `label` is below
/// `min_gain`.
pub fn information_gain_filter(
    ds: &Dataset,
    label: &str,
    min_gain: f64,
    numeric_bins: usize,
) -> Result<(Dataset, FilterReport)> {
    if min_gain < 0.0 || min_gain.is_nan() {
        return Err(Error::Config(format!("min_gain {min_gain} must be ≥ 0")));
    }
    let l = ds.require_column(label)?;
    if ds.column(l).kind != Kind::Nominal {
        return Err(Error::Schema(format!("label `{label}` must be nominal")));
    }
    let gains: Vec<(usize, f64)> = (0..ds.n_cols())
        .into_par_iter()
        .filter(|&j| j != l)
        .map(|j| (j, gain_by_index(ds, l, j, numeric_bins)))
        .collect();
    let mut report = FilterReport::default();
    let mut dropped = vec![false; ds.n_cols()];
    for (j, g) in gains {
        if g < min_gain {
            dropped[j] = true;
            report.removed_by_infogain.push((ds.column(j).name.clone(), g));
        }
    }
    let out = ds.retain_columns(|j| !dropped[j]);
    if (0..out.n_cols()).all(|j| out.column(j).name == label) {
        return Err(Error::Degenerate(
            "information-gain filter removed every predictor column".into(),
        ));
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;
    use rand::Rng;

    fn nominal_ds(rows: &[[&str; 2]]) -> Dataset {
        let mut ds = Dataset::new(vec![Column::nominal("attr"), Column::nominal("y")]).unwrap();
        for r in rows {
            ds.push_text_row(&r.map(Some)).unwrap();
        }
        ds.with_label("y").unwrap()
    }

    #[test]
    fn entropy_basics() {
        assert_eq!(entropy(&[5.0]), 0.0);
        assert!((entropy(&[1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((entropy(&[1.0, 1.0, 1.0, 1.0]) - 2.0).abs() < 1e-15);
        assert_eq!(entropy(&[]), 0.0);
    }

    #[test]
    fn gain_of_constant_and_perfect_attributes() {
        let c = nominal_ds(&[["a", "+"], ["a", "-"], ["a", "+"], ["a", "-"]]);
        assert_eq!(information_gain(&c, "y", "attr", 10).unwrap(), 0.0);
        let p = nominal_ds(&[["a", "+"], ["b", "-"], ["a", "+"], ["b", "-"]]);
        assert!((information_gain(&p, "y", "attr", 10).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gain_four_row_fixture() {
        // H(y) with 3:1 split = 0.811278...; attr=a is pure, attr=b is 1:1 (1 bit).
        // Gain = H(y) - 0.5 * 0 - 0.5 * 1.
        let ds = nominal_ds(&[["a", "+"], ["a", "+"], ["b", "+"], ["b", "-"]]);
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        let expected = h - 0.5;
        assert!((expected - 0.311_278_124_459_132_8).abs() < 1e-15);
        assert!((information_gain(&ds, "y", "attr", 10).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn single_row_gain_is_zero() {
        let ds = nominal_ds(&[["a", "+"]]);
        assert_eq!(information_gain(&ds, "y", "attr", 10).unwrap(), 0.0);
    }

    #[test]
    fn numeric_gain_uses_equal_width_bins() {
        let mut ds = Dataset::new(vec![Column::numeric("x"), Column::nominal("y")]).unwrap();
        // Bins over [0, 10] with width 5 (2 bins): {0,1,4} and {6,9,10}.
        for (x, y) in [("0", "a"), ("1", "a"), ("4", "a"), ("6", "b"), ("9", "b"), ("10", "b")] {
            ds.push_text_row(&[Some(x), Some(y)]).unwrap();
        }
        assert!((information_gain(&ds, "y", "x", 2).unwrap() - 1.0).abs() < 1e-12);
        // One bin: no information.
        assert_eq!(information_gain(&ds, "y", "x", 1).unwrap(), 0.0);
    }

    #[test]
    fn missing_threshold_is_strict() {
        let mut ds = Dataset::new(vec![
            Column::nominal("sixty"),
            Column::nominal("fifty"),
            Column::nominal("y"),
        ])
        .unwrap();
        for i in 0..10 {
            let sixty = (i >= 6).then_some("v");
            let fifty = (i >= 5).then_some("v");
            ds.push_text_row(&[sixty, fifty, Some("c")]).unwrap();
        }
        ds.set_label("y").unwrap();
        let (out, rep) = remove_missing(&ds, 0.5, RowPolicy::Keep).unwrap();
        assert_eq!(out.column_index("sixty"), None);
        assert!(out.column_index("fifty").is_some());
        assert_eq!(rep.removed_by_missing, vec![("sixty".to_string(), 0.6)]);
        let (rows, rep) = remove_missing(&ds, 0.5, RowPolicy::DropAnyMissing).unwrap();
        assert_eq!(rows.n_rows(), 5);
        assert_eq!(rep.rows_removed, 5);
    }

    #[test]
    fn no_missing_is_identity() {
        let ds = nominal_ds(&[["a", "+"], ["b", "-"]]);
        let (out, rep) = remove_missing(&ds, 0.5, RowPolicy::DropAnyMissing).unwrap();
        assert_eq!(out, ds);
        assert!(rep.is_empty());
    }

    #[test]
    fn missing_filter_degenerate() {
        let mut ds = Dataset::new(vec![Column::nominal("x"), Column::nominal("y")]).unwrap();
        ds.push_text_row(&[None, Some("a")]).unwrap();
        ds.set_label("y").unwrap();
        assert!(matches!(
            remove_missing(&ds, 0.5, RowPolicy::Keep),
            Err(Error::Degenerate(_))
        ));
    }

    fn numeric_pair(tag_a: &str, tag_b: &str, duplicate: bool, seed: u64) -> Dataset {
        let mut rng = crate::rng::rng(seed);
        let mut ds = Dataset::new(vec![
            Column::numeric("a").with_category(tag_a),
            Column::numeric("b").with_category(tag_b),
        ])
        .unwrap();
        for _ in 0..200 {
            let x: f64 = rng.gen();
            let y: f64 = if duplicate { x } else { rng.gen() };
            ds.push_row(vec![Cell::Numeric(x), Cell::Numeric(y)]).unwrap();
        }
        ds
    }

    #[test]
    fn duplicate_numeric_column_dropped() {
        let ds = numeric_pair("site", "site", true, 1);
        let (out, rep) = correlation_filter(&ds, 0.95).unwrap();
        assert_eq!(out.n_cols(), 1);
        assert_eq!(out.column(0).name, "a");
        assert_eq!(rep.removed_by_correlation[0].1, "b");
        assert!((rep.removed_by_correlation[0].2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_columns_retained() {
        let ds = numeric_pair("site", "site", false, 7);
        // Oracle: textbook two-pass Pearson formula on the same fixture.
        let xs: Vec<f64> = ds.rows().iter().map(|r| r[0].as_numeric().unwrap()).collect();
        let ys: Vec<f64> = ds.rows().iter().map(|r| r[1].as_numeric().unwrap()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let r = (cov / (vx * vy).sqrt()).abs();
        assert!(r < 0.95, "{r}");
        assert!((pearson_abs(&ds, 0, 1) - r).abs() < 1e-12);
        let (out, rep) = correlation_filter(&ds, 0.95).unwrap();
        assert_eq!(out.n_cols(), 2);
        assert!(rep.is_empty());
    }

    #[test]
    fn different_tags_never_compared() {
        let ds = numeric_pair("site", "demographic", true, 3);
        let (out, _) = correlation_filter(&ds, 0.95).unwrap();
        assert_eq!(out.n_cols(), 2);
    }

    #[test]
    fn cramers_v_of_identical_nominal_columns() {
        let mut ds = Dataset::new(vec![
            Column::nominal("a").with_category("t"),
            Column::nominal("b").with_category("t"),
        ])
        .unwrap();
        for v in ["x", "y", "z", "x", "y", "z"] {
            ds.push_text_row(&[Some(v), Some(v)]).unwrap();
        }
        assert!((cramers_v(&ds, 0, 1) - 1.0).abs() < 1e-12);
        let (out, _) = correlation_filter(&ds, 0.95).unwrap();
        assert_eq!(out.n_cols(), 1);
    }

    #[test]
    fn infogain_filter_cases() {
        let mut ds = Dataset::new(vec![
            Column::nominal("const"),
            Column::nominal("perfect"),
            Column::nominal("y"),
        ])
        .unwrap();
        for (p, y) in [("a", "+"), ("b", "-"), ("a", "+"), ("b", "-")] {
            ds.push_text_row(&[Some("k"), Some(p), Some(y)]).unwrap();
        }
        ds.set_label("y").unwrap();
        let (out, rep) = information_gain_filter(&ds, "y", 0.001, 10).unwrap();
        assert_eq!(out.column_index("const"), None);
        assert!(out.column_index("perfect").is_some());
        assert_eq!(rep.removed_by_infogain, vec![("const".to_string(), 0.0)]);
        let (same, rep) = information_gain_filter(&ds, "y", 0.0, 10).unwrap();
        assert_eq!(same, ds);
        assert!(rep.is_empty());
        let only_const = ds.drop_columns(&["perfect"]);
        assert!(matches!(
            information_gain_filter(&only_const, "y", 0.001, 10),
            Err(Error::Degenerate(_))
        ));
    }
}
