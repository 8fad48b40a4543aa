//! Random, stratified and balanced stratified sampling.
//!
//! All three strategies are deterministic functions of the input dataset and
//! a seed. Stratum-level draws use sub-seeds derived from `(seed, class id)`,
//! so they can run in parallel without changing the result.
//!
//! Balanced stratified sampling works in three steps:
//!
//! 1. [`build_strata`] groups labeled rows by class.
//! 2. [`eligible_classes`] drops classes whose share of labeled rows is
//!    below the minority ratio (1:100 by default).
//! 3. [`allocate_balanced`] picks how many strata can each contribute an
//!    equal share of `n`, dropping the smallest strata until every remaining
//!    one has enough rows.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Kind};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_MINORITY_RATIO: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Stratified,
    Balanced,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::Stratified, Strategy::Balanced];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Stratified => "stratified",
            Strategy::Balanced => "balanced",
        }
    }

    /// Heading used in rendered tables.
    pub fn title(self) -> &'static str {
        match self {
            Strategy::Random => "Random",
            Strategy::Stratified => "Stratified",
            Strategy::Balanced => "Balanced",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random),
            "stratified" => Ok(Strategy::Stratified),
            "balanced" | "balanced_stratified" => Ok(Strategy::Balanced),
            other => Err(Error::Config(format!("unknown sampling strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPlan {
    pub strategy: Strategy,
    pub n: usize,
    pub seed: u64,
    pub minority_ratio: f64,
    pub with_replacement: bool,
}

impl SamplingPlan {
    pub fn new(strategy: Strategy, n: usize, seed: u64) -> Self {
        SamplingPlan {
            strategy,
            n,
            seed,
            minority_ratio: DEFAULT_MINORITY_RATIO,
            with_replacement: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("sample size n must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.minority_ratio) {
            return Err(Error::Config(format!(
                "minority_ratio {} outside [0, 1)",
                self.minority_ratio
            )));
        }
        Ok(())
    }
}

/// `strategy=balanced n=5000 seed=42 minority_ratio=0.01 with_replacement=false`
impl fmt::Display for SamplingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "strategy={} n={} seed={} minority_ratio={} with_replacement={}",
            self.strategy, self.n, self.seed, self.minority_ratio, self.with_replacement
        )
    }
}

impl FromStr for SamplingPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut plan = SamplingPlan::new(Strategy::Random, 0, 0);
        let mut have_n = false;
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("plan token `{tok}` is not key=value")))?;
            let bad = || Error::Config(format!("invalid value `{v}` for `{k}`"));
            match k {
                "strategy" => plan.strategy = v.parse()?,
                "n" => {
                    plan.n = v.parse().map_err(|_| bad())?;
                    have_n = true;
                }
                "seed" => plan.seed = v.parse().map_err(|_| bad())?,
                "minority_ratio" => plan.minority_ratio = v.parse().map_err(|_| bad())?,
                "with_replacement" => plan.with_replacement = v.parse().map_err(|_| bad())?,
                _ => return Err(Error::Config(format!("unknown plan key `{k}`"))),
            }
        }
        if !have_n {
            return Err(Error::Config("plan is missing `n`".into()));
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub class: u32,
    pub rows: Vec<usize>,
}

/// Row indices grouped by label class, in class order. Only non-empty
/// classes form strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataIndex {
    pub strata: Vec<Stratum>,
    /// Rows with a non-missing label.
    pub total: usize,
    /// Rows skipped because their label is missing.
    pub excluded: usize,
}

impl StrataIndex {
    /// Number of strata (`m`).
    pub fn m(&self) -> usize {
        self.strata.len()
    }

    pub fn sizes(&self) -> Vec<(u32, usize)> {
        self.strata.iter().map(|s| (s.class, s.rows.len())).collect()
    }

    pub fn stratum(&self, class: u32) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.class == class)
    }
}

fn label_column(ds: &Dataset, label: &str) -> Result<usize> {
    let l = ds.require_column(label)?;
    if ds.column(l).kind != Kind::Nominal {
        return Err(Error::Schema(format!("label column `{label}` must be nominal")));
    }
    Ok(l)
}

pub fn build_strata(ds: &Dataset, label: &str) -> Result<StrataIndex> {
    let l = label_column(ds, label)?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); ds.column(l).categories().len()];
    let mut excluded = 0;
    for (i, row) in ds.rows().iter().enumerate() {
        match row[l].as_nominal() {
            Some(c) => groups[c as usize].push(i),
            None => excluded += 1,
        }
    }
    let strata: Vec<Stratum> = groups
        .into_iter()
        .enumerate()
        .filter(|(_, rows)| !rows.is_empty())
        .map(|(c, rows)| Stratum { class: c as u32, rows })
        .collect();
    Ok(StrataIndex {
        total: ds.n_rows() - excluded,
        excluded,
        strata,
    })
}

/// Sorted positions of a uniform `amount`-subset of `0..len`.
fn draw_positions(len: usize, amount: usize, seed: u64) -> Vec<usize> {
    let mut r = rng::rng(seed);
    let mut picked = index::sample(&mut r, len, amount).into_vec();
    picked.sort_unstable();
    picked
}

/// Uniform sample of `n` rows without replacement. Selected rows keep their
/// original relative order.
pub fn random_sample(ds: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    if n > ds.n_rows() {
        return Err(Error::InsufficientData {
            requested: n,
            available: ds.n_rows(),
        });
    }
    Ok(ds.select_rows(&draw_positions(ds.n_rows(), n, seed)))
}

/// Hamilton (largest remainder) apportionment of `n` seats in proportion to
/// `counts`. Ties in the remainder go to the earlier entry.
pub fn largest_remainder(counts: &[usize], n: usize) -> Vec<usize> {
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut seats: Vec<usize> = Vec::with_capacity(counts.len());
    let mut rems: Vec<(u128, usize)> = Vec::with_capacity(counts.len());
    for (i, &c) in counts.iter().enumerate() {
        let share = n as u128 * c as u128;
        seats.push((share / total) as usize);
        rems.push((share % total, i));
    }
    let left = n - seats.iter().sum::<usize>();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rems.iter().take(left) {
        seats[i] += 1;
    }
    seats
}

/// Draws `quota` rows from each listed stratum. Strata smaller than their
/// quota are drawn with replacement when `replace_undersized` is set.
fn draw_strata(index: &StrataIndex, quotas: &[(u32, usize)], seed: u64, replace_undersized: bool) -> Vec<usize> {
    let mut picked: Vec<usize> = quotas
        .par_iter()
        .flat_map_iter(|&(class, quota)| {
            let stratum = index.stratum(class).expect("quota for a known stratum");
            let sub = rng::derive(seed, u64::from(class));
            let rows = &stratum.rows;
            let chosen: Vec<usize> = if quota > rows.len() && replace_undersized {
                let mut r = rng::rng(sub);
                (0..quota).map(|_| rows[r.gen_range(0..rows.len())]).collect()
            } else {
                draw_positions(rows.len(), quota, sub)
                    .into_iter()
                    .map(|p| rows[p])
                    .collect()
            };
            chosen
        })
        .collect();
    picked.sort_unstable();
    picked
}

/// Proportional stratified sample: each class gets its largest-remainder
/// share of `n`, drawn uniformly without replacement.
pub fn stratified_sample(ds: &Dataset, label: &str, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    let index = build_strata(ds, label)?;
    if n > index.total {
        return Err(Error::InsufficientData {
            requested: n,
            available: index.total,
        });
    }
    let sizes = index.sizes();
    let counts: Vec<usize> = sizes.iter().map(|s| s.1).collect();
    let quotas: Vec<(u32, usize)> = sizes
        .iter()
        .zip(largest_remainder(&counts, n))
        .map(|(&(c, _), q)| (c, q))
        .collect();
    Ok(ds.select_rows(&draw_strata(&index, &quotas, seed, false)))
}

/// Classes whose share of labeled rows is at least `minority_ratio`.
pub fn eligible_classes(index: &StrataIndex, minority_ratio: f64) -> Result<Vec<u32>> {
    if index.total == 0 {
        return Err(Error::Degenerate("no labeled rows".into()));
    }
    let total = index.total as f64;
    let keep: Vec<u32> = index
        .strata
        .iter()
        .filter(|s| s.rows.len() as f64 / total >= minority_ratio)
        .map(|s| s.class)
        .collect();
    if keep.is_empty() {
        return Err(Error::NoEligibleStrata { ratio: minority_ratio });
    }
    Ok(keep)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedAllocation {
    /// Per-class quotas in allocation order (descending stratum size).
    pub quotas: Vec<(u32, usize)>,
    /// Eligible classes left out because they could not fill a quota.
    pub dropped: Vec<u32>,
    /// Seats that could not be filled: `n - sum(quotas)`.
    pub shortfall: usize,
    pub with_replacement: bool,
}

impl BalancedAllocation {
    pub fn sample_size(&self) -> usize {
        self.quotas.iter().map(|q| q.1).sum()
    }
}

/// Classes by descending size, ties in class order.
fn by_size(sizes: &[(u32, usize)]) -> Vec<(u32, usize)> {
    let mut v = sizes.to_vec();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Largest sample size with a balanced allocation that leaves no seat
/// unfilled, when sampling without replacement.
pub fn max_balanced_size(sizes: &[(u32, usize)]) -> usize {
    let ordered = by_size(sizes);
    (1..=ordered.len())
        .map(|p| {
            let cap = ordered[p - 1].1;
            let bigger = ordered[..p - 1].iter().filter(|s| s.1 > cap).count();
            p * cap + bigger.min(p - 1)
        })
        .max()
        .unwrap_or(0)
}

/// Equal-size quotas over as many strata as can fill them.
///
/// Without replacement, strata are taken in descending size and `p` is the
/// largest count (at most `n`) whose `p`-th stratum holds at least
/// `floor(n / p)` rows. The first `n mod p` strata get one extra row when
/// they have it; otherwise the seat becomes shortfall. With replacement all
/// strata are used and undersized ones are resampled.
pub fn allocate_balanced(sizes: &[(u32, usize)], n: usize, with_replacement: bool) -> Result<BalancedAllocation> {
    if sizes.is_empty() {
        return Err(Error::Degenerate("no strata to allocate".into()));
    }
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    let ordered = by_size(sizes);
    if with_replacement {
        let p = ordered.len();
        let quotas = ordered
            .iter()
            .enumerate()
            .map(|(i, &(c, _))| (c, n / p + usize::from(i < n % p)))
            .collect();
        return Ok(BalancedAllocation {
            quotas,
            dropped: Vec::new(),
            shortfall: 0,
            with_replacement: true,
        });
    }
    let p = (1..=ordered.len().min(n))
        .rev()
        .find(|&p| ordered[p - 1].1 >= n / p)
        .ok_or(Error::Capacity {
            requested: n,
            max_achievable: max_balanced_size(sizes),
        })?;
    let base = n / p;
    let mut shortfall = 0;
    let quotas = ordered[..p]
        .iter()
        .enumerate()
        .map(|(i, &(c, size))| {
            let wants_extra = i < n % p;
            if wants_extra && size < base + 1 {
                shortfall += 1;
            }
            (c, base + usize::from(wants_extra && size > base))
        })
        .collect();
    Ok(BalancedAllocation {
        quotas,
        dropped: ordered[p..].iter().map(|s| s.0).collect(),
        shortfall,
        with_replacement: false,
    })
}

/// Balanced stratified sample: strata → eligibility cutoff → equal-size
/// allocation → per-stratum uniform draws.
pub fn balanced_stratified_sample(
    ds: &Dataset,
    label: &str,
    plan: &SamplingPlan,
) -> Result<(Dataset, BalancedAllocation)> {
    plan.validate()?;
    let index = build_strata(ds, label)?;
    let eligible = eligible_classes(&index, plan.minority_ratio)?;
    let sizes: Vec<(u32, usize)> = index
        .sizes()
        .into_iter()
        .filter(|(c, _)| eligible.contains(c))
        .collect();
    let alloc = allocate_balanced(&sizes, plan.n, plan.with_replacement)?;
    let rows = draw_strata(&index, &alloc.quotas, plan.seed, plan.with_replacement);
    Ok((ds.select_rows(&rows), alloc))
}

/// Draws a sample according to `plan`. `label` is required for the
/// stratified strategies and ignored by random sampling.
pub fn sample(ds: &Dataset, label: Option<&str>, plan: &SamplingPlan) -> Result<Dataset> {
    plan.validate()?;
    let need_label = || label.ok_or_else(|| Error::Schema("stratified sampling needs a label column".into()));
    match plan.strategy {
        Strategy::Random => random_sample(ds, plan.n, plan.seed),
        Strategy::Stratified => stratified_sample(ds, need_label()?, plan.n, plan.seed),
        Strategy::Balanced => balanced_stratified_sample(ds, need_label()?, plan).map(|(d, _)| d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Cell, Column};

    /// `counts[i]` rows of class `c{i}`, each with a unique `id` value.
    fn labeled(counts: &[usize]) -> Dataset {
        let names: Vec<String> = (0..counts.len()).map(|i| format!("c{i}")).collect();
        let mut ds = Dataset::new(vec![
            Column::numeric("id"),
            Column::nominal("y").with_categories(&names),
        ])
        .unwrap();
        let mut id = 0;
        for (c, &k) in counts.iter().enumerate() {
            for _ in 0..k {
                ds.push_row(vec![Cell::Numeric(id as f64), Cell::Nominal(c as u32)])
                    .unwrap();
                id += 1;
            }
        }
        ds.with_label("y").unwrap()
    }

    fn class_counts(ds: &Dataset) -> Vec<usize> {
        let mut out = vec![0; ds.class_names().len()];
        for r in 0..ds.n_rows() {
            out[ds.label_of(r).unwrap() as usize] += 1;
        }
        out
    }

    #[test]
    fn strata_grouping() {
        let mut ds = Dataset::new(vec![Column::nominal("y")]).unwrap();
        for v in ["A", "A", "B", "B", "B", "C"] {
            ds.push_text_row(&[Some(v)]).unwrap();
        }
        let idx = build_strata(&ds, "y").unwrap();
        assert_eq!(idx.m(), 3);
        assert_eq!(idx.sizes(), vec![(0, 2), (1, 3), (2, 1)]);

        let one = labeled(&[5]);
        assert_eq!(build_strata(&one, "y").unwrap().m(), 1);

        let mut ds = labeled(&[4, 4]);
        ds.push_row(vec![Cell::Numeric(-1.0), Cell::Missing]).unwrap();
        ds.push_row(vec![Cell::Numeric(-2.0), Cell::Missing]).unwrap();
        let idx = build_strata(&ds, "y").unwrap();
        assert_eq!((idx.total, idx.excluded), (8, 2));
        assert!(build_strata(&ds, "nope").is_err());
        assert!(build_strata(&ds, "id").is_err());
    }

    #[test]
    fn random_sample_contract() {
        let ds = labeled(&[6, 4]);
        assert_eq!(random_sample(&ds, 10, 1).unwrap(), ds);
        let two = labeled(&[1, 1]);
        let a = random_sample(&two, 1, 99).unwrap();
        assert_eq!(a, random_sample(&two, 1, 99).unwrap());
        assert_eq!(a.n_rows(), 1);
        match random_sample(&ds, 11, 0) {
            Err(Error::InsufficientData { requested, available }) => assert_eq!((requested, available), (11, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_sample_inclusion_is_uniform() {
        // Each of 10 rows should be included with probability 1/2; over 10000
        // trials the count is Binomial(10000, 0.5), sd = 50, so ±300 is 6 sd.
        let ds = labeled(&[10]);
        let mut hits = [0usize; 10];
        for t in 0..10_000 {
            for r in random_sample(&ds, 5, t).unwrap().rows() {
                hits[r[0].as_numeric().unwrap() as usize] += 1;
            }
        }
        for h in hits {
            assert!((4700..=5300).contains(&h), "{hits:?}");
        }
    }

    #[test]
    fn largest_remainder_examples() {
        assert_eq!(largest_remainder(&[60, 40], 10), vec![6, 4]);
        assert_eq!(largest_remainder(&[50, 50], 3), vec![2, 1]);
        assert_eq!(largest_remainder(&[1, 1, 1], 2), vec![1, 1, 0]);
        assert_eq!(largest_remainder(&[7, 2, 1], 10), vec![7, 2, 1]);
    }

    #[test]
    fn stratified_examples() {
        let ds = labeled(&[60, 40]);
        assert_eq!(class_counts(&stratified_sample(&ds, "y", 10, 5).unwrap()), vec![6, 4]);
        let even = labeled(&[50, 50]);
        assert_eq!(class_counts(&stratified_sample(&even, "y", 3, 5).unwrap()), vec![2, 1]);
        assert_eq!(stratified_sample(&ds, "y", 100, 5).unwrap(), ds);
        assert!(matches!(
            stratified_sample(&ds, "y", 101, 5),
            Err(Error::InsufficientData { .. })
        ));
    }

    fn index_of(counts: &[usize]) -> StrataIndex {
        build_strata(&labeled(counts), "y").unwrap()
    }

    #[test]
    fn eligibility_boundary() {
        assert_eq!(eligible_classes(&index_of(&[450, 45, 5]), 0.01).unwrap(), vec![0, 1, 2]);
        assert_eq!(eligible_classes(&index_of(&[450, 46, 4]), 0.01).unwrap(), vec![0, 1]);
        assert_eq!(eligible_classes(&index_of(&[999, 1]), 0.0).unwrap(), vec![0, 1]);
        assert!(matches!(
            eligible_classes(&index_of(&[1, 1]), 0.9),
            Err(Error::NoEligibleStrata { .. })
        ));
    }

    #[test]
    fn balanced_allocation_examples() {
        let a = allocate_balanced(&[(0, 1000), (1, 800), (2, 50)], 600, false).unwrap();
        assert_eq!(a.quotas, vec![(0, 300), (1, 300)]);
        assert_eq!(a.dropped, vec![2]);
        assert_eq!(a.shortfall, 0);

        let a = allocate_balanced(&[(0, 500), (1, 500)], 600, false).unwrap();
        assert_eq!(a.quotas, vec![(0, 300), (1, 300)]);

        let a = allocate_balanced(&[(0, 500), (1, 40)], 600, true).unwrap();
        assert_eq!(a.quotas, vec![(0, 300), (1, 300)]);
        assert!(a.with_replacement);
    }

    #[test]
    fn balanced_allocation_shortfall_and_capacity() {
        let a = allocate_balanced(&[(0, 5), (1, 5)], 11, false).unwrap();
        assert_eq!(a.quotas, vec![(0, 5), (1, 5)]);
        assert_eq!(a.shortfall, 1);
        match allocate_balanced(&[(0, 10), (1, 3)], 11, false) {
            Err(Error::Capacity {
                requested,
                max_achievable,
            }) => assert_eq!((requested, max_achievable), (11, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn max_balanced_size_matches_search() {
        // Oracle: scan n upward and keep the largest shortfall-free allocation.
        for sizes in [vec![10, 3], vec![5, 5], vec![7, 7, 2], vec![9, 4, 4, 1], vec![1]] {
            let tagged: Vec<(u32, usize)> = sizes.iter().enumerate().map(|(i, &s)| (i as u32, s)).collect();
            let total: usize = sizes.iter().sum();
            let best = (1..=total)
                .filter(|&n| matches!(allocate_balanced(&tagged, n, false), Ok(a) if a.shortfall == 0))
                .max()
                .unwrap();
            assert_eq!(max_balanced_size(&tagged), best, "{sizes:?}");
        }
    }

    #[test]
    fn balanced_sample_of_balanced_source() {
        let ds = labeled(&[25_000, 25_000]);
        let plan = SamplingPlan::new(Strategy::Balanced, 1000, 42);
        let (s, a) = balanced_stratified_sample(&ds, "y", &plan).unwrap();
        assert_eq!(class_counts(&s), vec![500, 500]);
        assert_eq!(a.shortfall, 0);
    }

    #[test]
    fn balanced_sample_four_class_profile() {
        let ds = labeled(&[35_000, 10_000, 4_500, 500]);
        let plan = SamplingPlan::new(Strategy::Balanced, 500, 42);
        let (s, _) = balanced_stratified_sample(&ds, "y", &plan).unwrap();
        assert_eq!(class_counts(&s), vec![125, 125, 125, 125]);

        // Hand-run of the allocation for n = 30000:
        //   p=4: floor 7500 > 500 (4th largest)   -> reject
        //   p=3: floor 10000 > 4500 (3rd largest) -> reject
        //   p=2: floor 15000 > 10000              -> reject
        //   p=1: 30000 <= 35000                   -> accept
        let plan = SamplingPlan::new(Strategy::Balanced, 30_000, 42);
        let (s, a) = balanced_stratified_sample(&ds, "y", &plan).unwrap();
        assert_eq!(a.quotas, vec![(0, 30_000)]);
        assert_eq!(a.dropped, vec![1, 2, 3]);
        assert_eq!(class_counts(&s), vec![30_000, 0, 0, 0]);

        // n = 10000: p=4 needs 2500 (fails on 500), p=3 needs 3333 <= 4500.
        let plan = SamplingPlan::new(Strategy::Balanced, 10_000, 42);
        let (s, _) = balanced_stratified_sample(&ds, "y", &plan).unwrap();
        assert_eq!(class_counts(&s), vec![3334, 3333, 3333, 0]);
    }

    #[test]
    fn with_replacement_duplicates_only_undersized() {
        let ds = labeled(&[500, 40]);
        let mut plan = SamplingPlan::new(Strategy::Balanced, 600, 3);
        plan.with_replacement = true;
        let (s, _) = balanced_stratified_sample(&ds, "y", &plan).unwrap();
        assert_eq!(class_counts(&s), vec![300, 300]);
        let ids: Vec<i64> = s.rows().iter().map(|r| r[0].as_numeric().unwrap() as i64).collect();
        let a: std::collections::BTreeSet<_> = ids.iter().filter(|&&i| i < 500).collect();
        assert_eq!(a.len(), 300);
        let b: std::collections::BTreeSet<_> = ids.iter().filter(|&&i| i >= 500).collect();
        assert!(b.len() <= 40);
    }

    #[test]
    fn plan_config_block() {
        let plan: SamplingPlan = "strategy=balanced n=5000 seed=42 minority_ratio=0.01 with_replacement=false"
            .parse()
            .unwrap();
        assert_eq!(plan, SamplingPlan::new(Strategy::Balanced, 5000, 42));
        assert_eq!(plan.to_string().parse::<SamplingPlan>().unwrap(), plan);
        assert!("strategy=balanced".parse::<SamplingPlan>().is_err());
        assert!("n=0".parse::<SamplingPlan>().is_err());
        assert!("n=5 minority_ratio=1".parse::<SamplingPlan>().is_err());
        assert!("n=5 colour=blue".parse::<SamplingPlan>().is_err());
    }
}
