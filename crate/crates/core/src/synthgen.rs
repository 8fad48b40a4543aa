//! Synthetic imbalanced datasets and mixed-dataset construction.
//!
//! Each row draws its label classes independently from the label
//! proportions. Every attribute is driven by one label: with probability
//! `signal` its value comes from the class-conditional distribution of the
//! driving class, otherwise from the class-independent base distribution.
//! Rows are generated from per-row seeds, so output does not depend on how
//! the work is split across threads.

use std::fmt;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{ConfigDoc, Section};
use crate::dataset::{Cell, Column, Dataset, Kind};
use crate::error::{Error, Result};
use crate::rng;
use crate::sampler::random_sample;

/// Name of the provenance column added by [`mix`]; reserved.
pub const SOURCE_COLUMN: &str = "source";

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct LabelSpec {
    pub name: String,
    pub classes: Vec<String>,
    pub proportions: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Nominal {
        values: Vec<String>,
        base: Vec<f64>,
        /// One distribution over `values` per class of the driving label.
        per_class: Vec<Vec<f64>>,
    },
    Numeric {
        /// (mean, standard deviation)
        base: (f64, f64),
        per_class: Vec<(f64, f64)>,
        decimals: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub category: Option<String>,
    /// Index into [`SynthSpec::labels`].
    pub driver: usize,
    pub missing: f64,
    pub generator: Generator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub rows: usize,
    pub signal: f64,
    pub labels: Vec<LabelSpec>,
    pub attributes: Vec<AttributeSpec>,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

fn check_distribution(what: &str, p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(spec_err(format!(
            "{what}: expected {len} probabilities, got {}",
            p.len()
        )));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(spec_err(format!("{what}: probabilities must be finite and ≥ 0")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOLERANCE {
        return Err(spec_err(format!("{what}: probabilities sum to {s}, not 1")));
    }
    Ok(())
}

fn check_gaussian(what: &str, (m, sd): (f64, f64)) -> Result<()> {
    if !m.is_finite() || !(sd.is_finite() && sd >= 0.0) {
        return Err(spec_err(format!("{what}: need a finite mean and stddev ≥ 0")));
    }
    Ok(())
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 {
            return Err(spec_err("rows must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.signal) {
            return Err(spec_err(format!("signal {} outside [0, 1]", self.signal)));
        }
        if self.labels.is_empty() {
            return Err(spec_err("at least one [label] section is required"));
        }
        let mut names: Vec<&str> = Vec::new();
        for l in &self.labels {
            if l.classes.is_empty() {
                return Err(spec_err(format!("label `{}` has no classes", l.name)));
            }
            check_distribution(&format!("label `{}`", l.name), &l.proportions, l.classes.len())?;
            names.push(&l.name);
        }
        for a in &self.attributes {
            names.push(&a.name);
            let what = format!("attribute `{}`", a.name);
            let label = self
                .labels
                .get(a.driver)
                .ok_or_else(|| spec_err(format!("{what}: unknown driving label")))?;
            if !(0.0..=1.0).contains(&a.missing) {
                return Err(spec_err(format!("{what}: missing rate {} outside [0, 1]", a.missing)));
            }
            match &a.generator {
                Generator::Nominal {
                    values,
                    base,
                    per_class,
                } => {
                    if values.is_empty() {
                        return Err(spec_err(format!("{what}: no values")));
                    }
                    check_distribution(&format!("{what} base"), base, values.len())?;
                    if per_class.len() != label.classes.len() {
                        return Err(spec_err(format!(
                            "{what}: needs one distribution per class of `{}`",
                            label.name
                        )));
                    }
                    for (c, p) in label.classes.iter().zip(per_class) {
                        check_distribution(&format!("{what} class {c}"), p, values.len())?;
                    }
                }
                Generator::Numeric { base, per_class, .. } => {
                    check_gaussian(&format!("{what} base"), *base)?;
                    if per_class.len() != label.classes.len() {
                        return Err(spec_err(format!(
                            "{what}: needs parameters for every class of `{}`",
                            label.name
                        )));
                    }
                    for (c, g) in label.classes.iter().zip(per_class) {
                        check_gaussian(&format!("{what} class {c}"), *g)?;
                    }
                }
            }
        }
        if let Some((_, n)) = names.iter().enumerate().find(|(i, n)| names[..*i].contains(n)) {
            return Err(spec_err(format!("column name `{n}` used twice")));
        }
        Ok(())
    }

    /// Parses the section-based spec format (see [`default_profile`] for a
    /// complete example, printable through `Display`).
    pub fn parse(text: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text).map_err(|e| spec_err(e.to_string()))?;
        let top = &doc.top;
        top.check_keys(&["rows", "signal"])
            .map_err(|e| spec_err(e.to_string()))?;
        let rows = top.parse_or("rows", 0usize).map_err(|e| spec_err(e.to_string()))?;
        let signal = top.parse_or("signal", 1.0f64).map_err(|e| spec_err(e.to_string()))?;
        let mut labels = Vec::new();
        for s in doc.sections.iter().filter(|s| s.kind == "label") {
            s.check_keys(&["classes", "proportions"])
                .map_err(|e| spec_err(e.to_string()))?;
            labels.push(LabelSpec {
                name: s.name.clone(),
                classes: s.list("classes").unwrap_or_default(),
                proportions: floats(s, "proportions")?,
            });
        }
        let mut attributes = Vec::new();
        for s in &doc.sections {
            match s.kind.as_str() {
                "label" => {}
                "attribute" => attributes.push(parse_attribute(s, &labels)?),
                other => return Err(spec_err(format!("line {}: unknown section kind `{other}`", s.line))),
            }
        }
        let spec = SynthSpec {
            rows,
            signal,
            labels,
            attributes,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn floats(s: &Section, key: &str) -> Result<Vec<f64>> {
    s.parse_list(key)
        .map_err(|e| spec_err(format!("[{} {}]: {e}", s.kind, s.name)))?
        .ok_or_else(|| spec_err(format!("[{} {}]: missing key `{key}`", s.kind, s.name)))
}

fn pair(s: &Section, key: &str) -> Result<(f64, f64)> {
    match floats(s, key)?.as_slice() {
        [m, sd] => Ok((*m, *sd)),
        _ => Err(spec_err(format!(
            "[{} {}]: `{key}` needs `mean, stddev`",
            s.kind, s.name
        ))),
    }
}

fn parse_attribute(s: &Section, labels: &[LabelSpec]) -> Result<AttributeSpec> {
    let ctx = |e: Error| spec_err(format!("[attribute {}]: {e}", s.name));
    s.check_keys(&[
        "kind", "category", "driver", "missing", "values", "base", "class.*", "decimals",
    ])
    .map_err(ctx)?;
    let driver = match s.get("driver") {
        None => 0,
        Some(d) => labels
            .iter()
            .position(|l| l.name == d)
            .ok_or_else(|| spec_err(format!("[attribute {}]: unknown driver label `{d}`", s.name)))?,
    };
    let label = labels
        .get(driver)
        .ok_or_else(|| spec_err(format!("[attribute {}]: no label section precedes it", s.name)))?;
    let kind: Kind = s.require("kind").map_err(ctx)?.parse().map_err(ctx)?;
    let generator = match kind {
        Kind::Nominal => Generator::Nominal {
            values: s.list("values").unwrap_or_default(),
            base: floats(s, "base")?,
            per_class: label
                .classes
                .iter()
                .map(|c| floats(s, &format!("class.{c}")))
                .collect::<Result<_>>()?,
        },
        Kind::Numeric => Generator::Numeric {
            base: pair(s, "base")?,
            per_class: label
                .classes
                .iter()
                .map(|c| pair(s, &format!("class.{c}")))
                .collect::<Result<_>>()?,
            decimals: s.parse_or("decimals", 2).map_err(ctx)?,
        },
    };
    for (k, _, line) in &s.entries {
        if let Some(c) = k.strip_prefix("class.") {
            if !label.classes.iter().any(|x| x == c) {
                return Err(spec_err(format!(
                    "line {line}: `{c}` is not a class of `{}`",
                    label.name
                )));
            }
        }
    }
    Ok(AttributeSpec {
        name: s.name.clone(),
        category: s.get("category").map(str::to_string),
        driver,
        missing: s.parse_or("missing", 0.0).map_err(ctx)?,
        generator,
    })
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows = {}", self.rows)?;
        writeln!(f, "signal = {}", self.signal)?;
        for l in &self.labels {
            writeln!(f, "\n[label {}]", l.name)?;
            writeln!(f, "classes = {}", l.classes.join(", "))?;
            writeln!(f, "proportions = {}", join(&l.proportions))?;
        }
        for a in &self.attributes {
            let label = &self.labels[a.driver];
            writeln!(f, "\n[attribute {}]", a.name)?;
            match &a.generator {
                Generator::Nominal { .. } => writeln!(f, "kind = nominal")?,
                Generator::Numeric { .. } => writeln!(f, "kind = numeric")?,
            }
            if let Some(c) = &a.category {
                writeln!(f, "category = {c}")?;
            }
            writeln!(f, "driver = {}", label.name)?;
            if a.missing > 0.0 {
                writeln!(f, "missing = {}", a.missing)?;
            }
            match &a.generator {
                Generator::Nominal {
                    values,
                    base,
                    per_class,
                } => {
                    writeln!(f, "values = {}", values.join(", "))?;
                    writeln!(f, "base = {}", join(base))?;
                    for (c, p) in label.classes.iter().zip(per_class) {
                        writeln!(f, "class.{c} = {}", join(p))?;
                    }
                }
                Generator::Numeric {
                    base,
                    per_class,
                    decimals,
                } => {
                    writeln!(f, "decimals = {decimals}")?;
                    writeln!(f, "base = {}, {}", base.0, base.1)?;
                    for (c, g) in label.classes.iter().zip(per_class) {
                        writeln!(f, "class.{c} = {}, {}", g.0, g.1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Index drawn from a discrete distribution given a uniform `u` in [0, 1).
fn pick(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` a hair under 1: take the last nonzero entry.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale).round() / scale
}

fn gen_row(spec: &SynthSpec, seed: u64) -> Vec<Cell> {
    let mut r = rng::rng(seed);
    let classes: Vec<usize> = spec.labels.iter().map(|l| pick(&l.proportions, r.gen())).collect();
    let mut row = Vec::with_capacity(spec.attributes.len() + spec.labels.len());
    for a in &spec.attributes {
        let missing = r.gen::<f64>() < a.missing;
        let conditional = r.gen::<f64>() < spec.signal;
        let class = classes[a.driver];
        let cell = match &a.generator {
            Generator::Nominal { base, per_class, .. } => {
                let p = if conditional { &per_class[class] } else { base };
                Cell::Nominal(pick(p, r.gen()) as u32)
            }
            Generator::Numeric {
                base,
                per_class,
                decimals,
            } => {
                let (m, sd) = if conditional { per_class[class] } else { *base };
                let z: f64 = StandardNormal.sample(&mut r);
                Cell::Numeric(round_to(m + sd * z, *decimals))
            }
        };
        row.push(if missing { Cell::Missing } else { cell });
    }
    row.extend(classes.iter().map(|&c| Cell::Nominal(c as u32)));
    row
}

/// Generates `spec.rows` rows. Attribute columns come first, then one
/// column per label; the first label is the dataset's class label.
pub fn generate(spec: &SynthSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut columns = Vec::new();
    for a in &spec.attributes {
        let c = match &a.generator {
            Generator::Nominal { values, .. } => Column::nominal(&a.name).with_categories(values),
            Generator::Numeric { .. } => Column::numeric(&a.name),
        };
        columns.push(match &a.category {
            Some(tag) => c.with_category(tag),
            None => c,
        });
    }
    for l in &spec.labels {
        columns.push(Column::nominal(&l.name).with_categories(&l.classes));
    }
    let mut ds = Dataset::new(columns)?;
    let rows: Vec<Vec<Cell>> = (0..spec.rows as u64)
        .into_par_iter()
        .map(|i| gen_row(spec, rng::derive(seed, i)))
        .collect();
    for row in rows {
        ds.push_row(row)?;
    }
    ds.set_label(&spec.labels[0].name)?;
    Ok(ds)
}

/// Normalizes weights and rounds to 4 decimals, putting the rounding
/// residue on the largest entry so the result sums to 1.
fn tidy(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut p: Vec<f64> = weights.iter().map(|w| round_to(w / total, 4)).collect();
    let big = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
    let rest: f64 = p.iter().enumerate().filter(|(i, _)| *i != big).map(|(_, x)| x).sum();
    p[big] = round_to(1.0 - rest, 4);
    p
}

/// The built-in profile: 50000 rows, 36 mixed predictors and three labels.
/// `stage` (4 classes at 70/20/9/1) drives 24 attributes, `survival` and
/// `metastasis` drive 6 each. Signal 0.8, missing rate 2% on every
/// predictor.
pub fn default_profile() -> SynthSpec {
    let labels = vec![
        LabelSpec {
            name: "stage".into(),
            classes: ["localized", "regional", "distant", "unstaged"]
                .map(String::from)
                .to_vec(),
            proportions: vec![0.70, 0.20, 0.09, 0.01],
        },
        LabelSpec {
            name: "survival".into(),
            classes: ["survived", "not_survived"].map(String::from).to_vec(),
            proportions: vec![0.75, 0.25],
        },
        LabelSpec {
            name: "metastasis".into(),
            classes: ["none", "regional", "distant"].map(String::from).to_vec(),
            proportions: vec![0.80, 0.15, 0.05],
        },
    ];
    let tags = ["demographic", "tumor", "treatment", "history"];
    let mut r = rng::rng(rng::derive_str(0, "default profile"));
    let mut attributes = Vec::new();
    for j in 0..36usize {
        let driver = match j {
            0..=23 => 0,
            24..=29 => 1,
            _ => 2,
        };
        let n_classes = labels[driver].classes.len();
        let generator = if j % 2 == 0 {
            let k = 3 + j % 4;
            let values: Vec<String> = (0..k).map(|v| format!("v{v}")).collect();
            let base = tidy(&(0..k).map(|_| r.gen_range(0.5..1.5)).collect::<Vec<f64>>());
            let per_class = (0..n_classes)
                .map(|c| {
                    let favoured = (c + j) % k;
                    let w: Vec<f64> = (0..k)
                        .map(|v| {
                            if v == favoured {
                                1.2 * k as f64 * 0.5
                            } else {
                                r.gen_range(0.3..1.0)
                            }
                        })
                        .collect();
                    tidy(&w)
                })
                .collect();
            Generator::Nominal {
                values,
                base,
                per_class,
            }
        } else {
            let per_class = (0..n_classes)
                .map(|_| {
                    (
                        round_to(50.0 + 15.0 * r.gen_range(-0.8..0.8), 1),
                        round_to(r.gen_range(10.0..15.0), 1),
                    )
                })
                .collect();
            Generator::Numeric {
                base: (50.0, 15.0),
                per_class,
                decimals: 1,
            }
        };
        attributes.push(AttributeSpec {
            name: format!("a{:02}", j + 1),
            category: Some(tags[j % tags.len()].to_string()),
            driver,
            missing: 0.02,
            generator,
        });
    }
    SynthSpec {
        rows: 50000,
        signal: 0.8,
        labels,
        attributes,
    }
}

/// One input to [`mix`]: `n` rows drawn without replacement from `data`,
/// tagged `id` in the source column.
#[derive(Clone, Copy, Debug)]
pub struct MixPart<'a> {
    pub id: &'a str,
    pub data: &'a Dataset,
    pub n: usize,
}

/// Builds a mixed dataset from random subsets of several datasets,
/// projected onto the columns they all share (in the first dataset's
/// order) and tagged with a `source` column. Nominal categories are merged
/// by label. The first dataset's label is kept when it is shared.
pub fn mix(parts: &[MixPart<'_>], seed: u64) -> Result<Dataset> {
    let first = parts
        .first()
        .ok_or_else(|| Error::IncompatibleSchema("nothing to mix".into()))?;
    for p in parts {
        if p.data.column_index(SOURCE_COLUMN).is_some() {
            return Err(Error::IncompatibleSchema(format!(
                "dataset `{}` already has a `{SOURCE_COLUMN}` column",
                p.id
            )));
        }
    }
    if let Some(dup) = parts
        .iter()
        .enumerate()
        .find(|(i, p)| parts[..*i].iter().any(|q| q.id == p.id))
    {
        return Err(Error::IncompatibleSchema(format!(
            "source id `{}` used twice",
            dup.1.id
        )));
    }
    let shared: Vec<&Column> = first
        .data
        .columns()
        .iter()
        .filter(|c| parts.iter().all(|p| p.data.column_index(&c.name).is_some()))
        .collect();
    if shared.is_empty() {
        return Err(Error::IncompatibleSchema("the datasets share no columns".into()));
    }
    let mut columns: Vec<Column> = Vec::with_capacity(shared.len() + 1);
    for c in &shared {
        for p in parts {
            let other = p.data.column(p.data.column_index(&c.name).unwrap());
            if other.kind != c.kind {
                return Err(Error::IncompatibleSchema(format!(
                    "column `{}` is {} in `{}` but {} in `{}`",
                    c.name, c.kind, first.id, other.kind, p.id
                )));
            }
        }
        columns.push(Column::new(&c.name, c.kind, c.category.clone()));
    }
    let mut source = Column::nominal(SOURCE_COLUMN);
    let mut rows = Vec::new();
    for p in parts {
        let src = Cell::Nominal(source.intern(p.id));
        if p.n == 0 {
            continue;
        }
        let picked = random_sample(p.data, p.n, rng::derive_str(seed, p.id))?;
        let idx: Vec<usize> = shared.iter().map(|c| p.data.column_index(&c.name).unwrap()).collect();
        // Per-column id translation into the merged category lists.
        let remap: Vec<Vec<u32>> = idx
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                p.data
                    .column(i)
                    .categories()
                    .iter()
                    .map(|l| columns[j].intern(l))
                    .collect()
            })
            .collect();
        for row in picked.rows() {
            let mut out: Vec<Cell> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| match row[i] {
                    Cell::Nominal(v) => Cell::Nominal(remap[j][v as usize]),
                    c => c,
                })
                .collect();
            out.push(src);
            rows.push(out);
        }
    }
    columns.push(source);
    let mut ds = Dataset::new(columns)?;
    for r in rows {
        ds.push_row(r)?;
    }
    if let Some(l) = first.data.label_name() {
        if ds.column_index(l).is_some() {
            ds.set_label(l)?;
        }
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(signal: f64) -> SynthSpec {
        SynthSpec::parse(&format!(
            "rows = 400\nsignal = {signal}\n[label y]\nclasses = a, b\nproportions = 0.5, 0.5\n\
             [attribute x]\nkind = nominal\nvalues = p, q\nbase = 0.5, 0.5\nclass.a = 1, 0\nclass.b = 0, 1\n"
        ))
        .unwrap()
    }

    #[test]
    fn full_signal_is_separable() {
        let ds = generate(&tiny(1.0), 3).unwrap();
        for r in 0..ds.n_rows() {
            assert_eq!(ds.row(r)[0].as_nominal(), ds.label_of(r));
        }
    }

    #[test]
    fn zero_signal_ignores_class() {
        let mut spec = tiny(0.0);
        spec.rows = 20000;
        let ds = generate(&spec, 3).unwrap();
        let mut agree = 0;
        for r in 0..ds.n_rows() {
            agree += usize::from(ds.row(r)[0].as_nominal() == ds.label_of(r));
        }
        // Independent halves agree half the time; 4 sd is about 0.014.
        let frac = agree as f64 / ds.n_rows() as f64;
        assert!((frac - 0.5).abs() < 0.015, "{frac}");
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = tiny(0.7);
        assert_eq!(generate(&spec, 9).unwrap(), generate(&spec, 9).unwrap());
        let a = generate(&default_profile_small(), 1).unwrap();
        let b = generate(&default_profile_small(), 2).unwrap();
        assert_ne!(a.row(0), b.row(0));
    }

    fn default_profile_small() -> SynthSpec {
        SynthSpec {
            rows: 50,
            ..default_profile()
        }
    }

    #[test]
    fn default_profile_class_counts_within_three_sigma() {
        let ds = generate(&default_profile(), 42).unwrap();
        assert_eq!(ds.n_rows(), 50000);
        assert_eq!(ds.n_cols(), 36 + 3);
        let mut counts = [0usize; 4];
        for r in 0..ds.n_rows() {
            counts[ds.label_of(r).unwrap() as usize] += 1;
        }
        for (c, p) in counts.iter().zip([0.70f64, 0.20, 0.09, 0.01]) {
            let mean = 50000.0 * p;
            let sd = (50000.0 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - mean).abs() <= 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        let spec = default_profile();
        let text = spec.to_string();
        assert_eq!(SynthSpec::parse(&text).unwrap(), spec);
    }

    #[test]
    fn invalid_specs() {
        let base = "rows = 10\n[label y]\nclasses = a, b\nproportions = 0.5, 0.5\n";
        assert!(SynthSpec::parse(base).is_ok());
        for bad in [
            "rows = 10\n[label y]\nclasses = a, b\nproportions = 0.5, 0.6\n".to_string(),
            "rows = 0\n[label y]\nclasses = a\nproportions = 1\n".to_string(),
            "rows = 10\nsignal = 1.5\n[label y]\nclasses = a\nproportions = 1\n".to_string(),
            "rows = 10\n".to_string(),
            format!("{base}[attribute x]\nkind = nominal\nvalues = p\nbase = 1\nclass.a = 1\n"),
            format!("{base}[attribute x]\nkind = numeric\nbase = 0, 1\nclass.a = 0, 1\nclass.b = 0, -1\n"),
            format!(
                "{base}[attribute x]\nkind = numeric\nbase = 0, 1\nclass.a = 0, 1\nclass.b = 0, 1\nclass.c = 0, 1\n"
            ),
            format!("{base}[attribute x]\nkind = numeric\nmissing = 2\nbase = 0, 1\nclass.a = 0, 1\nclass.b = 0, 1\n"),
            format!("{base}[attribute y]\nkind = numeric\nbase = 0, 1\nclass.a = 0, 1\nclass.b = 0, 1\n"),
            format!("{base}[attribute x]\nkind = numeric\ndriver = z\nbase = 0, 1\n"),
            format!("{base}[thing x]\n"),
        ] {
            assert!(matches!(SynthSpec::parse(&bad), Err(Error::Spec(_))), "{bad}");
        }
    }

    #[test]
    fn missing_rate_applies() {
        let mut spec = tiny(1.0);
        spec.rows = 10000;
        spec.attributes[0].missing = 0.25;
        let ds = generate(&spec, 5).unwrap();
        let m = ds.rows().iter().filter(|r| r[0].is_missing()).count();
        assert!((2300..2700).contains(&m), "{m}");
        assert!(ds.rows().iter().all(|r| !r[1].is_missing()));
    }

    fn two_sets() -> (Dataset, Dataset) {
        let mut a = Dataset::new(vec![
            Column::nominal("k"),
            Column::numeric("x"),
            Column::nominal("only_a"),
        ])
        .unwrap();
        let mut b = Dataset::new(vec![Column::numeric("x"), Column::nominal("k")]).unwrap();
        for i in 0..150 {
            a.push_text_row(&[
                Some(["u", "v"][i % 2].to_string()),
                Some(i.to_string()),
                Some("z".to_string()),
            ])
            .unwrap();
            b.push_text_row(&[Some((1000 + i).to_string()), Some(["w", "u"][i % 2].to_string())])
                .unwrap();
        }
        (a.with_label("k").unwrap(), b)
    }

    #[test]
    fn mix_counts_and_projection() {
        let (a, b) = two_sets();
        let m = mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: 100,
                },
                MixPart {
                    id: "b",
                    data: &b,
                    n: 100,
                },
            ],
            1,
        )
        .unwrap();
        assert_eq!(m.n_rows(), 200);
        let names: Vec<&str> = m.columns().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["k", "x", "source"]);
        assert_eq!(m.label_name(), Some("k"));
        let s = m.require_column("source").unwrap();
        let from_a = (0..200).filter(|&r| m.cell_text(r, s) == "a").count();
        assert_eq!(from_a, 100);
        assert_eq!(m.column(0).categories(), ["u", "v", "w"]);
        // Every row traces back: x identifies the input row.
        for r in 0..200 {
            let x = m.row(r)[1].as_numeric().unwrap();
            assert_eq!(m.cell_text(r, s), if x >= 1000.0 { "b" } else { "a" });
        }
        let again = mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: 100,
                },
                MixPart {
                    id: "b",
                    data: &b,
                    n: 100,
                },
            ],
            1,
        )
        .unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn mix_identity_plus_tag() {
        let (a, b) = two_sets();
        let m = mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: a.n_rows(),
                },
                MixPart {
                    id: "b",
                    data: &b,
                    n: 0,
                },
            ],
            1,
        )
        .unwrap();
        assert_eq!(m.n_rows(), a.n_rows());
        for r in 0..a.n_rows() {
            assert_eq!(m.cell_text(r, 0), a.cell_text(r, 0));
            assert_eq!(m.cell_text(r, 1), a.cell_text(r, 1));
        }
    }

    #[test]
    fn mix_errors() {
        let (a, b) = two_sets();
        let c = Dataset::new(vec![Column::numeric("other")]).unwrap();
        let err = mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: 1,
                },
                MixPart {
                    id: "c",
                    data: &c,
                    n: 0,
                },
            ],
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IncompatibleSchema(_)));
        assert!(mix(
            &[MixPart {
                id: "a",
                data: &a,
                n: 151
            }],
            1
        )
        .is_err());
        assert!(mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: 1
                },
                MixPart {
                    id: "a",
                    data: &b,
                    n: 1
                }
            ],
            1
        )
        .is_err());
        let mut d = Dataset::new(vec![Column::nominal("k"), Column::nominal("x")]).unwrap();
        d.push_text_row(&[Some("u"), Some("1")]).unwrap();
        assert!(mix(
            &[
                MixPart {
                    id: "a",
                    data: &a,
                    n: 1
                },
                MixPart {
                    id: "d",
                    data: &d,
                    n: 1
                }
            ],
            1
        )
        .is_err());
    }
}
