//! The three classifiers and a common model wrapper.
//!
//! Every learner reads the dataset's designated label column (which must be
//! nominal) and treats all other columns as predictors. Rows with a missing
//! label are ignored during training.

mod bayes;
mod knn;
mod tree;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bayes::{train_naive_bayes, AttributeModel, NaiveBayesModel, VARIANCE_FLOOR};
pub use knn::{distance_schema, mixed_distance, train_knn, DistanceColumn, KnnModel, DEFAULT_K};
pub use tree::{train_decision_tree, DecisionTreeModel, Node, TreeParams};

use crate::dataset::{Cell, Column, Dataset, Kind};
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Label column index and the rows whose label is present.
pub(crate) fn training_rows(ds: &Dataset) -> Result<(usize, Vec<usize>)> {
    let label = ds
        .label_index()
        .ok_or_else(|| Error::Training("dataset has no label column".into()))?;
    if ds.column(label).kind != Kind::Nominal {
        return Err(Error::Training(format!(
            "label `{}` must be nominal",
            ds.column(label).name
        )));
    }
    let rows = (0..ds.n_rows()).filter(|&r| !ds.row(r)[label].is_missing()).collect();
    Ok((label, rows))
}

/// Index of the largest count; ties go to the earlier class.
pub(crate) fn majority(counts: &[usize]) -> u32 {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best as u32
}

pub(crate) fn check_row(row: &[Cell], n_cols: usize) -> Result<()> {
    if row.len() != n_cols {
        return Err(Error::Prediction(format!(
            "row has {} cells, model expects {n_cols}",
            row.len()
        )));
    }
    Ok(())
}

/// A learner and its hyper-parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Classifier {
    DecisionTree(TreeParams),
    NaiveBayes { alpha: f64 },
    Knn { k: usize },
}

impl Classifier {
    /// Decision tree, Naive Bayes and k-NN with default parameters.
    pub fn defaults() -> [Classifier; 3] {
        [
            Classifier::DecisionTree(TreeParams::default()),
            Classifier::NaiveBayes { alpha: 1.0 },
            Classifier::Knn { k: DEFAULT_K },
        ]
    }

    /// Short name used in reports: `DT`, `NB` or `KNN`.
    pub fn name(&self) -> &'static str {
        match self {
            Classifier::DecisionTree(_) => "DT",
            Classifier::NaiveBayes { .. } => "NB",
            Classifier::Knn { .. } => "KNN",
        }
    }

    /// Report label: the short name for default parameters, otherwise the
    /// full form accepted by `FromStr`.
    pub fn label(&self) -> String {
        if Classifier::defaults().contains(self) {
            self.name().to_string()
        } else {
            self.to_string()
        }
    }

    pub fn train(&self, train: &Dataset) -> Result<Model> {
        Ok(match self {
            Classifier::DecisionTree(p) => Model::Tree(train_decision_tree(train, p)?),
            Classifier::NaiveBayes { alpha } => Model::Bayes(train_naive_bayes(train, *alpha)?),
            Classifier::Knn { k } => Model::Knn(train_knn(train, *k)?),
        })
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classifier::DecisionTree(p) => {
                write!(f, "DT(min_leaf={}", p.min_leaf)?;
                if let Some(d) = p.max_depth {
                    write!(f, ",max_depth={d}")?;
                }
                f.write_str(")")
            }
            Classifier::NaiveBayes { alpha } => write!(f, "NB(alpha={alpha})"),
            Classifier::Knn { k } => write!(f, "KNN(k={k})"),
        }
    }
}

/// Accepts `DT`, `NB`, `KNN` (any case), optionally with parameters:
/// `DT(min_leaf=1,max_depth=8)`, `NB(alpha=0.5)`, `KNN(k=5)`.
impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(Error::Config(format!("unbalanced parameters in `{s}`"))),
            None => (s, ""),
        };
        let mut params = Vec::new();
        for a in args.split(',').map(str::trim).filter(|a| !a.is_empty()) {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in `{s}`")))?;
            params.push((k.trim(), v.trim()));
        }
        let bad = |k: &str| Error::Config(format!("classifier `{name}` has no parameter `{k}`"));
        let num = |k: &str, v: &str| Error::Config(format!("bad value `{v}` for `{k}` in `{s}`"));
        let mut c = match name.to_ascii_uppercase().as_str() {
            "DT" => Classifier::DecisionTree(TreeParams::default()),
            "NB" => Classifier::NaiveBayes { alpha: 1.0 },
            "KNN" => Classifier::Knn { k: DEFAULT_K },
            _ => {
                return Err(Error::Config(format!(
                    "unknown classifier `{name}` (expected DT, NB or KNN)"
                )))
            }
        };
        for (k, v) in params {
            match (&mut c, k) {
                (Classifier::DecisionTree(p), "min_leaf") => p.min_leaf = v.parse().map_err(|_| num(k, v))?,
                (Classifier::DecisionTree(p), "max_depth") => p.max_depth = Some(v.parse().map_err(|_| num(k, v))?),
                (Classifier::NaiveBayes { alpha }, "alpha") => *alpha = v.parse().map_err(|_| num(k, v))?,
                (Classifier::Knn { k: kk }, "k") => *kk = v.parse().map_err(|_| num(k, v))?,
                _ => return Err(bad(k)),
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Tree(DecisionTreeModel),
    Bayes(NaiveBayesModel),
    Knn(KnnModel),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Tree(_) => "DT",
            Model::Bayes(_) => "NB",
            Model::Knn(_) => "KNN",
        }
    }

    pub fn predict(&self, row: &[Cell]) -> Result<u32> {
        match self {
            Model::Tree(m) => m.predict(row),
            Model::Bayes(m) => m.predict_class(row),
            Model::Knn(m) => m.predict(row),
        }
    }

    /// Predicts every row of `ds` in parallel; output order matches input.
    pub fn predict_all(&self, ds: &Dataset) -> Result<Vec<u32>> {
        ds.rows().par_iter().map(|r| self.predict(r)).collect()
    }
}

pub const MODEL_FORMAT: &str = "strata-bench-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "classifier")]
enum Body {
    #[serde(rename = "DT")]
    Tree { model: DecisionTreeModel },
    #[serde(rename = "NB")]
    Bayes { model: NaiveBayesModel },
    /// Instance stores are not copied: the file points at the training CSV.
    #[serde(rename = "KNN")]
    Knn { k: usize, training_data: PathBuf },
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    label: String,
    columns: Vec<Column>,
    #[serde(flatten)]
    body: Body,
}

/// A trained model together with the schema it was trained on.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub model: Model,
    pub columns: Vec<Column>,
    pub label: String,
}

impl ModelFile {
    pub fn new(model: Model, train: &Dataset) -> Result<Self> {
        let label = train
            .label_name()
            .ok_or_else(|| Error::Training("dataset has no label column".into()))?
            .to_string();
        Ok(ModelFile {
            model,
            columns: train.columns().to_vec(),
            label,
        })
    }

    /// Serializes to JSON. k-NN models need `training_data`, the CSV the
    /// model was fitted on; it is stored as given.
    pub fn to_json(&self, training_data: Option<&Path>) -> Result<String> {
        let body = match &self.model {
            Model::Tree(m) => Body::Tree { model: m.clone() },
            Model::Bayes(m) => Body::Bayes { model: m.clone() },
            Model::Knn(m) => Body::Knn {
                k: m.k,
                training_data: training_data
                    .ok_or_else(|| Error::Training("k-NN model needs its training CSV path".into()))?
                    .to_path_buf(),
            },
        };
        let doc = ModelDoc {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            label: self.label.clone(),
            columns: self.columns.clone(),
            body,
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Parses a model file. A relative k-NN training path is resolved
    /// against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Format(format!("not a model file (format `{}`)", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", doc.version)));
        }
        let model = match doc.body {
            Body::Tree { model } => Model::Tree(model),
            Body::Bayes { model } => Model::Bayes(model),
            Body::Knn { k, training_data } => {
                let path = base_dir.join(training_data);
                let ds = conform(&Dataset::read_csv(&path)?, &doc.columns, &doc.label)?;
                Model::Knn(train_knn(&ds, k)?)
            }
        };
        Ok(ModelFile {
            model,
            columns: doc.columns,
            label: doc.label,
        })
    }

    pub fn save(&self, path: &Path, training_data: Option<&Path>) -> Result<()> {
        write_atomic(path, self.to_json(training_data)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Re-expresses `ds` in this model's schema, see [`conform`].
    pub fn conform(&self, ds: &Dataset) -> Result<Dataset> {
        conform(ds, &self.columns, &self.label)
    }
}

/// Rebuilds `ds` with exactly the given columns, in order, remapping
/// nominal values to the reference category ids. Categories the reference
/// has never seen are appended after the known ones, so models treat them as
/// unseen values. A missing label column yields all-missing labels.
pub fn conform(ds: &Dataset, columns: &[Column], label: &str) -> Result<Dataset> {
    let mut out_cols: Vec<Column> = columns.to_vec();
    let mut sources = Vec::with_capacity(columns.len());
    for c in columns {
        match ds.column_index(&c.name) {
            Some(i) if ds.column(i).kind != c.kind => {
                return Err(Error::IncompatibleSchema(format!(
                    "column `{}` is {} but the model expects {}",
                    c.name,
                    ds.column(i).kind,
                    c.kind
                )))
            }
            Some(i) => sources.push(Some(i)),
            None if c.name == label => sources.push(None),
            None => {
                return Err(Error::IncompatibleSchema(format!("missing column `{}`", c.name)));
            }
        }
    }
    let mut remap: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
    for (j, src) in sources.iter().enumerate() {
        let ids = match src {
            Some(i) if columns[j].kind == Kind::Nominal => ds
                .column(*i)
                .categories()
                .iter()
                .map(|l| out_cols[j].intern(l))
                .collect(),
            _ => Vec::new(),
        };
        remap.push(ids);
    }
    let rows = ds
        .rows()
        .iter()
        .map(|r| {
            sources
                .iter()
                .enumerate()
                .map(|(j, src)| match (src, r.get(src.unwrap_or(usize::MAX))) {
                    (Some(_), Some(Cell::Nominal(v))) => Cell::Nominal(remap[j][*v as usize]),
                    (Some(_), Some(c)) => *c,
                    _ => Cell::Missing,
                })
                .collect()
        })
        .collect();
    let label_idx = columns.iter().position(|c| c.name == label);
    Ok(Dataset::from_parts(out_cols, rows, label_idx))
}
