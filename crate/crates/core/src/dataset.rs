//! Typed tabular data: a column schema plus rows of nominal, numeric or
//! missing cells, with an optional designated class-label column.
//!
//! Nominal cells store a category id that indexes into the owning column's
//! category list. Category ids are assigned in first-seen order, and that
//! order is the "class order" used by every tie-break in the crate.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Nominal(u32),
    Numeric(f64),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_nominal(&self) -> Option<u32> {
        match *self {
            Cell::Nominal(id) => Some(id),
            _ => None,
        }
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match *self {
            Cell::Numeric(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Nominal,
    Numeric,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Nominal => "nominal",
            Kind::Numeric => "numeric",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nominal" => Ok(Kind::Nominal),
            "numeric" => Ok(Kind::Numeric),
            other => Err(Error::Format(format!("unknown column kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: Kind,
    /// Group tag (e.g. "demographic"); the correlation filter only compares
    /// columns that share one.
    pub category: Option<String>,
    categories: Vec<String>,
    #[serde(skip)]
    lookup: HashMap<String, u32>,
}

impl PartialEq for Column {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.category == other.category
            && self.categories == other.categories
    }
}

impl Column {
    pub fn nominal(name: impl Into<String>) -> Self {
        Self::new(name, Kind::Nominal, None)
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self::new(name, Kind::Numeric, None)
    }

    pub fn new(name: impl Into<String>, kind: Kind, category: Option<String>) -> Self {
        Column {
            name: name.into(),
            kind,
            category,
            categories: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    pub fn with_category(mut self, tag: impl Into<String>) -> Self {
        self.category = Some(tag.into());
        self
    }

    /// Pre-registers category labels in the given order.
    pub fn with_categories<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for l in labels {
            self.intern(l.as_ref());
        }
        self
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_id(&self, label: &str) -> Option<u32> {
        if self.lookup.len() != self.categories.len() {
            return self.categories.iter().position(|c| c == label).map(|i| i as u32);
        }
        self.lookup.get(label).copied()
    }

    pub fn category_label(&self, id: u32) -> Option<&str> {
        self.categories.get(id as usize).map(String::as_str)
    }

    /// Returns the id of `label`, registering it if new.
    pub fn intern(&mut self, label: &str) -> u32 {
        if self.lookup.len() != self.categories.len() {
            self.rebuild_lookup();
        }
        if let Some(&id) = self.lookup.get(label) {
            return id;
        }
        let id = self.categories.len() as u32;
        self.categories.push(label.to_string());
        self.lookup.insert(label.to_string(), id);
        id
    }

    fn rebuild_lookup(&mut self) {
        self.lookup = self
            .categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
    }

    fn check(&self, cell: &Cell) -> Result<()> {
        match (self.kind, cell) {
            (_, Cell::Missing) => Ok(()),
            (Kind::Numeric, Cell::Numeric(_)) => Ok(()),
            (Kind::Nominal, Cell::Nominal(id)) if (*id as usize) < self.categories.len() => Ok(()),
            (Kind::Nominal, Cell::Nominal(id)) => {
                Err(Error::Schema(format!("column `{}` has no category id {id}", self.name)))
            }
            _ => Err(Error::Schema(format!(
                "cell {cell:?} does not match {} column `{}`",
                self.kind, self.name
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Dataset {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
    label: Option<usize>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        Ok(Dataset {
            columns,
            rows: Vec::new(),
            label: None,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn column_mut(&mut self, idx: usize) -> &mut Column {
        &mut self.columns[idx]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn row(&self, idx: usize) -> &[Cell] {
        &self.rows[idx]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label_index(&self) -> Option<usize> {
        self.label
    }

    pub fn label_name(&self) -> Option<&str> {
        self.label.map(|i| self.columns[i].name.as_str())
    }

    /// Designates `name` as the class label. It must be a nominal column.
    pub fn set_label(&mut self, name: &str) -> Result<()> {
        let idx = self.require_column(name)?;
        if self.columns[idx].kind != Kind::Nominal {
            return Err(Error::Schema(format!("label column `{name}` must be nominal")));
        }
        self.label = Some(idx);
        Ok(())
    }

    pub fn clear_label(&mut self) {
        self.label = None;
    }

    pub fn with_label(mut self, name: &str) -> Result<Self> {
        self.set_label(name)?;
        Ok(self)
    }

    pub fn require_label(&self) -> Result<usize> {
        self.label
            .ok_or_else(|| Error::Schema("dataset has no label column".into()))
    }

    /// Label category id of row `idx`, `None` when missing.
    pub fn label_of(&self, idx: usize) -> Option<u32> {
        self.label.and_then(|l| self.rows[idx][l].as_nominal())
    }

    pub fn class_names(&self) -> &[String] {
        match self.label {
            Some(l) => self.columns[l].categories(),
            None => &[],
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "row has {} cells, schema has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        for (c, cell) in self.columns.iter().zip(&row) {
            c.check(cell)?;
        }
        self.rows.push(row);
        Ok(())
    }

    /// Appends a row given as text: `None` or an empty string is missing,
    /// nominal text is interned and numeric text is parsed.
    pub fn push_text_row<S: AsRef<str>>(&mut self, cells: &[Option<S>]) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "row has {} cells, schema has {} columns",
                cells.len(),
                self.columns.len()
            )));
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col, text) in self.columns.iter_mut().zip(cells) {
            let text = text.as_ref().map(|s| s.as_ref()).unwrap_or("");
            row.push(text_to_cell(col, text)?);
        }
        self.rows.push(row);
        Ok(())
    }

    /// Renders a cell as text; missing cells render as the empty string.
    pub fn cell_text(&self, row: usize, col: usize) -> String {
        render_cell(&self.columns[col], &self.rows[row][col])
    }

    /// Same schema, rows restricted to `indices` (in the order given).
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            label: self.label,
        }
    }

    /// Same schema, no rows.
    pub fn empty_like(&self) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: Vec::new(),
            label: self.label,
        }
    }

    /// Keeps only the columns whose index satisfies `keep`.
    pub fn retain_columns(&self, keep: impl Fn(usize) -> bool) -> Dataset {
        let kept: Vec<usize> = (0..self.columns.len()).filter(|&i| keep(i)).collect();
        let label = self.label.and_then(|l| kept.iter().position(|&k| k == l));
        Dataset {
            columns: kept.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self.rows.iter().map(|r| kept.iter().map(|&i| r[i]).collect()).collect(),
            label,
        }
    }

    /// Drops columns by name; unknown names are ignored.
    pub fn drop_columns(&self, names: &[&str]) -> Dataset {
        self.retain_columns(|i| !names.contains(&self.columns[i].name.as_str()))
    }

    pub fn retain_rows(&mut self, mut keep: impl FnMut(&[Cell]) -> bool) {
        self.rows.retain(|r| keep(r));
    }

    /// Appends a column, filling it with `cells`.
    pub fn add_column(&mut self, column: Column, cells: Vec<Cell>) -> Result<()> {
        if self.column_index(&column.name).is_some() {
            return Err(Error::Schema(format!("duplicate column `{}`", column.name)));
        }
        if cells.len() != self.rows.len() {
            return Err(Error::Schema(format!(
                "new column has {} cells for {} rows",
                cells.len(),
                self.rows.len()
            )));
        }
        for c in &cells {
            column.check(c)?;
        }
        self.columns.push(column);
        for (row, c) in self.rows.iter_mut().zip(cells) {
            row.push(c);
        }
        Ok(())
    }

    pub(crate) fn from_parts(columns: Vec<Column>, rows: Vec<Vec<Cell>>, label: Option<usize>) -> Self {
        Dataset { columns, rows, label }
    }

    /// Indices of predictor columns: everything except the label.
    pub fn feature_indices(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&i| Some(i) != self.label).collect()
    }

    // --- CSV persistence -------------------------------------------------

    /// Path of the schema sidecar that accompanies a dataset CSV.
    pub fn schema_path(csv_path: &Path) -> PathBuf {
        let mut s = csv_path.as_os_str().to_owned();
        s.push(".schema");
        PathBuf::from(s)
    }

    pub fn write_csv_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        let mut buf = Vec::with_capacity(self.columns.len());
        for r in 0..self.rows.len() {
            buf.clear();
            buf.extend((0..self.columns.len()).map(|c| self.cell_text(r, c)));
            out.write_record(&buf)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Sidecar: one record per column `name,kind,tag,is_label,cat1,cat2,...`.
    pub fn write_schema_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(["column", "kind", "category", "label", "categories"])?;
        for (i, c) in self.columns.iter().enumerate() {
            let mut rec = vec![
                c.name.clone(),
                c.kind.to_string(),
                c.category.clone().unwrap_or_default(),
                if Some(i) == self.label { "1" } else { "0" }.to_string(),
            ];
            rec.extend(c.categories.iter().cloned());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `path` and its schema sidecar, each atomically.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut data = Vec::new();
        self.write_csv_to(&mut data)?;
        let mut schema = Vec::new();
        self.write_schema_to(&mut schema)?;
        write_atomic(&Self::schema_path(path), &schema)?;
        write_atomic(path, &data)
    }

    /// Reads a dataset CSV. With a schema, kinds, tags, category order and
    /// label come from it; without one, a column is numeric when every
    /// non-empty value parses as a number.
    pub fn read_csv_from<R: Read>(data: R, schema: Option<R>) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let records: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>()?;

        let mut label = None;
        let mut columns = match schema {
            Some(s) => {
                let mut srdr = csv::ReaderBuilder::new()
                    .flexible(true)
                    .has_headers(true)
                    .from_reader(s);
                let mut cols = Vec::new();
                for rec in srdr.records() {
                    let rec = rec?;
                    if rec.len() < 4 {
                        return Err(Error::Format("schema record needs at least 4 fields".into()));
                    }
                    let tag = (!rec[2].is_empty()).then(|| rec[2].to_string());
                    let col = Column::new(&rec[0], rec[1].parse()?, tag).with_categories(rec.iter().skip(4));
                    if &rec[3] == "1" {
                        label = Some(col.name.clone());
                    }
                    cols.push(col);
                }
                let names: Vec<&str> = cols.iter().map(|c| c.name.as_str()).collect();
                if names != header.iter().map(String::as_str).collect::<Vec<_>>() {
                    return Err(Error::Schema("schema sidecar does not match CSV header".into()));
                }
                cols
            }
            None => header
                .iter()
                .enumerate()
                .map(|(j, name)| {
                    let numeric = records.iter().all(|r| {
                        let v = r.get(j).unwrap_or("");
                        v.is_empty() || is_numeric_literal(v)
                    }) && records.iter().any(|r| !r.get(j).unwrap_or("").is_empty());
                    Column::new(name, if numeric { Kind::Numeric } else { Kind::Nominal }, None)
                })
                .collect(),
        };
        let mut rows = Vec::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            if rec.len() != columns.len() {
                return Err(Error::Record {
                    index: i,
                    message: format!("expected {} fields, found {}", columns.len(), rec.len()),
                });
            }
            let row = columns
                .iter_mut()
                .zip(rec.iter())
                .map(|(c, v)| text_to_cell(c, v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Record {
                    index: i,
                    message: e.to_string(),
                })?;
            rows.push(row);
        }
        let mut ds = Dataset::new(columns)?;
        ds.rows = rows;
        if let Some(l) = label {
            ds.set_label(&l)?;
        }
        Ok(ds)
    }

    /// Reads `path`, using its schema sidecar when present.
    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let data = std::fs::File::open(path)?;
        let sp = Self::schema_path(path);
        if sp.exists() {
            Self::read_csv_from(data, Some(std::fs::File::open(sp)?))
        } else {
            Self::read_csv_from(data, None)
        }
    }
}

fn text_to_cell(col: &mut Column, text: &str) -> Result<Cell> {
    if text.is_empty() {
        return Ok(Cell::Missing);
    }
    match col.kind {
        Kind::Nominal => Ok(Cell::Nominal(col.intern(text))),
        Kind::Numeric => parse_number(text)
            .map(Cell::Numeric)
            .ok_or_else(|| Error::Format(format!("column `{}`: `{text}` is not numeric", col.name))),
    }
}

pub(crate) fn render_cell(col: &Column, cell: &Cell) -> String {
    match *cell {
        Cell::Missing => String::new(),
        Cell::Numeric(v) => format!("{v}"),
        Cell::Nominal(id) => col.category_label(id).unwrap_or_default().to_string(),
    }
}

/// Optional sign, digits, optional fraction. No exponents, no `inf`/`nan`.
pub fn is_numeric_literal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => (!int.is_empty() || !f.is_empty()) && digits(int) && digits(f),
    }
}

pub fn parse_number(s: &str) -> Option<f64> {
    if is_numeric_literal(s) {
        s.parse().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Dataset {
        let mut ds = Dataset::new(vec![
            Column::numeric("age").with_category("demographic"),
            Column::nominal("sex"),
            Column::nominal("stage").with_categories(["I", "II"]),
        ])
        .unwrap();
        ds.push_text_row(&[Some("61"), Some("F"), Some("II")]).unwrap();
        ds.push_text_row(&[Some("47.5"), None, Some("I")]).unwrap();
        ds.push_text_row(&[None, Some("M, jr"), Some("II")]).unwrap();
        ds.set_label("stage").unwrap();
        ds
    }

    #[test]
    fn numeric_literals() {
        for ok in ["0", "12", "-3", "+4.25", ".5", "7."] {
            assert!(is_numeric_literal(ok), "{ok}");
        }
        for bad in ["", ".", "1e5", "inf", "NaN", "1.2.3", "12a", " 1"] {
            assert!(!is_numeric_literal(bad), "{bad}");
        }
    }

    #[test]
    fn csv_round_trip_with_schema() {
        let ds = fixture();
        let mut data = Vec::new();
        ds.write_csv_to(&mut data).unwrap();
        let mut schema = Vec::new();
        ds.write_schema_to(&mut schema).unwrap();
        let back = Dataset::read_csv_from(&data[..], Some(&schema[..])).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.label_name(), Some("stage"));
    }

    #[test]
    fn csv_inference_without_schema() {
        let ds = fixture();
        let mut data = Vec::new();
        ds.write_csv_to(&mut data).unwrap();
        let back = Dataset::read_csv_from(&data[..], None).unwrap();
        assert_eq!(back.column(0).kind, Kind::Numeric);
        assert_eq!(back.column(1).kind, Kind::Nominal);
        assert!(back.row(2)[0].is_missing());
    }

    #[test]
    fn label_must_be_nominal() {
        let mut ds = fixture();
        assert!(ds.set_label("age").is_err());
        assert!(ds.set_label("nope").is_err());
    }

    #[test]
    fn push_rejects_wrong_arity_and_unknown_ids() {
        let mut ds = fixture();
        assert!(ds.push_row(vec![Cell::Missing]).is_err());
        assert!(ds
            .push_row(vec![Cell::Missing, Cell::Nominal(99), Cell::Nominal(0)])
            .is_err());
        assert!(ds
            .push_row(vec![Cell::Nominal(0), Cell::Missing, Cell::Nominal(0)])
            .is_err());
    }

    #[test]
    fn retain_columns_tracks_label() {
        let ds = fixture().drop_columns(&["age"]);
        assert_eq!(ds.n_cols(), 2);
        assert_eq!(ds.label_name(), Some("stage"));
        let ds = ds.drop_columns(&["stage"]);
        assert_eq!(ds.label_index(), None);
    }
}
