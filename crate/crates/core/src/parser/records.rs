use rayon::prelude::*;

use super::dictionary::{DataDictionary, FieldSpec};
use crate::dataset::{parse_number, Cell, Column, Dataset, Kind};
use crate::error::{Error, Result};

pub const DEFAULT_BATCH_SIZE: usize = 50_000;

/// A decoded field value, before category interning.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Missing,
    Text(String),
    Number(f64),
}

/// A line that was rejected, with its 0-based index in the input.
#[derive(Clone, Debug, PartialEq)]
pub struct RejectedLine {
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseOutcome {
    pub dataset: Dataset,
    pub rejected: Vec<RejectedLine>,
    /// Lines longer than `record_length`; their trailing characters were ignored.
    pub long_lines: usize,
}

/// Decodes one raw slice: missing codes first, then the recode map, then
/// the plain trimmed text (nominal) or a number (numeric).
///
/// Only spaces are trimmed. A slice that is blank after trimming is missing.
pub fn apply_recode(raw: &str, spec: &FieldSpec) -> Result<Value> {
    let trimmed = raw.trim_matches(' ');
    if trimmed.is_empty() || spec.is_missing_code(trimmed) {
        return Ok(Value::Missing);
    }
    let text = match &spec.recode {
        Some(_) => spec.recode_lookup(trimmed).ok_or_else(|| Error::UnknownCode {
            field: spec.name.clone(),
            raw: trimmed.to_string(),
        })?,
        None => trimmed,
    };
    match spec.kind {
        Kind::Nominal => Ok(Value::Text(text.to_string())),
        Kind::Numeric => parse_number(text)
            .map(Value::Number)
            .ok_or_else(|| Error::Format(format!("field `{}`: `{text}` is not numeric", spec.name))),
    }
}

/// Empty dataset whose columns mirror the dictionary. Recode targets are
/// registered up front so category ids follow declaration order.
pub fn dataset_schema(dict: &DataDictionary) -> Dataset {
    let columns = dict
        .fields
        .iter()
        .map(|f| {
            let mut c = Column::new(f.name.clone(), f.kind, f.category.clone());
            if f.kind == Kind::Nominal {
                if let Some(map) = &f.recode {
                    c = c.with_categories(map.iter().map(|(_, l)| l.as_str()));
                }
            }
            c
        })
        .collect();
    Dataset::new(columns).expect("dictionary field names are unique")
}

fn slice_fields(line: &str, dict: &DataDictionary, index: usize) -> Result<(Vec<Value>, bool), RejectedLine> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let reject = |message: String| RejectedLine { index, message };
    // Byte offsets of each character boundary, only needed for non-ASCII input.
    let bounds: Option<Vec<usize>> = (!line.is_ascii()).then(|| {
        line.char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(line.len()))
            .collect()
    });
    let len = bounds.as_ref().map_or(line.len(), |b| b.len() - 1);
    if len < dict.record_length {
        return Err(reject(format!(
            "short line: {len} characters, record_length is {}",
            dict.record_length
        )));
    }
    let mut values = Vec::with_capacity(dict.fields.len());
    for f in &dict.fields {
        let (start, end) = (f.offset - 1, f.end());
        let raw = match &bounds {
            None => &line[start..end],
            Some(b) => &line[b[start]..b[end]],
        };
        values.push(apply_recode(raw, f).map_err(|e| reject(e.to_string()))?);
    }
    Ok((values, len > dict.record_length))
}

/// Parses fixed-width lines into a [`Dataset`].
///
/// Lines are consumed `batch_size` at a time and each batch is decoded in
/// parallel; the result does not depend on `batch_size`. Lines that are too
/// short or hold undecodable values are rejected and reported, and parsing
/// continues, so `rows + rejected == lines`.
pub fn parse_records<I, S>(lines: I, dict: &DataDictionary, batch_size: usize) -> Result<ParseOutcome>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str> + Send + Sync,
{
    if batch_size == 0 {
        return Err(Error::Format("batch_size must be at least 1".into()));
    }
    let mut ds = dataset_schema(dict);
    let mut rows = Vec::new();
    let mut rejected = Vec::new();
    let mut long_lines = 0;

    let mut iter = lines.into_iter().enumerate();
    let mut batch: Vec<(usize, S)> = Vec::with_capacity(batch_size.min(DEFAULT_BATCH_SIZE));
    loop {
        batch.clear();
        batch.extend(iter.by_ref().take(batch_size));
        if batch.is_empty() {
            break;
        }
        let decoded: Vec<_> = batch
            .par_iter()
            .map(|(i, l)| slice_fields(l.as_ref(), dict, *i))
            .collect();
        for res in decoded {
            match res {
                Err(r) => rejected.push(r),
                Ok((values, long)) => {
                    long_lines += usize::from(long);
                    let row = values
                        .into_iter()
                        .enumerate()
                        .map(|(j, v)| match v {
                            Value::Missing => Cell::Missing,
                            Value::Number(x) => Cell::Numeric(x),
                            Value::Text(t) => Cell::Nominal(ds.column_mut(j).intern(&t)),
                        })
                        .collect();
                    rows.push(row);
                }
            }
        }
    }
    for r in rows {
        ds.push_row(r)?;
    }
    Ok(ParseOutcome {
        dataset: ds,
        rejected,
        long_lines,
    })
}

/// Renders values into a fixed-width line: the inverse of [`parse_records`]
/// for dictionaries whose recode maps are bijective. Values are
/// left-aligned and space-padded; missing values use the first missing code.
pub fn format_record(dict: &DataDictionary, values: &[Value]) -> Result<String> {
    if values.len() != dict.fields.len() {
        return Err(Error::Schema(format!(
            "{} values for {} fields",
            values.len(),
            dict.fields.len()
        )));
    }
    let mut line = vec![' '; dict.record_length];
    for (f, v) in dict.fields.iter().zip(values) {
        let label = match v {
            Value::Missing => None,
            Value::Text(t) => Some(t.clone()),
            Value::Number(x) => Some(format!("{x}")),
        };
        let text = match label {
            None => f.missing_codes.first().cloned().unwrap_or_default(),
            Some(label) if f.recode.is_some() => f
                .recode_reverse(&label)
                .ok_or_else(|| Error::UnknownCode {
                    field: f.name.clone(),
                    raw: label.clone(),
                })?
                .to_string(),
            Some(label) => label,
        };
        let chars: Vec<char> = text.chars().collect();
        if chars.len() > f.width {
            return Err(Error::Format(format!(
                "field `{}`: `{text}` wider than {}",
                f.name, f.width
            )));
        }
        for (k, c) in chars.into_iter().enumerate() {
            line[f.offset - 1 + k] = c;
        }
    }
    Ok(line.into_iter().collect())
}

/// Values of a dataset row in dictionary field order, for [`format_record`].
pub fn row_values(ds: &Dataset, row: usize) -> Vec<Value> {
    ds.row(row)
        .iter()
        .enumerate()
        .map(|(j, c)| match *c {
            Cell::Missing => Value::Missing,
            Cell::Numeric(x) => Value::Number(x),
            Cell::Nominal(_) => Value::Text(ds.cell_text(row, j)),
        })
        .collect()
}
