use std::collections::HashSet;
use std::fmt;

use crate::dataset::Kind;
use crate::error::{Error, Result};

/// One positional field of a fixed-width record.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub name: String,
    /// 1-based character position.
    pub offset: usize,
    pub width: usize,
    pub kind: Kind,
    pub category: Option<String>,
    pub missing_codes: Vec<String>,
    /// Raw code to label, in declaration order.
    pub recode: Option<Vec<(String, String)>>,
}

impl FieldSpec {
    pub fn new(name: impl Into<String>, offset: usize, width: usize, kind: Kind) -> Self {
        FieldSpec {
            name: name.into(),
            offset,
            width,
            kind,
            category: None,
            missing_codes: Vec::new(),
            recode: None,
        }
    }

    pub fn with_missing<I: IntoIterator<Item = S>, S: Into<String>>(mut self, codes: I) -> Self {
        self.missing_codes = codes.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_recode<I, A, B>(mut self, pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        self.recode = Some(pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect());
        self
    }

    pub fn with_category(mut self, tag: impl Into<String>) -> Self {
        self.category = Some(tag.into());
        self
    }

    /// Last character position covered, 1-based inclusive.
    pub fn end(&self) -> usize {
        self.offset + self.width - 1
    }

    pub fn is_missing_code(&self, trimmed: &str) -> bool {
        self.missing_codes.iter().any(|c| c == trimmed)
    }

    pub fn recode_lookup(&self, trimmed: &str) -> Option<&str> {
        self.recode
            .as_ref()?
            .iter()
            .find(|(raw, _)| raw == trimmed)
            .map(|(_, label)| label.as_str())
    }

    /// Inverse of the recode map, for rendering records.
    pub fn recode_reverse(&self, label: &str) -> Option<&str> {
        self.recode
            .as_ref()?
            .iter()
            .find(|(_, l)| l == label)
            .map(|(raw, _)| raw.as_str())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}|{}",
            self.name,
            self.offset,
            self.width,
            self.kind,
            self.category.as_deref().unwrap_or("")
        )?;
        if !self.missing_codes.is_empty() {
            write!(f, "|missing={}", self.missing_codes.join(","))?;
        }
        if let Some(map) = &self.recode {
            let pairs: Vec<String> = map.iter().map(|(a, b)| format!("{a}:{b}")).collect();
            write!(f, "|recode={}", pairs.join(","))?;
        }
        Ok(())
    }
}

/// Positional schema for fixed-width record lines.
#[derive(Clone, Debug, PartialEq)]
pub struct DataDictionary {
    pub record_length: usize,
    pub fields: Vec<FieldSpec>,
}

impl DataDictionary {
    /// Builds a dictionary, enforcing the same invariants as [`load_dictionary`].
    pub fn new(record_length: usize, fields: Vec<FieldSpec>) -> Result<Self> {
        let lines: Vec<usize> = (1..=fields.len()).collect();
        validate(record_length, &fields, &lines)?;
        Ok(DataDictionary { record_length, fields })
    }

    pub fn field(&self, name: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.name == name)
    }
}

impl fmt::Display for DataDictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "record_length={}", self.record_length)?;
        for field in &self.fields {
            writeln!(f, "{field}")?;
        }
        Ok(())
    }
}

/// Parses the dictionary file format:
///
/// ```text
/// # comment
/// record_length=5
/// STR|1|4|nominal|outcome
/// sex|5|1|nominal|demographic|missing=9|recode=1:M,2:F
/// ```
///
/// Errors carry the 1-based line number of the offending line.
pub fn load_dictionary(text: &str) -> Result<DataDictionary> {
    let mut record_length = None;
    let mut fields = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(v) = line.strip_prefix("record_length") {
            let v = v
                .trim_start()
                .strip_prefix('=')
                .ok_or_else(|| bad(line_no, "expected `record_length=N`"))?;
            if record_length.is_some() {
                return Err(bad(line_no, "duplicate record_length header"));
            }
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| bad(line_no, "record_length is not a positive integer"))?;
            if n == 0 {
                return Err(bad(line_no, "record_length must be at least 1"));
            }
            record_length = Some(n);
            continue;
        }
        fields.push(parse_field(line, line_no)?);
        lines.push(line_no);
    }
    let record_length = record_length.ok_or_else(|| bad(0, "missing `record_length=N` header"))?;
    validate(record_length, &fields, &lines)?;
    Ok(DataDictionary { record_length, fields })
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Dictionary {
        line,
        message: message.into(),
    }
}

fn parse_field(line: &str, line_no: usize) -> Result<FieldSpec> {
    let parts: Vec<&str> = line.split('|').map(str::trim).collect();
    if parts.len() < 4 {
        return Err(bad(
            line_no,
            "expected `name|offset|width|kind[|category][|missing=..][|recode=..]`",
        ));
    }
    let name = parts[0];
    if name.is_empty() {
        return Err(bad(line_no, "empty field name"));
    }
    let offset: usize = parts[1].parse().map_err(|_| {
        bad(
            line_no,
            format!("field `{name}`: offset `{}` is not an integer", parts[1]),
        )
    })?;
    let width: usize = parts[2].parse().map_err(|_| {
        bad(
            line_no,
            format!("field `{name}`: width `{}` is not an integer", parts[2]),
        )
    })?;
    let kind: Kind = parts[3]
        .parse()
        .map_err(|_| bad(line_no, format!("field `{name}`: unknown kind `{}`", parts[3])))?;
    let mut spec = FieldSpec::new(name, offset, width, kind);

    let mut rest = &parts[4..];
    if let Some(first) = rest.first() {
        if !first.starts_with("missing=") && !first.starts_with("recode=") {
            if !first.is_empty() {
                spec.category = Some(first.to_string());
            }
            rest = &rest[1..];
        }
    }
    for seg in rest {
        if let Some(v) = seg.strip_prefix("missing=") {
            if !spec.missing_codes.is_empty() {
                return Err(bad(line_no, format!("field `{name}`: duplicate missing segment")));
            }
            spec.missing_codes = v
                .split(',')
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect();
        } else if let Some(v) = seg.strip_prefix("recode=") {
            if spec.recode.is_some() {
                return Err(bad(line_no, format!("field `{name}`: duplicate recode segment")));
            }
            let mut map: Vec<(String, String)> = Vec::new();
            for pair in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (a, b) = pair
                    .split_once(':')
                    .ok_or_else(|| bad(line_no, format!("field `{name}`: recode pair `{pair}` lacks `:`")))?;
                let (a, b) = (a.trim(), b.trim());
                if map.iter().any(|(k, _)| k == a) {
                    return Err(bad(line_no, format!("field `{name}`: recode code `{a}` listed twice")));
                }
                map.push((a.to_string(), b.to_string()));
            }
            spec.recode = Some(map);
        } else if !seg.is_empty() {
            return Err(bad(line_no, format!("field `{name}`: unrecognized segment `{seg}`")));
        }
    }
    Ok(spec)
}

fn validate(record_length: usize, fields: &[FieldSpec], lines: &[usize]) -> Result<()> {
    let mut names = HashSet::new();
    for (f, &line) in fields.iter().zip(lines) {
        if f.offset == 0 {
            return Err(bad(line, format!("field `{}`: offset must be at least 1", f.name)));
        }
        if f.width == 0 {
            return Err(bad(line, format!("field `{}`: width must be at least 1", f.name)));
        }
        if !names.insert(f.name.as_str()) {
            return Err(bad(line, format!("duplicate field name `{}`", f.name)));
        }
        if f.end() > record_length {
            return Err(bad(
                line,
                format!(
                    "field `{}` spans {}..={} beyond record_length {record_length}",
                    f.name,
                    f.offset,
                    f.end()
                ),
            ));
        }
    }
    let mut order: Vec<usize> = (0..fields.len()).collect();
    order.sort_by_key(|&i| (fields[i].offset, i));
    for pair in order.windows(2) {
        let (a, b) = (&fields[pair[0]], &fields[pair[1]]);
        if b.offset <= a.end() {
            let line = lines[pair[0]].max(lines[pair[1]]);
            return Err(bad(line, format!("fields `{}` and `{}` overlap", a.name, b.name)));
        }
    }
    Ok(())
}
