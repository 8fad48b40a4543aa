//! The plain-text `key = value` dialect shared by grid configs and synthetic
//! data specs.
//!
//! ```text
//! # comment
//! sizes = 500, 1000, 2000
//! [attribute age]
//! kind = numeric
//! ```
//!
//! Lists are comma-separated. A `[kind name]` header opens a section; keys
//! that follow belong to it until the next header.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub kind: String,
    pub name: String,
    pub line: usize,
    pub entries: Vec<(String, String, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigDoc {
    pub top: Section,
    pub sections: Vec<Section>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut current: Option<Section> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let header = header
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {line_no}: unterminated section header")))?;
                let (kind, name) = header
                    .trim()
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::Config(format!("line {line_no}: section header needs `[kind name]`")))?;
                if let Some(s) = current.take() {
                    doc.sections.push(s);
                }
                current = Some(Section {
                    kind: kind.trim().to_string(),
                    name: name.trim().to_string(),
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {line_no}: empty key")));
            }
            let target = current.as_mut().unwrap_or(&mut doc.top);
            if target.entries.iter().any(|(ek, _, _)| ek == k) {
                return Err(Error::Config(format!("line {line_no}: duplicate key `{k}`")));
            }
            target.entries.push((k.to_string(), v.trim().to_string(), line_no));
        }
        if let Some(s) = current {
            doc.sections.push(s);
        }
        Ok(doc)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            if self.kind.is_empty() {
                Error::Config(format!("missing key `{key}`"))
            } else {
                Error::Config(format!("[{} {}]: missing key `{key}`", self.kind, self.name))
            }
        })
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_value(key, v),
        }
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(split_list)
    }

    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => split_list(v)
                .iter()
                .map(|s| parse_value(key, s))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Errors on any key outside `known`, catching typos early.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (k, _, line) in &self.entries {
            let prefix_ok = known
                .iter()
                .any(|kn| kn.ends_with('*') && k.starts_with(&kn[..kn.len() - 1]));
            if !known.contains(&k.as_str()) && !prefix_ok {
                return Err(Error::Config(format!("line {line}: unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

/// Splits on commas outside parentheses, so `DT(min_leaf=1,max_depth=4)`
/// stays one item.
pub fn split_list(v: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in v.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&v[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&v[start..]);
    out.into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}
