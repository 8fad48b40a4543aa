use std::io::Read;

use crate::dataset::{Cell, Column, Dataset};
use crate::error::{Error, Result};

/// Inclusive year range; either end may be open.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EraRange {
    pub from: Option<i64>,
    pub to: Option<i64>,
}

impl EraRange {
    pub fn contains(&self, year: i64) -> bool {
        self.from.is_none_or(|f| year >= f) && self.to.is_none_or(|t| year <= t)
    }
}

impl std::str::FromStr for EraRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let year = |t: &str| -> Result<Option<i64>> {
            let t = t.trim();
            if t.is_empty() {
                Ok(None)
            } else {
                t.parse()
                    .map(Some)
                    .map_err(|_| Error::Format(format!("bad era year `{t}`")))
            }
        };
        match s.split_once('-') {
            Some((a, b)) => Ok(EraRange {
                from: year(a)?,
                to: year(b)?,
            }),
            None => {
                let y = year(s)?;
                if y.is_none() {
                    return Err(Error::Format("empty era range".into()));
                }
                Ok(EraRange { from: y, to: y })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MappingRule {
    pub era: EraRange,
    pub source_column: String,
    pub code: String,
    pub target: String,
}

/// Code table merging pre-2004 extent-of-disease codes and 2004+
/// collaborative-stage codes into one metastasis category set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetastasisMapping {
    pub rules: Vec<MappingRule>,
    pub fallback: Option<String>,
}

impl MetastasisMapping {
    /// Reads the mapping CSV: `era_range,source_column,code,target_category`.
    /// A row whose era_range is `fallback` sets the fallback category.
    pub fn from_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != ["era_range", "source_column", "code", "target_category"] {
            return Err(Error::Format(format!(
                "metastasis mapping header must be era_range,source_column,code,target_category; got {}",
                header.join(",")
            )));
        }
        let mut m = MetastasisMapping::default();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if &rec[0] == "fallback" {
                if m.fallback.is_some() {
                    return Err(Error::Format(format!("mapping line {line}: second fallback row")));
                }
                m.fallback = Some(rec[3].to_string());
                continue;
            }
            let era = rec[0]
                .parse()
                .map_err(|e| Error::Format(format!("mapping line {line}: {e}")))?;
            m.rules.push(MappingRule {
                era,
                source_column: rec[1].to_string(),
                code: rec[2].to_string(),
                target: rec[3].to_string(),
            });
        }
        Ok(m)
    }

    /// Target categories in first-appearance order, fallback last.
    pub fn targets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in self
            .rules
            .iter()
            .map(|r| r.target.as_str())
            .chain(self.fallback.as_deref())
        {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    fn lookup(&self, era: i64, column: &str, code: &str) -> Option<&str> {
        self.rules
            .iter()
            .find(|r| r.era.contains(era) && r.source_column == column && r.code == code)
            .map(|r| r.target.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetastasisConfig {
    pub era_column: String,
    pub eod_columns: Vec<String>,
    pub cs_columns: Vec<String>,
    /// First diagnosis year coded with collaborative stage.
    pub cs_start_year: i64,
    pub output_column: String,
}

impl Default for MetastasisConfig {
    fn default() -> Self {
        MetastasisConfig {
            era_column: "year_dx".into(),
            eod_columns: Vec::new(),
            cs_columns: Vec::new(),
            cs_start_year: 2004,
            output_column: "metastasis".into(),
        }
    }
}

/// Maps one row to its metastasis category. Rows before `cs_start_year`
/// are looked up through the EOD columns, later rows through the CS
/// columns; the first column whose code has a rule wins.
pub fn derive_metastasis_label(
    ds: &Dataset,
    row: usize,
    cfg: &MetastasisConfig,
    mapping: &MetastasisMapping,
) -> Result<String> {
    let era_col = ds.require_column(&cfg.era_column)?;
    let era = match ds.row(row)[era_col] {
        Cell::Numeric(x) => x as i64,
        Cell::Nominal(_) => ds.cell_text(row, era_col).trim().parse().map_err(|_| Error::Record {
            index: row,
            message: format!("era `{}` is not a year", ds.cell_text(row, era_col)),
        })?,
        Cell::Missing => {
            return Err(Error::Record {
                index: row,
                message: format!("era column `{}` is missing", cfg.era_column),
            })
        }
    };
    let columns = if era < cfg.cs_start_year {
        &cfg.eod_columns
    } else {
        &cfg.cs_columns
    };
    let mut first_code = None;
    for name in columns {
        let j = ds.require_column(name)?;
        if ds.row(row)[j].is_missing() {
            continue;
        }
        let code = ds.cell_text(row, j);
        if let Some(t) = mapping.lookup(era, name, &code) {
            return Ok(t.to_string());
        }
        first_code.get_or_insert(code);
    }
    match &mapping.fallback {
        Some(f) => Ok(f.clone()),
        None => Err(Error::Mapping {
            era,
            code: first_code.unwrap_or_default(),
        }),
    }
}

/// Appends the derived metastasis column to every row.
pub fn add_metastasis_label(ds: &Dataset, cfg: &MetastasisConfig, mapping: &MetastasisMapping) -> Result<Dataset> {
    let mut col = Column::nominal(cfg.output_column.clone()).with_categories(mapping.targets());
    let cells = (0..ds.n_rows())
        .map(|r| derive_metastasis_label(ds, r, cfg, mapping).map(|t| Cell::Nominal(col.intern(&t))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ds.clone();
    out.add_column(col, cells)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAPPING: &str = "era_range,source_column,code,target_category
1988-2003,eod_ext,85,M3
1988-2003,eod_ext,10,M0
2004-,cs_mets,40,M3
2004-,cs_mets,00,M0
";

    fn fixture() -> Dataset {
        let mut ds = Dataset::new(vec![
            Column::numeric("year_dx"),
            Column::nominal("eod_ext"),
            Column::nominal("cs_mets"),
        ])
        .unwrap();
        ds.push_text_row(&[Some("2002"), Some("85"), None]).unwrap();
        ds.push_text_row(&[Some("2006"), None, Some("40")]).unwrap();
        ds.push_text_row(&[Some("2006"), None, Some("99")]).unwrap();
        ds
    }

    fn cfg() -> MetastasisConfig {
        MetastasisConfig {
            eod_columns: vec!["eod_ext".into()],
            cs_columns: vec!["cs_mets".into()],
            ..Default::default()
        }
    }

    #[test]
    fn both_eras_map_into_one_category_set() {
        let m = MetastasisMapping::from_csv(MAPPING.as_bytes()).unwrap();
        let ds = fixture();
        assert_eq!(derive_metastasis_label(&ds, 0, &cfg(), &m).unwrap(), "M3");
        assert_eq!(derive_metastasis_label(&ds, 1, &cfg(), &m).unwrap(), "M3");
    }

    #[test]
    fn unmapped_code_without_fallback() {
        let m = MetastasisMapping::from_csv(MAPPING.as_bytes()).unwrap();
        match derive_metastasis_label(&fixture(), 2, &cfg(), &m) {
            Err(Error::Mapping { era, code }) => {
                assert_eq!(era, 2006);
                assert_eq!(code, "99");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fallback_row() {
        let text = format!("{MAPPING}fallback,,,M9\n");
        let m = MetastasisMapping::from_csv(text.as_bytes()).unwrap();
        assert_eq!(m.targets(), vec!["M3", "M0", "M9"]);
        let out = add_metastasis_label(&fixture(), &cfg(), &m).unwrap();
        let j = out.require_column("metastasis").unwrap();
        let labels: Vec<String> = (0..3).map(|r| out.cell_text(r, j)).collect();
        assert_eq!(labels, ["M3", "M3", "M9"]);
    }

    #[test]
    fn era_ranges() {
        let r: EraRange = "1988-2003".parse().unwrap();
        assert!(r.contains(1988) && r.contains(2003) && !r.contains(2004));
        let open: EraRange = "2004-".parse().unwrap();
        assert!(open.contains(2010) && !open.contains(2003));
        let single: EraRange = "2004".parse().unwrap();
        assert!(single.contains(2004) && !single.contains(2005));
        assert!("".parse::<EraRange>().is_err());
    }
}
