use crate::dataset::{Cell, Column, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD_MONTHS: u32 = 60;

pub const SURVIVED: &str = "survived";
pub const NOT_SURVIVED: &str = "not_survived";

/// Converts a `YYMM` survival time recode into months: `12 * YY + MM`.
///
/// ```
/// # use strata_bench::preprocess::recode_survival_months;
/// assert_eq!(recode_survival_months("0211").unwrap(), 35);
/// ```
pub fn recode_survival_months(raw: &str) -> Result<u32> {
    let b = raw.as_bytes();
    if b.len() != 4 || !b.iter().all(u8::is_ascii_digit) {
        return Err(Error::Format(format!(
            "survival time recode `{raw}` is not four digits (YYMM)"
        )));
    }
    let d = |i: usize| u32::from(b[i] - b'0');
    Ok(12 * (10 * d(0) + d(1)) + 10 * d(2) + d(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VitalStatus {
    Alive,
    Dead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurvivalOutcome {
    Survived,
    NotSurvived,
    /// Censored before the threshold, or died of an unrelated cause.
    Excluded,
}

impl SurvivalOutcome {
    pub fn label(self) -> Option<&'static str> {
        match self {
            SurvivalOutcome::Survived => Some(SURVIVED),
            SurvivalOutcome::NotSurvived => Some(NOT_SURVIVED),
            SurvivalOutcome::Excluded => None,
        }
    }
}

pub fn derive_survival_label(
    months: u32,
    vital_status: VitalStatus,
    cause_of_death: &str,
    studied_cancer: &str,
    threshold_months: u32,
) -> SurvivalOutcome {
    if months >= threshold_months {
        SurvivalOutcome::Survived
    } else if vital_status == VitalStatus::Dead && cause_of_death == studied_cancer {
        SurvivalOutcome::NotSurvived
    } else {
        SurvivalOutcome::Excluded
    }
}

/// Column names and rule parameters for [`add_survival_label`].
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalConfig {
    pub time_column: String,
    pub vital_column: String,
    pub cause_column: String,
    /// Vital-status labels meaning "dead"; anything else is alive.
    pub dead_values: Vec<String>,
    pub studied_cancer: String,
    pub threshold_months: u32,
    pub output_column: String,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        SurvivalConfig {
            time_column: "STR".into(),
            vital_column: "VSR".into(),
            cause_column: "COD".into(),
            dead_values: vec!["dead".into()],
            studied_cancer: String::new(),
            threshold_months: DEFAULT_THRESHOLD_MONTHS,
            output_column: "survival".into(),
        }
    }
}

/// Adds a binary survival label column and drops rows whose outcome is
/// excluded or whose inputs are missing. Returns the count of dropped rows.
pub fn add_survival_label(ds: &Dataset, cfg: &SurvivalConfig) -> Result<(Dataset, usize)> {
    let t = ds.require_column(&cfg.time_column)?;
    let v = ds.require_column(&cfg.vital_column)?;
    let c = ds.require_column(&cfg.cause_column)?;
    let mut keep = Vec::new();
    let mut labels = Vec::new();
    for r in 0..ds.n_rows() {
        let row = ds.row(r);
        if row[t].is_missing() || row[v].is_missing() {
            continue;
        }
        let months = match row[t] {
            Cell::Numeric(x) => {
                let s = format!("{:04}", x as i64);
                recode_survival_months(&s)
            }
            _ => recode_survival_months(&ds.cell_text(r, t)),
        }
        .map_err(|e| Error::Record {
            index: r,
            message: e.to_string(),
        })?;
        let vital_text = ds.cell_text(r, v);
        let vital = if cfg.dead_values.iter().any(|d| *d == vital_text) {
            VitalStatus::Dead
        } else {
            VitalStatus::Alive
        };
        let cause = ds.cell_text(r, c);
        if let Some(label) =
            derive_survival_label(months, vital, &cause, &cfg.studied_cancer, cfg.threshold_months).label()
        {
            keep.push(r);
            labels.push(label);
        }
    }
    let mut out = ds.select_rows(&keep);
    let mut col = Column::nominal(cfg.output_column.clone()).with_categories([SURVIVED, NOT_SURVIVED]);
    let cells = labels.iter().map(|l| Cell::Nominal(col.intern(l))).collect();
    out.add_column(col, cells)?;
    Ok((out, ds.n_rows() - keep.len()))
}
