//! Preprocessing: outcome recodes, missing-value handling and feature
//! filtering.

mod filters;
mod metastasis;
mod survival;

use std::path::PathBuf;

pub use filters::{
    association, correlation_filter, cramers_v, entropy, information_gain, information_gain_filter, pearson_abs,
    remove_missing, FilterReport, RowPolicy, DEFAULT_CORRELATION_THRESHOLD, DEFAULT_MIN_GAIN,
    DEFAULT_MISSING_THRESHOLD, DEFAULT_NUMERIC_BINS,
};
pub use metastasis::{
    add_metastasis_label, derive_metastasis_label, EraRange, MappingRule, MetastasisConfig, MetastasisMapping,
};
pub use survival::{
    add_survival_label, derive_survival_label, recode_survival_months, SurvivalConfig, SurvivalOutcome, VitalStatus,
    DEFAULT_THRESHOLD_MONTHS, NOT_SURVIVED, SURVIVED,
};

use crate::config::ConfigDoc;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// The full preprocessing pipeline, in the order it runs.
#[derive(Clone, Debug, PartialEq)]
pub struct PreprocessConfig {
    pub survival: Option<SurvivalConfig>,
    pub metastasis: Option<(MetastasisConfig, PathBuf)>,
    pub drop_columns: Vec<String>,
    pub missing_threshold: f64,
    pub row_policy: RowPolicy,
    pub correlation_threshold: f64,
    pub label: Option<String>,
    pub min_gain: f64,
    pub numeric_bins: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            survival: None,
            metastasis: None,
            drop_columns: Vec::new(),
            missing_threshold: DEFAULT_MISSING_THRESHOLD,
            row_policy: RowPolicy::DropAnyMissing,
            correlation_threshold: DEFAULT_CORRELATION_THRESHOLD,
            label: None,
            min_gain: DEFAULT_MIN_GAIN,
            numeric_bins: DEFAULT_NUMERIC_BINS,
        }
    }
}

const KEYS: &[&str] = &[
    "survival.*",
    "metastasis.*",
    "drop_columns",
    "missing_threshold",
    "row_policy",
    "correlation_threshold",
    "label",
    "min_gain",
    "numeric_bins",
];

impl PreprocessConfig {
    /// Parses the `key = value` dialect. Survival keys are prefixed
    /// `survival.`, metastasis keys `metastasis.`; a relative
    /// `metastasis.mapping` path is kept as written.
    pub fn parse(text: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text)?;
        let top = &doc.top;
        top.check_keys(KEYS)?;
        if let Some(s) = doc.sections.first() {
            return Err(Error::Config(format!("line {}: sections are not used here", s.line)));
        }
        let d = PreprocessConfig::default();
        let survival = if top.entries.iter().any(|(k, _, _)| k.starts_with("survival.")) {
            let sd = SurvivalConfig::default();
            Some(SurvivalConfig {
                time_column: top.get("survival.time_column").map_or(sd.time_column, str::to_string),
                vital_column: top.get("survival.vital_column").map_or(sd.vital_column, str::to_string),
                cause_column: top.get("survival.cause_column").map_or(sd.cause_column, str::to_string),
                dead_values: top.list("survival.dead_values").unwrap_or(sd.dead_values),
                studied_cancer: top.require("survival.studied_cancer")?.to_string(),
                threshold_months: top.parse_or("survival.threshold_months", sd.threshold_months)?,
                output_column: top.get("survival.output").map_or(sd.output_column, str::to_string),
            })
        } else {
            None
        };
        let metastasis = if top.entries.iter().any(|(k, _, _)| k.starts_with("metastasis.")) {
            let md = MetastasisConfig::default();
            let cfg = MetastasisConfig {
                era_column: top.get("metastasis.era_column").map_or(md.era_column, str::to_string),
                eod_columns: top.list("metastasis.eod_columns").unwrap_or_default(),
                cs_columns: top.list("metastasis.cs_columns").unwrap_or_default(),
                cs_start_year: top.parse_or("metastasis.cs_start_year", md.cs_start_year)?,
                output_column: top.get("metastasis.output").map_or(md.output_column, str::to_string),
            };
            Some((cfg, PathBuf::from(top.require("metastasis.mapping")?)))
        } else {
            None
        };
        let row_policy = match top.get("row_policy") {
            None => d.row_policy,
            Some("drop_any_missing") => RowPolicy::DropAnyMissing,
            Some("keep") => RowPolicy::Keep,
            Some(other) => return Err(Error::Config(format!("unknown row_policy `{other}`"))),
        };
        Ok(PreprocessConfig {
            survival,
            metastasis,
            drop_columns: top.list("drop_columns").unwrap_or_default(),
            missing_threshold: top.parse_or("missing_threshold", d.missing_threshold)?,
            row_policy,
            correlation_threshold: top.parse_or("correlation_threshold", d.correlation_threshold)?,
            label: top.get("label").map(str::to_string),
            min_gain: top.parse_or("min_gain", d.min_gain)?,
            numeric_bins: top.parse_or("numeric_bins", d.numeric_bins)?,
        })
    }
}

/// Runs recodes, then missing removal, correlation and information-gain
/// filtering. `mapping` must be supplied when metastasis derivation is
/// configured. The information-gain stage needs a label (from the config
/// or the dataset) and is skipped without one.
pub fn run_pipeline(
    ds: &Dataset,
    cfg: &PreprocessConfig,
    mapping: Option<&MetastasisMapping>,
) -> Result<(Dataset, FilterReport)> {
    let mut report = FilterReport::default();
    let mut ds = ds.clone();
    if let Some(s) = &cfg.survival {
        let (out, dropped) = add_survival_label(&ds, s)?;
        report.rows_removed += dropped;
        ds = out;
    }
    if let Some((m, _)) = &cfg.metastasis {
        let mapping = mapping.ok_or_else(|| Error::Config("metastasis mapping not loaded".into()))?;
        ds = add_metastasis_label(&ds, m, mapping)?;
    }
    if !cfg.drop_columns.is_empty() {
        let names: Vec<&str> = cfg.drop_columns.iter().map(String::as_str).collect();
        ds = ds.drop_columns(&names);
    }
    if let Some(l) = &cfg.label {
        ds.set_label(l)?;
    }
    let (out, r) = remove_missing(&ds, cfg.missing_threshold, cfg.row_policy)?;
    report.merge(r);
    let (out, r) = correlation_filter(&out, cfg.correlation_threshold)?;
    report.merge(r);
    let out = match out.label_name().map(str::to_string) {
        Some(label) => {
            let (out, r) = information_gain_filter(&out, &label, cfg.min_gain, cfg.numeric_bins)?;
            report.merge(r);
            out
        }
        None => out,
    };
    Ok((out, report))
}
