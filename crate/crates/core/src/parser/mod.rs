//! Fixed-width record ingestion driven by a positional data dictionary.

mod dictionary;
mod records;

pub use dictionary::{load_dictionary, DataDictionary, FieldSpec};
pub use records::{
    apply_recode, dataset_schema, format_record, parse_records, row_values, ParseOutcome, RejectedLine, Value,
    DEFAULT_BATCH_SIZE,
};
