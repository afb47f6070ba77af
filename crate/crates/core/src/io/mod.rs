//! File formats: CSV datasets, model JSON, reports.

pub mod csv;
pub mod model;

pub use self::csv::{
    apply_encoding, load_csv, load_csv_reader, load_table, load_with_encoding, read_table,
    read_table_path, write_dataset_csv, write_dataset_csv_path, write_rows_with_column,
    CategoricalColumns, ColumnEncoding, CsvSchema, EncodingMap, LoadSummary, LoadedCsv, RawTable,
    RejectedRow,
};
pub use self::model::{load_model, save_model, ModelFile, FORMAT_VERSION};

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
