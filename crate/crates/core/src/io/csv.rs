//! CSV ingestion with one-hot encoding of nominal columns.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

/// Which columns are nominal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalColumns {
    /// A column is nominal if any non-empty cell fails to parse as a number.
    #[default]
    Auto,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub label_column: String,
    pub positive_label: String,
    pub categorical_columns: CategoricalColumns,
    pub standardize: bool,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            positive_label: "1".into(),
            categorical_columns: CategoricalColumns::Auto,
            standardize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnEncoding {
    Numeric {
        name: String,
        /// `(mean, scale)`; values become `(x - mean) / scale`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        standardization: Option<(f64, f64)>,
    },
    Categorical {
        name: String,
        /// First-appearance order.
        categories: Vec<String>,
    },
}

impl ColumnEncoding {
    pub fn name(&self) -> &str {
        match self {
            Self::Numeric { name, .. } | Self::Categorical { name, .. } => name,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Self::Numeric { .. } => 1,
            Self::Categorical { categories, .. } => categories.len(),
        }
    }
}

/// Everything needed to encode further files exactly like the training file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub label_column: String,
    pub positive_label: String,
    /// Input feature columns in output order.
    pub columns: Vec<ColumnEncoding>,
}

impl EncodingMap {
    /// Output column names; dummies are named `col=value`.
    pub fn feature_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.columns {
            match c {
                ColumnEncoding::Numeric { name, .. } => out.push(name.clone()),
                ColumnEncoding::Categorical { name, categories } => {
                    out.extend(categories.iter().map(|v| format!("{name}={v}")))
                }
            }
        }
        out
    }

    pub fn n_features(&self) -> usize {
        self.columns.iter().map(ColumnEncoding::width).sum()
    }

    /// The nominal columns only.
    pub fn categorical(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.columns.iter().filter_map(|c| match c {
            ColumnEncoding::Categorical { name, categories } => {
                Some((name.as_str(), categories.as_slice()))
            }
            ColumnEncoding::Numeric { .. } => None,
        })
    }

    pub fn label_of(&self, raw: &str) -> Label {
        if raw.trim() == self.positive_label {
            POSITIVE
        } else {
            NEGATIVE
        }
    }

    fn encode_into(&self, cells: &[&str], out: &mut Vec<f64>, row: usize) -> Result<()> {
        for (c, cell) in self.columns.iter().zip(cells) {
            match c {
                ColumnEncoding::Numeric {
                    name,
                    standardization,
                } => {
                    let v = parse_number(cell).ok_or_else(|| Error::Parse {
                        row,
                        column: name.clone(),
                        value: cell.to_string(),
                    })?;
                    out.push(match standardization {
                        Some((mean, scale)) => (v - mean) / scale,
                        None => v,
                    });
                }
                ColumnEncoding::Categorical { categories, .. } => {
                    let cell = cell.trim();
                    out.extend(categories.iter().map(|v| if v == cell { 1.0 } else { 0.0 }));
                }
            }
        }
        Ok(())
    }
}

/// Rows dropped during loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRow {
    /// 1-based data row number (the header is row 0).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadSummary {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rejected: Vec<RejectedRow>,
}

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub dataset: Dataset,
    pub encoding: EncodingMap,
    pub summary: LoadSummary,
    /// 0-based data row of the file behind each dataset row.
    pub source_rows: Vec<usize>,
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Header and raw records of a CSV source.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

pub fn read_table<R: Read>(reader: R) -> Result<RawTable> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut records = Vec::new();
    for rec in rdr.records() {
        records.push(rec?.iter().map(str::to_string).collect());
    }
    if header.iter().all(String::is_empty) || records.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(RawTable { header, records })
}

pub fn read_table_path(path: impl AsRef<Path>) -> Result<RawTable> {
    read_table(std::fs::File::open(path)?)
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<LoadedCsv> {
    load_table(&read_table_path(path)?, schema)
}

pub fn load_csv_reader<R: Read>(reader: R, schema: &CsvSchema) -> Result<LoadedCsv> {
    load_table(&read_table(reader)?, schema)
}

fn column_index(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

/// Build the encoding from `table` and encode it.
pub fn load_table(table: &RawTable, schema: &CsvSchema) -> Result<LoadedCsv> {
    let header = &table.header;
    let label_idx = column_index(header, &schema.label_column)
        .ok_or_else(|| Error::MissingLabelColumn(schema.label_column.clone()))?;
    let feature_idx: Vec<usize> = (0..header.len()).filter(|&j| j != label_idx).collect();

    let is_categorical: Vec<bool> = match &schema.categorical_columns {
        CategoricalColumns::Explicit(names) => {
            for name in names {
                if column_index(header, name).is_none() || *name == schema.label_column {
                    return Err(Error::UnknownColumn(name.clone()));
                }
            }
            feature_idx
                .iter()
                .map(|&j| names.contains(&header[j]))
                .collect()
        }
        CategoricalColumns::Auto => feature_idx
            .iter()
            .map(|&j| {
                table.records.iter().any(|r| {
                    let cell = r[j].trim();
                    !cell.is_empty() && parse_number(cell).is_none()
                })
            })
            .collect(),
    };

    // First pass: row acceptance and category discovery.
    let mut summary = LoadSummary {
        rows_read: table.records.len(),
        ..Default::default()
    };
    let mut categories: Vec<Vec<String>> = vec![Vec::new(); feature_idx.len()];
    let mut accepted = Vec::new();
    'rows: for (r, rec) in table.records.iter().enumerate() {
        let row = r + 1;
        if rec[label_idx].trim().is_empty() {
            summary.rejected.push(RejectedRow {
                row,
                reason: "missing label".into(),
            });
            continue;
        }
        for (k, &j) in feature_idx.iter().enumerate() {
            let cell = rec[j].trim();
            if cell.is_empty() {
                summary.rejected.push(RejectedRow {
                    row,
                    reason: format!("missing value in column {}", header[j]),
                });
                continue 'rows;
            }
            if !is_categorical[k] && parse_number(cell).is_none() {
                return Err(Error::Parse {
                    row,
                    column: header[j].clone(),
                    value: cell.to_string(),
                });
            }
        }
        for (k, &j) in feature_idx.iter().enumerate() {
            let cell = rec[j].trim();
            if is_categorical[k] && !categories[k].iter().any(|c| c == cell) {
                categories[k].push(cell.to_string());
            }
        }
        accepted.push(r);
    }
    summary.rows_accepted = accepted.len();
    if accepted.is_empty() {
        return Err(Error::EmptyFile);
    }

    let columns: Vec<ColumnEncoding> = feature_idx
        .iter()
        .zip(categories)
        .zip(&is_categorical)
        .map(|((&j, cats), &cat)| {
            let name = header[j].clone();
            if cat {
                ColumnEncoding::Categorical {
                    name,
                    categories: cats,
                }
            } else {
                ColumnEncoding::Numeric {
                    name,
                    standardization: None,
                }
            }
        })
        .collect();
    let mut encoding = EncodingMap {
        label_column: schema.label_column.clone(),
        positive_label: schema.positive_label.trim().to_string(),
        columns,
    };

    let labels: Vec<Label> = accepted
        .iter()
        .map(|&r| encoding.label_of(&table.records[r][label_idx]))
        .collect();
    if labels.iter().all(|&y| y == labels[0]) {
        let side = if labels[0] == POSITIVE {
            "positive"
        } else {
            "negative"
        };
        return Err(Error::SingleClassAfterMapping(format!(
            "all {} rows map to the {side} class (positive label {:?})",
            labels.len(),
            encoding.positive_label
        )));
    }

    if schema.standardize {
        for (k, &j) in feature_idx.iter().enumerate() {
            if let ColumnEncoding::Numeric {
                standardization, ..
            } = &mut encoding.columns[k]
            {
                let values: Vec<f64> = accepted
                    .iter()
                    .map(|&r| parse_number(&table.records[r][j]).unwrap_or(f64::NAN))
                    .collect();
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
                *standardization = Some((mean, scale));
            }
        }
    }

    let p = encoding.n_features();
    let mut samples = Vec::with_capacity(accepted.len() * p);
    let mut cells: Vec<&str> = Vec::with_capacity(feature_idx.len());
    for &r in &accepted {
        cells.clear();
        cells.extend(feature_idx.iter().map(|&j| table.records[r][j].as_str()));
        encoding.encode_into(&cells, &mut samples, r + 1)?;
    }
    let dataset = Dataset::new(samples, p, labels)?.with_feature_names(encoding.feature_names())?;
    Ok(LoadedCsv {
        dataset,
        encoding,
        summary,
        source_rows: accepted,
    })
}

/// Encode raw rows (cells in `header` order) with a previously built map.
/// Unseen categories encode as an all-zero group.
pub fn apply_encoding(
    map: &EncodingMap,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<Vec<f64>> {
    let positions = map
        .columns
        .iter()
        .map(|c| {
            column_index(header, c.name()).ok_or_else(|| Error::UnknownColumn(c.name().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(rows.len() * map.n_features());
    let mut cells = Vec::with_capacity(positions.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::LengthMismatch {
                left: header.len(),
                right: row.len(),
            });
        }
        cells.clear();
        cells.extend(positions.iter().map(|&j| row[j].as_str()));
        map.encode_into(&cells, &mut out, r + 1)?;
    }
    Ok(out)
}

/// Load a file with an existing map, e.g. a test file encoded like the
/// training file. Rows with a missing label or feature are rejected.
pub fn load_with_encoding(table: &RawTable, map: &EncodingMap) -> Result<LoadedCsv> {
    let label_idx = column_index(&table.header, &map.label_column)
        .ok_or_else(|| Error::MissingLabelColumn(map.label_column.clone()))?;
    let mut summary = LoadSummary {
        rows_read: table.records.len(),
        ..Default::default()
    };
    let mut kept = Vec::new();
    let mut source_rows = Vec::new();
    for (r, rec) in table.records.iter().enumerate() {
        if let Some(reason) = if rec[label_idx].trim().is_empty() {
            Some("missing label".to_string())
        } else {
            map.columns.iter().find_map(|c| {
                let j = column_index(&table.header, c.name())?;
                rec[j]
                    .trim()
                    .is_empty()
                    .then(|| format!("missing value in column {}", c.name()))
            })
        } {
            summary.rejected.push(RejectedRow { row: r + 1, reason });
            continue;
        }
        kept.push(rec.clone());
        source_rows.push(r);
    }
    summary.rows_accepted = kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyFile);
    }
    let samples = apply_encoding(map, &table.header, &kept)?;
    let labels = kept
        .iter()
        .map(|rec| map.label_of(&rec[label_idx]))
        .collect();
    let dataset =
        Dataset::new(samples, map.n_features(), labels)?.with_feature_names(map.feature_names())?;
    Ok(LoadedCsv {
        dataset,
        encoding: map.clone(),
        summary,
        source_rows,
    })
}

/// Write `d` with its column names and a `label` column of `1` / `-1`.
pub fn write_dataset_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = ::csv::Writer::from_writer(writer);
    let mut header = d.column_names();
    header.push("label".into());
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (x, &y) in d.rows().zip(d.labels()) {
        record.clear();
        record.extend(x.iter().map(|v| v.to_string()));
        record.push(y.to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_csv_path(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset_csv(d, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Write selected raw rows unchanged, with one extra trailing column.
pub fn write_rows_with_column<W: Write>(
    table: &RawTable,
    rows: &[usize],
    column: &str,
    values: &[f64],
    writer: W,
) -> Result<()> {
    if rows.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: values.len(),
        });
    }
    let mut w = ::csv::Writer::from_writer(writer);
    let mut header = table.header.clone();
    header.push(column.into());
    w.write_record(&header)?;
    for (&r, v) in rows.iter().zip(values) {
        let mut rec = table.records[r].clone();
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
