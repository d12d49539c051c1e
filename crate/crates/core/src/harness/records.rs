//! Tidy CSV tables written by the benchmarks.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of the records table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub dataset: String,
    pub task: String,
    pub validation_split: usize,
    pub decoder: String,
    pub penalty: String,
    pub strategy: String,
    pub cv_estimate: Option<f64>,
    pub validation_accuracy: f64,
    pub delta: Option<f64>,
    pub stability: Option<f64>,
    #[serde(rename = "chosen_C")]
    pub chosen_c: String,
    pub runtime: Option<f64>,
    pub config_hash: String,
    pub seed: u64,
}

pub const RECORD_COLUMNS: [&str; 14] = [
    "dataset",
    "task",
    "validation_split",
    "decoder",
    "penalty",
    "strategy",
    "cv_estimate",
    "validation_accuracy",
    "delta",
    "stability",
    "chosen_C",
    "runtime",
    "config_hash",
    "seed",
];

/// Columns `report` cannot work without.
pub const REQUIRED_COLUMNS: [&str; 10] = [
    "dataset",
    "task",
    "validation_split",
    "decoder",
    "penalty",
    "strategy",
    "cv_estimate",
    "validation_accuracy",
    "stability",
    "chosen_C",
];

/// Long-format weight table: one row per (record, feature); the intercept
/// is the row with feature `intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub dataset: String,
    pub task: String,
    pub validation_split: usize,
    pub decoder: String,
    pub penalty: String,
    pub strategy: String,
    pub feature: String,
    pub weight: f64,
}

/// Inner tuning-curve cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub dataset: String,
    pub task: String,
    pub validation_split: usize,
    pub decoder: String,
    pub penalty: String,
    pub inner_split: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub accuracy: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_csv_to(std::io::BufWriter::new(file), rows)
}

pub fn write_csv_to<T: Serialize>(writer: impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let file = std::fs::File::open(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_records_from(file)
}

/// Reads a records table, failing with the name of the first missing
/// required column.
pub fn read_records_from(reader: impl Read) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    for col in REQUIRED_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::MissingColumn(col.into()));
        }
    }
    // optional columns are filled in so older or trimmed tables still load
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let get = |name: &str| headers.iter().position(|h| h == name).and_then(|i| rec.get(i)).unwrap_or("");
        let num = |name: &str| -> Result<Option<f64>> {
            let v = get(name);
            if v.is_empty() {
                Ok(None)
            } else {
                v.parse()
                    .map(Some)
                    .map_err(|_| Error::Evaluation(format!("column {name}: cannot parse {v:?} as a number")))
            }
        };
        rows.push(Record {
            dataset: get("dataset").into(),
            task: get("task").into(),
            validation_split: get("validation_split")
                .parse()
                .map_err(|_| Error::Evaluation(format!("column validation_split: bad value {:?}", get("validation_split"))))?,
            decoder: get("decoder").into(),
            penalty: get("penalty").into(),
            strategy: get("strategy").into(),
            cv_estimate: num("cv_estimate")?,
            validation_accuracy: num("validation_accuracy")?
                .ok_or_else(|| Error::Evaluation("column validation_accuracy: empty value".into()))?,
            delta: num("delta")?,
            stability: num("stability")?,
            chosen_c: get("chosen_C").into(),
            runtime: num("runtime")?,
            config_hash: get("config_hash").into(),
            seed: get("seed").parse().unwrap_or(0),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> Record {
        Record {
            dataset: "d".into(),
            task: "t".into(),
            validation_split: 2,
            decoder: "svm".into(),
            penalty: "l2".into(),
            strategy: "refit".into(),
            cv_estimate: Some(0.7),
            validation_accuracy: 0.65,
            delta: Some(0.7 - 0.65),
            stability: None,
            chosen_c: "0.1;1".into(),
            runtime: None,
            config_hash: "abc".into(),
            seed: 9,
        }
    }

    #[test]
    fn header_matches_column_list() {
        let mut buf = Vec::new();
        write_csv_to(&mut buf, &[record()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));
        assert_eq!(read_records_from(text.as_bytes()).unwrap(), vec![record()]);
    }

    #[test]
    fn missing_column_is_named() {
        let text = "dataset,task,validation_split,decoder,penalty,strategy,cv_estimate,stability,chosen_C\n";
        let err = read_records_from(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "missing column `validation_accuracy`");
    }
}
