//! Dataset representation and the CSV exchange format.
//!
//! A CSV dataset has a header row with feature columns `f0..f{d-1}`, a
//! `label` column holding exactly two distinct values and a `block` column.
//! Labels are mapped to −1/+1 by ascending lexical order of their original
//! spelling, which is kept so that exporting writes back the same strings.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: Array2<f64>,
    labels: Vec<i8>,
    blocks: Vec<usize>,
    block_names: Vec<String>,
    class_names: [String; 2],
}

impl Dataset {
    /// Builds a dataset from ±1 labels and block names given per sample.
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<i8>,
        blocks: Vec<String>,
    ) -> Result<Self> {
        let n = features.nrows();
        if labels.len() != n || blocks.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{} rows, {} labels, {} block ids",
                n,
                labels.len(),
                blocks.len()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidDataset("at least 2 samples required".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::InvalidDataset(format!("label {bad} is not ±1")));
        }
        if !(labels.contains(&1) && labels.contains(&-1)) {
            return Err(Error::InvalidDataset("labels must contain two distinct classes".into()));
        }
        let (blocks, block_names) = index_blocks(&blocks);
        Ok(Self {
            name: name.into(),
            features,
            labels,
            blocks,
            block_names,
            class_names: ["-1".into(), "1".into()],
        })
    }

    /// Same as [`Dataset::new`] but keeps the original spelling of the two
    /// classes (`class_names[0]` maps to −1).
    pub fn with_class_names(mut self, class_names: [String; 2]) -> Self {
        self.class_names = class_names;
        self
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn features_mut(&mut self) -> &mut Array2<f64> {
        &mut self.features
    }

    pub fn sample(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Block index per sample; indices follow first occurrence order.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_names(&self) -> &[String] {
        &self.block_names
    }

    pub fn n_blocks(&self) -> usize {
        self.block_names.len()
    }

    pub fn class_names(&self) -> &[String; 2] {
        &self.class_names
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l > 0).count();
        (self.labels.len() - pos, pos)
    }

    pub fn has_both_classes(&self) -> bool {
        let (neg, pos) = self.class_counts();
        neg > 0 && pos > 0
    }

    /// Copies the given rows, in order. Block indices are recomputed for the
    /// subset but names are kept.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let features = self.features.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let names: Vec<String> = indices
            .iter()
            .map(|&i| self.block_names[self.blocks[i]].clone())
            .collect();
        let (blocks, block_names) = index_blocks(&names);
        Dataset {
            name: self.name.clone(),
            features,
            labels,
            blocks,
            block_names,
            class_names: self.class_names.clone(),
        }
    }

    /// Replaces the feature matrix (same sample count), keeping labels and
    /// blocks.
    pub fn with_features(&self, features: Array2<f64>) -> Dataset {
        assert_eq!(features.nrows(), self.n_samples());
        Dataset {
            features,
            ..self.clone()
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        for ((sample, feature), v) in self.features.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { sample, feature });
            }
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::File {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_csv_reader(name, file).map_err(|e| match e {
            Error::File { .. } => e,
            other => Error::File {
                path: path.to_owned(),
                message: other.to_string(),
            },
        })
    }

    pub fn from_csv_reader(name: impl Into<String>, reader: impl Read) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let label_col = col("label")?;
        let block_col = col("block")?;
        let mut feature_cols = Vec::new();
        for j in 0.. {
            match headers.iter().position(|h| h == format!("f{j}")) {
                Some(c) => feature_cols.push(c),
                None => break,
            }
        }
        let expected = feature_cols.len() + 2;
        if headers.len() != expected {
            return Err(Error::InvalidDataset(format!(
                "expected columns f0..f{} plus label and block, found {} columns",
                feature_cols.len().saturating_sub(1),
                headers.len()
            )));
        }

        let mut values = Vec::new();
        let mut raw_labels = Vec::new();
        let mut blocks = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            for &c in &feature_cols {
                let field = &record[c];
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::InvalidDataset(format!(
                        "line {}: cannot parse `{field}` as a number",
                        row + 2
                    ))
                })?;
                values.push(v);
            }
            raw_labels.push(record[label_col].to_string());
            blocks.push(record[block_col].to_string());
        }

        let mut distinct: Vec<&String> = raw_labels.iter().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != 2 {
            return Err(Error::InvalidDataset(format!(
                "label column must hold exactly two distinct values, found {}",
                distinct.len()
            )));
        }
        let class_names = [distinct[0].clone(), distinct[1].clone()];
        let labels = raw_labels
            .iter()
            .map(|l| if *l == class_names[0] { -1 } else { 1 })
            .collect();

        let n = raw_labels.len();
        let features = Array2::from_shape_vec((n, feature_cols.len()), values)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Ok(Dataset::new(name, features, labels, blocks)?.with_class_names(class_names))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        self.to_csv_writer(std::io::BufWriter::new(file))
    }

    pub fn to_csv_writer(&self, writer: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.n_features()).map(|j| format!("f{j}")).collect();
        header.push("label".into());
        header.push("block".into());
        wtr.write_record(&header)?;
        for i in 0..self.n_samples() {
            let mut row: Vec<String> = self.sample(i).iter().map(|v| v.to_string()).collect();
            let class = if self.labels[i] < 0 { 0 } else { 1 };
            row.push(self.class_names[class].clone());
            row.push(self.block_names[self.blocks[i]].clone());
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn index_blocks(names: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut lookup: HashMap<&str, usize> = HashMap::new();
    let mut order = Vec::new();
    let ids = names
        .iter()
        .map(|name| {
            *lookup.entry(name.as_str()).or_insert_with(|| {
                order.push(name.clone());
                order.len() - 1
            })
        })
        .collect();
    (ids, order)
}
