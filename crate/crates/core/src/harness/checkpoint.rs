//! Append-only progress log so an interrupted benchmark can resume.
//!
//! The first line names the benchmark and config hash; every further line
//! is one finished work unit. A log written for a different config is
//! ignored and replaced.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Header {
    benchmark: String,
    config_hash: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Line<T> {
    unit: Vec<usize>,
    result: T,
}

pub struct Checkpoint {
    path: PathBuf,
    file: File,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::File { path: path.to_path_buf(), message: e.to_string() }
}

impl Checkpoint {
    /// Opens `path`, returning the units already completed under the same
    /// benchmark and config hash.
    pub fn open<T: Serialize + DeserializeOwned>(
        path: &Path,
        benchmark: &str,
        config_hash: &str,
    ) -> Result<(Self, BTreeMap<Vec<usize>, T>)> {
        let header = Header { benchmark: benchmark.into(), config_hash: config_hash.into() };
        let mut done = BTreeMap::new();
        let mut reuse = false;
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
            let mut lines = reader.lines();
            if let Some(Ok(first)) = lines.next() {
                if serde_json::from_str::<Header>(&first).ok().as_ref() == Some(&header) {
                    reuse = true;
                    for line in lines {
                        let Ok(line) = line else { break };
                        // a torn final line from an interrupted write is dropped
                        match serde_json::from_str::<Line<T>>(&line) {
                            Ok(l) => {
                                done.insert(l.unit, l.result);
                            }
                            Err(_) => break,
                        }
                    }
                }
            }
        }
        // the valid prefix is rewritten so a torn tail cannot resurface
        let mut file = File::create(path).map_err(|e| io_err(path, e))?;
        writeln!(file, "{}", serde_json::to_string(&header)?)?;
        let mut cp = Checkpoint { path: path.to_path_buf(), file };
        if reuse {
            for (unit, result) in &done {
                cp.append_raw(unit, result)?;
            }
        }
        log::info!("checkpoint {}: {} units already done", path.display(), done.len());
        Ok((cp, done))
    }

    fn append_raw<T: Serialize>(&mut self, unit: &[usize], result: &T) -> Result<()> {
        let line = serde_json::to_string(&Line { unit: unit.to_vec(), result })?;
        writeln!(self.file, "{line}")?;
        Ok(())
    }

    pub fn append<T: Serialize>(&mut self, unit: &[usize], result: &T) -> Result<()> {
        self.append_raw(unit, result)?;
        self.file.flush()?;
        Ok(())
    }

    /// Removes the log after a successful run.
    pub fn finish(self) -> Result<()> {
        drop(self.file);
        std::fs::remove_file(&self.path).map_err(|e| io_err(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resume_keeps_matching_units_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.jsonl");
        let (mut cp, done) = Checkpoint::open::<f64>(&path, "b", "h1").unwrap();
        assert!(done.is_empty());
        cp.append(&[0, 1], &0.5).unwrap();
        cp.append(&[2, 0], &0.25).unwrap();
        drop(cp);

        let (cp, done) = Checkpoint::open::<f64>(&path, "b", "h1").unwrap();
        assert_eq!(done.len(), 2);
        assert_eq!(done[&vec![2, 0]], 0.25);
        drop(cp);

        let (cp, done) = Checkpoint::open::<f64>(&path, "b", "other").unwrap();
        assert!(done.is_empty());
        cp.finish().unwrap();
        assert!(!path.exists());
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.jsonl");
        let (mut cp, _) = Checkpoint::open::<f64>(&path, "b", "h").unwrap();
        cp.append(&[0], &1.0).unwrap();
        drop(cp);
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{\"unit\":[1],\"res");
        std::fs::write(&path, text).unwrap();
        let (_, done) = Checkpoint::open::<f64>(&path, "b", "h").unwrap();
        assert_eq!(done.len(), 1);
        let lines = std::fs::read_to_string(&path).unwrap().lines().count();
        assert_eq!(lines, 2);
    }
}
