//! Summaries derived from a records table. Every number here can be
//! recomputed from the raw CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::records::{read_records, write_csv, Record};
use super::{create_dir, write_text};
use crate::error::{Error, Result};
use crate::evaluation::{discrepancy, tradeoff_summary, DiscrepancyStats, StrategyObservation, TradeoffRow};

/// Tables with at most this many records are echoed in full.
pub const ECHO_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub task: String,
    pub decoder: String,
    pub penalty: String,
    pub strategy: String,
    pub n: usize,
    pub mean: f64,
    pub p5: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub n_records: usize,
    pub discrepancy: Vec<DiscrepancyRow>,
    /// Empty unless the records carry stability values.
    pub tradeoff: Vec<TradeoffRow>,
    pub markdown: String,
}

type Key = (String, String, String, String);

fn group_key(r: &Record) -> Key {
    (r.task.clone(), r.decoder.clone(), r.penalty.clone(), r.strategy.clone())
}

pub fn report(records: &[Record]) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::Evaluation("records table is empty".into()));
    }
    let mut groups: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if let Some(cv) = r.cv_estimate {
            groups.entry(group_key(r)).or_default().push((cv, r.validation_accuracy));
        }
    }
    let mut rows = Vec::new();
    for ((task, decoder, penalty, strategy), pairs) in &groups {
        let DiscrepancyStats { mean, p5, q25, median, q75, p95, .. } = discrepancy(pairs)?;
        rows.push(DiscrepancyRow {
            task: task.clone(),
            decoder: decoder.clone(),
            penalty: penalty.clone(),
            strategy: strategy.clone(),
            n: pairs.len(),
            mean,
            p5,
            q25,
            median,
            q75,
            p95,
        });
    }

    let tradeoff = if records.iter().any(|r| r.stability.is_some()) {
        let obs: Vec<StrategyObservation> = records
            .iter()
            .map(|r| StrategyObservation {
                task: r.task.clone(),
                split: r.validation_split,
                decoder: format!("{}_{}", r.decoder, r.penalty),
                strategy: r.strategy.clone(),
                accuracy: r.validation_accuracy,
                stability: r.stability,
            })
            .collect();
        tradeoff_summary(&obs)?
    } else {
        Vec::new()
    };

    let markdown = render(records, &rows, &tradeoff);
    Ok(Report { n_records: records.len(), discrepancy: rows, tradeoff, markdown })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn render(records: &[Record], rows: &[DiscrepancyRow], tradeoff: &[TradeoffRow]) -> String {
    let mut md = String::new();
    let hashes: std::collections::BTreeSet<&str> = records.iter().map(|r| r.config_hash.as_str()).collect();
    let _ = writeln!(md, "# Benchmark report\n");
    let _ = writeln!(md, "{} records; config hash {}.\n", records.len(), hashes.into_iter().collect::<Vec<_>>().join(", "));

    if !rows.is_empty() {
        let _ = writeln!(md, "## CV estimate minus validation accuracy\n");
        let _ = writeln!(md, "Percentiles interpolate linearly between order statistics.\n");
        let _ = writeln!(md, "| task | decoder | penalty | strategy | n | mean | p5 | q25 | median | q75 | p95 |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|");
        for r in rows {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
                r.task, r.decoder, r.penalty, r.strategy, r.n, r.mean, r.p5, r.q25, r.median, r.q75, r.p95
            );
        }
        let _ = writeln!(md);
    }

    if !tradeoff.is_empty() {
        let _ = writeln!(md, "## Accuracy and stability relative to the mean over strategies\n");
        let _ = writeln!(md, "| decoder | strategy | n | Δaccuracy | q25 | q75 | Δstability | q25 | q75 |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|");
        let f = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
        for t in tradeoff {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.4} | {:.4} | {:.4} | {} | {} | {} |",
                t.decoder,
                t.strategy,
                t.n,
                t.mean_delta_accuracy,
                t.q25_delta_accuracy,
                t.q75_delta_accuracy,
                f(t.mean_delta_stability),
                f(t.q25_delta_stability),
                f(t.q75_delta_stability)
            );
        }
        let _ = writeln!(md);
    }

    if records.len() <= ECHO_LIMIT {
        let _ = writeln!(md, "## Records\n");
        let _ = writeln!(md, "| dataset | task | validation_split | decoder | penalty | strategy | cv_estimate | validation_accuracy | delta | stability | chosen_C |");
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|");
        for r in records {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.dataset,
                r.task,
                r.validation_split,
                r.decoder,
                r.penalty,
                r.strategy,
                opt(r.cv_estimate),
                r.validation_accuracy,
                opt(r.delta),
                opt(r.stability),
                r.chosen_c
            );
        }
    }
    md
}

/// Reads `records_csv` and writes `report.md`, `discrepancy.csv` and, when
/// stability is present, `tradeoff.csv` into `out`.
pub fn report_to_dir(records_csv: &Path, out: &Path) -> Result<(Report, Vec<PathBuf>)> {
    let records = read_records(records_csv)?;
    let rep = report(&records)?;
    create_dir(out)?;
    let mut written = vec![out.join("report.md"), out.join("discrepancy.csv")];
    write_text(&written[0], &rep.markdown)?;
    write_csv(&written[1], &rep.discrepancy)?;
    if !rep.tradeoff.is_empty() {
        let path = out.join("tradeoff.csv");
        write_csv(&path, &rep.tradeoff)?;
        written.push(path);
    }
    Ok((rep, written))
}
