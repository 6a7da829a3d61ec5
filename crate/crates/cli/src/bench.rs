//! Corpus benchmarking: solve every `.json` file in a directory and emit
//! one row per file, in name order, with regression ratios against the
//! exact oracle wherever the instance is small enough to enumerate.
//! Unreadable files become rows with the error column filled; the run
//! continues.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use minemax_core::{CoveringBase, ONE_MINUS_INV_E};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{solve_report, RunReport, SolveOptions};
use crate::schema::{self, AnyInstance};

pub const CSV_HEADER: [&str; 8] =
    ["instance", "solver", "emax", "trunc", "oracle_opt", "ratio", "seconds", "error"];

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub solver: String,
    pub emax: Option<f64>,
    pub trunc: Option<f64>,
    pub oracle_opt: Option<f64>,
    pub ratio: Option<f64>,
    pub seconds: Option<f64>,
    pub error: String,
}

pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    /// Rows whose ratio exceeded their problem's regression threshold.
    pub breaches: usize,
}

pub fn row_from_report(report: &RunReport) -> BenchRow {
    BenchRow {
        instance: report.instance.clone(),
        solver: report.solver.clone(),
        emax: Some(report.emax),
        trunc: Some(report.trunc),
        oracle_opt: report.oracle_opt,
        ratio: report.ratio,
        seconds: Some(report.seconds),
        error: String::new(),
    }
}

/// Largest acceptable solution-over-oracle ratio for the instance's
/// problem, combining the rounding factor with the truncation transfer
/// loss; `None` when no finite threshold applies.
fn regression_threshold(inst: &AnyInstance, report: &RunReport) -> Option<f64> {
    let transfer = 1.0 / ONE_MINUS_INV_E;
    match inst {
        AnyInstance::MinCut(_) => Some(4.0 * transfer),
        AnyInstance::Ufl(_) => Some(8.0 * transfer),
        AnyInstance::KCenter(_) => Some(57.0),
        AnyInstance::Mst(mst) => {
            let n = mst.graph().n() as f64;
            let m = mst.num_scenarios() as f64;
            Some((40.0 * n.ln() + 16.0 * m.ln()) * transfer)
        }
        AnyInstance::Steiner(_) => Some(30.0 * transfer),
        AnyInstance::Hybrid(h) => {
            let gamma = report.gamma?;
            let m = h.num_scenarios() as f64;
            let rounding = match h.base() {
                CoveringBase::MinCut(_) => 4.0,
                CoveringBase::Steiner(_) => 30.0,
            };
            (gamma > m).then(|| rounding * transfer / (1.0 - m / gamma))
        }
    }
}

fn bench_entry(path: &Path, opts: &SolveOptions) -> (BenchRow, bool) {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let run = schema::read_instance(path)
        .and_then(|inst| solve_report(&name, &inst, opts).map(|report| (inst, report)));
    match run {
        Ok((inst, report)) => {
            let threshold = regression_threshold(&inst, &report);
            let breached = match (report.ratio, threshold) {
                (Some(ratio), Some(limit)) => ratio > limit,
                _ => false,
            };
            (row_from_report(&report), breached)
        }
        Err(e) => (
            BenchRow {
                instance: name,
                solver: String::new(),
                emax: None,
                trunc: None,
                oracle_opt: None,
                ratio: None,
                seconds: None,
                error: format!("{e:#}"),
            },
            false,
        ),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("MINEMAX_THREADS") {
        let threads: usize =
            raw.trim().parse().context("MINEMAX_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("MINEMAX_THREADS must be a positive integer");
        }
        builder = builder.num_threads(threads);
    }
    Ok(builder.build()?)
}

pub fn run_bench(dir: &Path, opts: &SolveOptions) -> Result<BenchOutcome> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read corpus directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    let entries: Vec<(BenchRow, bool)> =
        thread_pool()?.install(|| files.par_iter().map(|p| bench_entry(p, opts)).collect());
    let breaches = entries.iter().filter(|(_, breached)| *breached).count();
    Ok(BenchOutcome { rows: entries.into_iter().map(|(row, _)| row).collect(), breaches })
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().context("flushing csv output")?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_to_json(rows: &[BenchRow]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(rows)?;
    text.push('\n');
    Ok(text)
}
