//! Per-dataset sensitivity analysis over persisted trials: keep the best
//! trials, fit a linear surrogate on their encoded configurations, and
//! decompose the surrogate's variance into Sobol indices.

use std::fs;
use std::path::{Path, PathBuf};

use kgsens_core::matrix::Matrix;
use kgsens_core::sampler::{saltelli_design, HyperparameterSpace};
use kgsens_core::sensitivity::{
    estimate_indices, fit_ols, group_indices, surrogate_fn, top_fraction, GroupedIndices, SobolIndices, SobolOptions,
    SurrogateModel,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::store::{TrialRecord, TrialStore};

/// Completed trials required before a dataset can be analysed.
pub const MIN_TRIALS: usize = 40;

pub const S1_ST_FILE: &str = "s1_st.csv";
pub const S2_FILE: &str = "s2_matrix.csv";
pub const S2_CONF_FILE: &str = "s2_conf_matrix.csv";
pub const GROUPED_FILE: &str = "grouped.csv";
pub const GROUPED_S2_FILE: &str = "grouped_s2.csv";
pub const SURROGATE_FILE: &str = "surrogate.json";
pub const TOP_TRIALS_FILE: &str = "top_trials.csv";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub fraction: f64,
    pub base_n: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { fraction: 0.05, base_n: 2048, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub dataset: String,
    pub columns: Vec<String>,
    pub column_groups: Vec<String>,
    pub surrogate: SurrogateModel,
    /// `(job id, trial, test MRR)` of the rows the surrogate was fitted on.
    pub top_trials: Vec<(String, u32, f64)>,
    pub completed_trials: usize,
    pub evaluations: usize,
    pub indices: SobolIndices,
    pub grouped: GroupedIndices,
}

/// Runs the analysis for `dataset` using only what `store` has on disk.
pub fn analyze_dataset(store: &TrialStore, dataset: &str, space: &HyperparameterSpace, options: AnalysisOptions) -> Result<Analysis> {
    let width = space.encoded_width();
    let records: Vec<&TrialRecord> = store
        .dataset_records(dataset)
        .into_iter()
        .filter(|r| r.is_completed() && r.test_mrr.is_some_and(f64::is_finite))
        .collect();
    if records.len() < MIN_TRIALS {
        return Err(Error::InsufficientTrials { dataset: dataset.to_string(), found: records.len(), needed: MIN_TRIALS });
    }
    if let Some(r) = records.iter().find(|r| r.encoded.len() != width) {
        return Err(Error::format(
            store.dir(),
            format!("trial {} of {} has {} encoded columns, the space has {width}", r.trial, r.job_id, r.encoded.len()),
        ));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.test_mrr.unwrap_or(f64::NAN)).collect();
    let top = top_fraction(&scores, options.fraction)?;
    let mut x = Matrix::zeros(top.len(), width);
    let mut y = Vec::with_capacity(top.len());
    for (row, &i) in top.iter().enumerate() {
        x.row_mut(row).copy_from_slice(&records[i].encoded);
        y.push(scores[i]);
    }
    let surrogate = fit_ols(&x, &y)?;
    if surrogate.is_underdetermined() {
        log::warn!(
            "{dataset}: surrogate fitted on {} rows for {width} inputs; the minimum-norm solution is used",
            surrogate.training_rows
        );
    }

    let design = saltelli_design(width, options.base_n, true)?;
    let mut values = vec![0.0; design.row_count()];
    {
        let f = surrogate_fn(&surrogate, space);
        let points = design.points().as_slice();
        values.par_chunks_mut(1024).enumerate().for_each(|(chunk, out)| {
            let start = chunk * 1024;
            for (k, v) in out.iter_mut().enumerate() {
                let r = start + k;
                *v = f(&points[r * width..(r + 1) * width]);
            }
        });
    }
    let indices = estimate_indices(&design, &values, &SobolOptions { seed: options.seed, ..SobolOptions::default() })?;
    let map = space.category_map();
    let grouped = group_indices(&indices, &map)?;
    let column_groups = map.column_group.iter().map(|g| g.map_or_else(String::new, |g| map.groups[g].clone())).collect();
    Ok(Analysis {
        dataset: dataset.to_string(),
        columns: space.column_names(),
        column_groups,
        surrogate,
        top_trials: top.iter().map(|&i| (records[i].job_id.clone(), records[i].trial, scores[i])).collect(),
        completed_trials: records.len(),
        evaluations: values.len(),
        indices,
        grouped,
    })
}

/// Empty for NaN (unset triangle cells), shortest round-trip form otherwise.
pub fn fmt_cell(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

fn csv_bytes(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::format(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| Error::format(path, e))?;
    }
    w.into_inner().map_err(|e| Error::format(path, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_atomic(path, &csv_bytes(path, &header, rows)?)
}

fn write_square(path: &Path, labels: &[String], m: &Matrix) -> Result<()> {
    let mut header = vec![String::from("")];
    header.extend(labels.iter().cloned());
    let rows = (0..m.rows()).map(|i| {
        let mut row = vec![labels[i].clone()];
        row.extend((0..m.cols()).map(|k| fmt_cell(m.get(i, k))));
        row
    });
    write_atomic(path, &csv_bytes(path, &header, rows)?)
}

#[derive(Serialize)]
struct SurrogateFile<'a> {
    dataset: &'a str,
    columns: &'a [String],
    coefficients: &'a [f64],
    intercept: f64,
    r_squared: f64,
    training_rows: usize,
    underdetermined: bool,
    completed_trials: usize,
    design_evaluations: usize,
    base_n: usize,
}

impl Analysis {
    /// Writes every output file into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let ix = &self.indices;
        let g = &self.grouped;
        let path = |name: &str| dir.join(name);
        write_csv(
            &path(S1_ST_FILE),
            &["column", "group", "s1", "s1_conf", "st", "st_conf"],
            (0..ix.dimension()).map(|i| {
                vec![
                    self.columns[i].clone(),
                    self.column_groups[i].clone(),
                    fmt_cell(ix.s1[i]),
                    fmt_cell(ix.s1_conf[i]),
                    fmt_cell(ix.st[i]),
                    fmt_cell(ix.st_conf[i]),
                ]
            }),
        )?;
        write_square(&path(S2_FILE), &self.columns, &ix.s2)?;
        write_square(&path(S2_CONF_FILE), &self.columns, &ix.s2_conf)?;
        write_csv(
            &path(GROUPED_FILE),
            &["group", "s1", "st"],
            (0..g.groups.len()).map(|i| vec![g.groups[i].clone(), fmt_cell(g.s1[i]), fmt_cell(g.st[i])]),
        )?;
        write_square(&path(GROUPED_S2_FILE), &g.groups, &g.s2)?;
        write_csv(
            &path(TOP_TRIALS_FILE),
            &["rank", "job_id", "trial", "test_mrr"],
            self.top_trials.iter().enumerate().map(|(k, (job, t, mrr))| vec![(k + 1).to_string(), job.clone(), t.to_string(), fmt_cell(*mrr)]),
        )?;
        let s = &self.surrogate;
        let file = SurrogateFile {
            dataset: &self.dataset,
            columns: &self.columns,
            coefficients: &s.coefficients,
            intercept: s.intercept,
            r_squared: s.r_squared,
            training_rows: s.training_rows,
            underdetermined: s.is_underdetermined(),
            completed_trials: self.completed_trials,
            design_evaluations: self.evaluations,
            base_n: ix.base_n,
        };
        let mut json = serde_json::to_vec_pretty(&file).map_err(|e| Error::format(&path(SURROGATE_FILE), e))?;
        json.push(b'\n');
        write_atomic(&path(SURROGATE_FILE), &json)?;
        Ok([S1_ST_FILE, S2_FILE, S2_CONF_FILE, GROUPED_FILE, GROUPED_S2_FILE, TOP_TRIALS_FILE, SURROGATE_FILE].iter().map(|n| path(n)).collect())
    }
}
