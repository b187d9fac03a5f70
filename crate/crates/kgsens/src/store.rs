//! Append-only trial persistence.
//!
//! `trials.jsonl` holds one JSON record per line and is the source of
//! truth; `trials.csv` is a flat mirror rewritten (via rename) after every
//! append. A torn final line left by an interrupted write is dropped when
//! the store is opened.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use kgsens_core::sampler::ParamValue;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const JSONL_FILE: &str = "trials.jsonl";
pub const CSV_FILE: &str = "trials.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub job_id: String,
    pub method: String,
    pub training_method: String,
    pub loss: String,
    pub trial: u32,
    pub seed: u64,
    pub config: BTreeMap<String, ParamValue>,
    /// Regression vector over the full encoded space.
    pub encoded: Vec<f64>,
    pub valid_mrr: Option<f64>,
    pub test_mrr: Option<f64>,
    pub hits_at_1: Option<f64>,
    pub hits_at_3: Option<f64>,
    pub hits_at_10: Option<f64>,
    pub epochs_run: u32,
    pub wall_seconds: f64,
    /// `completed` or `failed`.
    pub status: String,
    pub failure: Option<String>,
}

impl TrialRecord {
    pub fn is_completed(&self) -> bool {
        self.status == "completed"
    }
}

#[derive(Debug)]
pub struct TrialStore {
    dir: PathBuf,
    records: Vec<TrialRecord>,
    keys: HashSet<(String, u32)>,
}

impl TrialStore {
    /// Opens (creating if needed) the store in `dir`.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(JSONL_FILE);
        let mut records = Vec::new();
        let mut keys = HashSet::new();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let complete = match text.rfind('\n') {
                Some(i) => i + 1,
                None => 0,
            };
            if complete < text.len() {
                log::warn!("{}: dropping an incomplete final record", path.display());
                let f = OpenOptions::new().write(true).open(&path).map_err(|e| Error::io(&path, e))?;
                f.set_len(complete as u64).map_err(|e| Error::io(&path, e))?;
            }
            for (i, line) in text[..complete].lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let rec: TrialRecord =
                    serde_json::from_str(line).map_err(|e| Error::format(&path, format!("line {}: {e}", i + 1)))?;
                if !keys.insert((rec.job_id.clone(), rec.trial)) {
                    return Err(Error::format(&path, format!("line {}: duplicate trial {} of {}", i + 1, rec.trial, rec.job_id)));
                }
                records.push(rec);
            }
        }
        Ok(Self { dir: dir.to_path_buf(), records, keys })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn contains(&self, job_id: &str, trial: u32) -> bool {
        self.keys.contains(&(job_id.to_string(), trial))
    }

    /// Records of `dataset`, sorted by job then trial so that downstream
    /// results do not depend on completion order.
    pub fn dataset_records(&self, dataset: &str) -> Vec<&TrialRecord> {
        let mut out: Vec<&TrialRecord> = self.records.iter().filter(|r| r.dataset == dataset).collect();
        out.sort_by(|a, b| (&a.job_id, a.trial).cmp(&(&b.job_id, b.trial)));
        out
    }

    /// Appends one record as a single write of a complete line, then
    /// refreshes the CSV mirror.
    pub fn append(&mut self, record: TrialRecord) -> Result<()> {
        let key = (record.job_id.clone(), record.trial);
        if self.keys.contains(&key) {
            return Err(Error::Usage(format!("trial {} of {} is already stored", record.trial, record.job_id)));
        }
        let path = self.dir.join(JSONL_FILE);
        let mut line = serde_json::to_string(&record).map_err(|e| Error::format(&path, e))?;
        line.push('\n');
        let mut f: File = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(line.as_bytes()).map_err(|e| Error::io(&path, e))?;
        f.sync_data().map_err(|e| Error::io(&path, e))?;
        self.keys.insert(key);
        self.records.push(record);
        self.write_csv()
    }

    fn write_csv(&self) -> Result<()> {
        let path = self.dir.join(CSV_FILE);
        let mut names: Vec<&String> = self.records.iter().flat_map(|r| r.config.keys()).collect();
        names.sort();
        names.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = [
            "dataset", "job_id", "method", "training_method", "loss", "trial", "seed", "valid_mrr", "test_mrr", "hits_at_1",
            "hits_at_3", "hits_at_10", "epochs_run", "wall_seconds", "status", "failure",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend(names.iter().map(|n| format!("hp_{n}")));
        w.write_record(&header).map_err(|e| Error::format(&path, e))?;
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for r in &self.records {
            let mut row = vec![
                r.dataset.clone(),
                r.job_id.clone(),
                r.method.clone(),
                r.training_method.clone(),
                r.loss.clone(),
                r.trial.to_string(),
                r.seed.to_string(),
                opt(r.valid_mrr),
                opt(r.test_mrr),
                opt(r.hits_at_1),
                opt(r.hits_at_3),
                opt(r.hits_at_10),
                r.epochs_run.to_string(),
                r.wall_seconds.to_string(),
                r.status.clone(),
                r.failure.clone().unwrap_or_default(),
            ];
            for n in &names {
                row.push(match r.config.get(*n) {
                    Some(ParamValue::Int(i)) => i.to_string(),
                    Some(ParamValue::Real(x)) => x.to_string(),
                    Some(ParamValue::Level(l)) => l.clone(),
                    None => String::new(),
                });
            }
            w.write_record(&row).map_err(|e| Error::format(&path, e))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::format(&path, e))?;
        write_atomic(&path, &bytes)
    }
}
