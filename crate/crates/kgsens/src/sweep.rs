//! Trial sweeps: each job's free hyperparameters are drawn from the Sobol
//! sequence, trials run on a bounded worker pool, and every finished trial
//! is persisted before the next is reported.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Instant;

use kgsens_core::kge::{train_with, TrainingConfig, TrainingData, TrialStatus};
use kgsens_core::sampler::{names, sobol_points, HyperparameterSpace};
use kgsens_core::KnowledgeGraph;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::StudyConfig;
use crate::error::{Error, Result};
use crate::jobs::Job;
use crate::store::{TrialRecord, TrialStore};

/// Trials per job under the published protocol: 100, or 50 on FB15k-237.
pub fn protocol_trial_count(dataset: &str) -> u32 {
    if dataset.to_ascii_lowercase().contains("fb15k") {
        50
    } else {
        100
    }
}

/// Per-trial seed: the first eight bytes of `sha256("{master}/{job}/{trial}")`.
pub fn trial_seed(master_seed: u64, job_id: &str, trial: u32) -> u64 {
    let digest = Sha256::digest(format!("{master_seed}/{job_id}/{trial}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// `(dimension, level)` pins for the job's training method and loss.
pub fn job_pins(space: &HyperparameterSpace, job: &Job) -> Result<Vec<(usize, usize)>> {
    Ok(vec![space.pin(names::TRAINING_METHOD, job.training_method.name())?, space.pin(names::LOSS, job.loss.name())?])
}

/// Full-width unit-cube points for trials `0..n` of `job`.
pub fn trial_points(space: &HyperparameterSpace, job: &Job, n: u32) -> Result<Vec<Vec<f64>>> {
    let pins = job_pins(space, job)?;
    let free = sobol_points(space.free_width(&pins), n as usize)?;
    (0..free.rows()).map(|i| Ok(space.expand_pinned(free.row(i), &pins)?)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub trials: u32,
    pub master_seed: u64,
    pub workers: usize,
    /// Stop after this many new trials (the rest stay pending).
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub ran: usize,
    pub failed: usize,
    pub skipped: usize,
}

struct Task<'a> {
    job: &'a Job,
    trial: u32,
    point: Vec<f64>,
}

/// Runs every pending `(job, trial)` pair and appends its record to `store`.
pub fn run_sweep(
    kg: &KnowledgeGraph,
    dataset: &str,
    jobs: &[Job],
    study: &StudyConfig,
    options: SweepOptions,
    store: &mut TrialStore,
) -> Result<SweepSummary> {
    if options.trials == 0 {
        return Err(Error::Usage("at least one trial per job is needed".into()));
    }
    let mut summary = SweepSummary::default();
    let mut tasks = Vec::new();
    for job in jobs {
        if !job.valid {
            log::info!("skipping invalid job {job}: {}", job.invalid_reason.as_deref().unwrap_or(""));
            continue;
        }
        if job.scorer().is_none() {
            log::warn!("skipping job {job}: method not implemented");
            continue;
        }
        let id = job.id();
        for (t, point) in trial_points(&study.space, job, options.trials)?.into_iter().enumerate() {
            let trial = t as u32;
            if store.contains(&id, trial) {
                summary.skipped += 1;
            } else {
                tasks.push(Task { job, trial, point });
            }
        }
    }
    if let Some(limit) = options.limit {
        tasks.truncate(limit);
    }
    log::info!("{} trials to run, {} already stored", tasks.len(), summary.skipped);

    let data = TrainingData::new(kg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let total = tasks.len();
    let shared = Mutex::new((store, summary, None::<Error>));
    pool.install(|| {
        tasks.par_iter().for_each(|task| {
            let record = run_trial(kg, &data, dataset, study, options.master_seed, task);
            let mut guard = shared.lock().expect("store lock");
            let (store, summary, first_error) = &mut *guard;
            if first_error.is_some() {
                return;
            }
            let failed = !record.is_completed();
            let (job, trial, mrr) = (record.job_id.clone(), record.trial, record.test_mrr);
            match store.append(record) {
                Ok(()) => {
                    summary.ran += 1;
                    summary.failed += failed as usize;
                    log::info!("[{}/{}] {job} trial {trial}: test MRR {:?}", summary.ran, total, mrr);
                }
                Err(e) => *first_error = Some(e),
            }
        });
    });
    let (_, summary, first_error) = shared.into_inner().expect("store lock");
    match first_error {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

fn run_trial(kg: &KnowledgeGraph, data: &TrainingData, dataset: &str, study: &StudyConfig, master_seed: u64, task: &Task<'_>) -> TrialRecord {
    let started = Instant::now();
    let job_id = task.job.id();
    let seed = trial_seed(master_seed, &job_id, task.trial);
    let space = &study.space;
    let mut record = TrialRecord {
        dataset: dataset.to_string(),
        job_id,
        method: task.job.method.clone(),
        training_method: task.job.training_method.name().to_string(),
        loss: task.job.loss.name().to_string(),
        trial: task.trial,
        seed,
        config: BTreeMap::new(),
        encoded: Vec::new(),
        valid_mrr: None,
        test_mrr: None,
        hits_at_1: None,
        hits_at_3: None,
        hits_at_10: None,
        epochs_run: 0,
        wall_seconds: 0.0,
        status: "completed".into(),
        failure: None,
    };
    let outcome = (|| -> Result<_> {
        let decoded = space.decode(&task.point)?;
        record.config = space.dimensions.iter().map(|d| d.name.clone()).zip(decoded.config.values.iter().cloned()).collect();
        record.encoded = decoded.encoded;
        let method = task.job.scorer().ok_or_else(|| Error::Usage(format!("method `{}` is not implemented", task.job.method)))?;
        let config = TrainingConfig::from_trial(method, space, &decoded.config, study.fixed)?;
        Ok(train_with(kg, data, &config, seed)?)
    })();
    match outcome {
        Ok(out) => {
            record.epochs_run = out.epochs_run;
            record.valid_mrr = out.best_valid.map(|m| m.mrr);
            if let Some(m) = out.test {
                record.test_mrr = Some(m.mrr);
                record.hits_at_1 = Some(m.hits_at_1);
                record.hits_at_3 = Some(m.hits_at_3);
                record.hits_at_10 = Some(m.hits_at_10);
            }
            if let TrialStatus::Failed(reason) = out.status {
                record.status = "failed".into();
                record.failure = Some(reason);
            }
        }
        Err(e) => {
            record.status = "failed".into();
            record.failure = Some(e.to_string());
        }
    }
    record.wall_seconds = started.elapsed().as_secs_f64();
    record
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_every_part() {
        let a = trial_seed(1, "d:distmult:KvsAll:kl", 0);
        assert_eq!(a, trial_seed(1, "d:distmult:KvsAll:kl", 0));
        assert_ne!(a, trial_seed(2, "d:distmult:KvsAll:kl", 0));
        assert_ne!(a, trial_seed(1, "d:distmult:KvsAll:kl", 1));
        assert_ne!(a, trial_seed(1, "d:distmult:KvsAll:bce", 0));
    }

    #[test]
    fn protocol_counts() {
        assert_eq!(protocol_trial_count("umls"), 100);
        assert_eq!(protocol_trial_count("FB15k-237"), 50);
    }
}
