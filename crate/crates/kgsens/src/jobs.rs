//! Job enumeration: every (dataset, method, training method, loss)
//! combination, marked valid or invalid before anything runs.

use std::fmt;

use kgsens_core::kge::{LossKind, Method, TrainingMethod};

use crate::error::{Error, Result};

/// Method names accepted in job lists. Only those that parse as a
/// [`Method`] can actually be trained here.
pub const KNOWN_METHODS: [&str; 12] =
    ["transe", "distmult", "complex", "rescal", "conve", "transformer", "hitter", "cp", "simple", "rotate", "transh", "tucker3"];

/// Scorers that need a query-style (`_po`) scoring mode.
const TRANSFORMER_FAMILY: [&str; 2] = ["transformer", "hitter"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub dataset: String,
    pub method: String,
    pub training_method: TrainingMethod,
    pub loss: LossKind,
    pub valid: bool,
    pub invalid_reason: Option<String>,
}

impl Job {
    /// `dataset:method:training:loss`
    pub fn id(&self) -> String {
        format!("{}:{}:{}:{}", self.dataset, self.method, self.training_method.name(), self.loss.name())
    }

    /// The trainable scorer, if this build implements the method.
    pub fn scorer(&self) -> Option<Method> {
        self.method.parse().ok()
    }

    pub fn runnable(&self) -> bool {
        self.valid && self.scorer().is_some()
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn normalize_method(name: &str) -> Result<String> {
    let m = name.to_ascii_lowercase();
    if KNOWN_METHODS.contains(&m.as_str()) {
        Ok(m)
    } else {
        Err(Error::Usage(format!("unknown KGE method `{name}`")))
    }
}

/// Why `(method, training, loss)` cannot run, or `None` if it can.
pub fn invalid_reason(method: &str, training: TrainingMethod, loss: LossKind) -> Option<String> {
    if TRANSFORMER_FAMILY.contains(&method) {
        return Some(format!("{method} does not support the `_po` scoring mode"));
    }
    if method == "transe" && (training != TrainingMethod::NegativeSampling || loss == LossKind::Kl) {
        return Some("transe runs only with negative sampling and bce or margin_ranking loss".into());
    }
    if loss == LossKind::MarginRanking && training != TrainingMethod::NegativeSampling {
        return Some("margin_ranking needs explicit negatives (negative sampling)".into());
    }
    None
}

/// Full cross product in input order (dataset outermost, loss innermost).
pub fn enumerate_jobs(datasets: &[&str], methods: &[&str], trainings: &[&str], losses: &[&str]) -> Result<Vec<Job>> {
    for (what, list) in [("dataset", datasets), ("method", methods), ("training method", trainings), ("loss", losses)] {
        if list.is_empty() {
            return Err(Error::Usage(format!("empty {what} list")));
        }
    }
    let methods = methods.iter().map(|m| normalize_method(m)).collect::<Result<Vec<_>>>()?;
    let trainings = trainings.iter().map(|t| t.parse::<TrainingMethod>().map_err(|e| Error::Usage(e.to_string()))).collect::<Result<Vec<_>>>()?;
    let losses = losses.iter().map(|l| l.parse::<LossKind>().map_err(|e| Error::Usage(e.to_string()))).collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::with_capacity(datasets.len() * methods.len() * trainings.len() * losses.len());
    for d in datasets {
        for m in &methods {
            for &t in &trainings {
                for &l in &losses {
                    let invalid_reason = invalid_reason(m, t, l);
                    jobs.push(Job {
                        dataset: d.to_string(),
                        method: m.clone(),
                        training_method: t,
                        loss: l,
                        valid: invalid_reason.is_none(),
                        invalid_reason,
                    });
                }
            }
        }
    }
    let mut ids: Vec<String> = jobs.iter().map(Job::id).collect();
    ids.sort();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Usage("job list contains duplicates".into()));
    }
    Ok(jobs)
}

/// Parses `method:training:loss` job patterns, each part a name or `*`,
/// into the jobs they select for `dataset`. Duplicates are dropped.
pub fn jobs_from_specs(dataset: &str, specs: &[String]) -> Result<Vec<Job>> {
    if specs.is_empty() {
        return Err(Error::Usage("no jobs given".into()));
    }
    let mut out: Vec<Job> = Vec::new();
    for spec in specs {
        let parts: Vec<&str> = spec.split(':').collect();
        let [m, t, l] = parts[..] else {
            return Err(Error::Usage(format!("job `{spec}` is not of the form method:training:loss")));
        };
        let expand = |part: &str, all: &[&str]| -> Vec<String> {
            if part == "*" {
                all.iter().map(|s| s.to_string()).collect()
            } else {
                vec![part.to_string()]
            }
        };
        let methods = expand(m, &KNOWN_METHODS);
        let trainings = expand(t, &TrainingMethod::ALL.map(|x| x.name()));
        let losses = expand(l, &LossKind::ALL.map(|x| x.name()));
        for job in enumerate_jobs(&[dataset], &as_refs(&methods), &as_refs(&trainings), &as_refs(&losses))? {
            if !out.iter().any(|j| j.id() == job.id()) {
                out.push(job);
            }
        }
    }
    Ok(out)
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}
