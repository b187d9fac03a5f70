//! Acceptance checks, one line per criterion.
//!
//! Datasets are read from `$KGSENS_DATA_DIR` (default: `data/` at the
//! workspace root): `umls/` is required, `wn18rr/` is optional and reported
//! as BLOCKED when absent. The process fails only on a FAIL line.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kgsens::analysis::{S1_ST_FILE, S2_FILE};
use kgsens::compare::{compare_datasets, IndexSet};
use kgsens::core::audit::{derive_robust_subset, flag_leaky_relations, DEFAULT_LEAKAGE_THRESHOLD};
use kgsens::core::eval::{evaluate, random_baseline_mrr, Direction, LinkScorer};
use kgsens::core::graph::{PositiveSet, Slot, Triple};
use kgsens::core::kge::{
    batch_loss, build_rows, init_weights, kvsall_queries, kvsall_rows, EmbeddingModel, Gradients, InitScheme, LossKind, Method,
    TrainingConfig, TrainingMethod,
};
use kgsens::core::matrix::Matrix;
use kgsens::core::sampler::{study_space, saltelli_design, SaltelliBlock};
use kgsens::core::sensitivity::{sobol_analyze, SobolOptions};
use kgsens::core::KnowledgeGraph;
use kgsens::io::load_dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Blocked,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn judged(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail: detail.into() }
}

fn data_dir() -> PathBuf {
    std::env::var_os("KGSENS_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn kgsens(args: &[&str], paths: &[&Path]) -> Result<String, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kgsens"));
    cmd.arg("-q").args(args);
    for p in paths {
        cmd.arg(p);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("kgsens {args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn three_sig(x: f64) -> String {
    format!("{x:.2e}")
}

fn criterion_1(umls: &KnowledgeGraph) -> Outcome {
    let t = Instant::now();
    let s = match kgsens::audit::statistics(umls, Some(0)) {
        Ok(s) => s,
        Err(e) => return judged(false, e.to_string()),
    };
    let elapsed = t.elapsed();
    let checks = [
        ("nodes", s.node_count == 135),
        ("edges", s.edge_count == 6529),
        ("types", s.edge_type_count == 46),
        ("density", three_sig(s.density) == "7.85e-3"),
        ("components", s.component_count == 1),
        ("mean degree", within(s.mean_degree, 96.73, 0.01)),
        ("median", s.median_degree == 71.0),
        ("max", s.max_degree == 382),
        ("std", within(s.std_degree, 87.44, 0.01)),
        ("skewness", within(s.skewness_degree, 1.84, 0.01)),
        ("kurtosis", within(s.kurtosis_degree, 2.91, 0.01)),
        ("diameter", s.mean_component_diameter == 2.0),
        ("distance", within(s.mean_component_distance, 1.61, 0.005)),
        ("connectivity", s.mean_component_connectivity == 4.0),
        ("runtime", elapsed < Duration::from_secs(5)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    judged(
        failed.is_empty(),
        format!(
            "UMLS {} nodes, {} edges, {} types, density {}, {} component, degree mean {:.2} median {} max {} std {:.2} skew {:.2} \
             excess kurtosis {:.2}, diameter {} distance {:.2} connectivity {} in {:.2}s{}",
            s.node_count,
            s.edge_count,
            s.edge_type_count,
            three_sig(s.density),
            s.component_count,
            s.mean_degree,
            s.median_degree,
            s.max_degree,
            s.std_degree,
            s.skewness_degree,
            s.kurtosis_degree,
            s.mean_component_diameter,
            s.mean_component_distance,
            s.mean_component_connectivity,
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!("; off: {failed:?}") }
        ),
    )
}

/// Synthetic graph with WN18RR's node, edge and relation counts.
fn wn18rr_sized() -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let n = 40_943u32;
    let mut seen = HashSet::new();
    for v in 1..n {
        seen.insert(Triple::new(rng.random_range(0..v), v % 11, v));
    }
    while seen.len() < 93_003 {
        seen.insert(Triple::new(rng.random_range(0..n), rng.random_range(0..11), rng.random_range(0..n)));
    }
    let mut train: Vec<Triple> = seen.into_iter().collect();
    train.sort();
    let names = |k: u32, p: &str| (0..k).map(|i| format!("{p}{i}")).collect();
    KnowledgeGraph::from_parts(names(n, "e"), names(11, "r"), train, Vec::new(), Vec::new()).unwrap()
}

fn criterion_2(dir: &Path) -> Outcome {
    if !dir.join("train.txt").exists() {
        let kg = wn18rr_sized();
        let t = Instant::now();
        let ok = kgsens::audit::statistics(&kg, None).is_ok();
        return Outcome {
            verdict: Verdict::Blocked,
            detail: format!(
                "WN18RR splits not found under {}; runtime stand-in on a synthetic 40,943-node / 93,003-edge graph: {:.1}s ({})",
                dir.display(),
                t.elapsed().as_secs_f64(),
                if ok { "ok" } else { "error" }
            ),
        };
    }
    let t = Instant::now();
    let kg = match load_dataset(dir) {
        Ok(kg) => kg,
        Err(e) => return judged(false, e.to_string()),
    };
    let s = match kgsens::audit::statistics(&kg, None) {
        Ok(s) => s,
        Err(e) => return judged(false, e.to_string()),
    };
    let elapsed = t.elapsed();
    let rel = |x: f64, target: f64| (x - target).abs() <= 0.005 * target.abs();
    let checks = [
        ("nodes", rel(s.node_count as f64, 40_943.0)),
        ("edges", rel(s.edge_count as f64, 93_003.0)),
        ("types", rel(s.edge_type_count as f64, 11.0)),
        ("density", rel(s.density, 5.04e-6)),
        ("components", rel(s.component_count as f64, 13.0)),
        ("mean degree", rel(s.mean_degree, 4.54)),
        ("median", rel(s.median_degree, 3.0)),
        ("max", rel(s.max_degree as f64, 521.0)),
        ("std", rel(s.std_degree, 8.58)),
        ("skewness", rel(s.skewness_degree, 26.15)),
        ("kurtosis", rel(s.kurtosis_degree, 1095.90)),
        ("runtime", elapsed < Duration::from_secs(120)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    judged(
        failed.is_empty(),
        format!(
            "WN18RR {} nodes, {} edges, {} components, degree mean {:.2} std {:.2} skew {:.2} kurtosis {:.2} in {:.1}s{}",
            s.node_count,
            s.edge_count,
            s.component_count,
            s.mean_degree,
            s.std_degree,
            s.skewness_degree,
            s.kurtosis_degree,
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!("; off: {failed:?}") }
        ),
    )
}

fn criterion_3(umls: &KnowledgeGraph, umls_dir: &Path, work: &Path) -> Outcome {
    let report = match flag_leaky_relations(umls, DEFAULT_LEAKAGE_THRESHOLD) {
        Ok(r) => r,
        Err(e) => return judged(false, e.to_string()),
    };
    let mut flagged: Vec<&str> = report.flagged_relations.iter().map(|&r| umls.relation_name(r)).collect();
    flagged.sort_unstable();
    let exact = flagged == ["degree_of", "derivative_of", "precedes"];
    let robust = match derive_robust_subset(umls, &report.flagged_relations) {
        Ok(g) => g,
        Err(e) => return judged(false, e.to_string()),
    };
    // independent recount: every entity still touches a surviving edge
    let mut degree = vec![0usize; robust.entity_count()];
    for t in robust.all_triples() {
        degree[t.subject as usize] += 1;
        degree[t.object as usize] += 1;
    }
    let incident = degree.iter().filter(|&&d| d > 0).count();
    // and through the command line, re-reading what was written
    let out = work.join("umls-43");
    let theta = DEFAULT_LEAKAGE_THRESHOLD.to_string();
    let cli = kgsens(&["derive-robust", "--theta", &theta, "--out"], &[&out, umls_dir]).and_then(|_| load_dataset(&out).map_err(|e| e.to_string()));
    let (cli_rel, cli_ent) = match &cli {
        Ok(g) => (g.relation_count(), g.entity_count()),
        Err(_) => (0, 0),
    };
    let ok = exact
        && report.heldout_coverage < 0.02
        && robust.relation_count() == 43
        && robust.entity_count() == 135
        && incident == 135
        && cli_rel == 43
        && cli_ent == 135;
    judged(
        ok,
        format!(
            "theta {} flags {:?}, held-out coverage {:.4}; derived graph {} relations, {} entities ({} with surviving edges); \
             written copy {} relations, {} entities{}",
            DEFAULT_LEAKAGE_THRESHOLD,
            flagged,
            report.heldout_coverage,
            robust.relation_count(),
            robust.entity_count(),
            incident,
            cli_rel,
            cli_ent,
            cli.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let (d, n) = (20, 2048);
    let design = match saltelli_design(d, n, true) {
        Ok(x) => x,
        Err(e) => return judged(false, e.to_string()),
    };
    let mut violations = 0usize;
    for j in 0..n {
        let a = design.row(j, SaltelliBlock::A);
        let b = design.row(j, SaltelliBlock::B);
        for i in 0..d {
            let ab = design.row(j, SaltelliBlock::AB(i));
            let ba = design.row(j, SaltelliBlock::BA(i));
            for k in 0..d {
                let (want_ab, want_ba) = if k == i { (b[k], a[k]) } else { (a[k], b[k]) };
                violations += (ab[k] != want_ab) as usize + (ba[k] != want_ba) as usize;
            }
        }
    }
    judged(
        design.row_count() == 86_016 && violations == 0,
        format!("D=20, N=2048 second-order design has {} rows, {violations} block-structure violations", design.row_count()),
    )
}

fn criterion_5() -> Outcome {
    let opts = SobolOptions::default();
    let t = Instant::now();
    let lin = sobol_analyze(|x| x[0] + 2.0 * x[1], 2, 2048, &opts);
    let t_lin = t.elapsed();
    let t = Instant::now();
    let prod = sobol_analyze(|x| (x[0] - 0.5) * (x[1] - 0.5), 2, 2048, &opts);
    let t_prod = t.elapsed();
    let (lin, prod) = match (lin, prod) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return judged(false, e.to_string()),
    };
    let lin_ok = within(lin.s1[0], 0.2, 0.02) && within(lin.s1[1], 0.8, 0.02) && lin.s2.get(0, 1).abs() <= 0.02;
    let prod_ok = lin_ok
        && prod.s1.iter().all(|s| s.abs() <= 0.02)
        && within(prod.s2.get(0, 1), 1.0, 0.05)
        && prod.st.iter().all(|&s| within(s, 1.0, 0.05));
    let fast = t_lin < Duration::from_secs(10) && t_prod < Duration::from_secs(10);
    judged(
        lin_ok && prod_ok && fast,
        format!(
            "linear s1 ({:.4}, {:.4}) s2 {:.4} in {:.2}s; product s1 ({:.4}, {:.4}) s2 {:.4} st ({:.4}, {:.4}) in {:.2}s",
            lin.s1[0],
            lin.s1[1],
            lin.s2.get(0, 1),
            t_lin.as_secs_f64(),
            prod.s1[0],
            prod.s1[1],
            prod.s2.get(0, 1),
            prod.st[0],
            prod.st[1],
            t_prod.as_secs_f64()
        ),
    )
}

/// Largest relative finite-difference error of one combination, or an
/// error message.
fn gradient_error(method: Method, training: TrainingMethod, loss: LossKind, seed: u64) -> Result<f64, String> {
    const N: usize = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    while seen.len() < 6 {
        seen.insert(Triple::new(rng.random_range(0..N as u32), rng.random_range(0..2), rng.random_range(0..N as u32)));
    }
    let mut train: Vec<Triple> = seen.into_iter().collect();
    train.sort();
    let positives = PositiveSet::new(train.iter().copied());
    let mut cfg = TrainingConfig::new(method, training, loss);
    cfg.dim = 4;
    cfg.fixed.negatives = 3;
    cfg.regularization = 0.01 * (seed % 2) as f64;
    cfg.dropout = if seed % 4 == 1 { 0.2 } else { 0.0 };
    let init = InitScheme::Normal { std: 0.5 };
    let e = init_weights(init, N, 4, seed).map_err(|e| e.to_string())?;
    let r = init_weights(init, 2, EmbeddingModel::relation_width(method, 4), seed ^ 0x5151).map_err(|e| e.to_string())?;
    let model = EmbeddingModel::new(method, e, r).map_err(|e| e.to_string())?;
    let rows = match training {
        TrainingMethod::KvsAll => kvsall_rows(&kvsall_queries(&train), &positives),
        t => build_rows(t, &train, &positives, N, 3, &mut rng).map_err(|e| e.to_string())?,
    };
    let mask = ChaCha8Rng::seed_from_u64(seed + 77);
    let mut g = Gradients::zeros_like(&model);
    batch_loss(&model, &rows, &cfg, &mut mask.clone(), Some(&mut g)).map_err(|e| e.to_string())?;
    let h = 1e-5;
    let mut worst = 0.0f64;
    for block in 0..2 {
        let grads = if block == 0 { &g.entities } else { &g.relations };
        for k in 0..grads.len() {
            let at = |delta: f64| {
                let mut m = model.clone();
                let (e, r) = m.parameters_mut();
                if block == 0 {
                    e[k] += delta;
                } else {
                    r[k] += delta;
                }
                batch_loss(&m, &rows, &cfg, &mut mask.clone(), None).unwrap_or(f64::NAN)
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let an = grads[k];
            // relative error with an absolute floor for near-zero components
            let err = (fd - an).abs() / (fd.abs().max(an.abs()) + 1e-3);
            worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        }
    }
    Ok(worst)
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut combos = 0;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for method in Method::ALL {
        for training in TrainingMethod::ALL {
            for loss in LossKind::ALL {
                if TrainingConfig::new(method, training, loss).validate().is_err() {
                    continue;
                }
                combos += 1;
                for seed in 0..20 {
                    match gradient_error(method, training, loss, seed) {
                        Ok(e) => {
                            worst = worst.max(e);
                            if e > 1e-4 {
                                bad.push(format!("{method}/{training}/{loss}#{seed}"));
                            }
                        }
                        Err(e) => bad.push(format!("{method}/{training}/{loss}#{seed}: {e}")),
                    }
                }
            }
        }
    }
    let elapsed = t.elapsed();
    judged(
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{combos} combinations x 20 seeds, worst relative error {worst:.2e} (rtol 1e-4) in {:.2}s{}",
            elapsed.as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!("; failing: {bad:?}") }
        ),
    )
}

struct Table {
    n: usize,
    r: usize,
    scores: HashMap<Triple, f64>,
}

impl LinkScorer for Table {
    fn entity_count(&self) -> usize {
        self.n
    }
    fn relation_count(&self) -> usize {
        self.r
    }
    fn score_candidates(&self, anchor: u32, relation: u32, slot: Slot, out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.scores[&slot.substitute(Triple::new(anchor, relation, anchor), c as u32)];
        }
    }
}

fn brute_force(t: &Table, test: &[Triple], known: &HashSet<Triple>) -> f64 {
    let mut sum = 0.0;
    for q in test {
        for subject_side in [true, false] {
            let target = t.scores[q];
            let (mut above, mut tied) = (0, 0);
            for e in 0..t.n as u32 {
                let c = if subject_side { Triple::new(e, q.predicate, q.object) } else { Triple::new(q.subject, q.predicate, e) };
                if c == *q || known.contains(&c) {
                    continue;
                }
                above += (t.scores[&c] > target) as usize;
                tied += (t.scores[&c] == target) as usize;
            }
            sum += 1.0 / (1.0 + above as f64 + tied as f64 / 2.0);
        }
    }
    sum / (2 * test.len()) as f64
}

fn criterion_7(umls43: &KnowledgeGraph) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=8usize);
        let r = rng.random_range(1..=3usize);
        let mut seen = HashSet::new();
        let m = rng.random_range(2..20);
        for _ in 0..m {
            seen.insert(Triple::new(rng.random_range(0..n as u32), rng.random_range(0..r as u32), rng.random_range(0..n as u32)));
        }
        let mut all: Vec<Triple> = seen.iter().copied().collect();
        all.sort();
        let test: Vec<Triple> = all.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
        if test.is_empty() {
            continue;
        }
        let mut scores = HashMap::new();
        for s in 0..n as u32 {
            for p in 0..r as u32 {
                for o in 0..n as u32 {
                    scores.insert(Triple::new(s, p, o), rng.random_range(0..4) as f64);
                }
            }
        }
        let table = Table { n, r, scores };
        let fast = evaluate(&table, &test, &PositiveSet::new(all.iter().copied()), Direction::Both).map(|m| m.mrr);
        if fast != Ok(brute_force(&table, &test, &seen)) {
            mismatches += 1;
        }
    }
    // untrained DistMult, i.e. the initial weights of a zero-epoch run
    let init = InitScheme::XavierNormal;
    let model = init_weights(init, umls43.entity_count(), 32, 0)
        .and_then(|e| Ok((e, init_weights(init, umls43.relation_count(), EmbeddingModel::relation_width(Method::DistMult, 32), 1)?)))
        .and_then(|(e, r)| EmbeddingModel::new(Method::DistMult, e, r));
    let model = match model {
        Ok(m) => m,
        Err(e) => return judged(false, e.to_string()),
    };
    let test = umls43.test();
    let n = umls43.entity_count();
    let raw = evaluate(&model, test, &PositiveSet::new(std::iter::empty()), Direction::Both).map_or(f64::NAN, |m| m.mrr);
    let filtered = evaluate(&model, test, &umls43.all_positive_set(), Direction::Both).map_or(f64::NAN, |m| m.mrr);
    let baseline = random_baseline_mrr(n).unwrap_or(f64::NAN);
    // a uniform ranker over the c candidates left after filtering scores H_c / c
    let known: HashSet<Triple> = umls43.all_triples().copied().collect();
    let harmonic = |c: usize| (1..=c).map(|k| 1.0 / k as f64).sum::<f64>() / c as f64;
    let mut filtered_baseline = 0.0;
    for q in test {
        for subject_side in [true, false] {
            let survivors = (0..n as u32)
                .filter(|&e| {
                    let c = if subject_side { Triple::new(e, q.predicate, q.object) } else { Triple::new(q.subject, q.predicate, e) };
                    c == *q || !known.contains(&c)
                })
                .count();
            filtered_baseline += harmonic(survivors);
        }
    }
    filtered_baseline /= (2 * test.len()) as f64;
    let near = |x: f64, b: f64| (x - b).abs() <= 0.5 * b;
    judged(
        mismatches == 0 && near(raw, baseline) && near(filtered, filtered_baseline),
        format!(
            "{mismatches} of 100 random graphs disagree with the brute-force ranker; untrained DistMult on UMLS-43: raw MRR {raw:.4} \
             vs H_135/135 = {baseline:.4} (ratio {:.2}), filtered MRR {filtered:.4} vs filtered uniform baseline {filtered_baseline:.4} \
             (ratio {:.2})",
            raw / baseline,
            filtered / filtered_baseline
        ),
    )
}

fn read_matrix(path: &Path) -> Result<(Vec<String>, Matrix), String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let labels: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().skip(1).map(str::to_string).collect();
    let d = labels.len();
    let mut m = Matrix::zeros(d, d);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        for k in 0..d {
            m.set(i, k, if rec[k + 1].is_empty() { f64::NAN } else { rec[k + 1].parse().map_err(|_| "bad cell".to_string())? });
        }
    }
    Ok((labels, m))
}

fn criterion_8(work: &Path) -> Outcome {
    let t = Instant::now();
    let data = work.join("umls-43");
    let store = work.join("runs");
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).to_string();
    let sweep = kgsens(
        &["sweep", "--jobs", "distmult:KvsAll:kl", "--trials", "100", "--seed", "0", "--workers", &workers, "--store"],
        &[&store, Path::new("--dataset"), &data],
    );
    if let Err(e) = sweep {
        return judged(false, e);
    }
    let sweep_time = t.elapsed();
    let analysis = work.join("analysis");
    if let Err(e) = kgsens(&["analyze", "--dataset", "umls-43", "--seed", "0", "--store"], &[&store, Path::new("--out"), &analysis]) {
        return judged(false, e);
    }
    let elapsed = t.elapsed();
    let records = match kgsens::store::TrialStore::open(&store) {
        Ok(s) => s.records().to_vec(),
        Err(e) => return judged(false, e.to_string()),
    };
    let completed = records.iter().filter(|r| r.is_completed()).count();
    let best = records.iter().filter_map(|r| r.test_mrr).fold(f64::NEG_INFINITY, f64::max);
    let set = match IndexSet::load(&analysis) {
        Ok(s) => s,
        Err(e) => return judged(false, e.to_string()),
    };
    let s1_sum: f64 = set.s1.iter().sum();
    let continuous = study_space().scalar_columns();
    let (labels, s2) = match read_matrix(&analysis.join(S2_FILE)) {
        Ok(x) => x,
        Err(e) => return judged(false, e),
    };
    let mut worst = 0.0f64;
    let mut cells = 0;
    for i in 0..labels.len() {
        for k in i + 1..labels.len() {
            if continuous[i] && continuous[k] {
                worst = worst.max(s2.get(i, k).abs());
                cells += 1;
            }
        }
    }
    let files = analysis.join(S1_ST_FILE).exists() && analysis.join(S2_FILE).exists();
    let ok = records.len() == 100
        && completed >= 95
        && best >= 0.40
        && files
        && s1_sum <= 1.05
        && worst <= 0.02
        && elapsed < Duration::from_secs(45 * 60);
    judged(
        ok,
        format!(
            "{} trials ({completed} completed) in {:.0}s on {workers} worker(s); best test MRR {best:.4} \
             (baseline x10 = {:.4}); sum s1 {s1_sum:.4}; max |s2| over {cells} continuous pairs {worst:.4}; total {:.0}s",
            records.len(),
            sweep_time.as_secs_f64(),
            10.0 * random_baseline_mrr(135).unwrap_or(f64::NAN),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_9(work: &Path) -> Outcome {
    let analysis = work.join("analysis");
    let Ok(a) = IndexSet::load(&analysis) else {
        return judged(false, "no analysis output to compare");
    };
    let mut b = a.clone();
    b.name = "copy".into();
    let mut flipped = a.clone();
    flipped.name = "flipped".into();
    flipped.s1.iter_mut().for_each(|x| *x = 0.5 - *x);
    let self_r = compare_datasets(&[a.clone(), b]).map(|rows| rows.iter().map(|c| c.r).collect::<Vec<_>>());
    let flip_r = compare_datasets(&[a, flipped]).map(|rows| rows.iter().find(|c| c.order == "s1").map(|c| c.r));
    let self_ok = self_r.as_ref().is_ok_and(|rs| rs.len() == 3 && rs.iter().all(|r| within(*r, 1.0, 1e-12)));
    let flip_ok = flip_r.as_ref().is_ok_and(|r| r.is_some_and(|r| within(r, -1.0, 1e-12)));
    judged(
        self_ok && flip_ok,
        format!(
            "study-scale index values and cross-dataset correlations are not reproducible here and are not targets; \
             compare self-correlation {:?}, sign flip {:?}",
            self_r.map_err(|e| e.to_string()),
            flip_r.map_err(|e| e.to_string())
        ),
    )
}

fn main() -> ExitCode {
    let data = data_dir();
    let umls_dir = data.join("umls");
    let umls = match load_dataset(&umls_dir) {
        Ok(kg) => kg,
        Err(e) => {
            println!("acceptance: cannot load UMLS from {}: {e}", umls_dir.display());
            return ExitCode::FAILURE;
        }
    };
    let work = tempfile::tempdir().expect("temporary directory");
    let report = flag_leaky_relations(&umls, DEFAULT_LEAKAGE_THRESHOLD).expect("leakage audit");
    let umls43 = derive_robust_subset(&umls, &report.flagged_relations).expect("derived graph");

    let mut failures = 0;
    let mut emit = |n: usize, o: Outcome| {
        let tag = match o.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failures += 1;
                "FAIL"
            }
            Verdict::Blocked => "BLOCKED",
        };
        println!("criterion {n}: {tag}: {}", o.detail);
    };
    emit(1, criterion_1(&umls));
    emit(2, criterion_2(&data.join("wn18rr")));
    emit(3, criterion_3(&umls, &umls_dir, work.path()));
    emit(4, criterion_4());
    emit(5, criterion_5());
    emit(6, criterion_6());
    emit(7, criterion_7(&umls43));
    emit(8, criterion_8(work.path()));
    emit(9, criterion_9(work.path()));
    if failures == 0 {
        println!("acceptance: no failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
