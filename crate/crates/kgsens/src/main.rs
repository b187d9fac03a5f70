use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgsens::analysis::{analyze_dataset, AnalysisOptions};
use kgsens::compare::{compare_datasets, write_correlations, IndexSet, CORRELATIONS_FILE};
use kgsens::config::StudyConfig;
use kgsens::core::audit::{derive_robust_subset, flag_leaky_relations};
use kgsens::io::{dataset_name, load_dataset, write_dataset};
use kgsens::jobs::jobs_from_specs;
use kgsens::store::TrialStore;
use kgsens::sweep::{protocol_trial_count, run_sweep, SweepOptions};
use kgsens::{audit, report, Error, ExitStatus, Result};

#[derive(Parser)]
#[command(name = "kgsens", version, about = "Hyperparameter sensitivity studies for knowledge graph embeddings")]
struct Cli {
    /// Study configuration (search space and fixed constants) in TOML.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Only print warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph statistics and inverse-relation leakage tables.
    Audit {
        dataset: PathBuf,
        /// Output directory [default: <dataset>/audit].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leakage threshold [default: from the configuration].
        #[arg(long)]
        theta: Option<f64>,
        /// BFS sources per component for distances; 0 means exact.
        #[arg(long = "sample-pairs")]
        sample_sources: Option<usize>,
    },
    /// Writes the dataset with its leaky relations removed.
    DeriveRobust {
        dataset: PathBuf,
        #[arg(long)]
        theta: Option<f64>,
        /// Output directory [default: sibling named <dataset>-<relation count>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs trials for one dataset and appends them to the trial store.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        /// `method:training:loss` patterns; `*` matches every name.
        #[arg(long, num_args = 1.., required = true)]
        jobs: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "runs")]
        store: PathBuf,
        /// Use the published trial counts (100 per job, 50 on FB15k-237).
        #[arg(long)]
        paper_protocol: bool,
        /// Stop after this many new trials.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Surrogate fit and Sobol indices for one dataset of the store.
    Analyze {
        /// Dataset name as recorded in the store (a directory path is
        /// reduced to its final component).
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "runs")]
        store: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
        #[arg(long, default_value_t = 2048)]
        base_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory [default: <store>/analysis/<dataset>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise correlation of indices from several analysis directories.
    Compare {
        #[arg(required = true, num_args = 2..)]
        dirs: Vec<PathBuf>,
        #[arg(long, default_value = CORRELATIONS_FILE)]
        out: PathBuf,
    },
    /// Bar and adjacency data for plotting an analysis.
    Report {
        analysis: PathBuf,
        /// Output directory [default: the analysis directory].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(ExitStatus::Usage as u8) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_status() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let study = StudyConfig::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Audit { dataset, out, theta, sample_sources } => {
            let kg = load_dataset(&dataset)?;
            let name = dataset_name(&dataset);
            let out = out.unwrap_or_else(|| dataset.join("audit"));
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            let stats = audit::statistics(&kg, sample_sources)?;
            audit::write_statistics(&out.join(audit::STATISTICS_FILE), &name, &stats)?;
            let report = flag_leaky_relations(&kg, theta.unwrap_or(study.leakage_threshold))?;
            audit::write_leakage(&out, &kg, &report)?;
            let flagged: Vec<&str> = report.flagged_relations.iter().map(|&r| kg.relation_name(r)).collect();
            println!("{name}: {} nodes, {} edges, {} relation types", stats.node_count, stats.edge_count, stats.edge_type_count);
            println!("flagged at theta {}: {:?} ({:.4} of held-out edges)", report.threshold, flagged, report.heldout_coverage);
            println!("wrote {}", out.display());
        }
        Command::DeriveRobust { dataset, theta, out } => {
            let kg = load_dataset(&dataset)?;
            let report = flag_leaky_relations(&kg, theta.unwrap_or(study.leakage_threshold))?;
            let robust = derive_robust_subset(&kg, &report.flagged_relations)?;
            let out = out.unwrap_or_else(|| {
                let name = format!("{}-{}", dataset_name(&dataset), robust.relation_count());
                dataset.parent().unwrap_or(Path::new(".")).join(name)
            });
            write_dataset(&out, &robust)?;
            let flagged: Vec<&str> = report.flagged_relations.iter().map(|&r| kg.relation_name(r)).collect();
            println!("removed {:?}: {} relation types, {} entities", flagged, robust.relation_count(), robust.entity_count());
            println!("wrote {}", out.display());
        }
        Command::Sweep { dataset, jobs, trials, seed, workers, store, paper_protocol, limit } => {
            let kg = load_dataset(&dataset)?;
            let name = dataset_name(&dataset);
            let jobs = jobs_from_specs(&name, &jobs)?;
            let trials = if paper_protocol { protocol_trial_count(&name) } else { trials };
            let mut store = TrialStore::open(&store)?;
            let options = SweepOptions { trials, master_seed: seed, workers, limit };
            let s = run_sweep(&kg, &name, &jobs, &study, options, &mut store)?;
            println!("{name}: ran {} trials ({} failed), {} already stored", s.ran, s.failed, s.skipped);
        }
        Command::Analyze { dataset, store, fraction, base_n, seed, out } => {
            let name = dataset_name(&dataset);
            let out = out.unwrap_or_else(|| store.join("analysis").join(&name));
            let store = TrialStore::open(&store)?;
            let analysis = analyze_dataset(&store, &name, &study.space, AnalysisOptions { fraction, base_n, seed })?;
            analysis.write(&out)?;
            println!(
                "{name}: surrogate on {} of {} trials (R^2 {:.3}), {} design evaluations, sum s1 {:.4}",
                analysis.surrogate.training_rows,
                analysis.completed_trials,
                analysis.surrogate.r_squared,
                analysis.evaluations,
                analysis.indices.s1.iter().sum::<f64>()
            );
            println!("wrote {}", out.display());
        }
        Command::Compare { dirs, out } => {
            let sets = dirs.iter().map(|d| IndexSet::load(d)).collect::<Result<Vec<_>>>()?;
            let rows = compare_datasets(&sets)?;
            write_correlations(&out, &rows)?;
            for c in &rows {
                println!("{} vs {} {}: {:.4}", c.first, c.second, c.order, c.r);
            }
        }
        Command::Report { analysis, out } => {
            let out = out.unwrap_or_else(|| analysis.clone());
            for p in report::write_report(&analysis, &out)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}
