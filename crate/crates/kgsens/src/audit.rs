//! File outputs for graph statistics and the leakage audit.

use std::path::{Path, PathBuf};

use kgsens_core::audit::{graph_statistics_with, BfsSummary, GraphStatistics, LeakageReport, SimpleGraph, StatsOptions};
use kgsens_core::KnowledgeGraph;
use rayon::prelude::*;

use crate::analysis::write_csv;
use crate::error::Result;

pub const STATISTICS_FILE: &str = "statistics.csv";
pub const LEAKAGE_FILE: &str = "leakage.csv";
pub const FLAGGED_FILE: &str = "flagged_relations.csv";

/// Components above this size use sampled BFS sources by default.
pub const EXACT_DISTANCE_LIMIT: usize = 20_000;
pub const DEFAULT_SAMPLE_SOURCES: usize = 1024;

/// BFS runner that spreads sources over the rayon pool, keeping order.
pub fn parallel_bfs(graph: &SimpleGraph, sources: &[u32]) -> Vec<BfsSummary> {
    sources
        .par_chunks(64)
        .flat_map_iter(|chunk| {
            let mut dist = Vec::new();
            let mut queue = std::collections::VecDeque::new();
            chunk.iter().map(move |&s| graph.bfs(s, &mut dist, &mut queue)).collect::<Vec<_>>()
        })
        .collect()
}

/// Statistics with parallel BFS. `sample_sources` of `None` picks exact
/// distances up to [`EXACT_DISTANCE_LIMIT`] nodes per component and
/// [`DEFAULT_SAMPLE_SOURCES`] evenly spaced sources above it; `Some(0)`
/// forces exact distances everywhere.
pub fn statistics(kg: &KnowledgeGraph, sample_sources: Option<usize>) -> Result<GraphStatistics> {
    let sample = match sample_sources {
        None if kg.entity_count() > EXACT_DISTANCE_LIMIT => Some(DEFAULT_SAMPLE_SOURCES),
        None | Some(0) => None,
        other => other,
    };
    Ok(graph_statistics_with(kg, StatsOptions { sample_sources: sample }, &parallel_bfs)?)
}

/// Single-row CSV in table order. The distance-family fields carry a
/// calibration flag; `distances_sampled` records whether BFS was sampled.
pub fn write_statistics(path: &Path, dataset: &str, stats: &GraphStatistics) -> Result<()> {
    let mut header = vec!["dataset"];
    header.extend(GraphStatistics::FIELD_NAMES);
    header.extend(["distance fields calibrated", "distances sampled"]);
    let mut row = vec![dataset.to_string()];
    row.extend(stats.values().iter().map(|v| v.to_string()));
    row.push("calibrated on UMLS".into());
    row.push(stats.distances_sampled.to_string());
    write_csv(path, &header, [row])
}

/// Overlap table (`relation, inverse, direction, overlap, support`) and
/// the flagged relation list with held-out coverage.
pub fn write_leakage(dir: &Path, kg: &KnowledgeGraph, report: &LeakageReport) -> Result<Vec<PathBuf>> {
    let leakage = dir.join(LEAKAGE_FILE);
    write_csv(
        &leakage,
        &["relation", "inverse", "direction", "overlap", "support"],
        report.overlap_pairs.iter().map(|p| {
            vec![
                kg.relation_name(p.relation).to_string(),
                kg.relation_name(p.inverse).to_string(),
                p.basis.name().to_string(),
                p.overlap.to_string(),
                p.support.to_string(),
            ]
        }),
    )?;
    let flagged = dir.join(FLAGGED_FILE);
    write_csv(
        &flagged,
        &["relation", "threshold", "basis", "heldout_coverage"],
        report.flagged_relations.iter().map(|&r| {
            vec![
                kg.relation_name(r).to_string(),
                report.threshold.to_string(),
                report.basis.name().to_string(),
                report.heldout_coverage.to_string(),
            ]
        }),
    )?;
    Ok(vec![leakage, flagged])
}
