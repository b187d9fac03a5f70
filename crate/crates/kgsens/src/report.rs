//! Plot-ready data: grouped index bars and the column interaction
//! adjacency list, read back from an analysis directory.

use std::path::{Path, PathBuf};

use crate::analysis::{fmt_cell, write_csv, GROUPED_FILE};
use crate::compare::IndexSet;
use crate::error::{Error, Result};

pub const BARS_FILE: &str = "bars.csv";
pub const INTERACTIONS_FILE: &str = "interactions.csv";

/// Writes `bars.csv` (group, order, value) and `interactions.csv` (every
/// upper-triangle column pair, strongest first) into `out`.
pub fn write_report(analysis_dir: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let grouped_path = analysis_dir.join(GROUPED_FILE);
    let mut reader = csv::Reader::from_path(&grouped_path).map_err(|e| Error::format(&grouped_path, e))?;
    let mut bars = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::format(&grouped_path, e))?;
        if rec.len() != 3 {
            return Err(Error::format(&grouped_path, "expected group,s1,st"));
        }
        bars.push(vec![rec[0].to_string(), "s1".into(), rec[1].to_string()]);
        bars.push(vec![rec[0].to_string(), "st".into(), rec[2].to_string()]);
    }
    let bars_path = out.join(BARS_FILE);
    write_csv(&bars_path, &["group", "order", "value"], bars)?;

    let set = IndexSet::load(analysis_dir)?;
    let d = set.columns.len();
    let mut edges: Vec<(usize, usize, f64)> =
        (0..d).flat_map(|i| (i + 1..d).map(move |k| (i, k))).map(|(i, k)| (i, k, set.s2.get(i, k))).collect();
    edges.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()).then((a.0, a.1).cmp(&(b.0, b.1))));
    let edges_path = out.join(INTERACTIONS_FILE);
    write_csv(
        &edges_path,
        &["source", "target", "s2"],
        edges.into_iter().map(|(i, k, v)| vec![set.columns[i].clone(), set.columns[k].clone(), fmt_cell(v)]),
    )?;
    Ok(vec![bars_path, edges_path])
}
