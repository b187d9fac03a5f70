//! Cross-dataset comparison of ungrouped indices read back from analysis
//! output directories.

use std::path::Path;

use kgsens_core::matrix::Matrix;
use kgsens_core::sensitivity::{flatten_upper, pearson};

use crate::analysis::{write_csv, S1_ST_FILE, S2_FILE};
use crate::error::{Error, Result};
use crate::io::dataset_name;

pub const CORRELATIONS_FILE: &str = "correlations.csv";

/// Ungrouped indices of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub name: String,
    pub columns: Vec<String>,
    pub s1: Vec<f64>,
    pub st: Vec<f64>,
    pub s2: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub first: String,
    pub second: String,
    /// `s1`, `s2` or `st`.
    pub order: &'static str,
    pub r: f64,
}

fn parse_cell(path: &Path, s: &str) -> Result<f64> {
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse().map_err(|_| Error::format(path, format!("`{s}` is not a number")))
}

fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let header = r.headers().map_err(|e| Error::format(path, e))?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()).map_err(|e| Error::format(path, e)))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

impl IndexSet {
    /// Reads `s1_st.csv` and `s2_matrix.csv` from an analysis directory.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(S1_ST_FILE);
        let (_, rows) = read_rows(&path)?;
        let mut columns = Vec::new();
        let mut s1 = Vec::new();
        let mut st = Vec::new();
        for row in &rows {
            if row.len() < 6 {
                return Err(Error::format(&path, "expected column,group,s1,s1_conf,st,st_conf"));
            }
            columns.push(row[0].clone());
            s1.push(parse_cell(&path, &row[2])?);
            st.push(parse_cell(&path, &row[4])?);
        }
        let path = dir.join(S2_FILE);
        let (header, rows) = read_rows(&path)?;
        let d = columns.len();
        if header.len() != d + 1 || rows.len() != d {
            return Err(Error::format(&path, format!("expected a {d} x {d} matrix")));
        }
        let mut s2 = Matrix::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            for k in 0..d {
                s2.set(i, k, parse_cell(&path, &row[k + 1])?);
            }
        }
        Ok(Self { name: dataset_name(dir), columns, s1, st, s2 })
    }
}

/// Pearson correlation of s1, st and the flattened s2 upper triangle for
/// every pair of sets, in input order.
pub fn compare_datasets(sets: &[IndexSet]) -> Result<Vec<Correlation>> {
    if sets.len() < 2 {
        return Err(Error::Usage("comparison needs at least two index sets".into()));
    }
    for s in &sets[1..] {
        if s.columns != sets[0].columns {
            return Err(Error::Usage(format!(
                "`{}` has {} columns, `{}` has {}; indices must share one encoded space",
                s.name,
                s.columns.len(),
                sets[0].name,
                sets[0].columns.len()
            )));
        }
    }
    let mut out = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let (u, v) = (&sets[a], &sets[b]);
            let orders = [
                ("s1", u.s1.clone(), v.s1.clone()),
                ("s2", flatten_upper(&u.s2)?, flatten_upper(&v.s2)?),
                ("st", u.st.clone(), v.st.clone()),
            ];
            for (order, x, y) in orders {
                out.push(Correlation { first: u.name.clone(), second: v.name.clone(), order, r: pearson(&x, &y)? });
            }
        }
    }
    Ok(out)
}

pub fn write_correlations(path: &Path, rows: &[Correlation]) -> Result<()> {
    write_csv(
        path,
        &["dataset_a", "dataset_b", "order", "r"],
        rows.iter().map(|c| vec![c.first.clone(), c.second.clone(), c.order.to_string(), c.r.to_string()]),
    )
}
