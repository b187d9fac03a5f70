//! Dataset directories: `train.txt`, `valid.txt` and `test.txt`, one
//! tab-separated `subject relation object` triple per line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use kgsens_core::{GraphBuilder, KnowledgeGraph, Split};

use crate::error::{Error, Result};

pub fn split_file_name(split: Split) -> &'static str {
    match split {
        Split::Train => "train.txt",
        Split::Valid => "valid.txt",
        Split::Test => "test.txt",
    }
}

fn split_path(dir: &Path, split: Split) -> PathBuf {
    let txt = dir.join(split_file_name(split));
    if txt.exists() {
        return txt;
    }
    let tsv = txt.with_extension("tsv");
    if tsv.exists() {
        tsv
    } else {
        txt
    }
}

/// Reads the three splits of a dataset directory. Entity and relation ids
/// follow first appearance across train, valid and test, unless the
/// directory carries `entity_ids.tsv` / `relation_ids.tsv`, whose order wins
/// (this keeps entities that lost all their edges in a derived variant).
pub fn load_dataset(dir: &Path) -> Result<KnowledgeGraph> {
    let mut builder = GraphBuilder::new();
    for (file, entity) in [("entity_ids.tsv", true), ("relation_ids.tsv", false)] {
        let path = dir.join(file);
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (id, name) = line.split_once('\t').ok_or_else(|| Error::format(&path, format!("line {}: expected `id<TAB>name`", i + 1)))?;
            let assigned = if entity { builder.declare_entity(name) } else { builder.declare_relation(name) };
            if id.trim().parse::<u32>().ok() != Some(assigned) {
                return Err(Error::format(&path, format!("line {}: ids must be dense and in order", i + 1)));
            }
        }
    }
    for split in Split::ALL {
        let path = split_path(dir, split);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        builder.push_text(split, &text).map_err(|source| Error::Data { path: path.clone(), source })?;
    }
    if builder.cross_split_duplicates() > 0 {
        log::warn!("{}: {} triples appear in more than one split", dir.display(), builder.cross_split_duplicates());
    }
    builder.finish().map_err(|source| Error::Data { path: dir.to_path_buf(), source })
}

/// Writes `kg` in canonical form plus `entity_ids.tsv` and
/// `relation_ids.tsv` (`id<TAB>name`).
pub fn write_dataset(dir: &Path, kg: &KnowledgeGraph) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for split in Split::ALL {
        let path = dir.join(split_file_name(split));
        write_lines(&path, kg.split(split).iter().map(|t| {
            format!("{}\t{}\t{}", kg.entity_name(t.subject), kg.relation_name(t.predicate), kg.entity_name(t.object))
        }))?;
    }
    write_lines(&dir.join("entity_ids.tsv"), kg.entity_names().iter().enumerate().map(|(i, n)| format!("{i}\t{n}")))?;
    write_lines(&dir.join("relation_ids.tsv"), kg.relation_names().iter().enumerate().map(|(i, n)| format!("{i}\t{n}")))?;
    Ok(())
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Dataset name used in records and reports: the directory's final
/// component.
pub fn dataset_name(dir: &Path) -> String {
    dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned())
}
