//! Triple-structured knowledge graphs with train/valid/test splits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::{Error, Result};

/// A typed directed edge `(subject, predicate, object)` over dense ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Triple {
    pub subject: u32,
    pub predicate: u32,
    pub object: u32,
}

impl Triple {
    pub const fn new(subject: u32, predicate: u32, object: u32) -> Self {
        Self { subject, predicate, object }
    }

    /// The same edge read in the opposite direction under `predicate`.
    pub const fn reversed(self, predicate: u32) -> Self {
        Self { subject: self.object, predicate, object: self.subject }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub const fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// Which end of a triple is being predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Slot {
    Subject,
    Object,
}

impl Slot {
    pub const fn name(self) -> &'static str {
        match self {
            Slot::Subject => "subject",
            Slot::Object => "object",
        }
    }

    /// The entity at the other end of `t`, i.e. the one kept fixed.
    pub const fn anchor(self, t: Triple) -> u32 {
        match self {
            Slot::Subject => t.object,
            Slot::Object => t.subject,
        }
    }

    /// The entity being predicted.
    pub const fn target(self, t: Triple) -> u32 {
        match self {
            Slot::Subject => t.subject,
            Slot::Object => t.object,
        }
    }

    /// `t` with the predicted entity replaced by `candidate`.
    pub const fn substitute(self, t: Triple, candidate: u32) -> Triple {
        match self {
            Slot::Subject => Triple::new(candidate, t.predicate, t.object),
            Slot::Object => Triple::new(t.subject, t.predicate, candidate),
        }
    }
}

/// An immutable knowledge graph. Ids are dense and were assigned in
/// first-appearance order across train, valid and test.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    entity_names: Vec<String>,
    relation_names: Vec<String>,
    train: Vec<Triple>,
    valid: Vec<Triple>,
    test: Vec<Triple>,
}

impl KnowledgeGraph {
    /// Assembles a graph from already-interned parts, checking every invariant.
    pub fn from_parts(
        entity_names: Vec<String>,
        relation_names: Vec<String>,
        train: Vec<Triple>,
        valid: Vec<Triple>,
        test: Vec<Triple>,
    ) -> Result<Self> {
        check_unique_names(&entity_names, "entity")?;
        check_unique_names(&relation_names, "relation")?;
        let ne = entity_names.len() as u32;
        let nr = relation_names.len() as u32;
        for (split, triples) in [(Split::Train, &train), (Split::Valid, &valid), (Split::Test, &test)] {
            let mut seen = HashSet::with_capacity(triples.len());
            for (i, t) in triples.iter().enumerate() {
                if t.subject >= ne || t.object >= ne || t.predicate >= nr {
                    return Err(Error::IdOutOfRange(alloc::format!("{:?} in {} split", t, split.name())));
                }
                if !seen.insert(*t) {
                    return Err(Error::DuplicateTriple { split: split.name(), line: i + 1 });
                }
            }
        }
        Ok(Self { entity_names, relation_names, train, valid, test })
    }

    pub fn entity_count(&self) -> usize {
        self.entity_names.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_names.len()
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entity_names
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relation_names
    }

    pub fn entity_name(&self, id: u32) -> &str {
        &self.entity_names[id as usize]
    }

    pub fn relation_name(&self, id: u32) -> &str {
        &self.relation_names[id as usize]
    }

    pub fn relation_id(&self, name: &str) -> Option<u32> {
        self.relation_names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn train(&self) -> &[Triple] {
        &self.train
    }

    pub fn valid(&self) -> &[Triple] {
        &self.valid
    }

    pub fn test(&self) -> &[Triple] {
        &self.test
    }

    /// Sum of the three split sizes.
    pub fn edge_count(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }

    /// Triples in train, valid and test, in that order.
    pub fn all_triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.train.iter().chain(&self.valid).chain(&self.test)
    }

    /// Distinct triples across all splits, first occurrence kept.
    pub fn unique_triples(&self) -> Vec<Triple> {
        let mut seen = HashSet::with_capacity(self.edge_count());
        self.all_triples().copied().filter(|t| seen.insert(*t)).collect()
    }

    /// Triples present in more than one split.
    pub fn cross_split_duplicates(&self) -> usize {
        self.edge_count() - self.unique_triples().len()
    }

    pub fn all_positive_set(&self) -> PositiveSet {
        PositiveSet::new(self.all_triples().copied())
    }

    /// Keeps every entity, drops the triples whose predicate is in `removed`
    /// and re-densifies the remaining relation ids in their original order.
    pub fn without_relations(&self, removed: &[u32]) -> Result<Self> {
        let mut remap = Vec::with_capacity(self.relation_count());
        let mut names = Vec::new();
        for (id, name) in self.relation_names.iter().enumerate() {
            if removed.contains(&(id as u32)) {
                remap.push(None);
            } else {
                remap.push(Some(names.len() as u32));
                names.push(name.clone());
            }
        }
        let filter = |triples: &[Triple]| -> Vec<Triple> {
            triples
                .iter()
                .filter_map(|t| remap[t.predicate as usize].map(|p| Triple::new(t.subject, p, t.object)))
                .collect()
        };
        let train = filter(&self.train);
        let valid = filter(&self.valid);
        let test = filter(&self.test);
        if train.is_empty() && valid.is_empty() && test.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(Self { entity_names: self.entity_names.clone(), relation_names: names, train, valid, test })
    }
}

fn check_unique_names(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::InvalidArgument(alloc::format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

/// Incremental graph construction from named triples.
///
/// Lines are fed split by split; ids are handed out on first sight.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    entities: HashMap<String, u32>,
    entity_names: Vec<String>,
    relations: HashMap<String, u32>,
    relation_names: Vec<String>,
    splits: [Vec<Triple>; 3],
    seen: [HashSet<Triple>; 3],
    cross_split_duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn entity(&mut self, name: &str) -> u32 {
        intern(&mut self.entities, &mut self.entity_names, name)
    }

    fn relation(&mut self, name: &str) -> u32 {
        intern(&mut self.relations, &mut self.relation_names, name)
    }

    /// Registers an entity name ahead of any triple, fixing its id. Used to
    /// restore a saved id map, including entities with no remaining edges.
    pub fn declare_entity(&mut self, name: &str) -> u32 {
        self.entity(name)
    }

    pub fn declare_relation(&mut self, name: &str) -> u32 {
        self.relation(name)
    }

    /// Adds one named triple. `line` is only used for error messages.
    pub fn push(&mut self, split: Split, subject: &str, relation: &str, object: &str, line: usize) -> Result<Triple> {
        let s = self.entity(subject);
        let p = self.relation(relation);
        let o = self.entity(object);
        let t = Triple::new(s, p, o);
        let idx = split as usize;
        if !self.seen[idx].insert(t) {
            return Err(Error::DuplicateTriple { split: split.name(), line });
        }
        if self.seen.iter().enumerate().any(|(i, s)| i != idx && s.contains(&t)) {
            self.cross_split_duplicates += 1;
        }
        self.splits[idx].push(t);
        Ok(t)
    }

    /// Parses one split in the `subject<TAB>relation<TAB>object` line format.
    /// Blank lines are skipped; a trailing `\r` is tolerated.
    pub fn push_text(&mut self, split: Split, text: &str) -> Result<usize> {
        let mut added = 0;
        for (i, raw) in text.split('\n').enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::MalformedLine { line: i + 1, found: fields.len() });
            }
            self.push(split, fields[0], fields[1], fields[2], i + 1)?;
            added += 1;
        }
        Ok(added)
    }

    /// Number of triples so far that also occur in another split.
    pub fn cross_split_duplicates(&self) -> usize {
        self.cross_split_duplicates
    }

    pub fn finish(self) -> Result<KnowledgeGraph> {
        let [train, valid, test] = self.splits;
        if train.is_empty() {
            return Err(Error::EmptyTrainSplit);
        }
        Ok(KnowledgeGraph {
            entity_names: self.entity_names,
            relation_names: self.relation_names,
            train,
            valid,
            test,
        })
    }
}

fn intern(map: &mut HashMap<String, u32>, names: &mut Vec<String>, name: &str) -> u32 {
    if let Some(&id) = map.get(name) {
        return id;
    }
    let id = names.len() as u32;
    map.insert(name.to_string(), id);
    names.push(name.to_string());
    id
}

/// Membership over every known true triple, with per-query indexes used
/// for filtered ranking and for negative sampling.
#[derive(Debug, Clone, Default)]
pub struct PositiveSet {
    triples: HashSet<Triple>,
    objects: HashMap<(u32, u32), Vec<u32>>,
    subjects: HashMap<(u32, u32), Vec<u32>>,
}

impl PositiveSet {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut set = Self::default();
        for t in triples {
            if set.triples.insert(t) {
                set.objects.entry((t.subject, t.predicate)).or_default().push(t.object);
                set.subjects.entry((t.predicate, t.object)).or_default().push(t.subject);
            }
        }
        for v in set.objects.values_mut().chain(set.subjects.values_mut()) {
            v.sort_unstable();
        }
        set
    }

    #[inline]
    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Sorted true objects of `(subject, predicate, ?)`.
    pub fn objects(&self, subject: u32, predicate: u32) -> &[u32] {
        self.objects.get(&(subject, predicate)).map_or(&[], Vec::as_slice)
    }

    /// Sorted true subjects of `(?, predicate, object)`.
    pub fn subjects(&self, predicate: u32, object: u32) -> &[u32] {
        self.subjects.get(&(predicate, object)).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// Known true entities for the predicted `slot` given its anchor.
    pub fn completions(&self, anchor: u32, relation: u32, slot: Slot) -> &[u32] {
        match slot {
            Slot::Object => self.objects(anchor, relation),
            Slot::Subject => self.subjects(relation, anchor),
        }
    }
}
