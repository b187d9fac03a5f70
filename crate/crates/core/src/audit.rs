//! Whole-graph statistics and inverse-relation leakage auditing.
//!
//! Statistics are computed over the union of all three splits. Degree is
//! in-degree plus out-degree on the multigraph; components are weakly
//! connected. Diameter, mean distance and vertex connectivity are taken on
//! the undirected simple projection of each component (self-loops and
//! parallel edges collapsed) and then averaged over components.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, Triple};

/// The fourteen per-dataset characteristics, in table row order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraphStatistics {
    pub node_count: usize,
    pub edge_count: usize,
    pub edge_type_count: usize,
    pub density: f64,
    pub component_count: usize,
    pub mean_component_diameter: f64,
    pub mean_component_distance: f64,
    pub mean_component_connectivity: f64,
    pub mean_degree: f64,
    pub median_degree: f64,
    pub max_degree: usize,
    pub std_degree: f64,
    pub skewness_degree: f64,
    pub kurtosis_degree: f64,
    /// True when the distance family was estimated from sampled BFS sources.
    pub distances_sampled: bool,
}

impl GraphStatistics {
    pub const FIELD_NAMES: [&'static str; 14] = [
        "node count",
        "edge count",
        "edge type count",
        "density",
        "component count",
        "mean component diameter",
        "mean component distance",
        "mean component connectivity",
        "mean node degree",
        "median node degree",
        "maximum node degree",
        "standard deviation of node degree",
        "skewness of node degree",
        "kurtosis of node degree",
    ];

    /// Field values in `FIELD_NAMES` order.
    pub fn values(&self) -> [f64; 14] {
        [
            self.node_count as f64,
            self.edge_count as f64,
            self.edge_type_count as f64,
            self.density,
            self.component_count as f64,
            self.mean_component_diameter,
            self.mean_component_distance,
            self.mean_component_connectivity,
            self.mean_degree,
            self.median_degree,
            self.max_degree as f64,
            self.std_degree,
            self.skewness_degree,
            self.kurtosis_degree,
        ]
    }
}

/// `|E| / (|V| (|V| - 1) |R|)`: the fraction of possible typed directed
/// edges without self-loops that are present.
pub fn density(nodes: usize, edges: usize, edge_types: usize) -> f64 {
    if nodes < 2 || edge_types == 0 {
        return 0.0;
    }
    edges as f64 / (nodes as f64 * (nodes as f64 - 1.0) * edge_types as f64)
}

/// Population moments of a degree sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeMoments {
    pub mean: f64,
    pub median: f64,
    pub max: usize,
    pub std: f64,
    /// Third standardized moment (biased).
    pub skewness: f64,
    /// Fourth standardized moment minus 3 (biased).
    pub excess_kurtosis: f64,
}

pub fn degree_moments(degrees: &[usize]) -> Result<DegreeMoments> {
    if degrees.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = degrees.len() as f64;
    let mean = degrees.iter().sum::<usize>() as f64 / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &d in degrees {
        let x = d as f64 - mean;
        let x2 = x * x;
        m2 += x2;
        m3 += x2 * x;
        m4 += x2 * x2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, excess_kurtosis) = if m2 > 0.0 { (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0) } else { (0.0, 0.0) };
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 { sorted[mid] as f64 } else { (sorted[mid - 1] + sorted[mid]) as f64 / 2.0 };
    Ok(DegreeMoments { mean, median, max: *sorted.last().unwrap(), std: m2.sqrt(), skewness, excess_kurtosis })
}

/// Undirected simple graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl SimpleGraph {
    /// Collapses direction, edge type, parallel edges and self-loops.
    pub fn from_triples<'a>(nodes: usize, triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nodes];
        for t in triples {
            if t.subject != t.object {
                adj[t.subject as usize].push(t.object);
                adj[t.object as usize].push(t.subject);
            }
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Connected components, each a sorted list of nodes, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n as u32 {
            if label[start as usize] != u32::MAX {
                continue;
            }
            let id = out.len() as u32;
            let mut members = vec![start];
            label[start as usize] = id;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Induced subgraph on `nodes` (sorted), relabelled to `0..nodes.len()`.
    pub fn induced(&self, nodes: &[u32]) -> SimpleGraph {
        let adj = nodes
            .iter()
            .map(|&v| self.neighbors(v).iter().filter_map(|w| nodes.binary_search(w).ok().map(|i| i as u32)).collect())
            .collect();
        Self::from_adjacency(adj)
    }

    /// Breadth-first search from `source` over the whole graph.
    pub fn bfs(&self, source: u32, dist: &mut Vec<u32>, queue: &mut VecDeque<u32>) -> BfsSummary {
        dist.clear();
        dist.resize(self.node_count(), u32::MAX);
        queue.clear();
        dist[source as usize] = 0;
        queue.push_back(source);
        let mut summary = BfsSummary { eccentricity: 0, distance_sum: 0, reached: 1 };
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            for &w in self.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    let dw = dv + 1;
                    dist[w as usize] = dw;
                    summary.eccentricity = summary.eccentricity.max(dw);
                    summary.distance_sum += dw as u64;
                    summary.reached += 1;
                    queue.push_back(w);
                }
            }
        }
        summary
    }
}

/// What one BFS contributes to diameter and mean-distance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BfsSummary {
    pub eccentricity: u32,
    pub distance_sum: u64,
    /// Nodes reached, the source included.
    pub reached: u64,
}

/// Runs a BFS from every source in `sources`; the default, sequential runner.
pub fn run_bfs_sequential(graph: &SimpleGraph, sources: &[u32]) -> Vec<BfsSummary> {
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    sources.iter().map(|&s| graph.bfs(s, &mut dist, &mut queue)).collect()
}

/// Tuning for [`graph_statistics_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatsOptions {
    /// When set, components larger than this use only this many evenly
    /// spaced BFS sources for diameter and mean distance.
    pub sample_sources: Option<usize>,
}

pub fn graph_statistics(kg: &KnowledgeGraph) -> Result<GraphStatistics> {
    graph_statistics_with(kg, StatsOptions::default(), &run_bfs_sequential)
}

/// Like [`graph_statistics`], with a caller-supplied BFS runner (for example
/// one that fans sources out over a thread pool). The runner must return one
/// summary per source, in source order.
pub fn graph_statistics_with(
    kg: &KnowledgeGraph,
    options: StatsOptions,
    bfs_runner: &dyn Fn(&SimpleGraph, &[u32]) -> Vec<BfsSummary>,
) -> Result<GraphStatistics> {
    let nodes = kg.entity_count();
    let edges = kg.edge_count();
    if nodes == 0 || edges == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut degree = vec![0usize; nodes];
    for t in kg.all_triples() {
        degree[t.subject as usize] += 1;
        degree[t.object as usize] += 1;
    }
    let moments = degree_moments(&degree)?;

    let simple = SimpleGraph::from_triples(nodes, kg.all_triples());
    let components = simple.components();
    let mut diameter_sum = 0.0;
    let mut distance_sum = 0.0;
    let mut connectivity_sum = 0.0;
    let mut sampled = false;
    for members in &components {
        let sub = simple.induced(members);
        let n = sub.node_count();
        let sources: Vec<u32> = match options.sample_sources {
            Some(k) if k > 0 && n > k => {
                sampled = true;
                (0..k).map(|i| ((i * n) / k) as u32).collect()
            }
            _ => (0..n as u32).collect(),
        };
        let summaries = bfs_runner(&sub, &sources);
        debug_assert_eq!(summaries.len(), sources.len());
        let diameter = summaries.iter().map(|s| s.eccentricity).max().unwrap_or(0);
        let total: u64 = summaries.iter().map(|s| s.distance_sum).sum();
        let pairs: u64 = summaries.iter().map(|s| s.reached - 1).sum();
        diameter_sum += diameter as f64;
        distance_sum += if pairs > 0 { total as f64 / pairs as f64 } else { 0.0 };
        connectivity_sum += vertex_connectivity(&sub) as f64;
    }
    let c = components.len() as f64;
    Ok(GraphStatistics {
        node_count: nodes,
        edge_count: edges,
        edge_type_count: kg.relation_count(),
        density: density(nodes, edges, kg.relation_count()),
        component_count: components.len(),
        mean_component_diameter: diameter_sum / c,
        mean_component_distance: distance_sum / c,
        mean_component_connectivity: connectivity_sum / c,
        mean_degree: moments.mean,
        median_degree: moments.median,
        max_degree: moments.max,
        std_degree: moments.std,
        skewness_degree: moments.skewness,
        kurtosis_degree: moments.excess_kurtosis,
        distances_sampled: sampled,
    })
}

/// Vertex connectivity of a connected simple graph: the fewest vertices
/// whose removal disconnects it (`n - 1` for complete graphs, 0 for a
/// single vertex).
pub fn vertex_connectivity(g: &SimpleGraph) -> usize {
    let n = g.node_count();
    if n <= 1 {
        return 0;
    }
    let (v, min_degree) = (0..n as u32).map(|v| (v, g.degree(v))).min_by_key(|&(_, d)| d).unwrap();
    if min_degree == n - 1 {
        return n - 1;
    }
    if min_degree <= 1 {
        return min_degree;
    }
    // Esfahanian-Hakimi: some minimum separator avoids either v or all but
    // one pair of its neighbours.
    let mut flow = VertexFlow::new(g);
    let mut best = min_degree;
    for w in 0..n as u32 {
        if w != v && !g.is_adjacent(v, w) {
            best = best.min(flow.local_connectivity(g, v, w, best));
            if best <= 1 {
                return best;
            }
        }
    }
    let nbrs = g.neighbors(v);
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.is_adjacent(x, y) {
                best = best.min(flow.local_connectivity(g, x, y, best));
                if best <= 1 {
                    return best;
                }
            }
        }
    }
    best
}

/// Unit-capacity flow network on the vertex-split graph.
struct VertexFlow {
    // node 2v = v_in, 2v+1 = v_out
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<u32>,
    cap: Vec<u32>,
    initial: Vec<u32>,
}

impl VertexFlow {
    const NONE: usize = usize::MAX;

    fn new(g: &SimpleGraph) -> Self {
        let n = g.node_count();
        let mut f = Self { head: vec![Self::NONE; 2 * n], next: Vec::new(), to: Vec::new(), cap: Vec::new(), initial: Vec::new() };
        for v in 0..n as u32 {
            f.add_arc(2 * v, 2 * v + 1, 1);
            for &w in g.neighbors(v) {
                f.add_arc(2 * v + 1, 2 * w, n as u32);
            }
        }
        f.initial = f.cap.clone();
        f
    }

    fn add_arc(&mut self, a: u32, b: u32, c: u32) {
        for (from, to, cap) in [(a, b, c), (b, a, 0)] {
            self.to.push(to);
            self.cap.push(cap);
            self.next.push(self.head[from as usize]);
            self.head[from as usize] = self.to.len() - 1;
        }
    }

    /// Number of internally vertex-disjoint s-t paths, counting at most `cutoff`.
    fn local_connectivity(&mut self, g: &SimpleGraph, s: u32, t: u32, cutoff: usize) -> usize {
        self.cap.copy_from_slice(&self.initial);
        let n = g.node_count();
        let source = 2 * s + 1;
        let sink = 2 * t;
        let mut paths = 0;
        let mut parent = vec![Self::NONE; 2 * n];
        let mut queue = VecDeque::new();
        while paths < cutoff {
            parent.iter_mut().for_each(|p| *p = Self::NONE);
            queue.clear();
            queue.push_back(source);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut e = self.head[u as usize];
                while e != Self::NONE {
                    let w = self.to[e];
                    if self.cap[e] > 0 && w != source && parent[w as usize] == Self::NONE {
                        parent[w as usize] = e;
                        if w == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                    e = self.next[e];
                }
            }
            if !found {
                break;
            }
            let mut w = sink;
            while w != source {
                let e = parent[w as usize];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                w = self.to[e ^ 1];
            }
            paths += 1;
        }
        paths
    }
}

/// Which triples are inspected and where their inverses are looked up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum OverlapBasis {
    /// Valid and test triples checked against train.
    HeldOut,
    /// Every triple checked against every triple (all splits).
    WholeGraph,
}

impl OverlapBasis {
    pub const fn name(self) -> &'static str {
        match self {
            OverlapBasis::HeldOut => "heldout",
            OverlapBasis::WholeGraph => "whole",
        }
    }
}

/// Fraction of `relation` triples `(s, relation, o)` whose reverse
/// `(o, inverse, s)` exists.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OverlapPair {
    pub relation: u32,
    pub inverse: u32,
    pub basis: OverlapBasis,
    pub overlap: f64,
    /// Number of `relation` triples inspected.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    pub overlap_pairs: Vec<OverlapPair>,
    /// Sorted relation ids.
    pub flagged_relations: Vec<u32>,
    /// Fraction of valid and test triples whose relation is flagged.
    pub heldout_coverage: f64,
    pub threshold: f64,
    pub basis: OverlapBasis,
}

/// Threshold that flags exactly `degree_of`, `precedes` and `derivative_of`
/// on UMLS under [`OverlapBasis::WholeGraph`] (their overlaps are 1.0, 0.986
/// and 1.0; the next highest relation sits at 0.955).
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 0.98;

fn overlap_table(kg: &KnowledgeGraph, basis: OverlapBasis) -> Vec<OverlapPair> {
    let (inspected, reference): (Vec<Triple>, Vec<Triple>) = match basis {
        OverlapBasis::HeldOut => {
            let mut seen = HashSet::new();
            let held = kg.valid().iter().chain(kg.test()).copied().filter(|t| seen.insert(*t)).collect();
            (held, kg.train().to_vec())
        }
        OverlapBasis::WholeGraph => {
            let all = kg.unique_triples();
            (all.clone(), all)
        }
    };
    // (subject, object) -> relations on that ordered pair
    let mut by_pair: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for t in &reference {
        by_pair.entry((t.subject, t.object)).or_default().push(t.predicate);
    }
    let mut support = vec![0usize; kg.relation_count()];
    let mut hits: HashMap<(u32, u32), usize> = HashMap::new();
    for t in &inspected {
        support[t.predicate as usize] += 1;
        if let Some(rels) = by_pair.get(&(t.object, t.subject)) {
            let mut rels = rels.clone();
            rels.sort_unstable();
            rels.dedup();
            for r in rels {
                *hits.entry((t.predicate, r)).or_default() += 1;
            }
        }
    }
    let mut pairs: Vec<OverlapPair> = hits
        .into_iter()
        .map(|((r, inv), h)| OverlapPair {
            relation: r,
            inverse: inv,
            basis,
            overlap: h as f64 / support[r as usize] as f64,
            support: support[r as usize],
        })
        .collect();
    pairs.sort_by(|a, b| (a.relation, a.inverse).cmp(&(b.relation, b.inverse)));
    pairs
}

/// Every relation pair with non-zero inverse overlap, for both bases
/// (held-out rows first). Pairs are sorted by `(relation, inverse)`.
pub fn inverse_overlap(kg: &KnowledgeGraph) -> Vec<OverlapPair> {
    let mut out = overlap_table(kg, OverlapBasis::HeldOut);
    out.extend(overlap_table(kg, OverlapBasis::WholeGraph));
    out
}

/// Flags with [`OverlapBasis::WholeGraph`].
pub fn flag_leaky_relations(kg: &KnowledgeGraph, threshold: f64) -> Result<LeakageReport> {
    flag_leaky_relations_with(kg, threshold, OverlapBasis::WholeGraph)
}

/// A relation is flagged when its largest overlap with any relation
/// (itself included) under `basis` reaches `threshold`.
pub fn flag_leaky_relations_with(kg: &KnowledgeGraph, threshold: f64, basis: OverlapBasis) -> Result<LeakageReport> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("leakage threshold {threshold} not in (0, 1]")));
    }
    let overlap_pairs = inverse_overlap(kg);
    let mut flagged: Vec<u32> = overlap_pairs
        .iter()
        .filter(|p| p.basis == basis && p.overlap >= threshold)
        .map(|p| p.relation)
        .collect();
    flagged.sort_unstable();
    flagged.dedup();
    let mut held = 0usize;
    let mut hit = 0usize;
    for t in kg.valid().iter().chain(kg.test()) {
        held += 1;
        if flagged.binary_search(&t.predicate).is_ok() {
            hit += 1;
        }
    }
    let heldout_coverage = if held == 0 { 0.0 } else { hit as f64 / held as f64 };
    Ok(LeakageReport { overlap_pairs, flagged_relations: flagged, heldout_coverage, threshold, basis })
}

/// Removes every triple of a flagged relation from all splits. Entities are
/// kept; relation ids are re-densified with their names preserved.
pub fn derive_robust_subset(kg: &KnowledgeGraph, flagged: &[u32]) -> Result<KnowledgeGraph> {
    if let Some(&bad) = flagged.iter().find(|&&r| r as usize >= kg.relation_count()) {
        return Err(Error::IdOutOfRange(alloc::format!("relation {bad}")));
    }
    kg.without_relations(flagged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, Split};

    fn graph(train: &str, valid: &str, test: &str) -> KnowledgeGraph {
        let mut b = GraphBuilder::new();
        b.push_text(Split::Train, train).unwrap();
        b.push_text(Split::Valid, valid).unwrap();
        b.push_text(Split::Test, test).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn single_triple_statistics() {
        let s = graph_statistics(&graph("a\tr\tb\n", "", "")).unwrap();
        assert_eq!(s.node_count, 2);
        assert_eq!(s.edge_count, 1);
        assert_eq!(s.density, 0.5);
        assert_eq!(s.component_count, 1);
        assert_eq!(s.mean_degree, 1.0);
        assert_eq!(s.mean_component_diameter, 1.0);
        assert_eq!(s.mean_component_distance, 1.0);
        assert_eq!(s.mean_component_connectivity, 1.0);
    }

    #[test]
    fn density_matches_published_rows() {
        // node, edge, relation counts and the published density, 3 s.f.
        for (v, e, r, expect) in [(14541, 310116, 237, 6.19e-6), (135, 6529, 46, 7.85e-3), (40943, 93003, 11, 5.04e-6)] {
            let d = density(v, e, r);
            assert!((d - expect).abs() / expect < 0.005, "{d} vs {expect}");
        }
        assert!((density(135, 6529, 46) - 7.846e-3).abs() < 5e-7);
    }

    #[test]
    fn moments_of_a_known_sequence() {
        let m = degree_moments(&[1, 2, 3, 4, 10]).unwrap();
        assert_eq!(m.mean, 4.0);
        assert_eq!(m.median, 3.0);
        assert_eq!(m.max, 10);
        // population variance = (9+4+1+0+36)/5 = 10
        assert!((m.std - 10f64.sqrt()).abs() < 1e-12);
        let m3 = (-27.0 - 8.0 - 1.0 + 0.0 + 216.0) / 5.0;
        assert!((m.skewness - m3 / 10f64.powf(1.5)).abs() < 1e-12);
        let m4 = (81.0 + 16.0 + 1.0 + 0.0 + 1296.0) / 5.0;
        assert!((m.excess_kurtosis - (m4 / 100.0 - 3.0)).abs() < 1e-12);
        assert_eq!(degree_moments(&[1, 3]).unwrap().median, 2.0);
    }

    #[test]
    fn components_are_weak() {
        // a->b, c->b joined weakly; d->e separate
        let s = graph_statistics(&graph("a\tr\tb\nc\tr\tb\nd\tr\te\n", "", "")).unwrap();
        assert_eq!(s.component_count, 2);
        assert_eq!(s.mean_component_diameter, 1.5);
        // path a-b-c: distances 1,2,1 per direction -> 8/6; pair: 1
        assert!((s.mean_component_distance - (8.0 / 6.0 + 1.0) / 2.0).abs() < 1e-12);
    }

    fn simple(n: usize, edges: &[(u32, u32)]) -> SimpleGraph {
        let triples: Vec<Triple> = edges.iter().map(|&(a, b)| Triple::new(a, 0, b)).collect();
        SimpleGraph::from_triples(n, &triples)
    }

    #[test]
    fn connectivity_of_classic_graphs() {
        let cycle: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(vertex_connectivity(&simple(6, &cycle)), 2);
        let mut k5 = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                k5.push((i, j));
            }
        }
        assert_eq!(vertex_connectivity(&simple(5, &k5)), 4);
        assert_eq!(vertex_connectivity(&simple(4, &[(0, 1), (1, 2), (2, 3)])), 1);
        // two triangles sharing vertex 2
        assert_eq!(vertex_connectivity(&simple(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])), 1);
        // K_{3,3}
        let mut k33 = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                k33.push((i, j));
            }
        }
        assert_eq!(vertex_connectivity(&simple(6, &k33)), 3);
        // 3-cube
        let cube: Vec<(u32, u32)> =
            (0..8u32).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|(a, b)| a < b).collect();
        assert_eq!(vertex_connectivity(&simple(8, &cube)), 3);
        assert_eq!(vertex_connectivity(&simple(1, &[])), 0);
    }

    #[test]
    fn overlap_examples() {
        let kg = graph("a\tr\tb\n", "", "b\tq\ta\n");
        let held: Vec<_> = inverse_overlap(&kg).into_iter().filter(|p| p.basis == OverlapBasis::HeldOut).collect();
        assert_eq!(held.len(), 1);
        assert_eq!((kg.relation_name(held[0].relation), kg.relation_name(held[0].inverse)), ("q", "r"));
        assert_eq!(held[0].overlap, 1.0);

        let kg = graph("a\tr\tb\n", "", "b\tq\tc\n");
        assert!(inverse_overlap(&kg).is_empty());
    }

    #[test]
    fn threshold_one_without_perfect_inverses_flags_nothing() {
        let kg = graph("a\tr\tb\nb\tq\ta\nc\tr\td\n", "", "e\tr\tf\n");
        let report = flag_leaky_relations(&kg, 1.0).unwrap();
        // q has a perfect whole-graph inverse in r
        assert_eq!(report.flagged_relations, alloc::vec![1]);
        let kg = graph("a\tr\tb\nc\tr\td\n", "", "b\tq\ta\ne\tq\tf\n");
        assert!(flag_leaky_relations(&kg, 1.0).unwrap().flagged_relations.is_empty());
    }

    #[test]
    fn threshold_bounds() {
        let kg = graph("a\tr\tb\n", "", "");
        assert!(flag_leaky_relations(&kg, 0.0).is_err());
        assert!(flag_leaky_relations(&kg, 1.5).is_err());
        assert!(flag_leaky_relations(&kg, 1.0).is_ok());
    }

    #[test]
    fn heldout_coverage_counts_flagged_relations() {
        let kg = graph("a\tr\tb\nc\ts\td\n", "x\ts\ty\n", "b\tq\ta\nu\ts\tv\n");
        let report = flag_leaky_relations_with(&kg, 1.0, OverlapBasis::HeldOut).unwrap();
        assert_eq!(report.flagged_relations, alloc::vec![kg.relation_id("q").unwrap()]);
        assert!((report.heldout_coverage - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn derive_rejects_unknown_relation() {
        let kg = graph("a\tr\tb\n", "", "");
        assert!(derive_robust_subset(&kg, &[3]).is_err());
        assert_eq!(derive_robust_subset(&kg, &[0]).unwrap_err(), Error::EmptyGraph);
    }
}
